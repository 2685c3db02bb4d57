use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("signature error: {0}")]
    Signature(String),
    #[error("sort error: {0}")]
    Sort(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exceeded: {what} (limit {limit})")]
    Budget { what: &'static str, limit: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Counts work units against a fixed ceiling.
#[derive(Debug, Clone)]
pub struct Budget {
    what: &'static str,
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(what: &'static str, limit: u64) -> Self {
        Budget { what, limit, used: 0 }
    }

    pub fn unlimited(what: &'static str) -> Self {
        Budget::new(what, u64::MAX)
    }

    #[inline]
    pub fn tick(&mut self) -> Result<()> {
        self.spend(1)
    }

    #[inline]
    pub fn spend(&mut self, n: u64) -> Result<()> {
        self.used = self.used.saturating_add(n);
        if self.used > self.limit {
            Err(Error::Budget { what: self.what, limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}
