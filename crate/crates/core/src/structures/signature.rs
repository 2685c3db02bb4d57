use crate::error::{Error, Result};

pub type SortId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelSym {
    pub name: String,
    pub sorts: Vec<SortId>,
}

impl RelSym {
    pub fn arity(&self) -> usize {
        self.sorts.len()
    }
}

/// A function symbol. Partial functions may take the sentinel value `u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunSym {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
    pub partial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    sorts: Vec<String>,
    relations: Vec<RelSym>,
    functions: Vec<FunSym>,
}

impl Default for Signature {
    fn default() -> Self {
        Signature::one_sorted()
    }
}

impl Signature {
    pub fn with_sorts<S: Into<String>>(sorts: impl IntoIterator<Item = S>) -> Result<Self> {
        let sorts: Vec<String> = sorts.into_iter().map(Into::into).collect();
        if sorts.is_empty() {
            return Err(Error::Signature("a signature needs at least one sort".into()));
        }
        for (i, s) in sorts.iter().enumerate() {
            if sorts[..i].contains(s) {
                return Err(Error::Signature(format!("duplicate sort `{s}`")));
            }
        }
        Ok(Signature { sorts, relations: Vec::new(), functions: Vec::new() })
    }

    /// The single sort `main`, no symbols.
    pub fn one_sorted() -> Self {
        Signature { sorts: vec!["main".into()], relations: Vec::new(), functions: Vec::new() }
    }

    /// One-sorted relational signature from `(name, arity)` pairs.
    pub fn relational(rels: &[(&str, usize)]) -> Self {
        let mut sig = Signature::one_sorted();
        for &(name, arity) in rels {
            sig.add_relation(name, vec![0; arity]).expect("distinct relation names");
        }
        sig
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if self.relation_index(name).is_some() || self.function_index(name).is_some() {
            return Err(Error::Signature(format!("symbol `{name}` declared twice")));
        }
        Ok(())
    }

    fn check_sort(&self, s: SortId) -> Result<()> {
        if s >= self.sorts.len() {
            return Err(Error::Signature(format!("sort index {s} out of range")));
        }
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, sorts: Vec<SortId>) -> Result<usize> {
        self.check_fresh(name)?;
        for &s in &sorts {
            self.check_sort(s)?;
        }
        self.relations.push(RelSym { name: name.into(), sorts });
        Ok(self.relations.len() - 1)
    }

    pub fn add_function(
        &mut self,
        name: &str,
        args: Vec<SortId>,
        result: SortId,
        partial: bool,
    ) -> Result<usize> {
        self.check_fresh(name)?;
        for &s in args.iter().chain(std::iter::once(&result)) {
            self.check_sort(s)?;
        }
        self.functions.push(FunSym { name: name.into(), args, result, partial });
        Ok(self.functions.len() - 1)
    }

    pub fn sorts(&self) -> &[String] {
        &self.sorts
    }

    pub fn sort_count(&self) -> usize {
        self.sorts.len()
    }

    pub fn sort_index(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s == name)
    }

    pub fn relations(&self) -> &[RelSym] {
        &self.relations
    }

    pub fn functions(&self) -> &[FunSym] {
        &self.functions
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|f| f.name == name)
    }

    pub fn is_one_sorted(&self) -> bool {
        self.sorts.len() == 1
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(RelSym::arity).max().unwrap_or(0)
    }
}
