use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// One JSON document per invocation. Everything except `timing` is a
/// function of the argument list and the input files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub args: Vec<String>,
    pub config_hash: String,
    pub verdicts: Vec<Verdict>,
    pub witnesses: Vec<Value>,
    pub result: Value,
    pub timing: Timing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    /// `true`/`false` for decided properties, a number for computed values,
    /// or the string `"unknown"`.
    pub value: Value,
    pub scale: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn new(name: impl Into<String>, value: impl Into<Value>, scale: impl Into<String>) -> Verdict {
        Verdict { name: name.into(), value: value.into(), scale: scale.into(), note: None }
    }

    pub fn unknown(name: impl Into<String>, scale: impl Into<String>, why: impl Into<String>) -> Verdict {
        Verdict { note: Some(why.into()), ..Verdict::new(name, "unknown", scale) }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Verdict {
        self.note = Some(note.into());
        self
    }

    pub fn is_unknown(&self) -> bool {
        self.value == "unknown"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

/// SHA-256 over the command, its arguments and the bytes of every input file.
pub fn config_hash(command: &str, args: &[String], inputs: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    let head = serde_json::json!({ "command": command, "args": args });
    h.update(head.to_string().as_bytes());
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

/// A report with its `timing` field removed, for determinism checks.
pub fn without_timing(json: &str) -> Option<Value> {
    let mut v: Value = serde_json::from_str(json).ok()?;
    v.as_object_mut()?.remove("timing");
    Some(v)
}
