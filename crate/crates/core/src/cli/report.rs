//! Deterministic command reports.

use std::fmt::Write as _;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
}

/// Ordered key/value pairs, serialized as a JSON object in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Values(pub Vec<(String, String)>);

impl Serialize for Values {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub subject: String,
    pub status: Status,
    pub values: Values,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub id: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<Warning>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emitted: Option<serde_json::Value>,
}

/// SHA-256 over length-prefixed parts, hex encoded.
pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

impl Report {
    pub fn new(command: &str, inputs_digest: String) -> Report {
        Report {
            command: command.to_string(),
            inputs_digest,
            verdicts: Vec::new(),
            warnings: Vec::new(),
            emitted: None,
        }
    }

    pub fn push<K: ToString, V: ToString>(
        &mut self,
        subject: impl Into<String>,
        status: Status,
        values: impl IntoIterator<Item = (K, V)>,
    ) {
        self.verdicts.push(Verdict {
            subject: subject.into(),
            status,
            values: Values(
                values
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect(),
            ),
        });
    }

    pub fn warn(&mut self, id: &str, message: impl Into<String>) {
        self.warnings.push(Warning {
            id: id.to_string(),
            message: message.into(),
        });
    }

    pub fn has_warning(&self, id: &str) -> bool {
        self.warnings.iter().any(|w| w.id == id)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.status != Status::Fail)
    }

    pub fn verdict(&self, subject: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.subject == subject)
    }

    pub fn value(&self, subject: &str, key: &str) -> Option<&str> {
        self.verdict(subject)?
            .values
            .0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).unwrap();
        writeln!(out, "inputs:  {}", self.inputs_digest).unwrap();
        for v in &self.verdicts {
            let vals: Vec<String> = v.values.0.iter().map(|(k, x)| format!("{k}={x}")).collect();
            if vals.is_empty() {
                writeln!(out, "{} {}", v.status.tag(), v.subject).unwrap();
            } else {
                writeln!(out, "{} {}: {}", v.status.tag(), v.subject, vals.join(" ")).unwrap();
            }
        }
        for w in &self.warnings {
            writeln!(out, "WARN {}: {}", w.id, w.message).unwrap();
        }
        let result = if self.passed() { "pass" } else { "fail" };
        writeln!(out, "result: {result}").unwrap();
        out
    }
}
