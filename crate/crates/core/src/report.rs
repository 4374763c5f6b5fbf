//! Verification records: one per check, sorted by id for stable output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "undecidable-at-depth")]
    Undecidable,
    #[serde(rename = "fail")]
    Fail,
}

impl Status {
    pub fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// The worse of two verdicts: fail over undecidable over pass.
    pub fn and(self, other: Status) -> Status {
        self.max(other)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, status: Status) -> Self {
        CheckRecord {
            id: id.into(),
            status,
            params: BTreeMap::new(),
            detail: String::new(),
            witness: None,
        }
    }

    pub fn check(id: impl Into<String>, ok: bool) -> Self {
        CheckRecord::new(id, Status::of(ok))
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("params serialize"));
        self
    }

    pub fn detail(mut self, text: impl Into<String>) -> Self {
        self.detail = text.into();
        self
    }

    /// Attaches a witness; only kept on failing records.
    pub fn witness(mut self, w: impl Serialize) -> Self {
        if self.status != Status::Pass {
            self.witness = Some(serde_json::to_value(w).expect("witness serializes"));
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn extend<I: IntoIterator<Item = CheckRecord>>(&mut self, it: I) {
        self.records.extend(it);
    }

    /// Sorts by id, then by parameters, so assembly order never shows.
    pub fn finish(mut self) -> Self {
        self.records.sort_by(|a, b| {
            a.id.cmp(&b.id).then_with(|| {
                serde_json::to_string(&a.params)
                    .unwrap_or_default()
                    .cmp(&serde_json::to_string(&b.params).unwrap_or_default())
            })
        });
        self
    }

    pub fn status(&self) -> Status {
        self.records
            .iter()
            .fold(Status::Pass, |acc, r| acc.and(r.status))
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn find(&self, id: &str) -> impl Iterator<Item = &CheckRecord> + '_ {
        let id = id.to_string();
        self.records.iter().filter(move |r| r.id == id)
    }

    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Undecidable => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_status_wins() {
        let mut r = Report::new();
        r.push(CheckRecord::check("b", true));
        assert_eq!(r.exit_code(), 0);
        r.push(CheckRecord::new("a", Status::Undecidable));
        assert_eq!(r.exit_code(), 2);
        r.push(CheckRecord::check("c", false).witness([1, 2]));
        assert_eq!(r.exit_code(), 1);
        let r = r.finish();
        let ids: Vec<&str> = r.records.iter().map(|x| x.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert!(r.records[2].witness.is_some());
    }

    #[test]
    fn json_status_names() {
        let r = CheckRecord::new("x", Status::Undecidable).param("depth", 3);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(text, r#"{"id":"x","status":"undecidable-at-depth","params":{"depth":3}}"#);
        let passing = CheckRecord::check("y", true).witness("ignored");
        assert!(passing.witness.is_none());
    }
}
