//! Law suites: exhaustive and randomized checks of the order, foliage, graft
//! and pipeline laws, each reported as verification records.

pub mod instances;
pub mod oracle;

mod foliage;
mod hybrid;
mod order;
mod pipeline;
mod preserve;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::baire::CompactCode;
use crate::pipeline::Trunc;
use crate::report::{CheckRecord, Report};
use crate::seq::Seq;

pub use pipeline::shoot_lemma_check;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawError {
    #[error("unknown lemma id {0:?}")]
    UnknownLemma(String),
}

/// Sizes and parameters shared by the suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LawConfig {
    pub seed: u64,
    /// Largest forest for the order and hybrid suites.
    pub max_nodes: usize,
    pub max_implants: usize,
    pub tier2_samples: usize,
    pub tier2_depth: usize,
    pub tier2_width: u32,
    pub trunc: Trunc,
    pub compacts: Vec<CompactCode>,
    /// Window of the pipeline hybrid for the end-to-end suite.
    pub hybrid_depth: usize,
    pub hybrid_width: u32,
    pub shoot_samples: usize,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            seed: 0,
            max_nodes: 5,
            max_implants: 2,
            tier2_samples: 200,
            tier2_depth: 3,
            tier2_width: 3,
            trunc: Trunc::new(4, 4, 2),
            compacts: default_compacts(),
            hybrid_depth: 5,
            hybrid_width: 4,
            shoot_samples: 50,
        }
    }
}

/// The point `0^ω`, a two-branching code and a point off both.
pub fn default_compacts() -> Vec<CompactCode> {
    vec![
        CompactCode::zero(),
        CompactCode::branching(2, 2),
        CompactCode::singleton(&Seq::from(&[2u32, 1][..])),
    ]
}

type Suite = fn(&LawConfig) -> Vec<CheckRecord>;

const SUITES: &[(&str, Suite)] = &[
    ("lemma-2.6", order::lemma_2_6),
    ("lemma-3.8", foliage::lemma_3_8),
    ("pi-refines", foliage::pi_refines_laws),
    ("lemma-5.4", hybrid::lemma_5_4),
    ("lemma-5.7", hybrid::lemma_5_7),
    ("prop-5.8", hybrid::prop_5_8),
    ("prop-5.10", hybrid::prop_5_10),
    ("lemma-5.11", hybrid::lemma_5_11),
    ("lemma-5.15", preserve::lemma_5_15),
    ("prop-5.17", preserve::prop_5_17),
    ("lemma-6.1", pipeline::lemma_6_1),
    ("lemma-about-shoots", pipeline::lemma_about_shoots),
    ("blueprint", pipeline::blueprint),
    ("pipeline", pipeline::stages),
    ("pi-tree", pipeline::pi_tree),
];

pub fn suite_ids() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|(id, _)| *id)
}

/// Which records of which suite a selector picks.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Selection {
    suite: &'static str,
    filter: Option<Filter>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Filter {
    Exact(String),
    Family(char),
}

impl Filter {
    fn keeps(&self, id: &str) -> bool {
        match self {
            Filter::Exact(x) => id == x,
            Filter::Family(c) => {
                let mut it = id.chars();
                it.next() == Some(*c) && it.as_str().chars().all(|d| d.is_ascii_digit()) && id.len() > 1
            }
        }
    }
}

fn blueprint_family(c: char) -> bool {
    matches!(c, 'a' | 'b' | 'c' | 'd' | 'e')
}

fn lookup(id: &str) -> Result<Vec<Selection>, LawError> {
    let unknown = || LawError::UnknownLemma(id.to_string());
    if id == "all" {
        return Ok(SUITES
            .iter()
            .map(|(s, _)| Selection { suite: s, filter: None })
            .collect());
    }
    if let Some((s, _)) = SUITES.iter().find(|(s, _)| *s == id) {
        return Ok(vec![Selection { suite: s, filter: None }]);
    }
    // `lemma-2.6(b)` picks one clause of a suite.
    if let Some((head, _)) = id.split_once('(') {
        if let Some((s, _)) = SUITES.iter().find(|(s, _)| *s == head) {
            return Ok(vec![Selection {
                suite: s,
                filter: Some(Filter::Exact(id.to_string())),
            }]);
        }
        return Err(unknown());
    }
    let mut chars = id.chars();
    let first = chars.next().ok_or_else(unknown)?;
    let rest = chars.as_str();
    let suite = match first {
        c if blueprint_family(c) => "blueprint",
        'g' => "pipeline",
        _ if id == "partition" => "blueprint",
        _ => return Err(unknown()),
    };
    let filter = if id == "partition" {
        Filter::Exact(id.to_string())
    } else if rest == "*" {
        Filter::Family(first)
    } else if !rest.is_empty() && rest.parse::<u32>().is_ok_and(|n| n >= 1) {
        Filter::Exact(id.to_string())
    } else {
        return Err(unknown());
    };
    Ok(vec![Selection {
        suite,
        filter: Some(filter),
    }])
}

/// Fails on the first selector that names no suite or record family.
pub fn check_ids<S: AsRef<str>>(ids: &[S]) -> Result<(), LawError> {
    ids.iter().try_for_each(|id| lookup(id.as_ref().trim()).map(drop))
}

/// Resolves every selector first, so an unknown id fails before any suite
/// runs. Each needed suite runs once, on its own thread.
pub fn run_suites<S: AsRef<str>>(ids: &[S], cfg: &LawConfig) -> Result<Report, LawError> {
    let mut selections = Vec::new();
    for id in ids {
        selections.extend(lookup(id.as_ref().trim())?);
    }
    let mut needed: Vec<&'static str> = selections.iter().map(|s| s.suite).collect();
    needed.sort_unstable();
    needed.dedup();
    let results: BTreeMap<&'static str, Vec<CheckRecord>> = std::thread::scope(|scope| {
        let handles: Vec<_> = needed
            .iter()
            .map(|&name| {
                let run = SUITES.iter().find(|(s, _)| *s == name).expect("looked up").1;
                (name, scope.spawn(move || run(cfg)))
            })
            .collect();
        handles
            .into_iter()
            .map(|(name, h)| (name, h.join().expect("suite panicked")))
            .collect()
    });
    let mut report = Report::new();
    for sel in selections {
        for r in &results[sel.suite] {
            if sel.filter.as_ref().map_or(true, |f| f.keeps(&r.id)) && !report.records.contains(r) {
                report.push(r.clone());
            }
        }
    }
    Ok(report.finish())
}

/// Running verdict for one law over many instances; keeps the first
/// counterexample.
pub(crate) struct Tally {
    id: String,
    instances: usize,
    applicable: usize,
    failure: Option<(String, Value)>,
}

impl Tally {
    pub(crate) fn new(id: impl Into<String>) -> Self {
        Tally {
            id: id.into(),
            instances: 0,
            applicable: 0,
            failure: None,
        }
    }

    /// An instance where the law's hypothesis fails.
    pub(crate) fn skip(&mut self) {
        self.instances += 1;
    }

    pub(crate) fn check<D, W>(&mut self, ok: bool, detail: D, witness: W)
    where
        D: FnOnce() -> String,
        W: FnOnce() -> Value,
    {
        self.instances += 1;
        self.applicable += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some((detail(), witness()));
        }
    }

    pub(crate) fn record(self) -> CheckRecord {
        let r = CheckRecord::check(self.id, self.failure.is_none())
            .param("instances", self.instances)
            .param("applicable", self.applicable);
        match self.failure {
            Some((detail, witness)) => r.detail(detail).witness(witness),
            None => r,
        }
    }
}

pub(crate) fn json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("witnesses serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_ids_are_rejected() {
        let cfg = LawConfig::default();
        for bad in ["lemma-9.9", "z*", "a0", "g", "a*x", "lemma-9.9(a)"] {
            assert_eq!(run_suites(&[bad], &cfg), Err(LawError::UnknownLemma(bad.into())), "{bad}");
        }
    }

    #[test]
    fn selectors_resolve() {
        assert_eq!(lookup("a*").unwrap()[0].suite, "blueprint");
        assert_eq!(lookup("g3").unwrap()[0].filter, Some(Filter::Exact("g3".into())));
        assert_eq!(lookup("all").unwrap().len(), SUITES.len());
        let f = Filter::Family('a');
        assert!(f.keeps("a11") && !f.keeps("b1") && !f.keeps("a") && !f.keeps("ab"));
    }

    #[test]
    fn tally_keeps_the_first_counterexample() {
        let mut t = Tally::new("x");
        t.check(true, String::new, || Value::Null);
        t.skip();
        t.check(false, || "first".into(), || json(&1));
        t.check(false, || "second".into(), || json(&2));
        let r = t.record();
        assert!(!r.passed());
        assert_eq!(r.detail, "first");
        assert_eq!(r.witness, Some(json(&1)));
        assert_eq!(r.params["instances"], json(&4));
        assert_eq!(r.params["applicable"], json(&3));
    }
}
