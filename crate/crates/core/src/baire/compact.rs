//! Compact sets coded by finite pruned tables with a constant-0 tail.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seq::Seq;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompactError {
    #[error("table entry {0} has an empty allowed set")]
    EmptyAllowed(Seq),
    #[error("reachable node {0} has no table entry")]
    NotPruned(Seq),
    #[error("table key {key} has length {len}, beyond table depth {depth}")]
    KeyTooLong { key: Seq, len: usize, depth: usize },
    #[error("bad table key: {0}")]
    BadKey(String),
}

/// A point of the Baire space that is eventually 0, stored without trailing zeros.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Seq", into = "Seq")]
pub struct Point(Seq);

impl Point {
    pub fn new(prefix: Seq) -> Self {
        let mut v = prefix.items().to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        Point(Seq::new(v))
    }

    pub fn support(&self) -> &Seq {
        &self.0
    }

    pub fn at(&self, i: usize) -> u32 {
        self.0.get(i).unwrap_or(0)
    }

    pub fn prefix(&self, n: usize) -> Seq {
        Seq::new((0..n).map(|i| self.at(i)).collect())
    }

    /// `y ⊆ p`.
    pub fn extends(&self, y: &Seq) -> bool {
        y.items().iter().enumerate().all(|(i, &v)| self.at(i) == v)
    }
}

impl From<Seq> for Point {
    fn from(s: Seq) -> Self {
        Point::new(s)
    }
}

impl From<Point> for Seq {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^0", self.0)
    }
}

/// `{ p : p(n) ∈ allowed(p↾n) for all n }`, with `allowed = {0}` from `depth` on.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CompactWire", into = "CompactWire")]
pub struct CompactCode {
    table: BTreeMap<Seq, BTreeSet<u32>>,
    depth: usize,
    points: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct CompactWire {
    table: BTreeMap<String, Vec<u32>>,
    depth: usize,
}

impl TryFrom<CompactWire> for CompactCode {
    type Error = CompactError;

    fn try_from(w: CompactWire) -> Result<Self, CompactError> {
        let mut table = BTreeMap::new();
        for (k, v) in w.table {
            let key = Seq::parse_key(&k).map_err(|_| CompactError::BadKey(k.clone()))?;
            table.insert(key, v.into_iter().collect());
        }
        CompactCode::new(table, w.depth)
    }
}

impl From<CompactCode> for CompactWire {
    fn from(c: CompactCode) -> Self {
        CompactWire {
            table: c
                .table
                .iter()
                .map(|(k, v)| (k.key(), v.iter().copied().collect()))
                .collect(),
            depth: c.depth,
        }
    }
}

impl CompactCode {
    /// Validates prunedness: every reachable node below `depth` has a nonempty
    /// allowed set.
    pub fn new(table: BTreeMap<Seq, BTreeSet<u32>>, depth: usize) -> Result<Self, CompactError> {
        for (k, v) in &table {
            if k.len() >= depth {
                return Err(CompactError::KeyTooLong {
                    key: k.clone(),
                    len: k.len(),
                    depth,
                });
            }
            if v.is_empty() {
                return Err(CompactError::EmptyAllowed(k.clone()));
            }
        }
        let mut frontier = vec![Seq::empty()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for node in frontier {
                let allowed = table
                    .get(&node)
                    .ok_or_else(|| CompactError::NotPruned(node.clone()))?;
                next.extend(allowed.iter().map(|&a| node.child(a)));
            }
            frontier = next;
        }
        let mut points: Vec<Point> = frontier.into_iter().map(Point::new).collect();
        points.sort();
        Ok(CompactCode {
            table,
            depth,
            points,
        })
    }

    /// The code of the single point `prefix⌢0^ω`.
    pub fn singleton(prefix: &Seq) -> Self {
        let table = (0..prefix.len())
            .map(|n| (prefix.restrict(n), [prefix.items()[n]].into()))
            .collect();
        CompactCode::new(table, prefix.len()).expect("a single path is pruned")
    }

    /// `{0^ω}` with an empty table.
    pub fn zero() -> Self {
        CompactCode::new(BTreeMap::new(), 0).expect("empty table is pruned")
    }

    /// Full `b`-ary branching for the first `depth` coordinates.
    pub fn branching(b: u32, depth: usize) -> Self {
        let table = crate::seq::full_tree(depth, b)
            .into_iter()
            .map(|s| (s, (0..b).collect()))
            .collect();
        CompactCode::new(table, depth).expect("full table is pruned")
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn table(&self) -> &BTreeMap<Seq, BTreeSet<u32>> {
        &self.table
    }

    /// The coded set, which is finite under the constant-0 tail.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// Points of the code inside `S_y`.
    pub fn points_in<'a>(&'a self, y: &'a Seq) -> impl Iterator<Item = &'a Point> + 'a {
        self.points.iter().filter(move |p| p.extends(y))
    }

    /// `S_y ∩ K ≠ ∅`.
    pub fn meets(&self, y: &Seq) -> bool {
        self.points.iter().any(|p| p.extends(y))
    }

    /// Largest allowed-set size, counting the tail's `{0}`.
    pub fn max_branching(&self) -> usize {
        self.table.values().map(|v| v.len()).max().unwrap_or(1).max(1)
    }
}

impl fmt::Debug for CompactCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompactCode")
            .field("depth", &self.depth)
            .field("points", &self.points)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_code_is_one_point() {
        let k = CompactCode::zero();
        assert_eq!(k.points(), &[Point::new(Seq::empty())]);
        assert!(k.meets(&Seq::zeros(5)));
        assert!(!k.meets(&Seq::from(&[1u32][..])));
    }

    #[test]
    fn branching_code_points() {
        let k = CompactCode::branching(2, 2);
        assert_eq!(k.points().len(), 4);
        assert_eq!(k.max_branching(), 2);
        assert!(k.contains(&Point::new(Seq::from(&[1u32, 1][..]))));
    }

    #[test]
    fn unpruned_tables_rejected() {
        let table = [(Seq::empty(), [0, 1].into()), (Seq::from(&[0u32][..]), [0].into())].into();
        assert_eq!(
            CompactCode::new(table, 2),
            Err(CompactError::NotPruned(Seq::from(&[1u32][..])))
        );
        let empty = [(Seq::empty(), BTreeSet::new())].into();
        assert!(matches!(CompactCode::new(empty, 1), Err(CompactError::EmptyAllowed(_))));
    }

    #[test]
    fn json_round_trip() {
        let k = CompactCode::branching(2, 2);
        let text = serde_json::to_string(&k).unwrap();
        assert!(text.contains("\"0\":[0,1]"));
        let back: CompactCode = serde_json::from_str(&text).unwrap();
        assert_eq!(back, k);
        let bad = r#"{"table":{"":[]},"depth":1}"#;
        assert!(serde_json::from_str::<CompactCode>(bad).is_err());
    }

    #[test]
    fn singleton_code() {
        let k = CompactCode::singleton(&Seq::from(&[1u32, 0, 2][..]));
        assert_eq!(k.points(), &[Point::new(Seq::from(&[1u32, 0, 2][..]))]);
    }
}
