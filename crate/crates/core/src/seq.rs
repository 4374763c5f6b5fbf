//! Finite sequences of naturals, the node type of the Baire tree.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("cannot drop {drop} items from a sequence of length {len}")]
    DropTooLarge { drop: usize, len: usize },
    #[error("cannot parse sequence from {0:?}")]
    Parse(String),
}

/// A finite sequence `⟨s0, s1, ...⟩`.
///
/// The derived order is lexicographic with prefixes first; use
/// [`Seq::shortlex_cmp`] for length-then-lex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seq(Vec<u32>);

impl Seq {
    pub fn new(items: Vec<u32>) -> Self {
        Seq(items)
    }

    pub fn empty() -> Self {
        Seq(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Seq(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn items(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<u32> {
        self.0.get(i).copied()
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// `s ↾ n`; lengths past the end return the whole sequence.
    pub fn restrict(&self, n: usize) -> Seq {
        Seq(self.0[..n.min(self.0.len())].to_vec())
    }

    /// `s ⊆ t`.
    pub fn is_prefix_of(&self, t: &Seq) -> bool {
        self.len() <= t.len() && t.0[..self.len()] == self.0[..]
    }

    pub fn is_strict_prefix_of(&self, t: &Seq) -> bool {
        self.len() < t.len() && self.is_prefix_of(t)
    }

    pub fn comparable(&self, t: &Seq) -> bool {
        self.is_prefix_of(t) || t.is_prefix_of(self)
    }

    /// `s⌢⟨n⟩`.
    pub fn child(&self, n: u32) -> Seq {
        let mut v = self.0.clone();
        v.push(n);
        Seq(v)
    }

    pub fn concat(&self, tail: &[u32]) -> Seq {
        let mut v = self.0.clone();
        v.extend_from_slice(tail);
        Seq(v)
    }

    pub fn parent(&self) -> Option<Seq> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.restrict(self.len() - 1))
        }
    }

    /// `x₋ₗ`: the restriction of `x` to `len(x) - l`.
    pub fn drop_last(&self, l: usize) -> Result<Seq, SeqError> {
        if l > self.len() {
            return Err(SeqError::DropTooLarge {
                drop: l,
                len: self.len(),
            });
        }
        Ok(self.restrict(self.len() - l))
    }

    /// All prefixes from `⟨⟩` up to and including `self`.
    pub fn prefixes(&self) -> impl Iterator<Item = Seq> + '_ {
        (0..=self.len()).map(move |n| self.restrict(n))
    }

    pub fn max_value(&self) -> Option<u32> {
        self.0.iter().copied().max()
    }

    /// Every value is below `width`.
    pub fn within_width(&self, width: u32) -> bool {
        self.0.iter().all(|&v| v < width)
    }

    /// Length first, then lexicographic.
    pub fn shortlex_cmp(&self, other: &Seq) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }

    /// Parses the `"0,1,2"` form used as JSON object keys (`""` is `⟨⟩`).
    pub fn parse_key(text: &str) -> Result<Seq, SeqError> {
        let t = text.trim();
        let t = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .unwrap_or(t)
            .trim();
        if t.is_empty() {
            return Ok(Seq::empty());
        }
        t.split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map(Seq)
            .map_err(|_| SeqError::Parse(text.to_string()))
    }

    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl From<Vec<u32>> for Seq {
    fn from(v: Vec<u32>) -> Self {
        Seq(v)
    }
}

impl From<&[u32]> for Seq {
    fn from(v: &[u32]) -> Self {
        Seq(v.to_vec())
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.key())
    }
}

impl fmt::Debug for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All sequences of length exactly `len` with values below `width`, in lex order.
pub fn stratum(len: usize, width: u32) -> Vec<Seq> {
    let mut out = vec![Seq::empty()];
    for _ in 0..len {
        out = out
            .iter()
            .flat_map(|s| (0..width).map(move |n| s.child(n)))
            .collect();
    }
    out
}

/// All sequences of length below `depth` with values below `width`, shortlex.
pub fn full_tree(depth: usize, width: u32) -> Vec<Seq> {
    (0..depth).flat_map(|l| stratum(l, width)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Seq {
        Seq::from(v)
    }

    #[test]
    fn restriction_and_prefix() {
        let x = s(&[2, 0, 1]);
        assert_eq!(x.restrict(0), Seq::empty());
        assert!(s(&[2, 0]).is_prefix_of(&x));
        assert!(!s(&[2, 1]).is_prefix_of(&x));
        assert!(x.is_prefix_of(&x));
        assert!(!x.is_strict_prefix_of(&x));
    }

    #[test]
    fn drop_last_cases() {
        let x = s(&[2, 0, 1]);
        assert_eq!(x.drop_last(1).unwrap(), s(&[2, 0]));
        assert_eq!(x.drop_last(0).unwrap(), x);
        let v = s(&[2]);
        let ext = s(&[2, 5, 7, 1]);
        assert_eq!(ext.drop_last(ext.len() - v.len()).unwrap(), v);
        assert!(x.drop_last(4).is_err());
    }

    #[test]
    fn keys_round_trip() {
        for x in [Seq::empty(), s(&[0]), s(&[3, 1, 4])] {
            assert_eq!(Seq::parse_key(&x.key()).unwrap(), x);
        }
        assert_eq!(Seq::parse_key("[1, 2]").unwrap(), s(&[1, 2]));
        assert!(Seq::parse_key("1,x").is_err());
    }

    #[test]
    fn strata_sizes() {
        assert_eq!(stratum(0, 3), vec![Seq::empty()]);
        assert_eq!(stratum(2, 3).len(), 9);
        assert_eq!(full_tree(3, 2).len(), 7);
    }
}
