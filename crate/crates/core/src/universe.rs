//! Leaf universes: the set algebra a foliage tree draws its leaves from.

use std::collections::BTreeSet;
use std::fmt::Debug;

/// Set operations a foliage tree needs from its leaves.
///
/// Implementations decide every query; the symbolic Baire universe does so
/// relative to its truncation window.
pub trait Universe {
    type Set: Clone + Debug + PartialEq;
    type Point: Clone + Debug;

    fn empty(&self) -> Self::Set;
    fn is_empty(&self, a: &Self::Set) -> bool;
    fn union(&self, a: &Self::Set, b: &Self::Set) -> Self::Set;
    fn inter(&self, a: &Self::Set, b: &Self::Set) -> Self::Set;
    fn diff(&self, a: &Self::Set, b: &Self::Set) -> Self::Set;
    fn contains(&self, a: &Self::Set, p: &Self::Point) -> bool;
    fn is_singleton(&self, a: &Self::Set) -> bool;
    fn is_open(&self, a: &Self::Set) -> bool;

    fn subset(&self, a: &Self::Set, b: &Self::Set) -> bool {
        self.is_empty(&self.diff(a, b))
    }

    fn disjoint(&self, a: &Self::Set, b: &Self::Set) -> bool {
        self.is_empty(&self.inter(a, b))
    }

    fn equal(&self, a: &Self::Set, b: &Self::Set) -> bool {
        self.subset(a, b) && self.subset(b, a)
    }

    fn union_all<'a, I>(&self, sets: I) -> Self::Set
    where
        I: IntoIterator<Item = &'a Self::Set>,
        Self::Set: 'a,
    {
        sets.into_iter()
            .fold(self.empty(), |acc, s| self.union(&acc, s))
    }
}

pub type PointSet = BTreeSet<u32>;

/// Explicit finite sets over the points `{0..size-1}`; every set is open.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteSets {
    pub size: u32,
}

impl FiniteSets {
    pub fn new(size: u32) -> Self {
        FiniteSets { size }
    }

    pub fn full(&self) -> PointSet {
        (0..self.size).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = u32> {
        0..self.size
    }

    /// Every subset, ordered by bitmask.
    pub fn all_subsets(&self) -> Vec<PointSet> {
        (0u64..(1u64 << self.size))
            .map(|mask| (0..self.size).filter(|i| mask >> i & 1 == 1).collect())
            .collect()
    }
}

impl Universe for FiniteSets {
    type Set = PointSet;
    type Point = u32;

    fn empty(&self) -> PointSet {
        PointSet::new()
    }

    fn is_empty(&self, a: &PointSet) -> bool {
        a.is_empty()
    }

    fn union(&self, a: &PointSet, b: &PointSet) -> PointSet {
        a.union(b).copied().collect()
    }

    fn inter(&self, a: &PointSet, b: &PointSet) -> PointSet {
        a.intersection(b).copied().collect()
    }

    fn diff(&self, a: &PointSet, b: &PointSet) -> PointSet {
        a.difference(b).copied().collect()
    }

    fn contains(&self, a: &PointSet, p: &u32) -> bool {
        a.contains(p)
    }

    fn is_singleton(&self, a: &PointSet) -> bool {
        a.len() == 1
    }

    fn is_open(&self, _a: &PointSet) -> bool {
        true
    }

    fn subset(&self, a: &PointSet, b: &PointSet) -> bool {
        a.is_subset(b)
    }

    fn disjoint(&self, a: &PointSet, b: &PointSet) -> bool {
        a.is_disjoint(b)
    }

    fn equal(&self, a: &PointSet, b: &PointSet) -> bool {
        a == b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_algebra() {
        let u = FiniteSets::new(4);
        let a: PointSet = [0, 1].into();
        let b: PointSet = [1, 2].into();
        assert_eq!(u.union(&a, &b), [0, 1, 2].into());
        assert_eq!(u.inter(&a, &b), [1].into());
        assert_eq!(u.diff(&a, &b), [0].into());
        assert!(u.is_singleton(&u.inter(&a, &b)));
        assert!(u.subset(&a, &u.full()));
        assert_eq!(u.all_subsets().len(), 16);
        assert_eq!(u.union_all([&a, &b]), [0, 1, 2].into());
    }
}
