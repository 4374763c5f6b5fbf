//! The sets `Ω`, `Δ`, `MAX` for an open set `S_v \ K`, and the pairing
//! partition of each `Ω_w` into infinite fibers indexed by `Δ_w`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::compact::{CompactCode, Point};
use crate::seq::Seq;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiberError {
    #[error("{0} is not in the bad region below the root")]
    NotInDelta(Seq),
    #[error("{0} is not a minimal cylinder inside the open set")]
    NotInMax(Seq),
    #[error("compact set misses the root cylinder {0}")]
    RootNotSplit(Seq),
}

pub fn pair(i: u64, j: u64) -> u64 {
    (i + j) * (i + j + 1) / 2 + j
}

pub fn unpair(k: u64) -> (u64, u64) {
    let mut t = (((8 * k + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    while (t + 1) * (t + 2) / 2 <= k {
        t += 1;
    }
    while t * (t + 1) / 2 > k {
        t -= 1;
    }
    let j = k - t * (t + 1) / 2;
    (t - j, j)
}

/// The open set `O = S_v \ K` seen through its bad region `Δ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SchemeWire", into = "SchemeWire")]
pub struct FiberScheme {
    pub root: Seq,
    pub compact: CompactCode,
    points: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct SchemeWire {
    root: Seq,
    compact: CompactCode,
}

impl TryFrom<SchemeWire> for FiberScheme {
    type Error = FiberError;

    fn try_from(w: SchemeWire) -> Result<Self, FiberError> {
        FiberScheme::new(w.root, w.compact)
    }
}

impl From<FiberScheme> for SchemeWire {
    fn from(s: FiberScheme) -> Self {
        SchemeWire {
            root: s.root,
            compact: s.compact,
        }
    }
}

impl FiberScheme {
    pub fn new(root: Seq, compact: CompactCode) -> Result<Self, FiberError> {
        let points: Vec<Point> = compact.points_in(&root).cloned().collect();
        if points.is_empty() {
            return Err(FiberError::RootNotSplit(root));
        }
        Ok(FiberScheme {
            root,
            compact,
            points,
        })
    }

    fn points_below<'a>(&'a self, w: &'a Seq) -> impl Iterator<Item = &'a Point> + 'a {
        self.points.iter().filter(move |p| p.extends(w))
    }

    pub fn in_delta(&self, z: &Seq) -> bool {
        self.root.is_prefix_of(z) && self.points_below(z).next().is_some()
    }

    pub fn in_omega(&self, z: &Seq) -> bool {
        self.root.is_prefix_of(z) && self.points_below(z).next().is_none()
    }

    /// Minimal members of `Ω`.
    pub fn in_max(&self, z: &Seq) -> bool {
        self.in_omega(z)
            && z.len() > self.root.len()
            && z.parent().is_some_and(|w| self.in_delta(&w))
    }

    /// Values `n` with `w⌢n ∈ Δ`.
    pub fn bad_values(&self, w: &Seq) -> BTreeSet<u32> {
        self.points_below(w).map(|p| p.at(w.len())).collect()
    }

    /// Position of `w⌢n` in the increasing enumeration of `Ω_w`.
    pub fn omega_rank(&self, w: &Seq, n: u32) -> Option<u64> {
        let bad = self.bad_values(w);
        if bad.contains(&n) {
            None
        } else {
            Some(u64::from(n) - bad.range(..n).count() as u64)
        }
    }

    pub fn omega_son(&self, w: &Seq, rank: u64) -> u32 {
        let bad = self.bad_values(w);
        let mut n = rank;
        for &b in &bad {
            if u64::from(b) <= n {
                n += 1;
            }
        }
        n as u32
    }

    /// `{ d ∈ Δ_w : len d = level }`, lexicographic.
    pub fn delta_level(&self, w: &Seq, level: usize) -> Vec<Seq> {
        let set: BTreeSet<Seq> = self.points_below(w).map(|p| p.prefix(level)).collect();
        set.into_iter().collect()
    }

    fn stable_level(&self, w: &Seq) -> usize {
        self.points_below(w)
            .map(|p| p.support().len())
            .max()
            .unwrap_or(0)
            .max(w.len())
    }

    /// Index of `d` in the length-then-lex enumeration of `Δ_w`.
    pub fn delta_index(&self, w: &Seq, d: &Seq) -> Option<u64> {
        if !w.is_prefix_of(d) || !self.in_delta(d) || !self.in_delta(w) {
            return None;
        }
        let stable = self.stable_level(w);
        let full = self.points_below(w).count() as u64;
        let mut base = 0u64;
        let upto = d.len().min(stable);
        for l in w.len()..upto {
            base += self.delta_level(w, l).len() as u64;
        }
        if d.len() > stable {
            base += (d.len() - stable) as u64 * full;
        }
        let pos = self
            .delta_level(w, d.len())
            .iter()
            .position(|x| x == d)
            .expect("d meets the compact below w") as u64;
        Some(base + pos)
    }

    /// The member of `Δ_w` at index `i`.
    pub fn delta_at(&self, w: &Seq, mut i: u64) -> Seq {
        let stable = self.stable_level(w);
        let full = self.points_below(w).count() as u64;
        let mut l = w.len();
        while l < stable {
            let level = self.delta_level(w, l);
            if i < level.len() as u64 {
                return level[i as usize].clone();
            }
            i -= level.len() as u64;
            l += 1;
        }
        let level = self.delta_level(w, l + (i / full) as usize);
        level[(i % full) as usize].clone()
    }

    /// The `d ∈ Δ_w` whose fiber contains `z ∈ MAX`, with `w = z₋₁`.
    pub fn fiber_of(&self, z: &Seq) -> Result<Seq, FiberError> {
        if !self.in_max(z) {
            return Err(FiberError::NotInMax(z.clone()));
        }
        let w = z.parent().expect("members of MAX are nonempty");
        let rank = self
            .omega_rank(&w, z.last().expect("nonempty"))
            .expect("z is in Ω");
        Ok(self.delta_at(&w, unpair(rank).0))
    }

    /// The `j`-th member of the fiber `Ω_{w,d}`.
    pub fn fiber_member(&self, w: &Seq, d: &Seq, j: u64) -> Result<Seq, FiberError> {
        let i = self
            .delta_index(w, d)
            .ok_or_else(|| FiberError::NotInDelta(d.clone()))?;
        Ok(w.child(self.omega_son(w, pair(i, j))))
    }

    /// Fiber members `w⌢n` with `n < width`.
    pub fn fiber_members_below(&self, w: &Seq, d: &Seq, width: u32) -> Vec<Seq> {
        let Some(i) = self.delta_index(w, d) else {
            return Vec::new();
        };
        (0..width)
            .filter(|&n| self.omega_rank(w, n).is_some_and(|k| unpair(k).0 == i))
            .map(|n| w.child(n))
            .collect()
    }

    /// Fiber index of the son `w⌢n`, when that son lies in `Ω_w`.
    pub(crate) fn son_fiber_index(&self, w: &Seq, n: u32) -> Option<u64> {
        self.omega_rank(w, n).map(|k| unpair(k).0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Seq {
        Seq::from(v)
    }

    #[test]
    fn pairing_is_a_bijection_on_a_prefix() {
        for k in 0..500 {
            let (i, j) = unpair(k);
            assert_eq!(pair(i, j), k);
        }
        assert_eq!(unpair(0), (0, 0));
    }

    #[test]
    fn zero_point_regions() {
        let sch = FiberScheme::new(Seq::empty(), CompactCode::zero()).unwrap();
        for k in 0..5 {
            assert!(sch.in_delta(&Seq::zeros(k)));
            assert!(sch.in_max(&Seq::zeros(k).child(1)));
            assert!(!sch.in_max(&Seq::zeros(k).child(1).child(0)));
        }
        assert!(!sch.in_delta(&s(&[0, 1])));
        assert_eq!(sch.delta_at(&Seq::empty(), 3), Seq::zeros(3));
        assert_eq!(sch.delta_index(&s(&[0]), &Seq::zeros(4)), Some(3));
    }

    #[test]
    fn first_omega_son_lands_in_first_fiber() {
        let sch = FiberScheme::new(Seq::empty(), CompactCode::zero()).unwrap();
        let w = Seq::empty();
        let first = w.child(sch.omega_son(&w, 0));
        assert_eq!(first, s(&[1]));
        assert_eq!(sch.fiber_of(&first).unwrap(), sch.delta_at(&w, 0));
    }

    #[test]
    fn fibers_round_trip_and_are_disjoint() {
        let sch = FiberScheme::new(s(&[1]), CompactCode::branching(2, 2)).unwrap();
        let w = s(&[1]);
        let mut seen = BTreeSet::new();
        for i in 0..4 {
            let d = sch.delta_at(&w, i);
            for j in 0..5 {
                let z = sch.fiber_member(&w, &d, j).unwrap();
                assert_eq!(sch.fiber_of(&z).unwrap(), d);
                assert!(seen.insert(z));
            }
        }
    }

    #[test]
    fn root_must_meet_compact() {
        assert!(matches!(
            FiberScheme::new(s(&[1]), CompactCode::zero()),
            Err(FiberError::RootNotSplit(_))
        ));
    }
}
