//! Exhaustive enumeration of labeled forests on `{0..n-1}`.

use crate::tree::{FinTree, NodeId, TreeError};

pub const DEFAULT_BOUND: usize = 6;

/// Every labeled forest on `n` nodes exactly once, in odometer order over
/// parent maps (digit `0` means "no parent", digit `k` means parent `k-1`).
pub fn enumerate_small_trees(n: usize) -> Result<SmallTrees, TreeError> {
    enumerate_small_trees_bounded(n, DEFAULT_BOUND)
}

pub fn enumerate_small_trees_bounded(n: usize, bound: usize) -> Result<SmallTrees, TreeError> {
    if n > bound {
        return Err(TreeError::BoundExceeded { n, bound });
    }
    Ok(SmallTrees {
        n,
        digits: vec![0; n],
        done: false,
    })
}

#[derive(Debug, Clone)]
pub struct SmallTrees {
    n: usize,
    digits: Vec<usize>,
    done: bool,
}

impl SmallTrees {
    fn advance(&mut self) {
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d <= self.n {
                return;
            }
            *d = 0;
        }
        self.done = true;
    }

    fn acyclic(&self) -> bool {
        (0..self.n).all(|start| {
            let mut cur = start;
            for _ in 0..=self.n {
                match self.digits[cur] {
                    0 => return true,
                    d => cur = d - 1,
                }
            }
            false
        })
    }
}

impl Iterator for SmallTrees {
    type Item = FinTree;

    fn next(&mut self) -> Option<FinTree> {
        while !self.done {
            let ok = self.acyclic();
            let entries: Vec<(NodeId, Option<NodeId>)> = self
                .digits
                .iter()
                .enumerate()
                .map(|(i, &d)| (i as NodeId, d.checked_sub(1).map(|p| p as NodeId)))
                .collect();
            self.advance();
            if ok {
                return Some(FinTree::from_parents(entries).expect("acyclic parent map"));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_small_trees(0).unwrap().count(), 1);
        assert_eq!(enumerate_small_trees(1).unwrap().count(), 1);
        assert_eq!(enumerate_small_trees(2).unwrap().count(), 3);
        assert_eq!(enumerate_small_trees(3).unwrap().count(), 16);
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(
            enumerate_small_trees(7),
            Err(TreeError::BoundExceeded { n: 7, bound: 6 })
        ));
    }

    #[test]
    fn restartable_and_deterministic() {
        let a: Vec<_> = enumerate_small_trees(3).unwrap().collect();
        let b: Vec<_> = enumerate_small_trees(3).unwrap().collect();
        assert_eq!(a, b);
    }
}
