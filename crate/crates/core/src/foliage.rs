//! Foliage trees: a skeleton tree with a leaf set attached to every node.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{FinTree, NodeId, NodeSet, TreeError};
use crate::universe::Universe;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoliageError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("leaf map domain differs from the skeleton at node {0}")]
    LeafDomain(NodeId),
    #[error("fruit of an empty node set")]
    EmptySet,
    #[error("node {0} has {1} sons, too many to enumerate subsets")]
    TooManySons(NodeId, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoliageTree<S> {
    skeleton: FinTree,
    leaves: BTreeMap<NodeId, S>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoliageFlags {
    pub nonempty_leaves: bool,
    pub nonincreasing: bool,
    pub splittable: bool,
    pub complete: bool,
    pub strict_branches: bool,
    pub locally_strict: bool,
    pub open_in_universe: bool,
}

/// The sons of a node together with the union of their leaves.
///
/// Every member of the node's shoot is this union minus finitely many sons'
/// leaves; consumers never enumerate the cofinite family itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Shoot<S> {
    pub sons: Vec<NodeId>,
    pub flesh: S,
}

impl<S: Clone> FoliageTree<S> {
    pub fn new(skeleton: FinTree, leaves: BTreeMap<NodeId, S>) -> Result<Self, FoliageError> {
        if let Some(x) = skeleton.nodes().find(|x| !leaves.contains_key(x)) {
            return Err(FoliageError::LeafDomain(x));
        }
        if let Some(&x) = leaves.keys().find(|&&x| !skeleton.contains(x)) {
            return Err(FoliageError::LeafDomain(x));
        }
        Ok(FoliageTree { skeleton, leaves })
    }

    pub fn skeleton(&self) -> &FinTree {
        &self.skeleton
    }

    pub fn leaves(&self) -> &BTreeMap<NodeId, S> {
        &self.leaves
    }

    pub fn leaf(&self, x: NodeId) -> Result<&S, FoliageError> {
        self.leaves
            .get(&x)
            .ok_or(FoliageError::Tree(TreeError::NodeNotFound(x)))
    }

    pub fn map_leaves<T, F: FnMut(NodeId, &S) -> T>(&self, mut f: F) -> FoliageTree<T> {
        FoliageTree {
            skeleton: self.skeleton.clone(),
            leaves: self.leaves.iter().map(|(&k, v)| (k, f(k, v))).collect(),
        }
    }
}

pub fn fruit_of<U: Universe>(
    u: &U,
    f: &FoliageTree<U::Set>,
    a: &NodeSet,
) -> Result<U::Set, FoliageError> {
    let mut it = a.iter();
    let first = it.next().ok_or(FoliageError::EmptySet)?;
    let mut acc = f.leaf(*first)?.clone();
    for x in it {
        acc = u.inter(&acc, f.leaf(*x)?);
    }
    Ok(acc)
}

pub fn flesh_of<U: Universe>(
    u: &U,
    f: &FoliageTree<U::Set>,
    a: &NodeSet,
) -> Result<U::Set, FoliageError> {
    let mut acc = u.empty();
    for x in a {
        acc = u.union(&acc, f.leaf(*x)?);
    }
    Ok(acc)
}

/// Union of the fruits of all branches.
pub fn yield_of<U: Universe>(u: &U, f: &FoliageTree<U::Set>) -> U::Set {
    f.skeleton.branches().iter().fold(u.empty(), |acc, b| {
        u.union(&acc, &fruit_of(u, f, b).expect("branches are nonempty"))
    })
}

pub fn scope_of<U: Universe>(u: &U, f: &FoliageTree<U::Set>, p: &U::Point) -> NodeSet {
    f.leaves
        .iter()
        .filter(|(_, leaf)| u.contains(leaf, p))
        .map(|(&k, _)| k)
        .collect()
}

pub fn shoot_of<U: Universe>(
    u: &U,
    f: &FoliageTree<U::Set>,
    z: NodeId,
    width: usize,
) -> Result<Shoot<U::Set>, FoliageError> {
    let sons: Vec<NodeId> = f.skeleton.sons(z)?.into_iter().take(width).collect();
    let flesh = flesh_of(u, f, &sons.iter().copied().collect())?;
    Ok(Shoot { sons, flesh })
}

/// The whole shoot of a node with finitely many sons: every subset of sons is
/// cofinite there, so the family is `{ flesh(C) : C ⊆ sons(z) }`.
pub fn shoot_family_finite<U: Universe>(
    u: &U,
    f: &FoliageTree<U::Set>,
    z: NodeId,
) -> Result<Vec<U::Set>, FoliageError> {
    let sons: Vec<NodeId> = f.skeleton.sons(z)?.into_iter().collect();
    if sons.len() > 16 {
        return Err(FoliageError::TooManySons(z, sons.len()));
    }
    (0u32..(1 << sons.len()))
        .map(|mask| {
            let c: NodeSet = sons
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &s)| s)
                .collect();
            flesh_of(u, f, &c)
        })
        .collect()
}

/// `γ ≫ δ`: every nonempty member of `delta` contains a nonempty member of `gamma`.
pub fn pi_refines<U: Universe>(u: &U, gamma: &[U::Set], delta: &[U::Set]) -> bool {
    delta.iter().filter(|d| !u.is_empty(d)).all(|d| {
        gamma
            .iter()
            .any(|g| !u.is_empty(g) && u.subset(g, d))
    })
}

pub fn is_nonincreasing<U: Universe>(u: &U, f: &FoliageTree<U::Set>) -> bool {
    f.skeleton.nodes().all(|y| {
        f.skeleton
            .ancestors(y)
            .expect("node of skeleton")
            .iter()
            .all(|&x| u.subset(&f.leaves[&y], &f.leaves[&x]))
    })
}

pub fn is_splittable<U: Universe>(u: &U, f: &FoliageTree<U::Set>) -> bool {
    let nodes: Vec<NodeId> = f.skeleton.nodes().collect();
    nodes.iter().enumerate().all(|(i, &x)| {
        nodes[i + 1..].iter().all(|&y| {
            !f.skeleton.incomparable(x, y) || u.disjoint(&f.leaves[&x], &f.leaves[&y])
        })
    })
}

/// The leaf of `x` is the disjoint union of its sons' leaves.
pub fn is_locally_strict_at<U: Universe>(u: &U, f: &FoliageTree<U::Set>, x: NodeId) -> bool {
    let sons: Vec<NodeId> = f.skeleton.sons(x).expect("node of skeleton").into_iter().collect();
    if sons.is_empty() {
        return true;
    }
    let union = u.union_all(sons.iter().map(|s| &f.leaves[s]));
    let disjoint = sons.iter().enumerate().all(|(i, a)| {
        sons[i + 1..]
            .iter()
            .all(|b| u.disjoint(&f.leaves[a], &f.leaves[b]))
    });
    disjoint && u.equal(&f.leaves[&x], &union)
}

pub fn is_locally_strict<U: Universe>(u: &U, f: &FoliageTree<U::Set>) -> bool {
    f.skeleton.nodes().all(|x| is_locally_strict_at(u, f, x))
}

pub fn foliage_flags<U: Universe>(u: &U, f: &FoliageTree<U::Set>) -> FoliageFlags {
    let fruits: Vec<U::Set> = f
        .skeleton
        .branches()
        .iter()
        .map(|b| fruit_of(u, f, b).expect("branches are nonempty"))
        .collect();
    FoliageFlags {
        nonempty_leaves: f.leaves.values().all(|l| !u.is_empty(l)),
        nonincreasing: is_nonincreasing(u, f),
        splittable: is_splittable(u, f),
        complete: !f.skeleton.is_empty() && fruits.iter().all(|x| !u.is_empty(x)),
        strict_branches: fruits.iter().all(|x| u.is_singleton(x)),
        locally_strict: is_locally_strict(u, f),
        open_in_universe: f.leaves.values().all(|l| u.is_open(l)),
    }
}
