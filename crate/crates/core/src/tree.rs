//! Finite trees stored as parent maps, with the order vocabulary derived from them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seq::{full_tree, Seq};

pub type NodeId = u32;
pub type NodeSet = BTreeSet<NodeId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("node {0} not found")]
    NodeNotFound(NodeId),
    #[error("node {node} names missing parent {parent}")]
    UnknownParent { node: NodeId, parent: NodeId },
    #[error("duplicate node id {0}")]
    DuplicateId(NodeId),
    #[error("parent links from node {0} form a cycle")]
    Cycle(NodeId),
    #[error("set is not an antichain")]
    NotAntichain,
    #[error("node {0} lies below no member of the antichain")]
    NotBelow(NodeId),
    #[error("enumeration bound exceeded: {n} > {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("relation is not a tree order: {0}")]
    NotATreeOrder(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Less,
    Greater,
    Equal,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Up,
    Down,
    UpClosed,
    DownClosed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeFlags {
    pub bounded_chains: bool,
    pub kappa_branching: bool,
    pub truncated_alpha_kappa_tree: bool,
}

/// A finite forest. Node ids are opaque; labels are optional sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinTree {
    parent: BTreeMap<NodeId, Option<NodeId>>,
    children: BTreeMap<NodeId, Vec<NodeId>>,
    height: BTreeMap<NodeId, usize>,
    labels: BTreeMap<NodeId, Seq>,
    by_label: BTreeMap<Seq, NodeId>,
}

impl FinTree {
    pub fn from_parents<I>(entries: I) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = (NodeId, Option<NodeId>)>,
    {
        Self::from_entries(entries.into_iter().map(|(id, p)| (id, p, None)))
    }

    pub fn from_entries<I>(entries: I) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = (NodeId, Option<NodeId>, Option<Seq>)>,
    {
        let mut parent = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for (id, p, label) in entries {
            if parent.insert(id, p).is_some() {
                return Err(TreeError::DuplicateId(id));
            }
            if let Some(l) = label {
                labels.insert(id, l);
            }
        }
        let mut children: BTreeMap<NodeId, Vec<NodeId>> =
            parent.keys().map(|&k| (k, Vec::new())).collect();
        for (&id, &p) in &parent {
            if let Some(p) = p {
                match children.get_mut(&p) {
                    Some(c) => c.push(id),
                    None => return Err(TreeError::UnknownParent { node: id, parent: p }),
                }
            }
        }
        let mut height = BTreeMap::new();
        for &id in parent.keys() {
            let mut h = 0usize;
            let mut cur = id;
            while let Some(Some(p)) = parent.get(&cur) {
                h += 1;
                if h > parent.len() {
                    return Err(TreeError::Cycle(id));
                }
                cur = *p;
            }
            height.insert(id, h);
        }
        let by_label = labels.iter().map(|(&k, v)| (v.clone(), k)).collect();
        Ok(FinTree {
            parent,
            children,
            height,
            labels,
            by_label,
        })
    }

    /// The subtree of `ω^<ω` on `seqs`, ids assigned in the given order. The
    /// parent of a sequence is its longest proper prefix present in the set.
    pub fn from_seqs(seqs: &[Seq]) -> Result<Self, TreeError> {
        let index: BTreeMap<&Seq, NodeId> = seqs
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i as NodeId))
            .collect();
        if index.len() != seqs.len() {
            let dup = seqs
                .iter()
                .enumerate()
                .find(|(i, s)| index[s] != *i as NodeId)
                .map(|(i, _)| i as NodeId)
                .unwrap_or(0);
            return Err(TreeError::DuplicateId(dup));
        }
        Self::from_entries(seqs.iter().enumerate().map(|(i, s)| {
            let p = (0..s.len())
                .rev()
                .find_map(|n| index.get(&s.restrict(n)).copied());
            (i as NodeId, p, Some(s.clone()))
        }))
    }

    /// `(^{<depth} width, ⊂)`.
    pub fn full(depth: usize, width: u32) -> Self {
        Self::from_seqs(&full_tree(depth, width)).expect("full trees are well formed")
    }

    /// Builds a tree from a strict order given as a predicate, checking the
    /// tree axioms on the way.
    pub fn from_order<F>(nodes: &[NodeId], less: F) -> Result<Self, TreeError>
    where
        F: Fn(NodeId, NodeId) -> bool,
    {
        for &x in nodes {
            if less(x, x) {
                return Err(TreeError::NotATreeOrder(format!("{x} < {x}")));
            }
            for &y in nodes {
                if !less(x, y) {
                    continue;
                }
                if less(y, x) {
                    return Err(TreeError::NotATreeOrder(format!("{x} < {y} < {x}")));
                }
                for &z in nodes {
                    if less(y, z) && !less(x, z) {
                        return Err(TreeError::NotATreeOrder(format!(
                            "{x} < {y} < {z} but not {x} < {z}"
                        )));
                    }
                }
            }
        }
        let mut entries = Vec::with_capacity(nodes.len());
        for &y in nodes {
            let below: Vec<NodeId> = nodes.iter().copied().filter(|&x| less(x, y)).collect();
            for (i, &a) in below.iter().enumerate() {
                for &b in &below[i + 1..] {
                    if !less(a, b) && !less(b, a) {
                        return Err(TreeError::NotATreeOrder(format!(
                            "ancestors {a} and {b} of {y} are incomparable"
                        )));
                    }
                }
            }
            let p = below
                .iter()
                .copied()
                .find(|&a| below.iter().all(|&b| b == a || less(b, a)));
            entries.push((y, p));
        }
        Self::from_parents(entries)
    }

    /// The order restricted to `keep`; parents become nearest kept ancestors.
    pub fn restrict(&self, keep: &NodeSet) -> FinTree {
        let entries = keep.iter().map(|&id| {
            let p = self.ancestors_unchecked(id).into_iter().find(|a| keep.contains(a));
            (id, p, self.labels.get(&id).cloned())
        });
        FinTree::from_entries(entries.collect::<Vec<_>>()).expect("restriction of a tree is a tree")
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn contains(&self, x: NodeId) -> bool {
        self.parent.contains_key(&x)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.parent.keys().copied()
    }

    pub fn node_set(&self) -> NodeSet {
        self.parent.keys().copied().collect()
    }

    fn check(&self, x: NodeId) -> Result<(), TreeError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(TreeError::NodeNotFound(x))
        }
    }

    pub fn parent_of(&self, x: NodeId) -> Result<Option<NodeId>, TreeError> {
        self.parent.get(&x).copied().ok_or(TreeError::NodeNotFound(x))
    }

    pub fn label(&self, x: NodeId) -> Option<&Seq> {
        self.labels.get(&x)
    }

    pub fn find_label(&self, s: &Seq) -> Option<NodeId> {
        self.by_label.get(s).copied()
    }

    /// Strict ancestors, nearest first.
    fn ancestors_unchecked(&self, x: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = x;
        while let Some(Some(p)) = self.parent.get(&cur) {
            out.push(*p);
            cur = *p;
        }
        out
    }

    pub fn ancestors(&self, x: NodeId) -> Result<Vec<NodeId>, TreeError> {
        self.check(x)?;
        Ok(self.ancestors_unchecked(x))
    }

    /// `x < y`, without id checks (unknown ids are never related).
    pub fn lt(&self, x: NodeId, y: NodeId) -> bool {
        match (self.height.get(&x), self.height.get(&y)) {
            (Some(&hx), Some(&hy)) if hx < hy => {
                let mut cur = y;
                for _ in hx..hy {
                    cur = self.parent[&cur].expect("height counts parents");
                }
                cur == x
            }
            _ => false,
        }
    }

    pub fn le(&self, x: NodeId, y: NodeId) -> bool {
        (x == y && self.contains(x)) || self.lt(x, y)
    }

    pub fn relate(&self, x: NodeId, y: NodeId) -> Result<Relation, TreeError> {
        self.check(x)?;
        self.check(y)?;
        Ok(if x == y {
            Relation::Equal
        } else if self.lt(x, y) {
            Relation::Less
        } else if self.lt(y, x) {
            Relation::Greater
        } else {
            Relation::Incomparable
        })
    }

    pub fn incomparable(&self, x: NodeId, y: NodeId) -> bool {
        x != y && !self.lt(x, y) && !self.lt(y, x)
    }

    pub fn region(&self, x: NodeId, kind: Region) -> Result<NodeSet, TreeError> {
        self.check(x)?;
        let mut out: NodeSet = match kind {
            Region::Up | Region::UpClosed => self.ancestors_unchecked(x).into_iter().collect(),
            Region::Down | Region::DownClosed => {
                let mut acc = NodeSet::new();
                let mut stack = self.children[&x].clone();
                while let Some(c) = stack.pop() {
                    acc.insert(c);
                    stack.extend(self.children[&c].iter().copied());
                }
                acc
            }
        };
        if matches!(kind, Region::UpClosed | Region::DownClosed) {
            out.insert(x);
        }
        Ok(out)
    }

    pub fn footline(&self, a: &NodeSet, dir: Direction) -> Result<NodeSet, TreeError> {
        let kind = match dir {
            Direction::Up => Region::UpClosed,
            Direction::Down => Region::DownClosed,
        };
        let mut out = NodeSet::new();
        for &x in a {
            out.extend(self.region(x, kind)?);
        }
        Ok(out)
    }

    /// The open interval `(x, y) = x↓ ∩ y↑`.
    pub fn interval(&self, x: NodeId, y: NodeId) -> Result<NodeSet, TreeError> {
        let down = self.region(x, Region::Down)?;
        let up = self.region(y, Region::Up)?;
        Ok(down.intersection(&up).copied().collect())
    }

    pub fn sons(&self, x: NodeId) -> Result<NodeSet, TreeError> {
        self.children
            .get(&x)
            .map(|c| c.iter().copied().collect())
            .ok_or(TreeError::NodeNotFound(x))
    }

    pub fn height_of(&self, x: NodeId) -> Result<usize, TreeError> {
        self.height.get(&x).copied().ok_or(TreeError::NodeNotFound(x))
    }

    pub fn levels(&self) -> BTreeMap<usize, NodeSet> {
        let mut out: BTreeMap<usize, NodeSet> = BTreeMap::new();
        for (&id, &h) in &self.height {
            out.entry(h).or_default().insert(id);
        }
        out
    }

    /// The least height with an empty level.
    pub fn tree_height(&self) -> usize {
        self.height.values().map(|h| h + 1).max().unwrap_or(0)
    }

    pub fn maxel(&self) -> NodeSet {
        self.children
            .iter()
            .filter(|(_, c)| c.is_empty())
            .map(|(&k, _)| k)
            .collect()
    }

    pub fn minel(&self) -> NodeSet {
        self.parent
            .iter()
            .filter(|(_, p)| p.is_none())
            .map(|(&k, _)| k)
            .collect()
    }

    /// `0_T`, when the tree has a least node.
    pub fn least(&self) -> Option<NodeId> {
        let roots = self.minel();
        if roots.len() == 1 {
            roots.into_iter().next()
        } else {
            None
        }
    }

    /// Branches of a finite tree: `{ m↑closed : m maximal }`.
    pub fn branches(&self) -> Vec<NodeSet> {
        self.maxel()
            .into_iter()
            .map(|m| self.region(m, Region::UpClosed).expect("maximal node exists"))
            .collect()
    }

    pub fn is_antichain(&self, a: &NodeSet) -> bool {
        let v: Vec<_> = a.iter().copied().collect();
        v.iter()
            .enumerate()
            .all(|(i, &x)| v[i + 1..].iter().all(|&y| self.incomparable(x, y)))
    }

    pub fn is_chain(&self, c: &NodeSet) -> bool {
        let v: Vec<_> = c.iter().copied().collect();
        v.iter()
            .enumerate()
            .all(|(i, &x)| v[i + 1..].iter().all(|&y| !self.incomparable(x, y)))
    }

    /// The unique `r ∈ a` with `r ≤ x`.
    pub fn root_in_antichain(&self, x: NodeId, a: &NodeSet) -> Result<NodeId, TreeError> {
        self.check(x)?;
        if !self.is_antichain(a) {
            return Err(TreeError::NotAntichain);
        }
        a.iter()
            .copied()
            .find(|&r| self.le(r, x))
            .ok_or(TreeError::NotBelow(x))
    }

    /// Every nonempty chain lies below some node.
    pub fn has_bounded_chains(&self) -> bool {
        self.branches().iter().all(|b| {
            b.iter()
                .any(|&z| b.iter().all(|&c| self.le(c, z)))
        })
    }

    pub fn is_kappa_branching(&self, kappa: usize) -> bool {
        self.children
            .values()
            .all(|c| c.is_empty() || c.len() == kappa)
    }

    pub fn shape_flags(&self, kappa: usize, depth: usize) -> ShapeFlags {
        let kappa_branching = self.is_kappa_branching(kappa);
        let uniform = self
            .maxel()
            .iter()
            .all(|m| self.height[m] + 1 == depth);
        ShapeFlags {
            bounded_chains: self.has_bounded_chains(),
            kappa_branching,
            truncated_alpha_kappa_tree: depth >= 1
                && self.least().is_some()
                && kappa_branching
                && uniform
                && (kappa > 0 || depth == 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Seq {
        Seq::from(v)
    }

    fn id(t: &FinTree, v: &[u32]) -> NodeId {
        t.find_label(&s(v)).unwrap()
    }

    #[test]
    fn example_over_four_letters() {
        let t = FinTree::full(5, 4);
        let x = id(&t, &[2, 0, 1, 0]);
        assert_eq!(t.relate(id(&t, &[2, 0]), x).unwrap(), Relation::Less);
        let up: BTreeSet<Seq> = t
            .region(x, Region::Up)
            .unwrap()
            .iter()
            .map(|&n| t.label(n).unwrap().clone())
            .collect();
        let want: BTreeSet<Seq> = [s(&[]), s(&[2]), s(&[2, 0]), s(&[2, 0, 1])].into();
        assert_eq!(up, want);
        assert_eq!(t.height_of(x).unwrap(), 4);
        assert_eq!(t.height_of(id(&t, &[])).unwrap(), 0);
        let sons: BTreeSet<Seq> = t
            .sons(id(&t, &[2, 0]))
            .unwrap()
            .iter()
            .map(|&n| t.label(n).unwrap().clone())
            .collect();
        assert_eq!(sons, (0..4).map(|n| s(&[2, 0, n])).collect());
        let a: NodeSet = [id(&t, &[0]), id(&t, &[2, 1]), id(&t, &[3])].into();
        let r = t.root_in_antichain(id(&t, &[2, 1, 0, 3]), &a).unwrap();
        assert_eq!(t.label(r).unwrap(), &s(&[2, 1]));
    }

    #[test]
    fn relations_basic() {
        let t = FinTree::full(2, 2);
        let (a, b) = (id(&t, &[0]), id(&t, &[1]));
        assert_eq!(t.relate(a, b).unwrap(), Relation::Incomparable);
        assert_eq!(t.relate(a, a).unwrap(), Relation::Equal);
        assert_eq!(t.relate(99, a), Err(TreeError::NodeNotFound(99)));
        assert!(t.region(id(&t, &[]), Region::Up).unwrap().is_empty());
    }

    #[test]
    fn footline_and_branches_of_binary_depth_three() {
        let t = FinTree::full(3, 2);
        let a: NodeSet = [id(&t, &[0]), id(&t, &[1])].into();
        let mut all = t.node_set();
        all.remove(&id(&t, &[]));
        assert_eq!(t.footline(&a, Direction::Down).unwrap(), all);
        let bs = t.branches();
        assert_eq!(bs.len(), 4);
        assert!(bs.iter().all(|b| b.len() == 3));
    }

    #[test]
    fn chain_sons_and_branching() {
        let t = FinTree::from_parents([(0, None), (1, Some(0)), (2, Some(1))]).unwrap();
        assert_eq!(t.sons(0).unwrap(), [1].into());
        assert_eq!(t.branches().len(), 1);
        let u = FinTree::from_parents([
            (0, None),
            (1, Some(0)),
            (2, Some(0)),
            (3, Some(0)),
            (4, Some(1)),
            (5, Some(1)),
        ])
        .unwrap();
        assert!(!u.is_kappa_branching(2));
        let flags = FinTree::full(3, 2).shape_flags(2, 3);
        assert!(flags.truncated_alpha_kappa_tree);
        assert!(u.is_antichain(&[4].into()));
    }

    #[test]
    fn rejects_cycles_and_dangling_parents() {
        assert_eq!(
            FinTree::from_parents([(0, Some(1)), (1, Some(0))]).unwrap_err(),
            TreeError::Cycle(0)
        );
        assert!(matches!(
            FinTree::from_parents([(0, Some(7))]),
            Err(TreeError::UnknownParent { .. })
        ));
    }

    #[test]
    fn root_in_antichain_errors() {
        let t = FinTree::full(3, 2);
        let bad: NodeSet = [id(&t, &[0]), id(&t, &[0, 1])].into();
        assert_eq!(
            t.root_in_antichain(id(&t, &[0, 1]), &bad),
            Err(TreeError::NotAntichain)
        );
        let a: NodeSet = [id(&t, &[0])].into();
        assert_eq!(
            t.root_in_antichain(id(&t, &[1]), &a),
            Err(TreeError::NotBelow(id(&t, &[1])))
        );
    }

    #[test]
    fn from_order_recovers_parents() {
        let t = FinTree::full(3, 2);
        let nodes: Vec<_> = t.nodes().collect();
        let u = FinTree::from_order(&nodes, |x, y| t.lt(x, y)).unwrap();
        for x in t.nodes() {
            assert_eq!(t.parent_of(x).unwrap(), u.parent_of(x).unwrap());
        }
        let bad = FinTree::from_order(&[0, 1, 2], |x, y| (x, y) == (0, 2) || (x, y) == (1, 2));
        assert!(matches!(bad, Err(TreeError::NotATreeOrder(_))));
    }
}
