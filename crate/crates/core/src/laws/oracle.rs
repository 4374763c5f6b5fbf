//! Brute-force oracles for the law suites. Nothing here calls the order
//! vocabulary of `FinTree` beyond reading parent maps.

use std::collections::{BTreeMap, BTreeSet};

use crate::graft::{ConsistentFamily, HybridNode};
use crate::tree::{FinTree, NodeId, NodeSet};

/// Labeled rooted forests on `n` nodes, `(n+1)^(n-1)`.
pub fn cayley_forests(n: u32) -> u64 {
    if n == 0 {
        1
    } else {
        (n as u64 + 1).pow(n - 1)
    }
}

/// Every parent map on `{0..n-1}` (each node picks a parent or none) that has
/// no cycle, checked by following parents with a step budget.
pub fn acyclic_parent_maps(n: usize) -> Vec<Vec<Option<NodeId>>> {
    let mut out = Vec::new();
    let total = (n as u64 + 1).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let map: Vec<Option<NodeId>> = (0..n)
            .map(|_| {
                let d = c % (n as u64 + 1);
                c /= n as u64 + 1;
                d.checked_sub(1).map(|p| p as NodeId)
            })
            .collect();
        let ok = (0..n).all(|start| {
            let mut cur = start;
            for _ in 0..=n {
                match map[cur] {
                    None => return true,
                    Some(p) => cur = p as usize,
                }
            }
            false
        });
        if ok {
            out.push(map);
        }
    }
    out
}

/// The strict order of a parent map, as the set of pairs `(ancestor, node)`.
pub fn order_pairs(t: &FinTree) -> BTreeSet<(NodeId, NodeId)> {
    let mut out = BTreeSet::new();
    for y in t.nodes() {
        let mut cur = t.parent_of(y).expect("node");
        while let Some(x) = cur {
            out.insert((x, y));
            cur = t.parent_of(x).expect("node");
        }
    }
    out
}

/// Every maximal chain, by checking all node subsets.
pub fn maximal_chains(t: &FinTree) -> BTreeSet<NodeSet> {
    let nodes: Vec<NodeId> = t.nodes().collect();
    let lt = order_pairs(t);
    let comparable = |a: NodeId, b: NodeId| a == b || lt.contains(&(a, b)) || lt.contains(&(b, a));
    let chains: Vec<NodeSet> = (0u64..1 << nodes.len())
        .map(|mask| {
            nodes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect::<NodeSet>()
        })
        .filter(|c| !c.is_empty() && c.iter().all(|&a| c.iter().all(|&b| comparable(a, b))))
        .collect();
    chains
        .iter()
        .filter(|c| !chains.iter().any(|d| d.len() > c.len() && c.is_subset(d)))
        .cloned()
        .collect()
}

/// `y` covers `x`: `x < y` with nothing strictly between.
pub fn covers<T: Ord + Copy>(nodes: &[T], lt: &BTreeSet<(T, T)>) -> BTreeMap<T, BTreeSet<T>> {
    let mut out: BTreeMap<T, BTreeSet<T>> = nodes.iter().map(|&x| (x, BTreeSet::new())).collect();
    for &(x, y) in lt {
        if !nodes.iter().any(|&z| lt.contains(&(x, z)) && lt.contains(&(z, y))) {
            out.entry(x).or_default().insert(y);
        }
    }
    out
}

/// Transitive closure of the union of the host order and the graft orders,
/// cut down to hybrid nodes first. Graft roots and maxima are read as
/// support nodes.
pub fn closure_order(fam: &ConsistentFamily, nodes: &[HybridNode]) -> BTreeSet<(HybridNode, HybridNode)> {
    let present: BTreeSet<HybridNode> = nodes.iter().copied().collect();
    let mut rel: BTreeSet<(HybridNode, HybridNode)> = BTreeSet::new();
    for (x, y) in order_pairs(&fam.host) {
        rel.insert((HybridNode::Supp(x), HybridNode::Supp(y)));
    }
    for (i, g) in fam.grafts.iter().enumerate() {
        let name = |n: NodeId| {
            if g.implant.contains(&n) {
                HybridNode::Graft { graft: i, node: n }
            } else {
                HybridNode::Supp(n)
            }
        };
        for (x, y) in order_pairs(&g.graft) {
            rel.insert((name(x), name(y)));
        }
    }
    rel.retain(|(x, y)| present.contains(x) && present.contains(y));
    loop {
        let mut next = rel.clone();
        for &(x, y) in &rel {
            next.extend(rel.iter().filter(|(a, _)| *a == y).map(|&(_, z)| (x, z)));
        }
        if next.len() == rel.len() {
            return rel;
        }
        rel = next;
    }
}

/// A canonical string for a rooted forest up to isomorphism.
pub fn canonical_form(t: &FinTree) -> String {
    fn code(t: &FinTree, x: NodeId) -> String {
        let mut kids: Vec<String> = t.sons(x).expect("node").into_iter().map(|c| code(t, c)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    let mut roots: Vec<String> = t.minel().into_iter().map(|r| code(t, r)).collect();
    roots.sort();
    roots.concat()
}

/// An order isomorphism onto the full tree of sequences below `depth` with
/// values below `kappa`, by backtracking over son matchings.
pub fn full_tree_isomorphic(t: &FinTree, depth: usize, kappa: u32) -> bool {
    let target = FinTree::full(depth, kappa);
    if t.len() != target.len() {
        return false;
    }
    fn matches(t: &FinTree, x: NodeId, u: &FinTree, y: NodeId) -> bool {
        let (a, b): (Vec<NodeId>, Vec<NodeId>) = (
            t.sons(x).expect("node").into_iter().collect(),
            u.sons(y).expect("node").into_iter().collect(),
        );
        if a.len() != b.len() {
            return false;
        }
        let mut used = vec![false; b.len()];
        fn assign(t: &FinTree, a: &[NodeId], u: &FinTree, b: &[NodeId], used: &mut [bool]) -> bool {
            let Some((&first, rest)) = a.split_first() else {
                return true;
            };
            for j in 0..b.len() {
                if !used[j] && matches(t, first, u, b[j]) {
                    used[j] = true;
                    if assign(t, rest, u, b, used) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        assign(t, &a, u, &b, &mut used)
    }
    let roots: Vec<NodeId> = t.minel().into_iter().collect();
    match (&roots[..], target.least()) {
        ([r], Some(s)) => matches(t, *r, &target, s),
        ([], None) => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parent_map_counts_follow_cayley() {
        for n in 0..=4 {
            assert_eq!(acyclic_parent_maps(n).len() as u64, cayley_forests(n as u32), "n = {n}");
        }
        assert_eq!(cayley_forests(3), 16);
        assert_eq!(cayley_forests(5), 1296);
    }

    #[test]
    fn binary_depth_three_has_four_branches() {
        let b = maximal_chains(&FinTree::full(3, 2));
        assert_eq!(b.len(), 4);
        assert!(b.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn isomorphism_ignores_ids() {
        let t = FinTree::from_parents([(7, None), (3, Some(7)), (5, Some(7))]).unwrap();
        assert!(full_tree_isomorphic(&t, 2, 2));
        assert!(!full_tree_isomorphic(&t, 3, 1));
        let chain = FinTree::from_parents([(0, None), (1, Some(0)), (2, Some(1))]).unwrap();
        assert!(full_tree_isomorphic(&chain, 3, 1));
        assert_eq!(canonical_form(&t), "(()())");
    }
}
