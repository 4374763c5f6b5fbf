//! Order laws on every labeled forest up to the node bound.

use std::collections::BTreeSet;

use super::oracle::{acyclic_parent_maps, cayley_forests, covers, full_tree_isomorphic, maximal_chains, order_pairs};
use super::{json, LawConfig, Tally};
use crate::enumerate::enumerate_small_trees;
use crate::export::tree_json;
use crate::report::CheckRecord;
use crate::tree::{FinTree, NodeId, NodeSet, Region};

fn parent_vector(t: &FinTree) -> Vec<Option<NodeId>> {
    t.nodes().map(|x| t.parent_of(x).expect("node")).collect()
}

fn subsets(items: &[NodeId]) -> impl Iterator<Item = NodeSet> + '_ {
    (0u64..1 << items.len()).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &x)| x)
            .collect()
    })
}

pub(super) fn lemma_2_6(cfg: &LawConfig) -> Vec<CheckRecord> {
    let mut out = Vec::new();

    let mut enumerator = Tally::new("enumerator");
    let mut trees = Vec::new();
    for n in 0..=cfg.max_nodes {
        let listed: Vec<FinTree> = enumerate_small_trees(n).map(|e| e.collect()).unwrap_or_default();
        let maps: Vec<Vec<Option<NodeId>>> = listed.iter().map(parent_vector).collect();
        let distinct: BTreeSet<&Vec<Option<NodeId>>> = maps.iter().collect();
        let brute: BTreeSet<Vec<Option<NodeId>>> = acyclic_parent_maps(n).into_iter().collect();
        let expected = cayley_forests(n as u32);
        enumerator.check(
            distinct.len() == maps.len() && distinct.into_iter().cloned().collect::<BTreeSet<_>>() == brute && maps.len() as u64 == expected,
            || format!("{} forests on {n} nodes, expected {expected}", maps.len()),
            || json(&n),
        );
        trees.extend(listed);
    }
    let three = enumerate_small_trees(3).map(|e| e.count()).unwrap_or(0);
    out.push(enumerator.record().param("max_nodes", cfg.max_nodes).param("count_3", three));

    let ids = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "order"];
    let mut tallies: Vec<Tally> = ids
        .iter()
        .map(|c| Tally::new(if *c == "order" { "tree-order".to_string() } else { format!("lemma-2.6({c})") }))
        .collect();
    for t in &trees {
        let w = || json(&tree_json(t));
        let nodes: Vec<NodeId> = t.nodes().collect();
        let lt = order_pairs(t);
        let sons = covers(&nodes, &lt);
        let branches = t.branches();
        let maximal = maximal_chains(t);

        let leafless: NodeSet = sons.iter().filter(|(_, s)| s.is_empty()).map(|(&k, _)| k).collect();
        tallies[0].check(t.maxel() == leafless, || "maxel differs from the sonless nodes".into(), w);

        let mut b_bad = None;
        'b: for &x in &nodes {
            for &y in &nodes {
                if !t.le(y, x) {
                    continue;
                }
                for &z in &nodes {
                    if t.incomparable(y, z) && !t.incomparable(x, z) {
                        b_bad = Some((x, y, z));
                        break 'b;
                    }
                }
            }
        }
        tallies[1].check(b_bad.is_none(), || format!("triple {b_bad:?}"), w);

        // The empty forest has no branch to hold the empty chain.
        if nodes.is_empty() {
            tallies[2].skip();
        } else {
            let chains: Vec<NodeSet> = subsets(&nodes).filter(|c| t.is_chain(c)).collect();
            let lost = chains.iter().find(|c| !branches.iter().any(|b| c.is_subset(b)));
            tallies[2].check(lost.is_none(), || format!("chain {lost:?} lies in no branch"), w);
        }

        let d_bad = branches.iter().find_map(|b| {
            nodes
                .iter()
                .find(|&&x| !b.contains(&x) && !b.iter().any(|&y| t.incomparable(x, y)))
                .map(|x| (b.clone(), *x))
        });
        tallies[3].check(d_bad.is_none(), || format!("branch and node {d_bad:?}"), w);

        let maxel = t.maxel();
        let e_bad = branches.iter().find_map(|b| {
            b.iter()
                .find(|&&x| !maxel.contains(&x) && sons[&x].is_disjoint(b))
                .map(|x| (b.clone(), *x))
        });
        tallies[4].check(e_bad.is_none(), || format!("branch misses the sons of {e_bad:?}"), w);

        let f_bad = branches.iter().find_map(|b| {
            b.iter()
                .find(|&&x| !t.region(x, Region::UpClosed).expect("node").is_subset(b))
                .copied()
        });
        tallies[5].check(f_bad.is_none(), || format!("node {f_bad:?} has predecessors off its branch"), w);

        let g_bad = maxel
            .iter()
            .find(|&&m| !maximal.contains(&t.region(m, Region::UpClosed).expect("node")))
            .copied();
        tallies[6].check(g_bad.is_none(), || format!("below {g_bad:?} is not a branch"), w);

        let listed: BTreeSet<NodeSet> = branches.iter().cloned().collect();
        tallies[7].check(
            t.has_bounded_chains() && listed == maximal && listed.len() == branches.len(),
            || "branches differ from the maximal chains".into(),
            w,
        );

        let mut i_ok = true;
        for depth in 1..=3 {
            for kappa in 1..=3 {
                let flag = t.shape_flags(kappa as usize, depth).truncated_alpha_kappa_tree;
                i_ok &= flag == full_tree_isomorphic(t, depth, kappa);
            }
        }
        tallies[8].check(i_ok, || "shape flags disagree with the isomorphism search".into(), w);

        let mut order_ok = nodes.iter().all(|&x| !t.lt(x, x));
        for &x in &nodes {
            for &y in &nodes {
                order_ok &= t.lt(x, y) == lt.contains(&(x, y));
                for &z in &nodes {
                    order_ok &= !(t.lt(x, y) && t.lt(y, z)) || t.lt(x, z);
                }
            }
            order_ok &= t.is_chain(&t.ancestors(x).expect("node").into_iter().collect());
        }
        tallies[9].check(order_ok, || "the order is not a tree order".into(), w);
    }
    out.extend(tallies.into_iter().map(|t| t.record().param("max_nodes", cfg.max_nodes)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_forests_pass() {
        let cfg = LawConfig {
            max_nodes: 3,
            ..LawConfig::default()
        };
        let records = lemma_2_6(&cfg);
        assert_eq!(records.len(), 11);
        for r in &records {
            assert!(r.passed(), "{r:?}");
        }
        assert_eq!(records[0].params["count_3"], json(&16));
        // 1 + 1 + 3 + 16 labeled forests.
        assert_eq!(records[1].params["instances"], json(&21));
    }
}
