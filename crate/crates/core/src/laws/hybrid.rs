//! Graft and hybrid laws over every enumerated consistent family.

use std::collections::{BTreeMap, BTreeSet};

use super::instances::{families, hosts, FamilyWitness};
use super::oracle::{closure_order, covers, maximal_chains};
use super::{json, LawConfig, Tally};
use crate::graft::{branch_trace, hybrid_build, hybrid_relate, ConsistentFamily, GraftAnatomy, Hybrid, HybridNode};
use crate::report::CheckRecord;
use crate::tree::{NodeId, NodeSet, Relation};

fn all_families(cfg: &LawConfig) -> Vec<ConsistentFamily> {
    hosts(cfg.max_nodes)
        .iter()
        .flat_map(|h| families(h, cfg.max_implants))
        .collect()
}

/// A family together with its hybrid and the order read off the hybrid tree.
struct Case<'a> {
    fam: &'a ConsistentFamily,
    h: Hybrid,
    tags: Vec<HybridNode>,
}

impl<'a> Case<'a> {
    fn new(fam: &'a ConsistentFamily) -> Self {
        let h = hybrid_build(fam).expect("enumerated families are consistent");
        let tags = h.tags().to_vec();
        Case { fam, h, tags }
    }

    fn id(&self, x: HybridNode) -> NodeId {
        self.h.id_of(x).expect("hybrid node")
    }

    fn lt(&self, x: HybridNode, y: HybridNode) -> bool {
        self.h.tree.lt(self.id(x), self.id(y))
    }

    fn le(&self, x: HybridNode, y: HybridNode) -> bool {
        x == y || self.lt(x, y)
    }

    /// Graft node `n` of graft `i` as a hybrid node.
    fn name(&self, i: usize, n: NodeId) -> HybridNode {
        name(&self.fam.grafts[i], i, n)
    }

    fn ancestors(&self, x: HybridNode) -> BTreeSet<HybridNode> {
        self.h
            .tree
            .ancestors(self.id(x))
            .expect("node")
            .into_iter()
            .map(|a| self.h.tag(a))
            .collect()
    }

    fn witness(&self) -> serde_json::Value {
        json(&FamilyWitness::of(self.fam))
    }
}

fn name(g: &GraftAnatomy, i: usize, n: NodeId) -> HybridNode {
    if g.implant.contains(&n) {
        HybridNode::Graft { graft: i, node: n }
    } else {
        HybridNode::Supp(n)
    }
}

fn records(tallies: Vec<Tally>, cfg: &LawConfig) -> Vec<CheckRecord> {
    tallies
        .into_iter()
        .map(|t| t.record().param("max_nodes", cfg.max_nodes).param("max_implants", cfg.max_implants))
        .collect()
}

fn tallies(prefix: &str, clauses: &str) -> Vec<Tally> {
    clauses.chars().map(|c| Tally::new(format!("{prefix}({c})"))).collect()
}

pub(super) fn lemma_5_4(cfg: &LawConfig) -> Vec<CheckRecord> {
    let mut t = tallies("lemma-5.4", "abcdef");
    for fam in &all_families(cfg) {
        let w = || json(&FamilyWitness::of(fam));
        let host = &fam.host;
        let supp = &fam.support;
        for (i, g) in fam.grafts.iter().enumerate() {
            let r = g.root();
            let mut parts = g.maxel.clone();
            parts.insert(r);
            parts.extend(&g.implant);
            let disjoint = !g.maxel.contains(&r) && !g.implant.contains(&r) && g.maxel.is_disjoint(&g.implant);
            t[0].check(disjoint && parts == g.graft.node_set(), || format!("graft {i} nodes do not split"), w);

            let mut anchors = g.anchors();
            anchors.extend(host.minel());
            t[1].check(anchors.is_subset(supp), || format!("anchors of graft {i} leave the support"), w);
            t[2].check(g.implant.is_disjoint(supp), || format!("implant of graft {i} meets the support"), w);

            let foot = fam.maxel_footline(i);
            let bad_d = supp.iter().find(|&&s| host.lt(r, s) != foot.contains(&s));
            t[3].check(bad_d.is_none(), || format!("support node {bad_d:?} against graft {i}"), w);

            let bad_e = supp
                .iter()
                .flat_map(|&s| g.explant.iter().map(move |&e| (s, e)))
                .find(|&(s, e)| host.le(s, r) != host.lt(s, e));
            t[4].check(bad_e.is_none(), || format!("support and explant pair {bad_e:?} of graft {i}"), w);
        }
        for (i, d) in fam.grafts.iter().enumerate() {
            for e in &fam.grafts[i + 1..] {
                let ok = d.root() != e.root() && d.maxel.is_disjoint(&e.maxel);
                t[5].check(ok, || "two grafts share a root or a maximum".into(), w);
            }
        }
    }
    records(t, cfg)
}

pub(super) fn lemma_5_7(cfg: &LawConfig) -> Vec<CheckRecord> {
    let mut t = tallies("lemma-5.7", "abcdefg");
    for fam in &all_families(cfg) {
        let c = Case::new(fam);
        let host = &fam.host;
        let supp_tags: NodeSet = c
            .tags
            .iter()
            .filter_map(|x| match x {
                HybridNode::Supp(s) => Some(*s),
                _ => None,
            })
            .collect();
        let mut b_ok = supp_tags == fam.support;
        for &s in &fam.support {
            for &u in &fam.support {
                b_ok &= c.lt(HybridNode::Supp(s), HybridNode::Supp(u)) == host.lt(s, u);
            }
        }
        t[1].check(b_ok, || "support order differs from the host".into(), || c.witness());

        for (i, g) in fam.grafts.iter().enumerate() {
            let nodes: Vec<NodeId> = g.graft.nodes().collect();
            let a_ok = nodes.iter().all(|&x| {
                nodes
                    .iter()
                    .all(|&y| c.lt(c.name(i, x), c.name(i, y)) == g.graft.lt(x, y))
            });
            t[0].check(a_ok, || format!("graft {i} order differs inside the hybrid"), || c.witness());

            let root = HybridNode::Supp(g.root());
            let implants: Vec<HybridNode> = g.implant.iter().map(|&n| c.name(i, n)).collect();
            let outside: Vec<HybridNode> = c.tags.iter().copied().filter(|x| !implants.contains(x)).collect();
            let mut ok = [true; 4];
            for &h in &c.tags {
                for &imp in &implants {
                    ok[0] &= !c.le(imp, h) || c.lt(root, h);
                    ok[1] &= !c.le(h, root) || c.lt(h, imp);
                }
            }
            for &h in &outside {
                for &imp in &implants {
                    ok[2] &= c.le(h, root) == c.lt(h, imp);
                }
                let above_max = g.maxel.iter().any(|&m| c.le(HybridNode::Supp(m), h));
                ok[3] &= c.lt(root, h) == above_max;
            }
            for (k, tally) in t[2..6].iter_mut().enumerate() {
                if implants.is_empty() && k < 3 {
                    tally.skip();
                } else {
                    tally.check(ok[k], || format!("graft {i}"), || c.witness());
                }
            }

            let root_below = c.ancestors(root);
            let g_ok = nodes.iter().all(|&x| {
                let in_g: BTreeSet<HybridNode> = g
                    .graft
                    .ancestors(x)
                    .expect("node")
                    .into_iter()
                    .map(|a| c.name(i, a))
                    .collect();
                let mut union = in_g.clone();
                union.extend(root_below.iter().copied());
                in_g.is_disjoint(&root_below) && union.len() == in_g.len() + root_below.len() && union == c.ancestors(c.name(i, x))
            });
            t[6].check(g_ok, || format!("predecessors in graft {i} do not decompose"), || c.witness());
        }
    }
    records(t, cfg)
}

pub(super) fn prop_5_8(cfg: &LawConfig) -> Vec<CheckRecord> {
    let mut axioms = Tally::new("prop-5.8");
    let mut closure = Tally::new("remark-5.7");
    for fam in &all_families(cfg) {
        let c = Case::new(fam);
        let rel = |x, y| hybrid_relate(fam, x, y).expect("hybrid nodes");
        let mut ok = true;
        let mut lt = BTreeSet::new();
        for &x in &c.tags {
            ok &= rel(x, x) == Relation::Equal;
            for &y in &c.tags {
                let r = rel(x, y);
                let back = rel(y, x);
                ok &= match r {
                    Relation::Less => back == Relation::Greater,
                    Relation::Greater => back == Relation::Less,
                    Relation::Incomparable => back == Relation::Incomparable,
                    Relation::Equal => x == y,
                };
                ok &= (r == Relation::Less) == c.lt(x, y);
                if r == Relation::Less {
                    lt.insert((x, y));
                }
            }
        }
        for &(x, y) in &lt {
            ok &= lt.iter().filter(|(a, _)| *a == y).all(|&(_, z)| lt.contains(&(x, z)));
        }
        for &y in &c.tags {
            let below: Vec<HybridNode> = c.tags.iter().copied().filter(|&x| lt.contains(&(x, y))).collect();
            ok &= below
                .iter()
                .all(|&a| below.iter().all(|&b| a == b || lt.contains(&(a, b)) || lt.contains(&(b, a))));
        }
        axioms.check(ok, || "the hybrid order is not a tree order".into(), || c.witness());
        let oracle = closure_order(fam, &c.tags);
        closure.check(oracle == lt, || "hybrid order differs from the closure oracle".into(), || c.witness());
    }
    records(vec![axioms, closure], cfg)
}

pub(super) fn prop_5_10(cfg: &LawConfig) -> Vec<CheckRecord> {
    let mut t = tallies("prop-5.10", "abcdef");
    for fam in &all_families(cfg) {
        let c = Case::new(fam);
        let host = &fam.host;
        let w = || c.witness();

        let lt: BTreeSet<(HybridNode, HybridNode)> = c
            .tags
            .iter()
            .flat_map(|&x| c.tags.iter().map(move |&y| (x, y)))
            .filter(|&(x, y)| hybrid_relate(fam, x, y).expect("hybrid nodes") == Relation::Less)
            .collect();
        let brute = covers(&c.tags, &lt);
        let roots: BTreeMap<NodeId, usize> = fam.grafts.iter().enumerate().map(|(i, g)| (g.root(), i)).collect();
        let a_ok = c.tags.iter().all(|&x| {
            let formula: BTreeSet<HybridNode> = match x {
                HybridNode::Supp(s) => match roots.get(&s) {
                    Some(&i) => fam.grafts[i].graft.sons(s).expect("root").into_iter().map(|n| c.name(i, n)).collect(),
                    None => host.sons(s).expect("host node").into_iter().map(HybridNode::Supp).collect(),
                },
                HybridNode::Graft { graft, node } => fam.grafts[graft]
                    .graft
                    .sons(node)
                    .expect("implant")
                    .into_iter()
                    .map(|n| c.name(graft, n))
                    .collect(),
            };
            let built: BTreeSet<HybridNode> = c.h.tree.sons(c.id(x)).expect("node").into_iter().map(|i| c.h.tag(i)).collect();
            formula == brute[&x] && built == brute[&x]
        });
        t[0].check(a_ok, || "sons differ from the formula".into(), w);

        for (ix, &x) in c.tags.iter().enumerate() {
            for &y in &c.tags[ix + 1..] {
                if c.le(x, y) || c.le(y, x) {
                    continue;
                }
                let up = |z: HybridNode| -> Vec<HybridNode> { c.tags.iter().copied().filter(|&v| c.le(z, v)).collect() };
                let (ux, uy) = (up(x), up(y));
                let found = ux.iter().any(|&xp| {
                    uy.iter().any(|&yp| match (xp, yp) {
                        (HybridNode::Supp(a), HybridNode::Supp(b)) if host.incomparable(a, b) => true,
                        _ => fam.grafts.iter().enumerate().any(|(i, g)| {
                            let inside = |v: HybridNode| match v {
                                HybridNode::Supp(s) => (g.root() == s || g.maxel.contains(&s)).then_some(s),
                                HybridNode::Graft { graft, node } => (graft == i).then_some(node),
                            };
                            matches!((inside(xp), inside(yp)), (Some(a), Some(b)) if g.graft.incomparable(a, b))
                        }),
                    })
                });
                t[1].check(found, || format!("no extensions for {x:?} and {y:?}"), w);
            }
        }

        match host.least() {
            Some(r) => t[2].check(c.h.tree.least() == Some(c.id(HybridNode::Supp(r))), || "least node moved".into(), w),
            None => t[2].skip(),
        }

        // Finite trees always have maximal nodes.
        if host.maxel().is_empty() {
            t[3].check(c.h.tree.maxel().is_empty(), || "maximal nodes appeared".into(), w);
        } else {
            t[3].skip();
        }

        for kappa in 1..=3 {
            if host.is_kappa_branching(kappa) && fam.grafts.iter().all(|g| g.graft.is_kappa_branching(kappa)) {
                t[4].check(c.h.tree.is_kappa_branching(kappa), || format!("{kappa}-branching lost"), w);
            } else {
                t[4].skip();
            }
        }

        let bound = host.tree_height() + fam.grafts.iter().map(|g| g.graft.tree_height() - 2).sum::<usize>();
        t[5].check(
            c.h.tree.has_bounded_chains() && c.h.tree.tree_height() <= bound,
            || format!("height {} over the bound {bound}", c.h.tree.tree_height()),
            w,
        );
    }
    records(t, cfg)
}

pub(super) fn lemma_5_11(cfg: &LawConfig) -> Vec<CheckRecord> {
    let mut t = tallies("lemma-5.11", "ab");
    let mut listing = Tally::new("hybrid-branches");
    for fam in &all_families(cfg) {
        let c = Case::new(fam);
        let branches = c.h.tree.branches();
        let listed: BTreeSet<NodeSet> = branches.iter().cloned().collect();
        listing.check(listed == maximal_chains(&c.h.tree), || "branch listing differs from the maximal chains".into(), || c.witness());
        let graft_branches: Vec<BTreeSet<NodeSet>> = fam.grafts.iter().map(|g| maximal_chains(&g.graft)).collect();
        for b in &branches {
            let trace = branch_trace(fam, &c.h, b).expect("a listed branch");
            let a_ok = trace.per_graft.iter().all(|(i, part)| graft_branches[*i].contains(part));
            t[0].check(a_ok, || "a branch meets a graft outside a graft branch".into(), || c.witness());
            let cofinal = b.iter().all(|&x| {
                trace
                    .support_part
                    .iter()
                    .any(|&s| c.le(c.h.tag(x), HybridNode::Supp(s)))
            });
            t[1].check(cofinal, || "support part is not cofinal".into(), || c.witness());
        }
    }
    t.push(listing);
    records(t, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LawConfig {
        LawConfig {
            max_nodes: 3,
            ..LawConfig::default()
        }
    }

    #[test]
    fn every_hybrid_law_passes_on_three_nodes() {
        for suite in [lemma_5_4, lemma_5_7, prop_5_8, prop_5_10, lemma_5_11] {
            for r in suite(&small()) {
                assert!(r.passed(), "{r:?}");
            }
        }
    }

    #[test]
    fn closure_of_a_one_node_implant() {
        let host = crate::tree::FinTree::from_parents([(0, None), (1, Some(0))]).unwrap();
        let g = crate::tree::FinTree::from_parents([(0, None), (9, Some(0)), (1, Some(9))]).unwrap();
        let fam = crate::graft::consistent_family(&host, &[g]);
        let c = Case::new(&fam);
        let (s0, s1, i) = (HybridNode::Supp(0), HybridNode::Supp(1), HybridNode::Graft { graft: 0, node: 9 });
        let expected: BTreeSet<_> = [(s0, i), (i, s1), (s0, s1)].into();
        assert_eq!(closure_order(&fam, &c.tags), expected);
        assert!(c.lt(s0, i) && c.lt(i, s1));
    }
}
