//! Small instances for the law suites: hosts up to isomorphism, grafts with at
//! most two fresh implant nodes, families of at most two grafts, and foliage
//! instances over finite and symbolic universes.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::oracle::canonical_form;
use crate::baire::{std_tree, CompactCode, SetExpr, StdTreeView};
use crate::enumerate::enumerate_small_trees;
use crate::export::{foliage_json, tree_json, TreeJson};
use crate::foliage::FoliageTree;
use crate::graft::{consistent_family, graft_anatomy, ConsistentFamily};
use crate::tree::{FinTree, NodeId, NodeSet, Region};
use crate::universe::{FiniteSets, PointSet};

/// Fresh implant ids of the first and second graft of a family.
pub const FIRST_FRESH: NodeId = 100;
pub const SECOND_FRESH: NodeId = 200;

/// One forest per isomorphism class on exactly `n` nodes, ids `0..n`.
pub fn forest_classes(n: usize) -> Vec<FinTree> {
    let mut seen = BTreeSet::new();
    enumerate_small_trees(n)
        .expect("sizes stay under the enumerator bound")
        .filter(|t| seen.insert(canonical_form(t)))
        .collect()
}

/// Forest classes on `1..=max` nodes.
pub fn hosts(max: usize) -> Vec<FinTree> {
    (1..=max).flat_map(forest_classes).collect()
}

fn nonempty_antichains(t: &FinTree, within: &NodeSet) -> Vec<NodeSet> {
    let items: Vec<NodeId> = within.iter().copied().collect();
    (1u64..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect::<NodeSet>()
        })
        .filter(|a| t.is_antichain(a))
        .collect()
}

/// Every parent assignment for the implants `fresh` and the maxima `maxel`
/// under the root `r`, as graft skeletons. Implant parents are root or
/// implant; maxima hang below root or implant.
fn shapes(r: NodeId, maxel: &NodeSet, fresh: &[NodeId]) -> Vec<FinTree> {
    let slots: Vec<NodeId> = fresh.iter().chain(maxel.iter()).copied().collect();
    let choices: Vec<NodeId> = std::iter::once(r).chain(fresh.iter().copied()).collect();
    let k = choices.len();
    let mut out = Vec::new();
    for code in 0..(k as u64).pow(slots.len() as u32) {
        let mut c = code;
        let mut entries = vec![(r, None)];
        for &s in &slots {
            let p = choices[(c % k as u64) as usize];
            c /= k as u64;
            entries.push((s, Some(p)));
        }
        if entries.iter().any(|&(s, p)| Some(s) == p) {
            continue;
        }
        if let Ok(t) = FinTree::from_parents(entries) {
            out.push(t);
        }
    }
    out
}

/// A key that forgets which fresh id an implant node got.
fn shape_key(t: &FinTree, fresh: &[NodeId]) -> Vec<(NodeId, Option<NodeId>)> {
    let perms: Vec<Vec<NodeId>> = match fresh {
        [a, b] => vec![vec![*a, *b], vec![*b, *a]],
        _ => vec![fresh.to_vec()],
    };
    perms
        .iter()
        .map(|p| {
            let rename = |x: NodeId| fresh.iter().position(|&f| f == x).map_or(x, |i| p[i]);
            let mut v: Vec<(NodeId, Option<NodeId>)> = t
                .nodes()
                .map(|x| (rename(x), t.parent_of(x).expect("node").map(rename)))
                .collect();
            v.sort();
            v
        })
        .min()
        .expect("at least one permutation")
}

/// Valid grafts for `host` with at most `max_implants` implant nodes, fresh
/// ids counting up from `fresh`. Grafts that differ only in how the fresh
/// ids are assigned are listed once.
pub fn grafts_for(host: &FinTree, max_implants: usize, fresh: NodeId) -> Vec<FinTree> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for r in host.nodes() {
        let down = host.region(r, Region::Down).expect("host node");
        for maxel in nonempty_antichains(host, &down) {
            for k in 0..=max_implants {
                let ids: Vec<NodeId> = (0..k as NodeId).map(|i| fresh + i).collect();
                for g in shapes(r, &maxel, &ids) {
                    if g.maxel() != maxel || !graft_anatomy(host, &g).is_graft() {
                        continue;
                    }
                    if seen.insert(shape_key(&g, &ids)) {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

/// Consistent families of one or two grafts.
pub fn families(host: &FinTree, max_implants: usize) -> Vec<ConsistentFamily> {
    let first = grafts_for(host, max_implants, FIRST_FRESH);
    let second = grafts_for(host, max_implants, SECOND_FRESH);
    let mut out: Vec<ConsistentFamily> = first
        .iter()
        .map(|g| consistent_family(host, std::slice::from_ref(g)))
        .collect();
    for (i, a) in first.iter().enumerate() {
        for b in &second[i + 1..] {
            let fam = consistent_family(host, &[a.clone(), b.clone()]);
            if fam.is_consistent() {
                out.push(fam);
            }
        }
    }
    debug_assert!(out.iter().all(ConsistentFamily::is_consistent));
    out
}

/// Replayable form of a family.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyWitness {
    pub host: TreeJson,
    pub grafts: Vec<TreeJson>,
}

impl FamilyWitness {
    pub fn of(fam: &ConsistentFamily) -> Self {
        FamilyWitness {
            host: tree_json(&fam.host),
            grafts: fam.grafts.iter().map(|g| tree_json(&g.graft)).collect(),
        }
    }
}

/// A host foliage tree with its foliage grafts.
#[derive(Debug, Clone)]
pub struct FoliageInstance<S> {
    pub host: FoliageTree<S>,
    pub grafts: Vec<FoliageTree<S>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FoliageWitness<S> {
    pub host: TreeJson<S>,
    pub grafts: Vec<TreeJson<S>>,
}

impl<S: Clone> FoliageInstance<S> {
    pub fn witness(&self) -> FoliageWitness<S> {
        FoliageWitness {
            host: foliage_json(&self.host),
            grafts: self.grafts.iter().map(foliage_json).collect(),
        }
    }
}

/// Leaf maps on `t` where every leaf sits inside its parent's leaf.
fn nonincreasing_leaves(u: &FiniteSets, t: &FinTree, top: &BTreeMap<NodeId, PointSet>) -> Vec<BTreeMap<NodeId, PointSet>> {
    let order: Vec<NodeId> = {
        let mut v: Vec<NodeId> = t.nodes().collect();
        v.sort_by_key(|&x| t.height_of(x).expect("node"));
        v
    };
    let subsets = u.all_subsets();
    let mut acc = vec![BTreeMap::new()];
    for x in order {
        let mut next = Vec::new();
        for m in acc {
            if let Some(fixed) = top.get(&x) {
                let p = t.parent_of(x).expect("node");
                if p.map_or(true, |p: NodeId| fixed.is_subset(&m[&p])) {
                    let mut m = m.clone();
                    m.insert(x, fixed.clone());
                    next.push(m);
                }
                continue;
            }
            let bound = match t.parent_of(x).expect("node") {
                Some(p) => m[&p].clone(),
                None => u.full(),
            };
            for s in subsets.iter().filter(|s| s.is_subset(&bound)) {
                let mut m = m.clone();
                m.insert(x, s.clone());
                next.push(m);
            }
        }
        acc = next;
    }
    acc
}

/// Exhaustive finite-universe instances: hosts on at most `max_nodes` nodes
/// with every nonincreasing leaf map over `size` points, and every foliage
/// graft family of one or two grafts whose implants have at most
/// `max_implants` nodes.
pub fn tier1(max_nodes: usize, size: u32, max_implants: usize) -> Vec<FoliageInstance<PointSet>> {
    let u = FiniteSets::new(size);
    let mut out = Vec::new();
    for host in hosts(max_nodes) {
        let fams = families(&host, max_implants);
        for leaves in nonincreasing_leaves(&u, &host, &BTreeMap::new()) {
            let f = FoliageTree::new(host.clone(), leaves.clone()).expect("leaves cover the host");
            out.push(FoliageInstance {
                host: f.clone(),
                grafts: Vec::new(),
            });
            for fam in &fams {
                let mut per_graft = vec![Vec::new()];
                for g in &fam.grafts {
                    let fixed: BTreeMap<NodeId, PointSet> =
                        g.maxel.iter().map(|&m| (m, leaves[&m].clone())).collect();
                    let root_leaf = &leaves[&g.root()];
                    let options: Vec<FoliageTree<PointSet>> = nonincreasing_leaves(&u, &g.graft, &fixed)
                        .into_iter()
                        .filter(|l| l[&g.root()].is_subset(root_leaf))
                        .map(|l| FoliageTree::new(g.graft.clone(), l).expect("leaves cover the graft"))
                        .collect();
                    per_graft = per_graft
                        .into_iter()
                        .flat_map(|pre| {
                            options.iter().map(move |o| {
                                let mut v = pre.clone();
                                v.push(o.clone());
                                v
                            })
                        })
                        .collect();
                }
                out.extend(per_graft.into_iter().map(|grafts| FoliageInstance {
                    host: f.clone(),
                    grafts,
                }));
            }
        }
    }
    out
}

/// Host leaves for the symbolic instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tier2Host {
    /// Cylinder leaves everywhere.
    Cylinders,
    /// Cylinder leaves, except that maximal nodes carry the single point
    /// continuing their sequence with zeros.
    Pointed,
}

/// A random foliage instance on the standard tree of the given view: one or
/// two grafts whose implant leaves are unions of the maxima leaves above
/// them and whose root leaves add a random set of root sons.
pub fn tier2<R: Rng>(rng: &mut R, view: StdTreeView, kind: Tier2Host) -> FoliageInstance<SetExpr> {
    let base = std_tree(view);
    let host = match kind {
        Tier2Host::Cylinders => base,
        Tier2Host::Pointed => {
            let maxel = base.skeleton().maxel();
            base.map_leaves(|id, leaf| {
                if maxel.contains(&id) {
                    let s = base.skeleton().label(id).expect("labeled").clone();
                    SetExpr::compact(CompactCode::singleton(&s))
                } else {
                    leaf.clone()
                }
            })
        }
    };
    let t = host.skeleton();
    let inner: Vec<NodeId> = t.nodes().filter(|&x| !t.sons(x).expect("node").is_empty()).collect();
    loop {
        let count = rng.gen_range(1..=2usize);
        let mut grafts = Vec::new();
        for fresh in [FIRST_FRESH, SECOND_FRESH].into_iter().take(count) {
            let r = *inner.choose(rng).expect("the view has an inner node");
            let down = t.region(r, Region::Down).expect("node");
            let maxel = sample_antichain(rng, t, &down);
            let k = rng.gen_range(0..=2usize);
            let ids: Vec<NodeId> = (0..k as NodeId).map(|j| fresh + j).collect();
            let options: Vec<FinTree> = shapes(r, &maxel, &ids)
                .into_iter()
                .filter(|g| g.maxel() == maxel && graft_anatomy(t, g).is_graft())
                .collect();
            let Some(g) = options.choose(rng).cloned() else {
                continue;
            };
            grafts.push(leaf_graft(rng, &host, g, r));
        }
        if grafts.is_empty() {
            continue;
        }
        let skeletons: Vec<FinTree> = grafts.iter().map(|g| g.skeleton().clone()).collect();
        if consistent_family(t, &skeletons).is_consistent() {
            return FoliageInstance { host, grafts };
        }
    }
}

/// A random antichain of at most three nodes from `within`.
fn sample_antichain<R: Rng>(rng: &mut R, t: &FinTree, within: &NodeSet) -> NodeSet {
    let items: Vec<NodeId> = within.iter().copied().collect();
    loop {
        let take = rng.gen_range(1..=3usize.min(items.len()));
        let pick: NodeSet = items.choose_multiple(rng, take).copied().collect();
        if t.is_antichain(&pick) {
            return pick;
        }
    }
}

fn leaf_graft<R: Rng>(rng: &mut R, host: &FoliageTree<SetExpr>, g: FinTree, r: NodeId) -> FoliageTree<SetExpr> {
    let t = host.skeleton();
    let maxel = g.maxel();
    let mut leaves: BTreeMap<NodeId, SetExpr> = BTreeMap::new();
    for x in g.nodes() {
        let leaf = if maxel.contains(&x) {
            host.leaf(x).expect("host node").clone()
        } else {
            let above = g.region(x, Region::Down).expect("node");
            SetExpr::union_all(above.intersection(&maxel).map(|m| host.leaf(*m).expect("host node").clone()))
        };
        leaves.insert(x, leaf);
    }
    let extra: Vec<SetExpr> = t
        .sons(r)
        .expect("node")
        .into_iter()
        .filter(|_| rng.gen_bool(0.5))
        .map(|s| host.leaf(s).expect("host node").clone())
        .collect();
    let root_leaf = SetExpr::union_all(std::iter::once(leaves[&r].clone()).chain(extra));
    leaves.insert(r, root_leaf);
    FoliageTree::new(g, leaves).expect("leaves cover the graft")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baire::{BaireExact, BaireWindow};
    use crate::graft::foliage_family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn forest_class_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| forest_classes(n).len()).collect();
        assert_eq!(counts, [1, 2, 4, 9, 20]);
    }

    #[test]
    fn chain_of_two_has_three_graft_shapes() {
        let host = FinTree::from_parents([(0, None), (1, Some(0))]).unwrap();
        // Root to maximum directly, or through one fresh node; two fresh
        // nodes stacked is the third.
        assert_eq!(grafts_for(&host, 2, FIRST_FRESH).len(), 3);
        assert_eq!(grafts_for(&host, 0, FIRST_FRESH).len(), 1);
    }

    #[test]
    fn every_family_is_consistent() {
        for host in hosts(4) {
            for fam in families(&host, 2) {
                assert!(fam.is_consistent());
                assert!(fam.grafts.len() <= 2);
            }
        }
    }

    #[test]
    fn tier1_instances_are_foliage_families() {
        let u = FiniteSets::new(2);
        for inst in tier1(2, 2, 1) {
            let fam = foliage_family(&u, &inst.host, &inst.grafts).unwrap();
            assert!(fam.is_consistent(), "{:?}", fam.violations);
        }
    }

    #[test]
    fn tier2_instances_are_foliage_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = BaireExact::new(BaireWindow::new(2, 3));
        for kind in [Tier2Host::Cylinders, Tier2Host::Pointed] {
            for _ in 0..10 {
                let inst = tier2(&mut rng, StdTreeView::new(3, 3), kind);
                let fam = foliage_family(&u, &inst.host, &inst.grafts).unwrap();
                assert!(fam.is_consistent(), "{:?}", fam.violations);
            }
        }
    }
}
