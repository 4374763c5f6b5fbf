//! Foliage laws on small finite-universe instances.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::instances::{forest_classes, FoliageInstance};
use super::{json, LawConfig, Tally};
use crate::foliage::{flesh_of, foliage_flags, fruit_of, is_locally_strict, is_splittable, pi_refines, yield_of, FoliageTree};
use crate::report::CheckRecord;
use crate::tree::{FinTree, NodeId, NodeSet};
use crate::universe::{FiniteSets, PointSet};

/// Every leaf map on `t` over `u`, nonincreasing or not.
fn all_leaf_maps(u: &FiniteSets, t: &FinTree) -> Vec<FoliageTree<PointSet>> {
    let subsets = u.all_subsets();
    let nodes: Vec<NodeId> = t.nodes().collect();
    let mut out = Vec::new();
    let total = subsets.len().pow(nodes.len() as u32);
    for code in 0..total {
        let mut c = code;
        let leaves: BTreeMap<NodeId, PointSet> = nodes
            .iter()
            .map(|&x| {
                let s = subsets[c % subsets.len()].clone();
                c /= subsets.len();
                (x, s)
            })
            .collect();
        out.push(FoliageTree::new(t.clone(), leaves).expect("every node has a leaf"));
    }
    out
}

fn node_subsets(t: &FinTree) -> Vec<NodeSet> {
    let nodes: Vec<NodeId> = t.nodes().collect();
    (1u64..1 << nodes.len())
        .map(|mask| {
            nodes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect()
}

fn witness(f: &FoliageTree<PointSet>) -> serde_json::Value {
    json(
        &FoliageInstance {
            host: f.clone(),
            grafts: Vec::new(),
        }
        .witness(),
    )
}

/// Sizes for the foliage instances: nodes and universe points.
const CLAUSE_A: &[(usize, u32)] = &[(1, 2), (2, 2), (3, 2), (4, 2), (5, 1)];
const CLAUSE_B: &[(usize, u32)] = &[(1, 3), (2, 3), (3, 3), (4, 2)];

pub(super) fn lemma_3_8(_cfg: &LawConfig) -> Vec<CheckRecord> {
    let mut a = Tally::new("lemma-3.8(a)");
    for &(n, size) in CLAUSE_A {
        let u = FiniteSets::new(size);
        for t in forest_classes(n) {
            let sets = node_subsets(&t);
            for f in all_leaf_maps(&u, &t) {
                if !foliage_flags(&u, &f).nonincreasing {
                    continue;
                }
                for big in &sets {
                    let whole = fruit_of(&u, &f, big).expect("nonempty");
                    for small in sets.iter().filter(|s| s.is_subset(big)) {
                        let cofinal = big.iter().all(|&b| small.iter().any(|&x| t.le(b, x)));
                        if !cofinal {
                            a.skip();
                            continue;
                        }
                        let part = fruit_of(&u, &f, small).expect("nonempty");
                        a.check(part == whole, || format!("fruits of {small:?} and {big:?} differ"), || witness(&f));
                    }
                }
            }
        }
    }

    let mut b = Tally::new("lemma-3.8(b)");
    for &(n, size) in CLAUSE_B {
        let u = FiniteSets::new(size);
        for t in forest_classes(n).into_iter().filter(|t| t.least().is_some()) {
            for f in all_leaf_maps(&u, &t) {
                let strict = is_locally_strict(&u, &f);
                let flesh = flesh_of(&u, &f, &t.node_set()).expect("nodes of the tree");
                let other = is_splittable(&u, &f) && flesh == yield_of(&u, &f);
                b.check(
                    strict == other,
                    || format!("locally strict is {strict}, splittable with flesh = yield is {other}"),
                    || witness(&f),
                );
            }
        }
    }
    vec![a.record(), b.record()]
}

pub(super) fn pi_refines_laws(cfg: &LawConfig) -> Vec<CheckRecord> {
    let u = FiniteSets::new(4);
    let subsets = u.all_subsets();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let family = |rng: &mut ChaCha8Rng| -> Vec<PointSet> {
        let k = rng.gen_range(1..=3);
        (0..k).map(|_| subsets[rng.gen_range(0..subsets.len())].clone()).collect()
    };
    // Mostly coarsens `g`, so that chains of refinements are common.
    let coarser = |rng: &mut ChaCha8Rng, g: &[PointSet]| -> Vec<PointSet> {
        let mut out = family(rng);
        for d in out.iter_mut() {
            if rng.gen_bool(0.75) {
                *d = &*d | &g[rng.gen_range(0..g.len())];
            }
        }
        out
    };
    let mut trans = Tally::new("pi-refines-transitive");
    let mut refl = Tally::new("pi-refines-reflexive");
    for _ in 0..2000 {
        let g = family(&mut rng);
        let d = coarser(&mut rng, &g);
        let e = coarser(&mut rng, &d);
        refl.check(pi_refines(&u, &g, &g), || "a family fails to refine itself".into(), || json(&g));
        if pi_refines(&u, &g, &d) && pi_refines(&u, &d, &e) {
            trans.check(pi_refines(&u, &g, &e), || "refinement does not compose".into(), || json(&(&g, &d, &e)));
        } else {
            trans.skip();
        }
    }
    vec![
        trans.record().param("seed", cfg.seed),
        refl.record().param("seed", cfg.seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf_maps_are_exhaustive() {
        let t = FinTree::from_parents([(0, None), (1, Some(0))]).unwrap();
        assert_eq!(all_leaf_maps(&FiniteSets::new(2), &t).len(), 16);
    }

    #[test]
    fn transitivity_is_exercised() {
        let r = pi_refines_laws(&LawConfig::default());
        assert!(r.iter().all(CheckRecord::passed));
        assert!(r[0].params["applicable"].as_u64().unwrap() > 100);
    }
}
