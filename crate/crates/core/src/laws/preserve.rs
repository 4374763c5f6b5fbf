//! Foliage hybrid laws: leaves after the loss, and the flags the hybrid
//! inherits from its host and grafts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::instances::{tier1, tier2, FoliageInstance, Tier2Host};
use super::{json, LawConfig, Tally};
use crate::baire::{BaireExact, BaireWindow, SetExpr, StdTreeView};
use crate::foliage::foliage_flags;
use crate::graft::{foliage_family, foliage_hybrid_build, HybridNode};
use crate::report::CheckRecord;
use crate::seq::full_tree;
use crate::universe::{FiniteSets, PointSet, Universe};

/// Tier-1 shapes: host nodes, universe points, implant nodes per graft.
const TIER1: &[(usize, u32, usize)] = &[(3, 3, 2), (2, 4, 2)];

fn tier1_instances() -> Vec<(FiniteSets, FoliageInstance<PointSet>)> {
    TIER1
        .iter()
        .flat_map(|&(n, size, k)| tier1(n, size, k).into_iter().map(move |i| (FiniteSets::new(size), i)))
        .collect()
}

fn tier2_instances(cfg: &LawConfig) -> Vec<FoliageInstance<SetExpr>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let view = StdTreeView::new(cfg.tier2_depth, cfg.tier2_width);
    (0..cfg.tier2_samples)
        .map(|k| {
            let kind = if k % 2 == 0 { Tier2Host::Cylinders } else { Tier2Host::Pointed };
            tier2(&mut rng, view, kind)
        })
        .collect()
}

fn tier2_universe(cfg: &LawConfig) -> BaireExact {
    BaireExact::new(BaireWindow::new(cfg.tier2_depth, cfg.tier2_width))
}

/// Sets that stand in for arbitrary `A` in the loss-avoidance clause.
trait Probes: Universe {
    fn probes(&self) -> Vec<Self::Set>;
}

impl Probes for FiniteSets {
    fn probes(&self) -> Vec<PointSet> {
        self.all_subsets()
    }
}

impl Probes for BaireExact {
    fn probes(&self) -> Vec<SetExpr> {
        full_tree(self.window.depth + 1, self.window.width)
            .into_iter()
            .map(SetExpr::cyl)
            .collect()
    }
}

fn lemma_5_15_on<U>(u: &U, inst: &FoliageInstance<U::Set>, a: &mut Tally, b: &mut Tally)
where
    U: Probes,
    U::Set: serde::Serialize,
{
    let w = || json(&inst.witness());
    let fam = foliage_family(u, &inst.host, &inst.grafts).expect("host is nonincreasing");
    if !fam.is_consistent() {
        a.check(false, || format!("generated family is inconsistent: {:?}", fam.violations), w);
        return;
    }
    let fh = foliage_hybrid_build(u, &inst.host, &fam).expect("consistent");
    let mut ok = true;
    for (i, g) in inst.grafts.iter().enumerate() {
        let anatomy = &fam.family.grafts[i];
        for x in g.skeleton().nodes() {
            let tag = if anatomy.implant.contains(&x) {
                HybridNode::Graft { graft: i, node: x }
            } else {
                HybridNode::Supp(x)
            };
            let id = fh.hybrid.id_of(tag).expect("graft nodes are hybrid nodes");
            let want = u.diff(g.leaf(x).expect("graft node"), &fam.loss);
            ok &= u.equal(fh.foliage.leaf(id).expect("hybrid node"), &want);
        }
    }
    a.check(ok, || "a graft-node leaf differs from the graft leaf minus the loss".into(), w);

    for set in u.probes() {
        let hyp = inst.grafts.iter().zip(&fam.family.grafts).all(|(g, anatomy)| {
            let r = anatomy.root();
            u.subset(&set, g.leaf(r).expect("root")) || u.disjoint(&set, inst.host.leaf(r).expect("root"))
        });
        if hyp {
            b.check(u.disjoint(&set, &fam.loss), || format!("probe {set:?} meets the loss"), w);
        } else {
            b.skip();
        }
    }
}

pub(super) fn lemma_5_15(cfg: &LawConfig) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let mut a = Tally::new("lemma-5.15(a)");
    let mut b = Tally::new("lemma-5.15(b)");
    for (u, inst) in tier1_instances().iter().filter(|(_, i)| !i.grafts.is_empty()) {
        lemma_5_15_on(u, inst, &mut a, &mut b);
    }
    out.push(a.record().param("tier", 1));
    out.push(b.record().param("tier", 1));
    let u = tier2_universe(cfg);
    let mut a = Tally::new("lemma-5.15(a)");
    let mut b = Tally::new("lemma-5.15(b)");
    for inst in tier2_instances(cfg) {
        lemma_5_15_on(&u, &inst, &mut a, &mut b);
    }
    out.push(a.record().param("tier", 2).param("seed", cfg.seed));
    out.push(b.record().param("tier", 2).param("seed", cfg.seed));
    out
}

struct Preservation {
    tallies: Vec<Tally>,
}

impl Preservation {
    const IDS: [&'static str; 6] = [
        "prop-5.17(a)",
        "prop-5.17(b)",
        "prop-5.17(c)",
        "prop-5.17(d)",
        "prop-5.17(d,strict)",
        "prop-5.17(e)",
    ];

    fn new() -> Self {
        Preservation {
            tallies: Self::IDS.iter().map(|id| Tally::new(*id)).collect(),
        }
    }

    fn run<U>(&mut self, u: &U, inst: &FoliageInstance<U::Set>)
    where
        U: Universe,
        U::Set: serde::Serialize,
    {
        let w = || json(&inst.witness());
        let fam = foliage_family(u, &inst.host, &inst.grafts).expect("host is nonincreasing");
        if !fam.is_consistent() {
            self.tallies[0].check(false, || format!("generated family is inconsistent: {:?}", fam.violations), w);
            return;
        }
        let h = foliage_hybrid_build(u, &inst.host, &fam).expect("consistent").foliage;
        let f = foliage_flags(u, &inst.host);
        let gs: Vec<_> = inst.grafts.iter().map(|g| foliage_flags(u, g)).collect();
        let bounded = inst.grafts.iter().all(|g| g.skeleton().has_bounded_chains());
        let hf = foliage_flags(u, &h);
        let t = &mut self.tallies;
        let mut law = |k: usize, hyp: bool, concl: bool| {
            if hyp {
                t[k].check(concl, || format!("{} fails on the hybrid", Self::IDS[k]), w);
            } else {
                t[k].skip();
            }
        };
        law(0, f.nonincreasing, hf.nonincreasing);
        law(1, f.splittable && gs.iter().all(|g| g.splittable), hf.splittable);
        law(2, f.locally_strict && gs.iter().all(|g| g.locally_strict), hf.locally_strict);
        law(3, f.complete && f.splittable && bounded, hf.complete);
        law(4, f.strict_branches && f.splittable && bounded, hf.strict_branches);
        law(5, f.open_in_universe && gs.iter().all(|g| g.open_in_universe), hf.open_in_universe);
    }

    fn records(self, tier: u8) -> impl Iterator<Item = CheckRecord> {
        self.tallies.into_iter().map(move |t| t.record().param("tier", tier))
    }
}

pub(super) fn prop_5_17(cfg: &LawConfig) -> Vec<CheckRecord> {
    let mut p = Preservation::new();
    for (u, inst) in &tier1_instances() {
        p.run(u, inst);
    }
    let mut out: Vec<CheckRecord> = p.records(1).collect();
    let u = tier2_universe(cfg);
    let mut p = Preservation::new();
    for inst in tier2_instances(cfg) {
        p.run(&u, &inst);
    }
    out.extend(p.records(2).map(|r| r.param("seed", cfg.seed)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tier2_hypotheses_are_met_somewhere() {
        let cfg = LawConfig {
            tier2_samples: 20,
            ..LawConfig::default()
        };
        let u = tier2_universe(&cfg);
        let mut p = Preservation::new();
        for inst in tier2_instances(&cfg) {
            p.run(&u, &inst);
        }
        let records: Vec<CheckRecord> = p.records(2).collect();
        for r in &records {
            assert!(r.passed(), "{r:?}");
        }
        let applicable = |id: &str| records.iter().find(|r| r.id == id).unwrap().params["applicable"].as_u64().unwrap();
        assert!(applicable("prop-5.17(b)") > 0);
        assert!(applicable("prop-5.17(d)") > 0);
        assert!(applicable("prop-5.17(d,strict)") > 0);
    }
}
