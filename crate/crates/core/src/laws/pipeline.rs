//! Suites over the pipeline: blueprint and stage invariants, hybrid leaves on
//! blueprint nodes, the shoot lemma on produced certificates, and the
//! end-to-end window checks.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{LawConfig, Tally};
use crate::baire::SetExpr;
use crate::pipeline::{
    blueprint_checks, hybrid_checks, pipeline_run, BpNode, GraftBlueprint, LazyFoliage, PiHybrid, PiNode, PipelineError,
    PipelineState, StdLazy,
};
use crate::report::{CheckRecord, Status};
use crate::seq::Seq;

fn error_record(id: &str, e: PipelineError) -> CheckRecord {
    CheckRecord::check(id, false).detail(e.to_string())
}

/// The truncated conclusion of the shoot lemma at `x` and `y`.
///
/// Takes the exception sets `E` among the first two sons of `y`; for each,
/// the member `D` of the shoot of `y` that drops `E` must contain the
/// nonempty flesh of the sons of `x` outside `exceptions` that land outside
/// `E`. Returns how many families were compared.
pub fn shoot_lemma_check<A, B, E>(
    a: &A,
    x: &A::Node,
    b: &B,
    y: &B::Node,
    exceptions: &BTreeSet<A::Node>,
    embed: E,
    count: usize,
) -> Result<usize, String>
where
    A: LazyFoliage,
    B: LazyFoliage,
    E: Fn(&A::Node) -> Option<B::Node>,
{
    let head = b.sons(y, 2);
    let sons: Vec<A::Node> = a
        .sons(x, count + exceptions.len())
        .into_iter()
        .filter(|s| !exceptions.contains(s))
        .collect();
    let mut compared = 0;
    for mask in 0u32..1 << head.len() {
        let dropped: Vec<&B::Node> = head.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s).collect();
        let d = SetExpr::diff(b.tail_flesh(y, 0), SetExpr::union_all(dropped.iter().map(|s| b.leaf(s))));
        if d.is_empty_exact() {
            continue;
        }
        let kept = sons.iter().filter(|s| embed(s).map_or(false, |t| !dropped.contains(&&t)));
        let g = SetExpr::union_all(kept.map(|s| a.leaf(s)));
        if g.is_empty_exact() {
            return Err(format!("no nonempty member below {x:?} after dropping {dropped:?}"));
        }
        if !g.subset_exact(&d) {
            return Err(format!("member below {x:?} leaves the shoot of {y:?} after dropping {dropped:?}"));
        }
        compared += 1;
    }
    Ok(compared)
}

fn first_stage(cfg: &LawConfig) -> Result<PipelineState, PipelineError> {
    let k = cfg.compacts.len().min(1);
    pipeline_run(&cfg.compacts, k, cfg.trunc).map(|r| r.state)
}

pub(super) fn lemma_about_shoots(cfg: &LawConfig) -> Vec<CheckRecord> {
    let (d, w) = (cfg.trunc.depth, cfg.trunc.width);
    let count = w as usize;
    let mut out = Vec::new();
    let mut bp_tally = Tally::new("lemma-about-shoots");
    for (i, c) in cfg.compacts.iter().enumerate() {
        let bp = match GraftBlueprint::build(0, Seq::empty(), Arc::new(c.clone())) {
            Ok(bp) => bp,
            Err(e) => {
                out.push(error_record("lemma-about-shoots", e).param("compact", i));
                continue;
            }
        };
        let certs = bp
            .truncation(d, w)
            .and_then(|t| bp.preserves_shoots_check(&bp.shoot_samples(&t), count));
        match certs {
            Ok(certs) => {
                for cert in certs {
                    if cert.refinement.status != Status::Pass {
                        bp_tally.skip();
                        continue;
                    }
                    let r = shoot_lemma_check(&bp, &cert.witness, &StdLazy, &cert.target, &cert.exceptions, |n| bp.host_seq(n), count);
                    bp_tally.check(r.is_ok(), || r.clone().unwrap_err(), || super::json(&cert));
                }
            }
            Err(e) => out.push(error_record("lemma-about-shoots", e).param("compact", i)),
        }
    }
    out.push(bp_tally.record().param("source", "blueprint").param("depth", d).param("width", w));

    let mut h_tally = Tally::new("lemma-about-shoots");
    match first_stage(cfg) {
        Ok(state) => {
            let h = PiHybrid::new(&state);
            let samples = h.sample_pairs(cfg.seed, cfg.shoot_samples, cfg.hybrid_depth, cfg.hybrid_width);
            match h.shoots_into_check(&samples, count) {
                Ok(certs) => {
                    for (_, cert) in certs {
                        if cert.refinement.status != Status::Pass {
                            h_tally.skip();
                            continue;
                        }
                        let embed = |n: &PiNode| match n {
                            PiNode::Supp(s) => Some(s.clone()),
                            PiNode::Imp { .. } => None,
                        };
                        let r = shoot_lemma_check(&h, &cert.witness, &StdLazy, &cert.target, &cert.exceptions, embed, count);
                        h_tally.check(r.is_ok(), || r.clone().unwrap_err(), || super::json(&cert));
                    }
                }
                Err(e) => out.push(error_record("lemma-about-shoots", e).param("source", "hybrid")),
            }
        }
        Err(e) => out.push(error_record("lemma-about-shoots", e).param("source", "hybrid")),
    }
    out.push(h_tally.record().param("source", "hybrid").param("seed", cfg.seed));
    out
}

pub(super) fn lemma_6_1(cfg: &LawConfig) -> Vec<CheckRecord> {
    let (d, w) = (cfg.trunc.depth, cfg.trunc.width);
    let run = match pipeline_run(&cfg.compacts, cfg.compacts.len(), cfg.trunc) {
        Ok(r) => r,
        Err(e) => return vec![error_record("lemma-6.1", e)],
    };
    let h = PiHybrid::new(&run.state);
    let win = match h.materialize(d, w) {
        Ok(win) => win,
        Err(e) => return vec![error_record("lemma-6.1", e)],
    };
    let mut t = Tally::new("lemma-6.1");
    for n in &win.nodes {
        let (bp, node) = match n {
            PiNode::Imp { stage, root, x, level } => match h.blueprints().find(|bp| bp.stage == *stage && bp.root == *root) {
                Some(bp) => (bp, BpNode::Imp { x: x.clone(), level: *level }),
                None => {
                    t.check(false, || format!("implant {n:?} has no blueprint"), || super::json(n));
                    continue;
                }
            },
            PiNode::Supp(s) => match h.rooted_at(s) {
                Some(bp) => (bp, BpNode::Root),
                None => {
                    t.skip();
                    continue;
                }
            },
        };
        let ok = match (h.leaf(n), bp.leaf(&node)) {
            (Ok(lh), Ok(lb)) => lh.equal_exact(&SetExpr::diff(lb, h.loss().clone())),
            _ => false,
        };
        t.check(ok, || format!("leaf of {n:?} is not the blueprint leaf minus the loss"), || super::json(n));
    }
    vec![t.record().param("depth", d).param("width", w).param("stages", run.state.len())]
}

pub(super) fn blueprint(cfg: &LawConfig) -> Vec<CheckRecord> {
    let (d, w) = (cfg.trunc.depth, cfg.trunc.width);
    let mut out = Vec::new();
    for (i, c) in cfg.compacts.iter().enumerate() {
        match GraftBlueprint::build(0, Seq::empty(), Arc::new(c.clone())).and_then(|bp| blueprint_checks(&bp, d, w)) {
            Ok(records) => out.extend(records.into_iter().map(|r| r.param("compact", i))),
            Err(e) => out.push(error_record("blueprint-build", e).param("compact", i)),
        }
    }
    // Later stages reach blueprints rooted below the first antichain.
    match pipeline_run(&cfg.compacts, cfg.compacts.len(), cfg.trunc) {
        Ok(run) => {
            for stage in run.state.stages.iter().skip(1) {
                for bp in &stage.psi {
                    match blueprint_checks(bp, d, w) {
                        Ok(records) => out.extend(records.into_iter().map(|r| r.param("compact", stage.n))),
                        Err(e) => out.push(error_record("blueprint-build", e).param("compact", stage.n)),
                    }
                }
            }
        }
        Err(e) => out.push(error_record("blueprint-build", e)),
    }
    out
}

pub(super) fn stages(cfg: &LawConfig) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    for k in 1..=cfg.compacts.len() {
        match pipeline_run(&cfg.compacts, k, cfg.trunc) {
            Ok(run) => out.extend(run.records.into_iter().map(|r| r.param("stages", k))),
            Err(e) => out.push(error_record("pipeline-run", e).param("stages", k)),
        }
    }
    out
}

pub(super) fn pi_tree(cfg: &LawConfig) -> Vec<CheckRecord> {
    let state = match first_stage(cfg) {
        Ok(s) => s,
        Err(e) => return vec![error_record("pi-tree", e)],
    };
    let h = PiHybrid::new(&state);
    match hybrid_checks(&h, cfg.hybrid_depth, cfg.hybrid_width, cfg.shoot_samples, cfg.seed) {
        Ok(records) => records,
        Err(e) => vec![error_record("pi-tree", e)],
    }
}
