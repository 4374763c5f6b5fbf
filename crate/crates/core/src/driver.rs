//! The `run`, `verify-laws` and `export` commands, short of file I/O.

use crate::config::{Fixture, RunConfig};
use crate::export::{window_dot, window_json};
use crate::laws::{run_suites, LawError};
use crate::pipeline::{hybrid_checks, pipeline_run, stage_checks, PiHybrid, PiWindow, PipelineError, PipelineState};
use crate::report::{CheckRecord, Report, Status};

/// Sampled pairs for the shoot checks of a run.
pub const RUN_SHOOT_SAMPLES: usize = 50;

#[derive(Debug)]
pub struct RunOutput {
    pub report: Report,
    /// Absent when the pipeline itself failed.
    pub window: Option<PiWindow>,
}

impl RunOutput {
    pub fn dot(&self) -> Option<String> {
        self.window.as_ref().map(|w| window_dot(w, "pi_tree"))
    }

    pub fn json(&self) -> Option<String> {
        self.window.as_ref().map(|w| {
            let mut s = serde_json::to_string_pretty(&window_json(w)).expect("trees serialize");
            s.push('\n');
            s
        })
    }
}

fn corrupt(state: &mut PipelineState) {
    if let Some(stage) = state.stages.iter_mut().rev().find(|s| !s.psi.is_empty()) {
        let twin = stage.psi[0].clone();
        stage.psi.push(twin);
    }
}

fn build(cfg: &RunConfig, report: &mut Report) -> Result<PiWindow, PipelineError> {
    let p = &cfg.pipeline;
    let run = pipeline_run(&p.compacts, p.stages(), p.trunc)?;
    report.extend(run.records);
    let mut state = run.state;
    if cfg.fixture == Some(Fixture::CorruptFamily) {
        corrupt(&mut state);
        report.extend(
            stage_checks(&state, &p.trunc)?
                .into_iter()
                .map(|r| r.param("fixture", "corrupt-family")),
        );
    }
    let h = PiHybrid::new(&state);
    let w = cfg.window();
    report.extend(hybrid_checks(&h, w.depth, w.width, RUN_SHOOT_SAMPLES, cfg.seed)?);
    h.materialize(w.depth, w.width)
}

/// Failing records without a witness get the configuration that reproduces
/// them.
fn attach_replay(report: Report, cfg: &RunConfig) -> Report {
    let replay = serde_json::to_value(cfg).expect("configs serialize");
    let records = report
        .records
        .into_iter()
        .map(|r| match (r.status, &r.witness) {
            (Status::Fail, None) => CheckRecord {
                witness: Some(replay.clone()),
                ..r
            },
            _ => r,
        })
        .collect();
    Report { records }.finish()
}

/// Runs the pipeline, checks its window, and runs the configured suites.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutput, LawError> {
    let mut report = Report::new();
    let window = match build(cfg, &mut report) {
        Ok(w) => Some(w),
        Err(e) => {
            report.push(CheckRecord::check("pipeline-run", false).detail(e.to_string()));
            None
        }
    };
    let suites = cfg.suites();
    if !suites.is_empty() {
        report.extend(run_suites(&suites, &cfg.law_config())?.records);
    }
    Ok(RunOutput {
        report: attach_replay(report, cfg),
        window,
    })
}

pub fn cmd_verify_laws(cfg: &RunConfig) -> Result<Report, LawError> {
    let report = run_suites(&cfg.suites(), &cfg.law_config())?;
    Ok(attach_replay(report, cfg))
}

/// The window of the hybrid, without checks.
pub fn cmd_export(cfg: &RunConfig) -> Result<PiWindow, PipelineError> {
    let p = &cfg.pipeline;
    let mut state = pipeline_run(&p.compacts, p.stages(), p.trunc)?.state;
    if cfg.fixture == Some(Fixture::CorruptFamily) {
        corrupt(&mut state);
    }
    let w = cfg.window();
    PiHybrid::new(&state).materialize(w.depth, w.width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::pipeline::PiNode;
    use crate::seq::{full_tree, Seq};

    #[test]
    fn empty_compacts_give_the_standard_tree() {
        let cfg = parse_config(r#"{"pipeline": {"compacts": [], "trunc": {"depth": 2, "width": 2}}}"#).unwrap();
        let out = cmd_run(&cfg).unwrap();
        assert_eq!(out.report.exit_code(), 0, "{:?}", out.report.failures().collect::<Vec<_>>());
        let w = out.window.unwrap();
        // Window depth 3 keeps sequences up to length 3.
        let mut want: Vec<PiNode> = full_tree(4, 2).into_iter().map(PiNode::Supp).collect();
        let mut got = w.nodes.clone();
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(w.foliage.skeleton().least().map(|i| w.node(i).clone()), Some(PiNode::Supp(Seq::empty())));
    }

    #[test]
    fn a_corrupted_family_fails_with_a_witness() {
        let text = r#"{"pipeline": {"compacts": [{"table": {}, "depth": 0}], "trunc": {"depth": 3, "width": 3}}, "fixture": "corrupt-family"}"#;
        let out = cmd_run(&parse_config(text).unwrap()).unwrap();
        assert_eq!(out.report.exit_code(), 1);
        let bad: Vec<&CheckRecord> = out.report.failures().collect();
        assert!(bad.iter().any(|r| r.id == "g4"));
        assert!(bad.iter().all(|r| r.witness.is_some()));
    }
}
