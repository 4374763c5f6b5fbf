//! Graft blueprints below bad regions of compact sets, the stage recursion
//! that removes a sequence of compact sets, and the resulting hybrid of the
//! standard foliage tree, all inspected through finite truncations.

pub mod blueprint;
pub mod hybrid;
pub mod lazy;
pub mod state;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baire::{Class, ExprError, FiberError};
use crate::foliage::FoliageError;
use crate::graft::FoliageGraftError;
use crate::seq::Seq;
use crate::tree::TreeError;

pub use blueprint::{blueprint_checks, BlueprintWindow, BpNode, GraftBlueprint, ShootCertificate, Truncation};
pub use hybrid::{hybrid_checks, PiHybrid, PiNode, PiWindow, ShootCase};
pub use lazy::{grows_into, scope_chain, shoots_refinement, Growth, LazyFoliage, Refinement, StdLazy};
pub use state::{pipeline_run, pipeline_step, stage_checks, PipelineRun, PipelineState, Stage};

/// Truncation parameters: stratum depth, value width and the π-density threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trunc {
    pub depth: usize,
    pub width: u32,
    #[serde(default = "default_threshold")]
    pub threshold: u32,
}

fn default_threshold() -> u32 {
    2
}

impl Trunc {
    pub fn new(depth: usize, width: u32, threshold: u32) -> Self {
        Trunc {
            depth,
            width,
            threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("open set classifies {class:?} at root {root}, not a proper nonempty subset")]
    NotProper { root: Seq, class: Class },
    #[error("stage {stage}: open set is not pi-dense at depth {depth}, width {width}, threshold {threshold}")]
    NotPiDense {
        stage: usize,
        depth: usize,
        width: u32,
        threshold: u32,
    },
    #[error("{stages} stages requested but only {compacts} compact sets given")]
    TooManyStages { stages: usize, compacts: usize },
    #[error("sample point {0} is outside the open set")]
    SampleOutside(String),
    #[error("sample point {0} lies in the loss")]
    SampleInLoss(String),
    #[error("{0} is not the root nor in the explant of the graft")]
    NotInDelta(Seq),
    #[error("{0} is not a prefix of the sample point")]
    NotAPrefix(Seq),
    #[error("invariant ({id}) failed: {detail}")]
    Invariant { id: String, detail: String },
    #[error(transparent)]
    Fiber(#[from] FiberError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Foliage(#[from] FoliageError),
    #[error(transparent)]
    Graft(#[from] FoliageGraftError),
}
