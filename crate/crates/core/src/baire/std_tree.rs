//! The truncated standard foliage tree: `(^{<depth} width, ⊂)` with cylinder leaves.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::expr::SetExpr;
use super::BaireWindow;
use crate::foliage::FoliageTree;
use crate::tree::FinTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StdTreeView {
    pub depth: usize,
    pub width: u32,
}

impl StdTreeView {
    pub fn new(depth: usize, width: u32) -> Self {
        StdTreeView { depth, width }
    }

    /// The window whose stratum holds the deepest nodes of the view.
    pub fn window(&self) -> BaireWindow {
        BaireWindow::new(self.depth.saturating_sub(1), self.width)
    }
}

pub fn std_tree(view: StdTreeView) -> FoliageTree<SetExpr> {
    let skeleton = FinTree::full(view.depth, view.width);
    let leaves: BTreeMap<_, _> = skeleton
        .nodes()
        .map(|id| {
            let label = skeleton.label(id).expect("full trees are labeled").clone();
            (id, SetExpr::cyl(label))
        })
        .collect();
    FoliageTree::new(skeleton, leaves).expect("leaves cover the skeleton")
}
