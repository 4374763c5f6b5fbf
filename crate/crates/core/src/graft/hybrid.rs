//! The hybrid of a host and a consistent family: explants swapped for implants.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ConsistentFamily, FamilyViolation};
use crate::tree::{FinTree, NodeId, NodeSet, Relation, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HybridError {
    #[error("family is inconsistent: clause ({}) for grafts {:?}: {}", .0.clause, .0.grafts, .0.detail)]
    InconsistentFamily(FamilyViolation),
    #[error("{0:?} is not a node of the hybrid")]
    InvalidNode(HybridNode),
    #[error("node set is not a branch of the hybrid")]
    NotABranch,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A hybrid node: a support node of the host, or an implant node of one graft.
/// Graft roots and maxima are support nodes and only ever appear as `Supp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HybridNode {
    Supp(NodeId),
    Graft { graft: usize, node: NodeId },
}

fn validate(fam: &ConsistentFamily, x: HybridNode) -> Result<(), HybridError> {
    let ok = match x {
        HybridNode::Supp(s) => fam.support.contains(&s),
        HybridNode::Graft { graft, node } => fam
            .grafts
            .get(graft)
            .is_some_and(|g| g.implant.contains(&node)),
    };
    if ok {
        Ok(())
    } else {
        Err(HybridError::InvalidNode(x))
    }
}

/// The strict hybrid order, case by case.
fn hybrid_lt(fam: &ConsistentFamily, x: HybridNode, y: HybridNode) -> bool {
    let host = &fam.host;
    match (x, y) {
        (HybridNode::Supp(a), HybridNode::Supp(b)) => host.lt(a, b),
        (HybridNode::Graft { graft: d, node: a }, HybridNode::Graft { graft: e, node: b }) if d == e => {
            fam.grafts[d].graft.lt(a, b)
        }
        (HybridNode::Supp(a), HybridNode::Graft { graft, .. }) => host.le(a, fam.grafts[graft].root()),
        (HybridNode::Graft { graft, node: a }, HybridNode::Supp(b)) => {
            let g = &fam.grafts[graft];
            fam.maxel_down[graft].contains(&b)
                && host
                    .root_in_antichain(b, &g.maxel)
                    .is_ok_and(|r| g.graft.lt(a, r))
        }
        (HybridNode::Graft { graft: d, node: a }, HybridNode::Graft { graft: e, .. }) => {
            let (gd, ge) = (&fam.grafts[d], &fam.grafts[e]);
            let re = ge.root();
            fam.maxel_down[d].contains(&re)
                && host
                    .root_in_antichain(re, &gd.maxel)
                    .is_ok_and(|r| gd.graft.lt(a, r))
        }
    }
}

pub fn hybrid_relate(
    fam: &ConsistentFamily,
    x: HybridNode,
    y: HybridNode,
) -> Result<Relation, HybridError> {
    validate(fam, x)?;
    validate(fam, y)?;
    Ok(if x == y {
        Relation::Equal
    } else if hybrid_lt(fam, x, y) {
        Relation::Less
    } else if hybrid_lt(fam, y, x) {
        Relation::Greater
    } else {
        Relation::Incomparable
    })
}

/// The hybrid as a tree over dense ids, with the tag of every id.
#[derive(Debug, Clone, PartialEq)]
pub struct Hybrid {
    pub tree: FinTree,
    tags: Vec<HybridNode>,
    index: BTreeMap<HybridNode, NodeId>,
}

impl Hybrid {
    pub fn tag(&self, id: NodeId) -> HybridNode {
        self.tags[id as usize]
    }

    pub fn tags(&self) -> &[HybridNode] {
        &self.tags
    }

    pub fn id_of(&self, x: HybridNode) -> Option<NodeId> {
        self.index.get(&x).copied()
    }
}

/// Support nodes first, then implants graft by graft.
pub fn hybrid_nodes(fam: &ConsistentFamily) -> Vec<HybridNode> {
    let mut out: Vec<HybridNode> = fam.support.iter().map(|&s| HybridNode::Supp(s)).collect();
    for (i, g) in fam.grafts.iter().enumerate() {
        out.extend(g.implant.iter().map(|&n| HybridNode::Graft { graft: i, node: n }));
    }
    out
}

pub fn hybrid_build(fam: &ConsistentFamily) -> Result<Hybrid, HybridError> {
    if let Some(v) = fam.violations.first() {
        return Err(HybridError::InconsistentFamily(v.clone()));
    }
    let tags = hybrid_nodes(fam);
    let ids: Vec<NodeId> = (0..tags.len() as NodeId).collect();
    let order = FinTree::from_order(&ids, |a, b| hybrid_lt(fam, tags[a as usize], tags[b as usize]))?;
    let entries: Vec<_> = ids
        .iter()
        .map(|&i| {
            let label = match tags[i as usize] {
                HybridNode::Supp(s) => fam.host.label(s).cloned(),
                HybridNode::Graft { graft, node } => fam.grafts[graft].graft.label(node).cloned(),
            };
            (i, order.parent_of(i).expect("id is a node"), label)
        })
        .collect();
    let tree = FinTree::from_entries(entries)?;
    let index = tags.iter().enumerate().map(|(i, &t)| (t, i as NodeId)).collect();
    Ok(Hybrid { tree, tags, index })
}

/// How a hybrid branch sits in the family's grafts and support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchTrace {
    /// `B ∩ nodes G`, in graft ids, for each graft the branch meets.
    pub per_graft: BTreeMap<usize, NodeSet>,
    /// `B ∩ supp`, in host ids.
    pub support_part: NodeSet,
}

pub fn branch_trace(
    fam: &ConsistentFamily,
    hybrid: &Hybrid,
    branch: &NodeSet,
) -> Result<BranchTrace, HybridError> {
    if !hybrid.tree.branches().contains(branch) {
        return Err(HybridError::NotABranch);
    }
    let mut per_graft: BTreeMap<usize, NodeSet> = BTreeMap::new();
    let mut support_part = NodeSet::new();
    for &id in branch {
        match hybrid.tag(id) {
            HybridNode::Supp(s) => {
                support_part.insert(s);
                for (i, g) in fam.grafts.iter().enumerate() {
                    if g.root == Some(s) || g.maxel.contains(&s) {
                        per_graft.entry(i).or_default().insert(s);
                    }
                }
            }
            HybridNode::Graft { graft, node } => {
                per_graft.entry(graft).or_default().insert(node);
            }
        }
    }
    Ok(BranchTrace {
        per_graft,
        support_part,
    })
}
