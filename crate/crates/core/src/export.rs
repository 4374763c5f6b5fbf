//! JSON and DOT renderings of finite trees, foliage trees and materialized
//! windows of the pipeline hybrid.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::foliage::FoliageTree;
use crate::graft::{Hybrid, HybridNode};
use crate::pipeline::PiWindow;
use crate::seq::Seq;
use crate::tree::{FinTree, NodeId, TreeError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeJson<L> {
    pub id: NodeId,
    pub label: Option<Seq>,
    pub parent: Option<NodeId>,
    #[serde(default = "none", skip_serializing_if = "Option::is_none")]
    pub leaf: Option<L>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

fn none<L>() -> Option<L> {
    None
}

/// `{"nodes": [{"id", "label", "parent"}, ...]}`, nodes in id order. Foliage
/// trees add `"leaf"`; hybrids add `"tag"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeJson<L = ()> {
    pub nodes: Vec<NodeJson<L>>,
}

impl<L> TreeJson<L> {
    pub fn to_tree(&self) -> Result<FinTree, TreeError> {
        FinTree::from_entries(self.nodes.iter().map(|n| (n.id, n.parent, n.label.clone())))
    }
}

pub fn tree_json(t: &FinTree) -> TreeJson {
    TreeJson {
        nodes: t
            .nodes()
            .map(|id| NodeJson {
                id,
                label: t.label(id).cloned(),
                parent: t.parent_of(id).expect("node of the tree"),
                leaf: None,
                tag: None,
            })
            .collect(),
    }
}

pub fn foliage_json<S: Clone>(f: &FoliageTree<S>) -> TreeJson<S> {
    let mut out = TreeJson { nodes: Vec::new() };
    for n in tree_json(f.skeleton()).nodes {
        out.nodes.push(NodeJson {
            leaf: f.leaf(n.id).ok().cloned(),
            id: n.id,
            label: n.label,
            parent: n.parent,
            tag: None,
        });
    }
    out
}

fn hybrid_tag(x: HybridNode) -> String {
    match x {
        HybridNode::Supp(s) => format!("supp {s}"),
        HybridNode::Graft { graft, node } => format!("implant {graft}:{node}"),
    }
}

pub fn hybrid_json(h: &Hybrid) -> TreeJson {
    let mut out = tree_json(&h.tree);
    for n in &mut out.nodes {
        n.tag = Some(hybrid_tag(h.tag(n.id)));
    }
    out
}

pub fn window_json(w: &PiWindow) -> TreeJson<crate::baire::SetExpr> {
    let mut out = foliage_json(&w.foliage);
    for n in &mut out.nodes {
        n.tag = Some(serde_json::to_string(w.node(n.id)).expect("nodes serialize"));
    }
    out
}

/// Parent to child edges; nodes for which `implant` holds are boxed and filled.
pub fn tree_dot<F, G>(t: &FinTree, name: &str, label: F, implant: G) -> String
where
    F: Fn(NodeId) -> String,
    G: Fn(NodeId) -> bool,
{
    let mut s = String::new();
    let _ = writeln!(s, "digraph \"{}\" {{", escape(name));
    let _ = writeln!(s, "  node [shape=ellipse];");
    for id in t.nodes() {
        let style = if implant(id) {
            " shape=box style=filled fillcolor=lightgrey"
        } else {
            ""
        };
        let _ = writeln!(s, "  n{id} [label=\"{}\"{style}];", escape(&label(id)));
    }
    for id in t.nodes() {
        if let Some(p) = t.parent_of(id).expect("node of the tree") {
            let _ = writeln!(s, "  n{p} -> n{id};");
        }
    }
    s.push_str("}\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn hybrid_dot(h: &Hybrid, name: &str) -> String {
    tree_dot(
        &h.tree,
        name,
        |id| hybrid_tag(h.tag(id)),
        |id| matches!(h.tag(id), HybridNode::Graft { .. }),
    )
}

pub fn window_dot(w: &PiWindow, name: &str) -> String {
    tree_dot(
        w.foliage.skeleton(),
        name,
        |id| match w.node(id) {
            crate::pipeline::PiNode::Supp(s) => s.to_string(),
            crate::pipeline::PiNode::Imp { stage, root, x, level } => {
                format!("imp {stage}/{root} {x} l{level}")
            }
        },
        |id| w.node(id).is_implant(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graft::{consistent_family, hybrid_build};

    #[test]
    fn json_round_trip() {
        let t = FinTree::full(3, 2);
        let j = tree_json(&t);
        assert_eq!(j.nodes.len(), 7);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.starts_with(r#"{"nodes":[{"id":0,"label":[],"parent":null}"#), "{text}");
        let back: TreeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_tree().unwrap(), t);
    }

    #[test]
    fn implants_are_boxed() {
        let host = FinTree::from_parents([(0, None), (1, Some(0))]).unwrap();
        let g = FinTree::from_parents([(0, None), (9, Some(0)), (1, Some(9))]).unwrap();
        let h = hybrid_build(&consistent_family(&host, &[g])).unwrap();
        let dot = hybrid_dot(&h, "h");
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("implant 0:9"));
    }
}
