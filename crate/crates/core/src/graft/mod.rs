//! Grafts for a host tree, consistent graft families and their supports.

mod foliage;
mod hybrid;

pub use foliage::{
    foliage_family, foliage_graft_check, foliage_hybrid_build, FoliageFamily, FoliageGraftCheck,
    FoliageGraftError, FoliageHybrid,
};
pub use hybrid::{branch_trace, hybrid_build, hybrid_relate, BranchTrace, Hybrid, HybridError, HybridNode};

use serde::{Deserialize, Serialize};

use crate::tree::{Direction, FinTree, NodeId, NodeSet, Region};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: char,
    pub detail: String,
}

impl Violation {
    fn new(clause: char, detail: impl Into<String>) -> Self {
        Violation {
            clause,
            detail: detail.into(),
        }
    }
}

/// A candidate graft measured against a host.
#[derive(Debug, Clone, PartialEq)]
pub struct GraftAnatomy {
    pub graft: FinTree,
    pub root: Option<NodeId>,
    pub maxel: NodeSet,
    pub implant: NodeSet,
    pub explant: NodeSet,
    pub violations: Vec<Violation>,
}

impl GraftAnatomy {
    pub fn is_graft(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn root(&self) -> NodeId {
        self.root.expect("a graft has a least node")
    }

    /// `{0_G} ∪ maxel G`, the nodes shared with the host.
    pub fn anchors(&self) -> NodeSet {
        let mut a = self.maxel.clone();
        a.extend(self.root);
        a
    }
}

pub fn graft_anatomy(host: &FinTree, g: &FinTree) -> GraftAnatomy {
    let mut violations = Vec::new();
    if g.len() <= 1 {
        violations.push(Violation::new('a', format!("graft has {} nodes", g.len())));
    }
    let root = g.least();
    if root.is_none() {
        violations.push(Violation::new('b', "graft has no least node"));
    }
    let maxel = g.maxel();
    let mut implant = g.node_set();
    if let Some(r) = root {
        implant.remove(&r);
    }
    implant.retain(|x| !maxel.contains(x));

    let missing: Vec<NodeId> = root
        .iter()
        .chain(maxel.iter())
        .copied()
        .filter(|&x| !host.contains(x))
        .collect();
    if !missing.is_empty() {
        violations.push(Violation::new(
            'c',
            format!("nodes {missing:?} of the root and maxima are not host nodes"),
        ));
    }
    let mut explant = NodeSet::new();
    if let Some(r) = root.filter(|&r| host.contains(r)) {
        let below = host.region(r, Region::Down).expect("root is a host node");
        let outside: Vec<NodeId> = maxel
            .iter()
            .copied()
            .filter(|m| host.contains(*m) && !below.contains(m))
            .collect();
        if !outside.is_empty() {
            violations.push(Violation::new(
                'd',
                format!("maxima {outside:?} are not strictly above the root in the host"),
            ));
        }
        let in_host: NodeSet = maxel.iter().copied().filter(|&m| host.contains(m)).collect();
        if !host.is_antichain(&in_host) {
            violations.push(Violation::new('e', "maxima are comparable in the host"));
        }
        let covered = host
            .footline(&in_host, Direction::Down)
            .expect("members are host nodes");
        explant = below.difference(&covered).copied().collect();
    }
    let shared: Vec<NodeId> = implant.iter().copied().filter(|&x| host.contains(x)).collect();
    if !shared.is_empty() {
        violations.push(Violation::new(
            'f',
            format!("implant nodes {shared:?} are host nodes"),
        ));
    }
    GraftAnatomy {
        graft: g.clone(),
        root,
        maxel,
        implant,
        explant,
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyViolation {
    pub clause: char,
    pub grafts: Vec<usize>,
    pub detail: String,
}

/// A list of grafts for one host with the derived support.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistentFamily {
    pub host: FinTree,
    pub grafts: Vec<GraftAnatomy>,
    pub support: NodeSet,
    pub violations: Vec<FamilyViolation>,
    /// `(maxel G)↓footline` in the host, per graft.
    pub(crate) maxel_down: Vec<NodeSet>,
}

impl ConsistentFamily {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn maxel_footline(&self, graft: usize) -> &NodeSet {
        &self.maxel_down[graft]
    }
}

pub fn consistent_family(host: &FinTree, grafts: &[FinTree]) -> ConsistentFamily {
    let anatomies: Vec<GraftAnatomy> = grafts.iter().map(|g| graft_anatomy(host, g)).collect();
    let mut violations = Vec::new();
    for (i, a) in anatomies.iter().enumerate() {
        for v in &a.violations {
            violations.push(FamilyViolation {
                clause: 'a',
                grafts: vec![i],
                detail: format!("clause ({}) of graft: {}", v.clause, v.detail),
            });
        }
    }
    let maxel_down: Vec<NodeSet> = anatomies
        .iter()
        .map(|a| {
            let in_host: NodeSet = a.maxel.iter().copied().filter(|&m| host.contains(m)).collect();
            host.footline(&in_host, Direction::Down).expect("host nodes")
        })
        .collect();
    for i in 0..anatomies.len() {
        for j in i + 1..anatomies.len() {
            let (d, e) = (&anatomies[i], &anatomies[j]);
            if !d.implant.is_disjoint(&e.implant) {
                violations.push(FamilyViolation {
                    clause: 'b',
                    grafts: vec![i, j],
                    detail: "implants overlap".into(),
                });
            }
            if let (Some(rd), Some(re)) = (d.root, e.root) {
                let ok = (host.contains(rd) && host.contains(re) && host.incomparable(rd, re))
                    || maxel_down[j].contains(&rd)
                    || maxel_down[i].contains(&re);
                if !ok {
                    violations.push(FamilyViolation {
                        clause: 'c',
                        grafts: vec![i, j],
                        detail: format!("roots {rd} and {re} conflict"),
                    });
                }
            }
        }
    }
    let mut support = host.node_set();
    for a in &anatomies {
        support.retain(|x| !a.explant.contains(x));
    }
    ConsistentFamily {
        host: host.clone(),
        grafts: anatomies,
        support,
        violations,
        maxel_down,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::Seq;

    fn id(t: &FinTree, v: &[u32]) -> NodeId {
        t.find_label(&Seq::from(v)).unwrap()
    }

    #[test]
    fn single_fresh_son_is_not_a_graft() {
        let host = FinTree::full(3, 2);
        let r = id(&host, &[0]);
        let g = FinTree::from_parents([(r, None), (100, Some(r))]).unwrap();
        let a = graft_anatomy(&host, &g);
        // The fresh node is maximal, so it must be a host node.
        assert_eq!(a.maxel, [100].into());
        assert!(a.violations.iter().any(|v| v.clause == 'c'));
    }

    #[test]
    fn maximum_not_above_root() {
        let host = FinTree::full(3, 2);
        let g = FinTree::from_parents([(id(&host, &[0]), None), (id(&host, &[1]), Some(id(&host, &[0])))])
            .unwrap();
        let a = graft_anatomy(&host, &g);
        assert!(a.violations.iter().any(|v| v.clause == 'd'));
    }

    #[test]
    fn explant_of_a_letter_graft() {
        // Host over four letters, root <a>, maxima <a,d> and <a,b,c>.
        let host = FinTree::full(4, 4);
        let r = id(&host, &[0]);
        let m1 = id(&host, &[0, 3]);
        let m2 = id(&host, &[0, 1, 2]);
        let g = FinTree::from_parents([(r, None), (500, Some(r)), (m1, Some(500)), (m2, Some(500))]).unwrap();
        let a = graft_anatomy(&host, &g);
        assert!(a.is_graft(), "{:?}", a.violations);
        assert_eq!(a.implant, [500].into());
        let want: NodeSet = host
            .nodes()
            .filter(|&x| {
                let s = host.label(x).unwrap();
                let x0 = Seq::from(&[0u32][..]);
                x0.is_strict_prefix_of(s)
                    && !Seq::from(&[0u32, 3][..]).is_prefix_of(s)
                    && !Seq::from(&[0u32, 1, 2][..]).is_prefix_of(s)
            })
            .collect();
        assert_eq!(a.explant, want);
    }

    #[test]
    fn empty_family_keeps_everything() {
        let host = FinTree::full(3, 2);
        let fam = consistent_family(&host, &[]);
        assert!(fam.is_consistent());
        assert_eq!(fam.support, host.node_set());
    }

    #[test]
    fn equal_roots_conflict() {
        let host = FinTree::full(3, 2);
        let r = id(&host, &[0]);
        let m = id(&host, &[0, 0]);
        let g1 = FinTree::from_parents([(r, None), (100, Some(r)), (m, Some(100))]).unwrap();
        let g2 = FinTree::from_parents([(r, None), (101, Some(r)), (m, Some(101))]).unwrap();
        let fam = consistent_family(&host, &[g1, g2]);
        assert!(fam.violations.iter().any(|v| v.clause == 'c'));
    }

    #[test]
    fn nested_root_below_other_maximum() {
        let host = FinTree::full(4, 2);
        let (r, m) = (id(&host, &[]), id(&host, &[0]));
        let m2 = id(&host, &[1]);
        let outer = FinTree::from_parents([(r, None), (100, Some(r)), (m, Some(100)), (m2, Some(100))]).unwrap();
        let (r2, n1) = (id(&host, &[0]), id(&host, &[0, 1]));
        let inner = FinTree::from_parents([(r2, None), (101, Some(r2)), (n1, Some(101))]).unwrap();
        let fam = consistent_family(&host, &[outer, inner]);
        assert!(fam.is_consistent(), "{:?}", fam.violations);
    }
}
