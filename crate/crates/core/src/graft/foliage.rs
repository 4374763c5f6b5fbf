//! Foliage grafts, their cuts and losses, and the foliage hybrid.

use std::collections::BTreeMap;

use thiserror::Error;

use super::hybrid::{hybrid_build, Hybrid, HybridError, HybridNode};
use super::{consistent_family, graft_anatomy, ConsistentFamily, GraftAnatomy, Violation};
use crate::foliage::{is_nonincreasing, FoliageError, FoliageTree};
use crate::universe::Universe;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoliageGraftError {
    #[error("host foliage tree is not nonincreasing")]
    HostNotNonincreasing,
    #[error("foliage family is inconsistent: clause ({clause}) {detail}")]
    InconsistentFoliageFamily { clause: char, detail: String },
    #[error(transparent)]
    Hybrid(#[from] HybridError),
    #[error(transparent)]
    Foliage(#[from] FoliageError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoliageGraftCheck<S> {
    pub anatomy: GraftAnatomy,
    pub is_foliage_graft: bool,
    pub cut: S,
    pub violations: Vec<Violation>,
}

pub fn foliage_graft_check<U: Universe>(
    u: &U,
    host: &FoliageTree<U::Set>,
    g: &FoliageTree<U::Set>,
) -> Result<FoliageGraftCheck<U::Set>, FoliageGraftError> {
    if !is_nonincreasing(u, host) {
        return Err(FoliageGraftError::HostNotNonincreasing);
    }
    let anatomy = graft_anatomy(host.skeleton(), g.skeleton());
    let mut violations = Vec::new();
    if !is_nonincreasing(u, g) {
        violations.push(Violation::new('a', "graft leaves are not nonincreasing"));
    }
    if !anatomy.is_graft() {
        let clauses: String = anatomy.violations.iter().map(|v| v.clause).collect();
        violations.push(Violation::new('b', format!("skeleton fails graft clauses {clauses}")));
    }
    let mut cut = u.empty();
    if let Some(r) = anatomy.root.filter(|&r| host.skeleton().contains(r)) {
        let (gr, fr) = (g.leaf(r)?, host.leaf(r)?);
        if !u.subset(gr, fr) {
            violations.push(Violation::new('c', "root leaf of the graft exceeds the host root leaf"));
        }
        cut = u.diff(fr, gr);
    }
    for &m in anatomy.maxel.iter().filter(|&&m| host.skeleton().contains(m)) {
        if !u.equal(g.leaf(m)?, host.leaf(m)?) {
            violations.push(Violation::new('d', format!("leaf of maximum {m} differs from the host")));
        }
    }
    Ok(FoliageGraftCheck {
        is_foliage_graft: violations.is_empty(),
        anatomy,
        cut,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoliageFamily<S> {
    pub grafts: Vec<FoliageTree<S>>,
    pub checks: Vec<FoliageGraftCheck<S>>,
    pub family: ConsistentFamily,
    pub loss: S,
    pub violations: Vec<Violation>,
}

impl<S> FoliageFamily<S> {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn foliage_family<U: Universe>(
    u: &U,
    host: &FoliageTree<U::Set>,
    grafts: &[FoliageTree<U::Set>],
) -> Result<FoliageFamily<U::Set>, FoliageGraftError> {
    let checks = grafts
        .iter()
        .map(|g| foliage_graft_check(u, host, g))
        .collect::<Result<Vec<_>, _>>()?;
    let mut violations = Vec::new();
    for (i, c) in checks.iter().enumerate() {
        if !c.is_foliage_graft {
            let clauses: String = c.violations.iter().map(|v| v.clause).collect();
            violations.push(Violation::new('a', format!("graft {i} fails clauses {clauses}")));
        }
    }
    for i in 0..grafts.len() {
        for j in i + 1..grafts.len() {
            if grafts[i].skeleton() == grafts[j].skeleton() {
                violations.push(Violation::new('b', format!("grafts {i} and {j} share a skeleton")));
            }
        }
    }
    let skeletons: Vec<_> = grafts.iter().map(|g| g.skeleton().clone()).collect();
    let family = consistent_family(host.skeleton(), &skeletons);
    for v in &family.violations {
        violations.push(Violation::new(
            'c',
            format!("skeleton family clause ({}) for {:?}: {}", v.clause, v.grafts, v.detail),
        ));
    }
    let loss = u.union_all(checks.iter().map(|c| &c.cut));
    Ok(FoliageFamily {
        grafts: grafts.to_vec(),
        checks,
        family,
        loss,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoliageHybrid<S> {
    pub hybrid: Hybrid,
    pub foliage: FoliageTree<S>,
}

pub fn foliage_hybrid_build<U: Universe>(
    u: &U,
    host: &FoliageTree<U::Set>,
    fam: &FoliageFamily<U::Set>,
) -> Result<FoliageHybrid<U::Set>, FoliageGraftError> {
    if let Some(v) = fam.violations.first() {
        return Err(FoliageGraftError::InconsistentFoliageFamily {
            clause: v.clause,
            detail: v.detail.clone(),
        });
    }
    let hybrid = hybrid_build(&fam.family)?;
    let mut leaves = BTreeMap::new();
    for id in hybrid.tree.nodes() {
        let leaf = match hybrid.tag(id) {
            HybridNode::Supp(s) => host.leaf(s)?,
            HybridNode::Graft { graft, node } => fam.grafts[graft].leaf(node)?,
        };
        leaves.insert(id, u.diff(leaf, &fam.loss));
    }
    let foliage = FoliageTree::new(hybrid.tree.clone(), leaves)?;
    Ok(FoliageHybrid { hybrid, foliage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{FinTree, NodeId};
    use crate::universe::{FiniteSets, PointSet};

    /// Host: root 0 with sons 1, 2; leaves {0,1,2,3}, {0,1}, {2,3}.
    fn host() -> (FiniteSets, FoliageTree<PointSet>) {
        let u = FiniteSets::new(4);
        let t = FinTree::from_parents([(0, None), (1, Some(0)), (2, Some(0))]).unwrap();
        let leaves = [(0, u.full()), (1, [0, 1].into()), (2, [2, 3].into())].into();
        (u, FoliageTree::new(t, leaves).unwrap())
    }

    fn graft(root_leaf: PointSet) -> FoliageTree<PointSet> {
        let t = FinTree::from_parents([(0, None), (10, Some(0)), (1, Some(10)), (2, Some(10))]).unwrap();
        let mut mid = PointSet::new();
        mid.extend([0, 1, 2, 3].iter().filter(|p| root_leaf.contains(p)));
        let leaves: BTreeMap<NodeId, PointSet> =
            [(0, root_leaf), (10, mid), (1, [0, 1].into()), (2, [2, 3].into())].into();
        FoliageTree::new(t, leaves).unwrap()
    }

    #[test]
    fn full_root_leaf_has_empty_cut() {
        let (u, f) = host();
        let c = foliage_graft_check(&u, &f, &graft(u.full())).unwrap();
        assert!(c.is_foliage_graft, "{:?}", c.violations);
        assert!(c.cut.is_empty());
    }

    #[test]
    fn removing_a_point_cuts_it() {
        let (u, f) = host();
        let g = graft([0, 1, 2].into());
        let c = foliage_graft_check(&u, &f, &g).unwrap();
        assert_eq!(c.cut, [3].into());
        // Maxima keep the host leaf {2,3}, which is larger than the middle node's
        // leaf, so the graft is not nonincreasing.
        assert!(c.violations.iter().any(|v| v.clause == 'a'));
    }

    #[test]
    fn maxel_leaf_disagreement() {
        let (u, f) = host();
        let g = graft(u.full());
        let mut m = g.leaves().clone();
        m.insert(1, [0].into());
        let g = FoliageTree::new(g.skeleton().clone(), m).unwrap();
        let c = foliage_graft_check(&u, &f, &g).unwrap();
        assert!(c.violations.iter().any(|v| v.clause == 'd'));
    }

    #[test]
    fn empty_family_and_duplicates() {
        let (u, f) = host();
        let fam = foliage_family(&u, &f, &[]).unwrap();
        assert!(fam.loss.is_empty());
        let h = foliage_hybrid_build(&u, &f, &fam).unwrap();
        assert_eq!(h.foliage.leaves().values().cloned().collect::<Vec<_>>(), f.leaves().values().cloned().collect::<Vec<_>>());
        let g = graft(u.full());
        let dup = foliage_family(&u, &f, &[g.clone(), g]).unwrap();
        assert!(dup.violations.iter().any(|v| v.clause == 'b'));
    }
}
