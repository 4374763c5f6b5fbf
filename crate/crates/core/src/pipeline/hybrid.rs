//! The hybrid of the standard tree with every blueprint of a pipeline, with
//! the loss removed from each leaf, as a lazy tree and as finite windows.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::blueprint::{pairwise_disjoint, partition_below, BpNode, GraftBlueprint, ShootCertificate, Truncation};
use super::lazy::{grows_into, shoots_refinement, Growth, LazyFoliage, StdLazy};
use super::state::PipelineState;
use super::PipelineError;
use crate::baire::{Class, Point, SetExpr};
use crate::foliage::FoliageTree;
use crate::report::{CheckRecord, Status};
use crate::seq::Seq;
use crate::tree::{FinTree, NodeId};

/// A hybrid node: a surviving standard-tree node or an implant node of the
/// blueprint at `(stage, root)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiNode {
    Supp(Seq),
    Imp { stage: usize, root: Seq, x: Seq, level: usize },
}

impl PiNode {
    /// The standard-tree node whose cylinder holds the leaf.
    pub fn coordinate(&self) -> Seq {
        match self {
            PiNode::Supp(s) => s.clone(),
            PiNode::Imp { x, level, .. } => x.restrict(x.len() - level),
        }
    }

    pub fn is_implant(&self) -> bool {
        matches!(self, PiNode::Imp { .. })
    }
}

/// Which half of the shoots-into argument produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShootCase {
    /// `y` survives untouched and is its own witness.
    Support,
    /// `y` is a graft root or in an explant; the blueprint recipe applies.
    Blueprint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiHybrid {
    bps: BTreeMap<(usize, Seq), GraftBlueprint>,
    loss: SetExpr,
    survivors: SetExpr,
}

impl PiHybrid {
    pub fn new(state: &PipelineState) -> Self {
        PiHybrid {
            bps: state
                .family()
                .map(|bp| ((bp.stage, bp.root.clone()), bp.clone()))
                .collect(),
            loss: state.loss().clone(),
            survivors: state.survivors(),
        }
    }

    pub fn loss(&self) -> &SetExpr {
        &self.loss
    }

    /// The space the hybrid lives on: the complement of the loss.
    pub fn space(&self) -> SetExpr {
        self.survivors.clone()
    }

    pub fn blueprints(&self) -> impl Iterator<Item = &GraftBlueprint> {
        self.bps.values()
    }

    fn bp(&self, stage: usize, root: &Seq) -> &GraftBlueprint {
        &self.bps[&(stage, root.clone())]
    }

    /// The blueprint rooted at `s`.
    pub fn rooted_at(&self, s: &Seq) -> Option<&GraftBlueprint> {
        self.bps.values().find(|bp| &bp.root == s)
    }

    /// The blueprint whose explant holds `s`.
    pub fn explant_owner(&self, s: &Seq) -> Option<&GraftBlueprint> {
        self.bps
            .values()
            .find(|bp| bp.root.is_strict_prefix_of(s) && bp.in_delta(s))
    }

    pub fn is_support(&self, s: &Seq) -> bool {
        self.explant_owner(s).is_none()
    }

    fn lift(bp: &GraftBlueprint, n: BpNode) -> PiNode {
        match n {
            BpNode::Root => PiNode::Supp(bp.root.clone()),
            BpNode::Max(z) => PiNode::Supp(z),
            BpNode::Imp { x, level } => PiNode::Imp {
                stage: bp.stage,
                root: bp.root.clone(),
                x,
                level,
            },
        }
    }

    fn lower(n: &PiNode) -> Option<BpNode> {
        match n {
            PiNode::Imp { x, level, .. } => Some(BpNode::Imp {
                x: x.clone(),
                level: *level,
            }),
            PiNode::Supp(_) => None,
        }
    }

    pub fn contains(&self, n: &PiNode) -> bool {
        match n {
            PiNode::Supp(s) => self.is_support(s),
            PiNode::Imp { stage, root, .. } => self
                .bps
                .get(&(*stage, root.clone()))
                .is_some_and(|bp| bp.contains_node(&Self::lower(n).expect("implant"))),
        }
    }

    pub fn parent_of(&self, n: &PiNode) -> Result<Option<PiNode>, PipelineError> {
        match n {
            PiNode::Supp(s) => {
                let Some(up) = s.parent() else {
                    return Ok(None);
                };
                match self.bps.values().find(|bp| bp.in_max(s)) {
                    Some(bp) => Ok(bp.parent_of(&BpNode::Max(s.clone()))?.map(|p| Self::lift(bp, p))),
                    None => Ok(Some(PiNode::Supp(up))),
                }
            }
            PiNode::Imp { stage, root, .. } => {
                let bp = self.bp(*stage, root);
                Ok(bp.parent_of(&Self::lower(n).expect("implant"))?.map(|p| Self::lift(bp, p)))
            }
        }
    }

    pub fn sons_lazy(&self, n: &PiNode, count: usize) -> Result<Vec<PiNode>, PipelineError> {
        let (bp, bn) = match n {
            PiNode::Supp(s) => match self.rooted_at(s) {
                Some(bp) => (bp, BpNode::Root),
                None => return Ok(StdLazy.sons(s, count).into_iter().map(PiNode::Supp).collect()),
            },
            PiNode::Imp { stage, root, .. } => (self.bp(*stage, root), Self::lower(n).expect("implant")),
        };
        Ok(bp
            .sons_lazy(&bn, count)?
            .into_iter()
            .map(|s| Self::lift(bp, s))
            .collect())
    }

    /// The blueprint leaf, or the cylinder for support nodes, minus the loss.
    pub fn leaf(&self, n: &PiNode) -> Result<SetExpr, PipelineError> {
        let raw = match n {
            PiNode::Supp(s) => SetExpr::cyl(s.clone()),
            PiNode::Imp { stage, root, .. } => self.bp(*stage, root).leaf(&Self::lower(n).expect("implant"))?,
        };
        Ok(SetExpr::diff(raw, self.loss.clone()))
    }

    fn truncations(&self, depth: usize, width: u32) -> Result<BTreeMap<(usize, Seq), Truncation>, PipelineError> {
        self.bps
            .iter()
            .map(|(k, bp)| Ok((k.clone(), bp.truncation(depth, width)?)))
            .collect()
    }

    fn window_sons(
        &self,
        n: &PiNode,
        depth: usize,
        width: u32,
        truncs: &BTreeMap<(usize, Seq), Truncation>,
    ) -> Result<Vec<PiNode>, PipelineError> {
        let (bp, bn) = match n {
            PiNode::Supp(s) => match self.rooted_at(s) {
                Some(bp) => (bp, BpNode::Root),
                None if s.len() < depth => return Ok((0..width).map(|v| PiNode::Supp(s.child(v))).collect()),
                None => return Ok(Vec::new()),
            },
            PiNode::Imp { stage, root, .. } => (self.bp(*stage, root), Self::lower(n).expect("implant")),
        };
        let t = &truncs[&(bp.stage, bp.root.clone())];
        Ok(bp
            .truncated_sons(&bn, t)?
            .into_iter()
            .map(|s| Self::lift(bp, s))
            .collect())
    }

    /// Support nodes up to `depth` with values below `width`, and each
    /// blueprint at its own truncation.
    pub fn materialize(&self, depth: usize, width: u32) -> Result<PiWindow, PipelineError> {
        let truncs = self.truncations(depth, width)?;
        let root = PiNode::Supp(Seq::empty());
        let mut parents: BTreeMap<PiNode, Option<PiNode>> = [(root.clone(), None)].into();
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            for s in self.window_sons(&n, depth, width, &truncs)? {
                parents.insert(s.clone(), Some(n.clone()));
                queue.push_back(s);
            }
        }
        let ids: BTreeMap<PiNode, NodeId> = parents.keys().enumerate().map(|(i, n)| (n.clone(), i as NodeId)).collect();
        let entries = parents.iter().map(|(n, p)| {
            let label = match n {
                PiNode::Supp(s) => Some(s.clone()),
                PiNode::Imp { .. } => None,
            };
            (ids[n], p.as_ref().map(|p| ids[p]), label)
        });
        let tree = FinTree::from_entries(entries)?;
        let mut leaves = BTreeMap::new();
        for (n, &i) in &ids {
            leaves.insert(i, self.leaf(n)?);
        }
        let foliage = FoliageTree::new(tree, leaves)?;
        let nodes = ids.keys().cloned().collect();
        Ok(PiWindow {
            depth,
            width,
            nodes,
            ids,
            foliage,
            truncs,
        })
    }

    /// The node of the hybrid certifying that its shoot at `p` refines the
    /// standard shoot of `y`, with the sons to skip.
    pub fn shoots_witness(&self, p: &Point, y: &Seq) -> Result<(ShootCase, PiNode, BTreeSet<PiNode>), PipelineError> {
        if self.loss.contains(p) {
            return Err(PipelineError::SampleInLoss(format!("{p:?}")));
        }
        if !p.extends(y) {
            return Err(PipelineError::NotAPrefix(y.clone()));
        }
        let owner = self.explant_owner(y).or_else(|| self.rooted_at(y));
        let Some(bp) = owner else {
            return Ok((ShootCase::Support, PiNode::Supp(y.clone()), BTreeSet::new()));
        };
        let (x, exc) = bp.preserves_shoots_witness(p, y)?;
        let exc = exc.into_iter().map(|e| Self::lift(bp, e)).collect();
        Ok((ShootCase::Blueprint, Self::lift(bp, x), exc))
    }

    pub fn shoots_into_check(
        &self,
        samples: &[(Point, Seq)],
        count: usize,
    ) -> Result<Vec<(ShootCase, ShootCertificate<PiNode>)>, PipelineError> {
        samples
            .iter()
            .map(|(p, y)| {
                let (case, x, exceptions) = self.shoots_witness(p, y)?;
                let in_scope = self.leaf(&x)?.contains(p);
                let refinement = shoots_refinement(
                    self,
                    &x,
                    &StdLazy,
                    y,
                    &exceptions,
                    |n| match n {
                        PiNode::Supp(s) => Some(s.clone()),
                        PiNode::Imp { .. } => None,
                    },
                    count,
                );
                Ok((
                    case,
                    ShootCertificate {
                        point: p.support().clone(),
                        target: y.clone(),
                        witness: x,
                        exceptions,
                        in_scope,
                        refinement,
                    },
                ))
            })
            .collect()
    }

    /// `n` seeded pairs `(p, y)`: `p` a surviving point with support of length
    /// at most `depth` and values below `width`, `y` a prefix of `p` no longer
    /// than one past its support.
    pub fn sample_pairs(&self, seed: u64, n: usize, depth: usize, width: u32) -> Vec<(Point, Seq)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n);
        let mut tries = 0;
        while out.len() < n && tries < n * 100 {
            tries += 1;
            let len = rng.gen_range(0..=depth);
            let p = Point::new(Seq::new((0..len).map(|_| rng.gen_range(0..width)).collect()));
            if self.loss.contains(&p) {
                continue;
            }
            let k = rng.gen_range(0..=p.support().len() + 1);
            out.push((p.clone(), p.prefix(k)));
        }
        out
    }

    pub fn grows_into_subspace(&self, depth: usize, width: u32, count: usize) -> Growth {
        grows_into(self, &self.space(), depth, width, count)
    }
}

impl LazyFoliage for PiHybrid {
    type Node = PiNode;

    fn root(&self) -> PiNode {
        PiNode::Supp(Seq::empty())
    }

    fn sons(&self, x: &PiNode, count: usize) -> Vec<PiNode> {
        self.sons_lazy(x, count).unwrap_or_default()
    }

    fn is_son(&self, parent: &PiNode, child: &PiNode) -> bool {
        self.contains(child) && self.parent_of(child).ok().flatten().as_ref() == Some(parent)
    }

    fn leaf(&self, x: &PiNode) -> SetExpr {
        PiHybrid::leaf(self, x).unwrap_or(SetExpr::Empty)
    }
}

/// A finite window of the hybrid.
#[derive(Debug, Clone, PartialEq)]
pub struct PiWindow {
    pub depth: usize,
    pub width: u32,
    pub nodes: Vec<PiNode>,
    pub ids: BTreeMap<PiNode, NodeId>,
    pub foliage: FoliageTree<SetExpr>,
    truncs: BTreeMap<(usize, Seq), Truncation>,
}

impl PiWindow {
    pub fn node(&self, id: NodeId) -> &PiNode {
        &self.nodes[id as usize]
    }

    pub fn sons_of(&self, n: &PiNode) -> Vec<PiNode> {
        self.foliage
            .skeleton()
            .sons(self.ids[n])
            .unwrap_or_default()
            .into_iter()
            .map(|i| self.node(i).clone())
            .collect()
    }

    pub fn parent_of(&self, n: &PiNode) -> Option<PiNode> {
        let p = self.foliage.skeleton().parent_of(self.ids[n]).ok().flatten()?;
        Some(self.node(p).clone())
    }

    pub fn leaf(&self, n: &PiNode) -> &SetExpr {
        self.foliage.leaf(self.ids[n]).expect("window node")
    }

    /// Base and depth of the shadow partition at `n`, or `None` on the frontier.
    fn strict_base(&self, h: &PiHybrid, n: &PiNode) -> Option<(Seq, usize)> {
        match n {
            PiNode::Supp(s) => match h.rooted_at(s) {
                Some(bp) => Some((s.clone(), self.truncs[&(bp.stage, bp.root.clone())].depth - 1)),
                None if s.len() < self.depth => Some((s.clone(), self.depth)),
                None => None,
            },
            PiNode::Imp { stage, root, .. } => {
                let t = &self.truncs[&(*stage, root.clone())];
                let w = n.coordinate();
                (w.len() < t.depth).then_some((w, t.depth))
            }
        }
    }
}

/// The π-tree properties of one window.
pub fn hybrid_checks(
    h: &PiHybrid,
    depth: usize,
    width: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<CheckRecord>, PipelineError> {
    let win = h.materialize(depth, width)?;
    let skel = win.foliage.skeleton();
    let stages = h.bps.keys().map(|k| k.0 + 1).max().unwrap_or(0);
    let mut out = Vec::new();
    let mut rec = |r: CheckRecord| out.push(r.param("depth", depth).param("width", width));

    let least = skel.least().map(|i| win.node(i).clone());
    rec(CheckRecord::check("pi-rooted", least == Some(PiNode::Supp(Seq::empty()))).param("nodes", win.nodes.len()));

    let empty: Vec<&PiNode> = win.nodes.iter().filter(|n| win.leaf(n).is_empty_exact()).collect();
    rec(CheckRecord::check("pi-nonempty", empty.is_empty()).witness(&empty));

    let growing: Vec<&PiNode> = win
        .nodes
        .iter()
        .filter(|n| win.parent_of(n).is_some_and(|p| !win.leaf(n).subset_exact(win.leaf(&p))))
        .collect();
    rec(CheckRecord::check("pi-nonincreasing", growing.is_empty()).witness(&growing));

    let mut not_strict = Vec::new();
    let mut interior = 0;
    for n in &win.nodes {
        let sons = win.sons_of(n);
        if sons.is_empty() {
            continue;
        }
        let leaves: Vec<SetExpr> = sons.iter().map(|s| win.leaf(s).clone()).collect();
        let res = match win.strict_base(h, n) {
            Some((base, d)) => {
                interior += 1;
                partition_below(win.leaf(n), &leaves, &base, d, width)
            }
            None => pairwise_disjoint(&leaves),
        };
        if let Err(e) = res {
            not_strict.push(format!("{n:?}: {e}"));
        }
    }
    rec(CheckRecord::check("pi-locally-strict", not_strict.is_empty())
        .param("interior", interior)
        .witness(&not_strict));

    let loose: Vec<&PiNode> = win
        .nodes
        .iter()
        .filter(|n| !win.leaf(n).subset_exact(&SetExpr::cyl(n.coordinate())))
        .collect();
    let mut overlaps = Vec::new();
    for (i, a) in win.nodes.iter().enumerate() {
        let ca = a.coordinate();
        for b in &win.nodes[i + 1..] {
            if !ca.comparable(&b.coordinate()) || !skel.incomparable(win.ids[a], win.ids[b]) {
                continue;
            }
            if !win.leaf(a).disjoint_exact(win.leaf(b)) {
                overlaps.push((a.clone(), b.clone()));
            }
        }
    }
    rec(CheckRecord::check("pi-splittable", loose.is_empty() && overlaps.is_empty())
        .witness((&loose, &overlaps)));

    let probe = Seq::zeros(5);
    let lost: Vec<Point> = h
        .bps
        .values()
        .flat_map(|bp| bp.compact().points().to_vec())
        .collect();
    let touching: Vec<&PiNode> = win
        .nodes
        .iter()
        .filter(|n| {
            let l = win.leaf(n);
            lost.iter().any(|p| l.contains(p)) || lost.iter().any(|p| l.classify(&p.prefix(probe.len())) == Class::Inside)
        })
        .collect();
    rec(CheckRecord::check("pi-avoids-loss", touching.is_empty())
        .param("probe_len", probe.len())
        .witness(&touching));

    let slack = 1 + stages;
    let mut wide = Vec::new();
    for b in skel.branches() {
        let top = b.iter().copied().max_by_key(|&i| skel.height_of(i).unwrap_or(0)).expect("nonempty branch");
        let n = win.node(top);
        let c = n.coordinate();
        if c.len() + slack < b.len() || !win.leaf(n).subset_exact(&SetExpr::cyl(c.clone())) {
            wide.push((n.clone(), b.len()));
        }
    }
    rec(CheckRecord::check("pi-confined", wide.is_empty())
        .param("branches", skel.branches().len())
        .param("slack", slack)
        .witness(&wide));

    let root_leaf = win.leaf(&PiNode::Supp(Seq::empty()));
    let space = h.space();
    rec(CheckRecord::check(
        "pi-root-leaf",
        root_leaf.shadow(depth, width) == space.shadow(depth, width) && root_leaf.equal_exact(&space),
    ));

    if depth > 1 && width > 1 {
        let small = h.materialize(depth - 1, width - 1)?;
        let drift: Vec<&PiNode> = small
            .nodes
            .iter()
            .filter(|n| {
                !win.ids.contains_key(*n) || win.parent_of(n) != small.parent_of(n) || win.leaf(n) != small.leaf(n)
            })
            .collect();
        rec(CheckRecord::check("pi-monotone", drift.is_empty())
            .param("smaller", small.nodes.len())
            .witness(&drift));
    }

    let pairs = h.sample_pairs(seed, samples, depth, width);
    let certs = h.shoots_into_check(&pairs, width as usize)?;
    let cases: BTreeSet<ShootCase> = certs.iter().map(|(c, _)| *c).collect();
    let failed: Vec<&ShootCertificate<PiNode>> = certs.iter().map(|(_, c)| c).filter(|c| !c.holds()).collect();
    rec(CheckRecord::check("shoots-into", failed.is_empty() && certs.len() == samples)
        .param("samples", certs.len())
        .param("seed", seed)
        .param("cases", &cases)
        .witness(failed.first()));

    let g = h.grows_into_subspace(depth.min(2), width, width as usize);
    let mut r = CheckRecord::new("grows-into", g.status)
        .param("points", g.points)
        .param("neighborhoods", g.neighborhoods)
        .detail(g.detail.clone());
    if g.status != Status::Pass {
        r = r.witness(&g.detail);
    }
    rec(r);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baire::CompactCode;
    use crate::pipeline::{pipeline_run, Trunc};

    fn one_point(depth: usize, width: u32) -> PiHybrid {
        let run = pipeline_run(&[CompactCode::zero()], 1, Trunc::new(depth, width, 2)).unwrap();
        PiHybrid::new(&run.state)
    }

    #[test]
    fn empty_pipeline_is_the_standard_tree() {
        let h = PiHybrid::new(&PipelineState::new());
        let w = h.materialize(2, 2).unwrap();
        assert_eq!(w.nodes.len(), 7);
        assert!(w.nodes.iter().all(|n| !n.is_implant()));
        let (case, x, exc) = h.shoots_witness(&Point::new(Seq::from(&[1u32][..])), &Seq::empty()).unwrap();
        assert_eq!(case, ShootCase::Support);
        assert_eq!(x, PiNode::Supp(Seq::empty()));
        assert!(exc.is_empty());
    }

    #[test]
    fn root_sons_are_chain_heads() {
        let h = one_point(3, 3);
        let w = h.materialize(3, 3).unwrap();
        let sons = w.sons_of(&PiNode::Supp(Seq::empty()));
        assert!(!sons.is_empty());
        for s in &sons {
            let PiNode::Imp { x, level, .. } = s else { panic!("implant son") };
            assert_eq!(*level, x.len());
            assert_eq!(x, &Seq::zeros(x.len()));
        }
    }

    #[test]
    fn lost_points_are_rejected() {
        let h = one_point(3, 3);
        assert!(matches!(
            h.shoots_witness(&Point::new(Seq::empty()), &Seq::empty()),
            Err(PipelineError::SampleInLoss(_))
        ));
    }

    #[test]
    fn one_point_window_passes() {
        let h = one_point(3, 3);
        let checks = hybrid_checks(&h, 3, 3, 20, 7).unwrap();
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed()).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn lazy_and_window_parents_agree() {
        let h = one_point(3, 3);
        let w = h.materialize(3, 3).unwrap();
        for n in &w.nodes {
            assert_eq!(h.parent_of(n).unwrap(), w.parent_of(n), "{n:?}");
            assert!(h.contains(n));
        }
    }
}
