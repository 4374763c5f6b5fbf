//! The graft below a root `v` that swaps the bad region `Δ` of `O = S_v \ K`
//! for chains of implant nodes, one chain per member of `Δ`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::lazy::{shoots_refinement, LazyFoliage, Refinement, StdLazy};
use super::PipelineError;
use crate::baire::{BaireExact, BaireWindow, Class, CompactCode, FiberFamily, FiberScheme, Point, SetExpr};
use crate::foliage::FoliageTree;
use crate::graft::{foliage_graft_check, graft_anatomy};
use crate::report::{CheckRecord, Status};
use crate::seq::{full_tree, Seq};
use crate::tree::{FinTree, NodeId, NodeSet};

/// A node of the blueprint: its root, an implant node, or a maximal node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BpNode {
    Root,
    Imp { x: Seq, level: usize },
    Max(Seq),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraftBlueprint {
    pub stage: usize,
    pub root: Seq,
    compact: Arc<CompactCode>,
    scheme: Arc<FiberScheme>,
    open: SetExpr,
}

/// The finite part of a blueprint kept at a truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub depth: usize,
    pub width: u32,
    /// Members of `Δ` with an implant chain: those shorter than `depth` and
    /// the fiber targets of `window_max`.
    pub delta: BTreeSet<Seq>,
    /// `w⌢n ∈ MAX` with `w ∈ Δ`, `len w < depth`, `n < width`.
    pub window_max: BTreeSet<Seq>,
    /// `window_max` plus the first member of each fiber `Ω_{x,x}`, `x ∈ delta`.
    pub max: BTreeSet<Seq>,
}

impl GraftBlueprint {
    pub fn build(stage: usize, root: Seq, compact: Arc<CompactCode>) -> Result<Self, PipelineError> {
        let open = SetExpr::diff(SetExpr::cyl(root.clone()), SetExpr::Compact(compact.clone()));
        match open.classify(&root) {
            Class::Split => {}
            class => return Err(PipelineError::NotProper { root, class }),
        }
        let scheme = Arc::new(FiberScheme::new(root.clone(), (*compact).clone())?);
        Ok(GraftBlueprint {
            stage,
            root,
            compact,
            scheme,
            open,
        })
    }

    pub fn open(&self) -> &SetExpr {
        &self.open
    }

    pub fn compact(&self) -> &Arc<CompactCode> {
        &self.compact
    }

    pub fn scheme(&self) -> &Arc<FiberScheme> {
        &self.scheme
    }

    /// `S_v ∩ K`, which equals `S_v \ O`.
    pub fn cut(&self) -> SetExpr {
        SetExpr::inter(SetExpr::cyl(self.root.clone()), SetExpr::Compact(self.compact.clone()))
    }

    pub fn in_omega(&self, z: &Seq) -> bool {
        self.root.is_prefix_of(z) && self.open.classify(z) == Class::Inside
    }

    pub fn in_delta(&self, z: &Seq) -> bool {
        self.root.is_prefix_of(z) && !self.in_omega(z)
    }

    pub fn in_max(&self, z: &Seq) -> bool {
        self.in_omega(z) && z.parent().is_some_and(|w| !self.in_omega(&w)) && z.len() > self.root.len()
    }

    /// `l(x) = len x − len v`.
    pub fn chain_len(&self, x: &Seq) -> usize {
        x.len() - self.root.len()
    }

    pub fn contains_node(&self, n: &BpNode) -> bool {
        match n {
            BpNode::Root => true,
            BpNode::Imp { x, level } => self.in_delta(x) && *level <= self.chain_len(x),
            BpNode::Max(z) => self.in_max(z),
        }
    }

    /// The standard-tree node a blueprint node is identified with, if any.
    pub fn host_seq(&self, n: &BpNode) -> Option<Seq> {
        match n {
            BpNode::Root => Some(self.root.clone()),
            BpNode::Max(z) => Some(z.clone()),
            BpNode::Imp { .. } => None,
        }
    }

    /// `⋃ Ω_{w,d}` as a symbolic set.
    pub fn fiber_set(&self, w: &Seq, d: &Seq) -> Result<SetExpr, PipelineError> {
        let fam = FiberFamily::new(self.scheme.clone(), w.clone(), [d.clone()].into())?;
        Ok(SetExpr::Family(fam))
    }

    pub fn leaf(&self, n: &BpNode) -> Result<SetExpr, PipelineError> {
        Ok(match n {
            BpNode::Root => self.open.clone(),
            BpNode::Max(z) => SetExpr::cyl(z.clone()),
            BpNode::Imp { x, level } => {
                let mut parts = Vec::with_capacity(level + 1);
                for j in 0..=*level {
                    parts.push(self.fiber_set(&x.restrict(x.len() - j), x)?);
                }
                SetExpr::union_all(parts)
            }
        })
    }

    pub fn parent_of(&self, n: &BpNode) -> Result<Option<BpNode>, PipelineError> {
        Ok(match n {
            BpNode::Root => None,
            BpNode::Imp { x, level } if *level == self.chain_len(x) => Some(BpNode::Root),
            BpNode::Imp { x, level } => Some(BpNode::Imp {
                x: x.clone(),
                level: level + 1,
            }),
            BpNode::Max(z) => {
                let d = self.scheme.fiber_of(z)?;
                let level = d.len() + 1 - z.len();
                Some(BpNode::Imp { x: d, level })
            }
        })
    }

    /// The first `count` sons: implant chain heads for the root, then for an
    /// implant node its chain successor followed by its fiber.
    pub fn sons_lazy(&self, n: &BpNode, count: usize) -> Result<Vec<BpNode>, PipelineError> {
        let mut out = Vec::with_capacity(count);
        match n {
            BpNode::Max(_) => {}
            BpNode::Root => {
                for i in 0..count as u64 {
                    let x = self.scheme.delta_at(&self.root, i);
                    let level = self.chain_len(&x);
                    out.push(BpNode::Imp { x, level });
                }
            }
            BpNode::Imp { x, level } => {
                if *level > 0 && count > 0 {
                    out.push(BpNode::Imp {
                        x: x.clone(),
                        level: level - 1,
                    });
                }
                let w = x.restrict(x.len() - level);
                let mut j = 0;
                while out.len() < count {
                    out.push(BpNode::Max(self.scheme.fiber_member(&w, x, j)?));
                    j += 1;
                }
            }
        }
        Ok(out)
    }

    /// The `d ∈ Δ_x` whose fiber holds `z ∈ Ω_x`.
    pub fn partition_assign(&self, z: &Seq) -> Result<Seq, PipelineError> {
        Ok(self.scheme.fiber_of(z)?)
    }

    /// The first `count` members of `Ω_{x,d}`.
    pub fn partition_enum(&self, x: &Seq, d: &Seq, count: usize) -> Result<Vec<Seq>, PipelineError> {
        (0..count as u64)
            .map(|j| Ok(self.scheme.fiber_member(x, d, j)?))
            .collect()
    }

    fn effective_depth(&self, depth: usize) -> usize {
        depth.max(self.root.len() + 2)
    }

    /// Members of `Δ` with length in `len v ..= last`.
    fn delta_upto(&self, last: usize) -> BTreeSet<Seq> {
        (self.root.len()..=last)
            .flat_map(|l| self.scheme.delta_level(&self.root, l))
            .collect()
    }

    /// `w⌢n ∈ MAX` for `w ∈ Δ` with `len w < len`, `n < width`.
    pub fn max_upto(&self, len: usize, width: u32) -> BTreeSet<Seq> {
        if len == 0 {
            return BTreeSet::new();
        }
        let mut out = BTreeSet::new();
        for w in self.delta_upto(len - 1) {
            for n in 0..width {
                let z = w.child(n);
                if self.in_max(&z) {
                    out.insert(z);
                }
            }
        }
        out
    }

    /// Truncation at `depth`, raised to `len v + 2` so the root keeps sons.
    pub fn truncation(&self, depth: usize, width: u32) -> Result<Truncation, PipelineError> {
        let depth = self.effective_depth(depth);
        let window_max = self.max_upto(depth, width);
        let mut delta = self.delta_upto(depth - 1);
        for z in &window_max {
            delta.insert(self.scheme.fiber_of(z)?);
        }
        let mut max = window_max.clone();
        for x in &delta {
            max.insert(self.scheme.fiber_member(x, x, 0)?);
        }
        Ok(Truncation {
            depth,
            width,
            delta,
            window_max,
            max,
        })
    }

    pub fn truncated_sons(&self, n: &BpNode, t: &Truncation) -> Result<Vec<BpNode>, PipelineError> {
        Ok(match n {
            BpNode::Max(_) => Vec::new(),
            BpNode::Root => t
                .delta
                .iter()
                .map(|x| BpNode::Imp {
                    x: x.clone(),
                    level: self.chain_len(x),
                })
                .collect(),
            BpNode::Imp { x, level } => {
                let mut out = Vec::new();
                if *level > 0 {
                    out.push(BpNode::Imp {
                        x: x.clone(),
                        level: level - 1,
                    });
                }
                let w = x.restrict(x.len() - level);
                for z in t.max.iter().filter(|z| z.parent().as_ref() == Some(&w)) {
                    if &self.scheme.fiber_of(z)? == x {
                        out.push(BpNode::Max(z.clone()));
                    }
                }
                out
            }
        })
    }

    /// The truncated host (a prefix-closed piece of the standard tree) and the
    /// truncated graft over it.
    pub fn materialize(&self, depth: usize, width: u32) -> Result<BlueprintWindow, PipelineError> {
        let t = self.truncation(depth, width)?;
        let mut seqs: BTreeSet<Seq> = self.root.prefixes().collect();
        for tail in full_tree(t.depth - self.root.len() + 1, width) {
            seqs.insert(self.root.concat(tail.items()));
        }
        for s in t.delta.iter().chain(&t.max) {
            seqs.extend(s.prefixes());
        }
        let mut ordered: Vec<Seq> = seqs.into_iter().collect();
        ordered.sort_by(Seq::shortlex_cmp);
        let host_tree = FinTree::from_seqs(&ordered)?;
        let host_ids: BTreeMap<Seq, NodeId> = ordered
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as NodeId))
            .collect();
        let host_leaves = host_ids.iter().map(|(s, &i)| (i, SetExpr::cyl(s.clone()))).collect();
        let host = FoliageTree::new(host_tree, host_leaves)?;

        let mut nodes = vec![BpNode::Root];
        let mut frontier = vec![BpNode::Root];
        let mut parents: BTreeMap<BpNode, BpNode> = BTreeMap::new();
        while let Some(n) = frontier.pop() {
            for s in self.truncated_sons(&n, &t)? {
                parents.insert(s.clone(), n.clone());
                nodes.push(s.clone());
                frontier.push(s);
            }
        }
        let mut fresh = ordered.len() as NodeId;
        let mut ids = BTreeMap::new();
        let mut sorted = nodes.clone();
        sorted.sort();
        for n in &sorted {
            let id = match self.host_seq(n) {
                Some(s) => host_ids[&s],
                None => {
                    fresh += 1;
                    fresh - 1
                }
            };
            ids.insert(n.clone(), id);
        }
        let entries: Vec<_> = sorted
            .iter()
            .map(|n| (ids[n], parents.get(n).map(|p| ids[p]), self.host_seq(n)))
            .collect();
        let graft_tree = FinTree::from_entries(entries)?;
        let mut leaves = BTreeMap::new();
        for n in &sorted {
            leaves.insert(ids[n], self.leaf(n)?);
        }
        let graft = FoliageTree::new(graft_tree, leaves)?;
        let by_id = ids.iter().map(|(n, &i)| (i, n.clone())).collect();
        Ok(BlueprintWindow {
            trunc: t,
            host,
            graft,
            ids,
            by_id,
            host_ids,
        })
    }

    /// The implant node certifying that the graft keeps the shoot of `y` at
    /// the point `p`, and the exceptions outside which its sons are sons of `y`.
    pub fn preserves_shoots_witness(
        &self,
        p: &Point,
        y: &Seq,
    ) -> Result<(BpNode, BTreeSet<BpNode>), PipelineError> {
        if !self.open.contains(p) {
            return Err(PipelineError::SampleOutside(format!("{p:?}")));
        }
        if !p.extends(y) {
            return Err(PipelineError::NotAPrefix(y.clone()));
        }
        if !self.in_delta(y) {
            return Err(PipelineError::NotInDelta(y.clone()));
        }
        let bound = p.support().len().max(self.compact.depth()) + self.root.len() + 2;
        let z = (y.len() + 1..=bound)
            .map(|k| p.prefix(k))
            .find(|z| self.in_omega(z))
            .ok_or_else(|| PipelineError::Invariant {
                id: "b4".into(),
                detail: format!("no cylinder inside the open set along {p:?}"),
            })?;
        let d = self.scheme.fiber_of(&z)?;
        let level = d.len() - y.len();
        let mut exceptions = BTreeSet::new();
        if level > 0 {
            exceptions.insert(BpNode::Imp {
                x: d.clone(),
                level: level - 1,
            });
        }
        Ok((BpNode::Imp { x: d, level }, exceptions))
    }

    /// Runs the recipe on each sample and certifies the witness with the
    /// finite-exception shoot condition over `count` sons.
    pub fn preserves_shoots_check(
        &self,
        samples: &[(Point, Seq)],
        count: usize,
    ) -> Result<Vec<ShootCertificate<BpNode>>, PipelineError> {
        samples
            .iter()
            .map(|(p, y)| {
                let (x, exceptions) = self.preserves_shoots_witness(p, y)?;
                let holds = self.leaf(&x)?.contains(p);
                let refinement = shoots_refinement(
                    self,
                    &x,
                    &StdLazy,
                    y,
                    &exceptions,
                    |n| self.host_seq(n),
                    count,
                );
                Ok(ShootCertificate {
                    point: p.support().clone(),
                    target: y.clone(),
                    witness: x,
                    exceptions,
                    in_scope: holds,
                    refinement,
                })
            })
            .collect()
    }

    /// Samples `(p, y)`: for each window maximum `z`, `p = z⌢0^ω` against every
    /// `y ∈ Δ` below `z`.
    pub fn shoot_samples(&self, t: &Truncation) -> Vec<(Point, Seq)> {
        let mut out = Vec::new();
        for z in &t.window_max {
            let p = Point::new(z.clone());
            for k in self.root.len()..z.len() {
                out.push((p.clone(), z.restrict(k)));
            }
        }
        out
    }
}

/// Evidence that a shoot refines another at one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShootCertificate<N> {
    pub point: Seq,
    pub target: Seq,
    pub witness: N,
    pub exceptions: BTreeSet<N>,
    pub in_scope: bool,
    pub refinement: Refinement,
}

impl<N> ShootCertificate<N> {
    pub fn holds(&self) -> bool {
        self.in_scope && self.refinement.status == Status::Pass
    }
}

impl LazyFoliage for GraftBlueprint {
    type Node = BpNode;

    fn root(&self) -> BpNode {
        BpNode::Root
    }

    fn sons(&self, x: &BpNode, count: usize) -> Vec<BpNode> {
        self.sons_lazy(x, count).unwrap_or_default()
    }

    fn is_son(&self, parent: &BpNode, child: &BpNode) -> bool {
        self.contains_node(child) && self.parent_of(child).ok().flatten().as_ref() == Some(parent)
    }

    fn leaf(&self, x: &BpNode) -> SetExpr {
        GraftBlueprint::leaf(self, x).unwrap_or(SetExpr::Empty)
    }
}

/// A blueprint made finite: host and graft foliage trees sharing node ids.
#[derive(Debug, Clone, PartialEq)]
pub struct BlueprintWindow {
    pub trunc: Truncation,
    pub host: FoliageTree<SetExpr>,
    pub graft: FoliageTree<SetExpr>,
    pub ids: BTreeMap<BpNode, NodeId>,
    pub by_id: BTreeMap<NodeId, BpNode>,
    pub host_ids: BTreeMap<Seq, NodeId>,
}

impl BlueprintWindow {
    pub fn node(&self, id: NodeId) -> &BpNode {
        &self.by_id[&id]
    }

    pub fn sons_of(&self, n: &BpNode) -> BTreeSet<BpNode> {
        self.graft
            .skeleton()
            .sons(self.ids[n])
            .expect("graft node")
            .into_iter()
            .map(|i| self.by_id[&i].clone())
            .collect()
    }
}

fn params(r: CheckRecord, depth: usize, width: u32, bp: &GraftBlueprint) -> CheckRecord {
    r.param("depth", depth)
        .param("width", width)
        .param("stage", bp.stage)
        .param("root", &bp.root)
}

pub(crate) fn pairwise_disjoint(sets: &[SetExpr]) -> Result<(), String> {
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate().skip(i + 1) {
            if !a.disjoint_exact(b) {
                return Err(format!("sons {i} and {j} overlap"));
            }
        }
    }
    Ok(())
}

/// Relative shadow partition: `leaf` agrees with the union of `sons` on the
/// stratum below `base` at length `depth`, and the sons are pairwise disjoint.
pub(crate) fn partition_below(
    leaf: &SetExpr,
    sons: &[SetExpr],
    base: &Seq,
    depth: usize,
    width: u32,
) -> Result<(), String> {
    pairwise_disjoint(sons)?;
    let union = SetExpr::union_all(sons.iter().cloned());
    let (l, u) = (leaf.shadow_below(base, depth, width), union.shadow_below(base, depth, width));
    if l != u {
        let differ: Vec<String> = l
            .touched()
            .symmetric_difference(&u.touched())
            .take(3)
            .map(|s| s.to_string())
            .collect();
        return Err(format!("shadows below {base} differ at {differ:?}"));
    }
    Ok(())
}

/// Every blueprint property at one truncation.
pub fn blueprint_checks(bp: &GraftBlueprint, depth: usize, width: u32) -> Result<Vec<CheckRecord>, PipelineError> {
    let win = bp.materialize(depth, width)?;
    let t = &win.trunc;
    let d = t.depth;
    let v = &bp.root;
    let mut out = Vec::new();
    let mut rec = |r: CheckRecord| out.push(params(r, d, width, bp));
    let below_v: Vec<Seq> = full_tree(d - v.len() + 1, width)
        .into_iter()
        .map(|tail| v.concat(tail.items()))
        .collect();
    let delta_window: BTreeSet<Seq> = below_v.iter().filter(|z| bp.in_delta(z)).cloned().collect();

    // Regions.
    let levels_nonempty = (v.len()..d).all(|l| !bp.scheme.delta_level(v, l).is_empty());
    rec(CheckRecord::check("b1", bp.in_delta(v) && levels_nonempty)
        .detail("root is bad and every level of the bad region below the depth is inhabited"));
    let b2 = delta_window
        .iter()
        .all(|z| (v.len()..=z.len()).all(|k| bp.in_delta(&z.restrict(k))));
    rec(CheckRecord::check("b2", b2));
    let max_list: Vec<&Seq> = t.max.iter().collect();
    let antichain = max_list.iter().enumerate().all(|(i, a)| {
        max_list[i + 1..].iter().all(|b| !a.comparable(b))
    });
    rec(CheckRecord::check("b3", antichain).param("members", t.max.len()));
    let b4_bad: Vec<&Seq> = below_v
        .iter()
        .filter(|z| bp.in_omega(z) != z.prefixes().any(|y| bp.in_max(&y)))
        .collect();
    rec(CheckRecord::check("b4", b4_bad.is_empty()).witness(&b4_bad));
    let cover = SetExpr::union_all(bp.max_upto(d + 1, width).into_iter().map(SetExpr::cyl));
    let sh_o = bp.open.shadow(d, width);
    let b5 = sh_o == cover.shadow(d, width);
    rec(CheckRecord::check("b5", b5 && antichain).param("shadow_depth", d));

    // Sons of bad nodes.
    let short_delta: Vec<&Seq> = t.delta.iter().filter(|x| x.len() < d).collect();
    let c1 = t.delta.iter().all(|x| {
        bp.scheme.delta_index(x, x) == Some(0)
            && (0..width as u64)
                .map(|i| bp.scheme.delta_at(x, i))
                .collect::<BTreeSet<_>>()
                .iter()
                .filter(|e| x.is_prefix_of(e) && bp.in_delta(e))
                .count()
                == width as usize
    });
    rec(CheckRecord::check("c1", c1));
    let c2 = short_delta.iter().all(|x| {
        let good: Vec<Seq> = (0..width).map(|n| x.child(n)).filter(|z| bp.in_omega(z)).collect();
        let bad = bp.scheme.bad_values(x).len();
        good.iter().all(|z| bp.in_max(z))
            && good.len() + bad >= width as usize
            && (0..width as u64)
                .map(|r| x.child(bp.scheme.omega_son(x, r)))
                .collect::<BTreeSet<_>>()
                .iter()
                .filter(|z| bp.in_max(z))
                .count()
                == width as usize
    });
    rec(CheckRecord::check("c2", c2));
    let c3 = t
        .max
        .iter()
        .all(|z| z.parent().is_some_and(|w| bp.in_delta(&w)) && bp.in_max(z));
    rec(CheckRecord::check("c3", c3));

    // Fibers.
    let mut partition_ok = true;
    let mut detail = String::new();
    for x in &short_delta {
        let mut seen: BTreeMap<Seq, Seq> = BTreeMap::new();
        for i in 0..width as u64 {
            let dd = bp.scheme.delta_at(x, i);
            for z in bp.partition_enum(x, &dd, 20)? {
                let back = bp.partition_assign(&z)?;
                let fresh = seen.insert(z.clone(), dd.clone()).is_none();
                if back != dd || !fresh || z.parent().as_ref() != Some(x) {
                    partition_ok = false;
                    detail = format!("fiber member {z} of {dd} below {x}");
                }
            }
        }
        for n in 0..width {
            let z = x.child(n);
            if bp.in_omega(&z) {
                let dd = bp.partition_assign(&z)?;
                if !(x.is_prefix_of(&dd) && bp.in_delta(&dd)) {
                    partition_ok = false;
                    detail = format!("{z} assigned outside the bad region below {x}");
                }
            }
        }
    }
    rec(CheckRecord::check("partition", partition_ok).detail(detail));

    // Chain coordinates.
    let d1 = t.delta.iter().all(|x| {
        (0..=bp.chain_len(x)).all(|l| {
            let w = x.restrict(x.len() - l);
            bp.in_delta(&w) && w.is_prefix_of(x)
        })
    });
    rec(CheckRecord::check("d1", d1));
    let dl: BTreeSet<Seq> = bp.delta_upto(d - 1);
    let left: BTreeSet<(Seq, Seq)> = dl
        .iter()
        .flat_map(|x| (0..=bp.chain_len(x)).map(move |l| (x.restrict(x.len() - l), x.clone())))
        .collect();
    let right: BTreeSet<(Seq, Seq)> = dl
        .iter()
        .flat_map(|z| dl.iter().filter(move |e| z.is_prefix_of(e)).map(move |e| (z.clone(), e.clone())))
        .collect();
    rec(CheckRecord::check("d2", left == right).param("pairs", left.len()));

    // Skeleton.
    let skel = win.graft.skeleton();
    let mut e1_bad = Vec::new();
    for n in win.ids.keys() {
        let got = win.sons_of(n);
        let want: BTreeSet<BpNode> = match n {
            BpNode::Max(_) => BTreeSet::new(),
            BpNode::Root => t
                .delta
                .iter()
                .map(|x| BpNode::Imp {
                    x: x.clone(),
                    level: bp.chain_len(x),
                })
                .collect(),
            BpNode::Imp { x, level } => {
                let w = x.restrict(x.len() - level);
                let mut s: BTreeSet<BpNode> = BTreeSet::new();
                if w.len() < d {
                    s.extend(bp.scheme.fiber_members_below(&w, x, width).into_iter().map(BpNode::Max));
                }
                if *level == 0 {
                    s.insert(BpNode::Max(bp.scheme.fiber_member(x, x, 0)?));
                } else {
                    s.insert(BpNode::Imp {
                        x: x.clone(),
                        level: level - 1,
                    });
                }
                s
            }
        };
        let lazy_ok = bp
            .sons_lazy(n, width as usize)?
            .iter()
            .all(|s| bp.parent_of(s).ok().flatten().as_ref() == Some(n));
        if got != want || !lazy_ok {
            e1_bad.push(n.clone());
        }
    }
    rec(CheckRecord::check("e1", e1_bad.is_empty()).witness(&e1_bad));
    let e2 = t.delta.iter().all(|x| {
        let lx = bp.chain_len(x);
        (0..=lx).all(|l| {
            let id = win.ids[&BpNode::Imp { x: x.clone(), level: l }];
            let want = if l == lx {
                BpNode::Root
            } else {
                BpNode::Imp {
                    x: x.clone(),
                    level: l + 1,
                }
            };
            skel.parent_of(id).ok().flatten() == Some(win.ids[&want])
        })
    });
    rec(CheckRecord::check("e2", e2));
    let maxel: BTreeSet<Seq> = skel.maxel().iter().map(|&i| win.host.skeleton().label(i).cloned().unwrap_or_default()).collect();
    let e3 = maxel == t.max && skel.maxel().iter().all(|i| matches!(win.node(*i), BpNode::Max(_)));
    rec(CheckRecord::check("e3", e3).param("maxima", t.max.len()));
    let least = skel.least();
    let branching = win
        .ids
        .keys()
        .filter(|n| !matches!(n, BpNode::Max(_)))
        .all(|n| {
            let s = bp.sons_lazy(n, width as usize).unwrap_or_default();
            s.iter().collect::<BTreeSet<_>>().len() == width as usize
        });
    rec(CheckRecord::check("e4", least == Some(win.host_ids[v]) && branching)
        .detail("least node is the root; every non-maximal node enumerates width-many distinct sons"));
    let mut e5_ok = true;
    for b in skel.branches() {
        let first = b
            .iter()
            .map(|&i| win.node(i))
            .find(|n| matches!(n, BpNode::Imp { x, level } if *level == bp.chain_len(x)));
        let bound = match first {
            Some(BpNode::Imp { x, .. }) => bp.chain_len(x) + 3,
            _ => 1,
        };
        e5_ok &= b.len() <= bound;
    }
    rec(CheckRecord::check("e5", e5_ok && skel.has_bounded_chains()));
    let anatomy = graft_anatomy(win.host.skeleton(), skel);
    let imp_ids: NodeSet = win
        .ids
        .iter()
        .filter(|(n, _)| matches!(n, BpNode::Imp { .. }))
        .map(|(_, &i)| i)
        .collect();
    rec(CheckRecord::check("e6", anatomy.is_graft() && anatomy.implant == imp_ids)
        .witness(&anatomy.violations));
    let explant_seqs: BTreeSet<Seq> = anatomy
        .explant
        .iter()
        .filter_map(|&i| win.host.skeleton().label(i).cloned())
        .collect();
    let want_explant: BTreeSet<Seq> = win
        .host_ids
        .keys()
        .filter(|s| bp.in_delta(s) && *s != v)
        .cloned()
        .collect();
    rec(CheckRecord::check("e7", explant_seqs == want_explant).param("explant", explant_seqs.len()));

    // Foliage graft.
    rec(CheckRecord::check("a1", least == Some(win.host_ids[v])));
    let mut a2 = true;
    for n in win.ids.keys() {
        let mut cur = n.clone();
        for _ in 0..=d + 2 {
            match bp.parent_of(&cur)? {
                Some(p) => cur = p,
                None => break,
            }
        }
        a2 &= cur == BpNode::Root;
    }
    rec(CheckRecord::check("a2", a2).detail("every node reaches the root through finitely many parents"));
    rec(CheckRecord::check("a3", branching).param("evidence_sons", width));
    rec(CheckRecord::check("a4", e5_ok));
    let mut a5_bad = Vec::new();
    for n in win.ids.keys() {
        let sons: Vec<BpNode> = win.sons_of(n).into_iter().collect();
        if sons.is_empty() {
            continue;
        }
        let leaves: Vec<SetExpr> = sons.iter().map(|s| bp.leaf(s)).collect::<Result<_, _>>()?;
        let leaf = bp.leaf(n)?;
        let base = match n {
            BpNode::Root => Some((v.clone(), d - 1)),
            BpNode::Imp { x, level } if x.len() - level < d => Some((x.restrict(x.len() - level), d)),
            _ => None,
        };
        let res = match base {
            Some((b, depth)) => partition_below(&leaf, &leaves, &b, depth, width),
            // Chain nodes above the window keep only their chain son and the
            // forced fiber member: disjoint and inside the leaf.
            None => pairwise_disjoint(&leaves).and_then(|_| {
                if SetExpr::union_all(leaves.iter().cloned()).subset_exact(&leaf) {
                    Ok(())
                } else {
                    Err("sons leave the leaf".into())
                }
            }),
        };
        if let Err(e) = res {
            a5_bad.push(format!("{n:?}: {e}"));
        }
    }
    rec(CheckRecord::check("a5", a5_bad.is_empty()).witness(&a5_bad));
    let a6 = win.graft.leaves().values().all(|l| l.is_open());
    rec(CheckRecord::check("a6", a6));
    let exact = BaireExact::new(BaireWindow::new(d, width));
    let fg = foliage_graft_check(&exact, &win.host, &win.graft)?;
    rec(CheckRecord::check("a7", fg.is_foliage_graft).witness(&fg.violations));
    let samples = bp.shoot_samples(t);
    let certs = bp.preserves_shoots_check(&samples, width as usize)?;
    let failed: Vec<&ShootCertificate<BpNode>> = certs.iter().filter(|c| !c.holds()).collect();
    rec(CheckRecord::check("a8", failed.is_empty())
        .param("samples", certs.len())
        .witness(failed.first()));
    rec(CheckRecord::check("a9", !imp_ids.is_empty()));
    let cut_ok = fg.cut.equal_exact(&SetExpr::diff(SetExpr::cyl(v.clone()), bp.open.clone()))
        && fg.cut.equal_exact(&bp.cut());
    rec(CheckRecord::check("a10", cut_ok));
    let mut maxel_cover: BTreeSet<Seq> = maxel.clone();
    maxel_cover.extend(bp.max_upto(d + 1, width));
    let cover_g = SetExpr::union_all(maxel_cover.iter().cloned().map(SetExpr::cyl));
    let a11 = cover_g.shadow(d, width) == sh_o && antichain;
    rec(CheckRecord::check("a11", a11).param("shadow_depth", d));
    Ok(out)
}

/// Shortlex order on blueprint roots, used to list blueprints of one stage.
pub fn root_order(a: &GraftBlueprint, b: &GraftBlueprint) -> Ordering {
    a.stage.cmp(&b.stage).then_with(|| a.root.shortlex_cmp(&b.root))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Seq {
        Seq::from(v)
    }

    fn zero_bp() -> GraftBlueprint {
        GraftBlueprint::build(0, Seq::empty(), Arc::new(CompactCode::zero())).unwrap()
    }

    #[test]
    fn regions_of_the_zero_point() {
        let bp = zero_bp();
        for k in 0..4 {
            assert!(bp.in_delta(&Seq::zeros(k)));
            assert!(bp.in_max(&Seq::zeros(k).child(2)));
        }
        assert!(!bp.in_max(&s(&[1, 0])));
        let one = GraftBlueprint::build(0, s(&[1]), Arc::new(CompactCode::singleton(&s(&[1])))).unwrap();
        assert!(one.in_delta(&s(&[1, 0, 0])));
        assert!(!one.in_delta(&s(&[1, 1])));
    }

    #[test]
    fn improper_open_sets_are_rejected() {
        let e = GraftBlueprint::build(0, s(&[1]), Arc::new(CompactCode::zero()));
        assert!(matches!(e, Err(PipelineError::NotProper { class: Class::Inside, .. })));
    }

    #[test]
    fn first_fiber_of_the_bottom_chain() {
        let bp = zero_bp();
        let bottom = BpNode::Imp {
            x: Seq::empty(),
            level: 0,
        };
        let sons = bp.sons_lazy(&bottom, 3).unwrap();
        assert_eq!(sons[0], BpNode::Max(s(&[1])));
        for son in &sons {
            let BpNode::Max(z) = son else { panic!("maximal sons") };
            assert_eq!(z.len(), 1);
            assert_ne!(z.items()[0], 0);
            assert_eq!(bp.parent_of(son).unwrap(), Some(bottom.clone()));
        }
    }

    #[test]
    fn every_check_passes_for_the_zero_point() {
        let bp = zero_bp();
        let checks = blueprint_checks(&bp, 3, 3).unwrap();
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed()).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert_eq!(checks.len(), 29);
    }

    #[test]
    fn recipe_lands_on_the_target() {
        let bp = zero_bp();
        let p = Point::new(s(&[0, 0, 2]));
        let (x, exc) = bp.preserves_shoots_witness(&p, &s(&[0])).unwrap();
        assert_eq!(
            x,
            BpNode::Imp {
                x: bp.partition_assign(&s(&[0, 0, 2])).unwrap(),
                level: bp.partition_assign(&s(&[0, 0, 2])).unwrap().len() - 1
            }
        );
        assert!(exc.len() <= 1);
        assert!(matches!(
            bp.preserves_shoots_witness(&p, &s(&[0, 0, 2])),
            Err(PipelineError::NotInDelta(_))
        ));
        assert!(matches!(
            bp.preserves_shoots_witness(&Point::new(Seq::empty()), &Seq::empty()),
            Err(PipelineError::SampleOutside(_))
        ));
    }

    #[test]
    fn every_check_passes_for_branching_compacts() {
        let cases = [
            (s(&[1]), CompactCode::branching(2, 2)),
            (s(&[0]), CompactCode::branching(3, 1)),
            (s(&[2, 1]), CompactCode::singleton(&s(&[2, 1, 0, 3]))),
        ];
        for (root, k) in cases {
            let bp = GraftBlueprint::build(1, root.clone(), Arc::new(k)).unwrap();
            for (depth, width) in [(2, 2), (4, 3)] {
                let checks = blueprint_checks(&bp, depth, width).unwrap();
                let failed: Vec<_> = checks.iter().filter(|c| !c.passed()).collect();
                assert!(failed.is_empty(), "{root} at {depth}/{width}: {failed:#?}");
            }
        }
    }
}
