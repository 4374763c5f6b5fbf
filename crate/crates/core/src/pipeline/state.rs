//! The stage recursion: each stage removes one compact set by grafting a
//! blueprint below every member of the current antichain whose cylinder
//! meets it.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use super::blueprint::{blueprint_checks, GraftBlueprint};
use super::{PipelineError, Trunc};
use crate::baire::{pi_dense_at, Class, CompactCode, SetExpr};
use crate::report::CheckRecord;
use crate::seq::{full_tree, Seq};

/// One stage `n`: the compact set `K_n`, the roots `Z_n` and their blueprints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub n: usize,
    pub compact: Arc<CompactCode>,
    pub z: Vec<Seq>,
    pub psi: Vec<GraftBlueprint>,
}

impl Stage {
    /// `U_n`, the complement of `K_n`.
    pub fn open(&self) -> SetExpr {
        SetExpr::co_compact((*self.compact).clone())
    }
}

/// The recursion after some number of stages. With no stages the antichain
/// is `{⟨⟩}` and nothing is lost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineState {
    pub stages: Vec<Stage>,
    pub loss: SetExpr,
    /// Length bound on antichain members along points of the compact sets seen so far.
    walk_bound: usize,
}

impl PipelineState {
    pub fn new() -> Self {
        PipelineState {
            stages: Vec::new(),
            loss: SetExpr::Empty,
            walk_bound: 0,
        }
    }

    pub fn loss(&self) -> &SetExpr {
        &self.loss
    }

    /// Stages taken so far.
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Every blueprint of every stage, in stage order.
    pub fn family(&self) -> impl Iterator<Item = &GraftBlueprint> {
        self.stages.iter().flat_map(|s| s.psi.iter())
    }

    /// `z ∈ M_k`; `k = None` is the initial antichain.
    pub fn in_m_at(&self, k: Option<usize>, z: &Seq) -> bool {
        let Some(k) = k else {
            return z.is_empty();
        };
        let prev = self.in_m_at(k.checked_sub(1), z);
        let stage = &self.stages[k];
        (prev && !stage.z.contains(z)) || stage.psi.iter().any(|bp| bp.in_max(z))
    }

    /// Membership in the current antichain.
    pub fn in_m(&self, z: &Seq) -> bool {
        self.in_m_at(self.stages.len().checked_sub(1), z)
    }

    /// Members of the current antichain with length at most `max_len` and
    /// values below `width`.
    pub fn m_window(&self, max_len: usize, width: u32) -> Vec<Seq> {
        full_tree(max_len + 1, width)
            .into_iter()
            .filter(|z| self.in_m(z))
            .collect()
    }

    /// `⋂ U_i` over the stages so far.
    pub fn survivors(&self) -> SetExpr {
        self.stages
            .iter()
            .fold(SetExpr::Full, |acc, s| SetExpr::inter(acc, s.open()))
    }

    /// The member of the current antichain along `p`, if `p` survived.
    fn member_along(&self, p: &crate::baire::Point, bound: usize) -> Option<Seq> {
        (0..=bound).map(|k| p.prefix(k)).find(|x| self.in_m(x))
    }
}

/// Adds the stage removing `compact`, after checking its complement is
/// π-dense at the truncation.
pub fn pipeline_step(state: &PipelineState, compact: CompactCode, trunc: &Trunc) -> Result<PipelineState, PipelineError> {
    let n = state.stages.len();
    let u = SetExpr::co_compact(compact.clone());
    if !pi_dense_at(&u, &Seq::empty(), trunc.depth, trunc.width, trunc.threshold) {
        return Err(PipelineError::NotPiDense {
            stage: n,
            depth: trunc.depth,
            width: trunc.width,
            threshold: trunc.threshold,
        });
    }
    let compact = Arc::new(compact);
    let mut z = BTreeSet::new();
    for p in compact.points() {
        let bound = state.walk_bound.max(p.support().len()) + 1;
        if let Some(x) = state.member_along(p, bound) {
            match u.classify(&x) {
                Class::Split => {
                    z.insert(x);
                }
                class => {
                    return Err(PipelineError::Invariant {
                        id: "g5".into(),
                        detail: format!("antichain member {x} above a removed point classifies {class:?}"),
                    })
                }
            }
        }
    }
    let mut z: Vec<Seq> = z.into_iter().collect();
    z.sort_by(Seq::shortlex_cmp);
    let psi = z
        .iter()
        .map(|x| GraftBlueprint::build(n, x.clone(), compact.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut next = state.clone();
    let cuts = psi.iter().map(|bp| bp.cut());
    next.loss = SetExpr::union_all(std::iter::once(state.loss().clone()).chain(cuts));
    next.walk_bound = state.walk_bound.max(compact.depth()) + 1;
    next.stages.push(Stage { n, compact, z, psi });
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineRun {
    pub trunc: Trunc,
    #[serde(skip)]
    pub state: PipelineState,
    pub records: Vec<CheckRecord>,
}

/// Runs `stages` steps on the first compact sets and records the stage
/// invariants after each.
pub fn pipeline_run(compacts: &[CompactCode], stages: usize, trunc: Trunc) -> Result<PipelineRun, PipelineError> {
    if stages > compacts.len() {
        return Err(PipelineError::TooManyStages {
            stages,
            compacts: compacts.len(),
        });
    }
    let mut state = PipelineState::new();
    let mut records = Vec::new();
    for k in compacts.iter().take(stages) {
        state = pipeline_step(&state, k.clone(), &trunc)?;
        records.extend(stage_checks(&state, &trunc)?);
    }
    Ok(PipelineRun { trunc, state, records })
}

/// The stage invariants for the last stage of `state`.
pub fn stage_checks(state: &PipelineState, trunc: &Trunc) -> Result<Vec<CheckRecord>, PipelineError> {
    let Some(stage) = state.stages.last() else {
        return Ok(Vec::new());
    };
    let (d, w) = (trunc.depth, trunc.width);
    let mut out = Vec::new();
    let mut rec = |r: CheckRecord| out.push(r.param("stage", stage.n).param("depth", d).param("width", w));

    let roots: Vec<Seq> = stage.psi.iter().map(|bp| bp.root.clone()).collect();
    rec(CheckRecord::check("g1", roots == stage.z).param("roots", roots.len()));

    let window = state.m_window(d + 1, w);
    let clash: Vec<(&Seq, &Seq)> = window
        .iter()
        .enumerate()
        .flat_map(|(i, a)| window[i + 1..].iter().filter(move |b| a.comparable(b)).map(move |b| (a, b)))
        .collect();
    rec(CheckRecord::check("g2", clash.is_empty())
        .param("members", window.len())
        .witness(&clash));

    let earlier: BTreeSet<&Seq> = state.stages.iter().flat_map(|s| s.z.iter()).collect();
    let g3_bad: Vec<&Seq> = earlier
        .iter()
        .copied()
        .filter(|x| x.prefixes().any(|y| state.in_m(&y)))
        .collect();
    rec(CheckRecord::check("g3", g3_bad.is_empty()).witness(&g3_bad));

    let mut g4_bad: Vec<String> = Vec::new();
    for bp in &stage.psi {
        for r in blueprint_checks(bp, d, w)? {
            if !r.passed() {
                g4_bad.push(format!("{} below {}", r.id, bp.root));
            }
        }
    }
    let family: Vec<&GraftBlueprint> = state.family().collect();
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            if a.root == b.root {
                g4_bad.push(format!("two grafts at {}", a.root));
            }
            for (x, y) in [(a, b), (b, a)] {
                if x.in_delta(&y.root) && y.root != x.root {
                    g4_bad.push(format!("root {} inside the explant below {}", y.root, x.root));
                }
            }
        }
    }
    rec(CheckRecord::check("g4", g4_bad.is_empty())
        .param("grafts", stage.psi.len())
        .witness(&g4_bad));

    let cover = SetExpr::union_all(window.iter().cloned().map(SetExpr::cyl));
    let g5 = cover.shadow(d, w) == state.survivors().shadow(d, w);
    rec(CheckRecord::check("g5", g5));

    let removed = SetExpr::union_all(state.stages.iter().map(|s| SetExpr::Compact(s.compact.clone())));
    let shadow_eq = state.loss().shadow(d, w) == removed.shadow(d, w);
    let exact = state.loss().equal_exact(&removed);
    rec(CheckRecord::check("g6", shadow_eq && exact).param("exact", exact));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Seq {
        Seq::from(v)
    }

    fn ones() -> CompactCode {
        CompactCode::singleton(&s(&[1, 1, 1]))
    }

    #[test]
    fn removing_a_lost_point_changes_nothing() {
        let t = Trunc::new(3, 3, 2);
        let once = pipeline_step(&PipelineState::new(), CompactCode::zero(), &t).unwrap();
        let twice = pipeline_step(&once, CompactCode::zero(), &t).unwrap();
        assert!(twice.stages[1].z.is_empty());
        for z in full_tree(4, 3) {
            assert_eq!(once.in_m(&z), twice.in_m(&z), "{z}");
        }
    }

    #[test]
    fn one_point_removal() {
        let t = Trunc::new(4, 4, 2);
        let run = pipeline_run(&[CompactCode::zero()], 1, t).unwrap();
        let st = &run.state;
        assert_eq!(st.stages[0].z, vec![Seq::empty()]);
        assert!(st.in_m(&s(&[0, 0, 3])));
        assert!(!st.in_m(&s(&[0, 0])));
        assert!(!st.in_m(&Seq::empty()));
        assert_eq!(st.loss().shadow(3, 3).split, [Seq::zeros(3)].into());
        let failed: Vec<_> = run.records.iter().filter(|r| !r.passed()).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn second_point_lands_below_the_antichain() {
        let t = Trunc::new(4, 4, 2);
        let run = pipeline_run(&[CompactCode::zero(), ones()], 2, t).unwrap();
        let st = &run.state;
        assert_eq!(st.stages[1].z, vec![s(&[1])]);
        assert!(st.stages[0].z.iter().all(|x| !st.in_m(x)));
        let failed: Vec<_> = run.records.iter().filter(|r| !r.passed()).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert_eq!(run.records.len(), 12);
    }

    #[test]
    fn too_many_stages() {
        assert!(matches!(
            pipeline_run(&[], 1, Trunc::new(2, 2, 2)),
            Err(PipelineError::TooManyStages { .. })
        ));
    }

    #[test]
    fn dense_threshold_is_enforced() {
        let t = Trunc::new(2, 3, 3);
        assert!(matches!(
            pipeline_step(&PipelineState::new(), CompactCode::zero(), &t),
            Err(PipelineError::NotPiDense { .. })
        ));
    }
}
