//! Foliage trees given by a son enumerator instead of a node list, and the
//! shoot checks that only ever look at finitely many sons.

use std::collections::BTreeSet;
use std::fmt::Debug;

use serde::Serialize;

use crate::baire::{Class, Point, SetExpr};
use crate::foliage::FoliageTree;
use crate::report::Status;
use crate::seq::{stratum, Seq};
use crate::tree::NodeId;

pub trait LazyFoliage {
    type Node: Clone + Eq + Ord + Debug + Serialize;

    fn root(&self) -> Self::Node;

    /// The first `count` sons in the tree's fixed enumeration; fewer when the
    /// node has fewer sons.
    fn sons(&self, x: &Self::Node, count: usize) -> Vec<Self::Node>;

    fn is_son(&self, parent: &Self::Node, child: &Self::Node) -> bool;

    fn leaf(&self, x: &Self::Node) -> SetExpr;

    /// The union of the leaves of all sons of `x` but the first `skip`.
    ///
    /// The default reads it off the leaf of `x`, which is right wherever the
    /// leaf is the disjoint union of the sons' leaves.
    fn tail_flesh(&self, x: &Self::Node, skip: usize) -> SetExpr {
        let head = SetExpr::union_all(self.sons(x, skip).iter().map(|s| self.leaf(s)));
        SetExpr::diff(self.leaf(x), head)
    }
}

/// The standard foliage tree on `ω^<ω` with cylinder leaves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StdLazy;

impl LazyFoliage for StdLazy {
    type Node = Seq;

    fn root(&self) -> Seq {
        Seq::empty()
    }

    fn sons(&self, x: &Seq, count: usize) -> Vec<Seq> {
        (0..count as u32).map(|n| x.child(n)).collect()
    }

    fn is_son(&self, parent: &Seq, child: &Seq) -> bool {
        child.parent().as_ref() == Some(parent)
    }

    fn leaf(&self, x: &Seq) -> SetExpr {
        SetExpr::cyl(x.clone())
    }
}

impl LazyFoliage for FoliageTree<SetExpr> {
    type Node = NodeId;

    fn root(&self) -> NodeId {
        self.skeleton().least().expect("lazy views need a least node")
    }

    fn sons(&self, x: &NodeId, count: usize) -> Vec<NodeId> {
        self.skeleton()
            .sons(*x)
            .map(|s| s.into_iter().take(count).collect())
            .unwrap_or_default()
    }

    fn is_son(&self, parent: &NodeId, child: &NodeId) -> bool {
        self.skeleton().parent_of(*child).ok().flatten() == Some(*parent)
    }

    fn leaf(&self, x: &NodeId) -> SetExpr {
        self.leaf(*x).cloned().unwrap_or(SetExpr::Empty)
    }

    fn tail_flesh(&self, x: &NodeId, skip: usize) -> SetExpr {
        let sons = self.skeleton().sons(*x).unwrap_or_default();
        SetExpr::union_all(
            sons.into_iter()
                .skip(skip)
                .map(|s| LazyFoliage::leaf(self, &s)),
        )
    }
}

/// Outcome of a shoot refinement check over the first `count` sons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refinement {
    pub status: Status,
    /// Distinct sons enumerated outside the exceptions.
    pub checked: usize,
    pub detail: String,
}

/// Checks the finite-exception condition under which the shoot of `x` in `a`
/// π-refines the shoot of `y` in `b`: every enumerated son of `x` outside
/// `exceptions` is a son of `y` in `b` with a smaller, nonempty leaf there.
///
/// Son identity across the trees goes through `embed`. Fewer than `count`
/// sons means `x` has finitely many, which fails the check.
pub fn shoots_refinement<A, B, E>(
    a: &A,
    x: &A::Node,
    b: &B,
    y: &B::Node,
    exceptions: &BTreeSet<A::Node>,
    embed: E,
    count: usize,
) -> Refinement
where
    A: LazyFoliage,
    B: LazyFoliage,
    E: Fn(&A::Node) -> Option<B::Node>,
{
    let fail = |checked, detail: String| Refinement {
        status: Status::Fail,
        checked,
        detail,
    };
    let sons = a.sons(x, count + exceptions.len());
    let distinct: BTreeSet<&A::Node> = sons.iter().collect();
    if distinct.len() != sons.len() {
        return fail(0, format!("son enumeration of {x:?} repeats"));
    }
    if sons.len() < count + exceptions.len() {
        return fail(0, format!("{x:?} has only {} sons", sons.len()));
    }
    let mut checked = 0;
    for s in sons.iter().filter(|s| !exceptions.contains(s)) {
        let Some(t) = embed(s) else {
            return fail(checked, format!("son {s:?} is not a node of the target tree"));
        };
        if !b.is_son(y, &t) {
            return fail(checked, format!("son {s:?} is not a son of {y:?}"));
        }
        let (la, lb) = (a.leaf(s), b.leaf(&t));
        if la.is_empty_exact() || lb.is_empty_exact() {
            return fail(checked, format!("son {s:?} has an empty leaf"));
        }
        if !la.subset_exact(&lb) {
            return fail(checked, format!("leaf of son {s:?} is not inside its target leaf"));
        }
        checked += 1;
    }
    Refinement {
        status: Status::Pass,
        checked,
        detail: String::new(),
    }
}

/// Outcome of a grows-into check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Growth {
    pub status: Status,
    pub points: usize,
    pub neighborhoods: usize,
    pub detail: String,
}

/// A point of `y` inside `S_t`, if one with a short tail exists.
fn representative(y: &SetExpr, t: &Seq, width: u32) -> Option<Point> {
    let mut candidates = vec![t.clone()];
    candidates.extend((0..width).map(|n| t.child(n)));
    candidates.extend((0..width).flat_map(|n| (0..width).map(move |m| t.child(n).child(m))));
    candidates
        .into_iter()
        .map(Point::new)
        .find(|p| p.extends(t) && y.contains(p))
}

/// Truncated grows-into check against the cylinder base of `y`.
///
/// Points range over one representative per stratum node of length `depth`
/// that meets `y`; neighborhoods over `S_u ∩ y` for prefixes `u` of length at
/// most `depth`. A witness is a node on the scope of the point whose sons,
/// after dropping at most `count` of them, have nonempty flesh inside the
/// neighborhood.
pub fn grows_into<L: LazyFoliage>(f: &L, y: &SetExpr, depth: usize, width: u32, count: usize) -> Growth {
    let mut out = Growth {
        status: Status::Pass,
        points: 0,
        neighborhoods: 0,
        detail: String::new(),
    };
    let note = |out: &mut Growth, status: Status, detail: String| {
        if status > out.status {
            out.status = status;
            out.detail = detail;
        }
    };
    for t in stratum(depth, width) {
        if y.classify(&t) == Class::Outside {
            continue;
        }
        let Some(p) = representative(y, &t, width) else {
            note(&mut out, Status::Undecidable, format!("no short point of the set below {t}"));
            continue;
        };
        out.points += 1;
        let chain = scope_chain(f, &p, depth * 3 + 3, count.max(width as usize + 2));
        if chain.is_empty() {
            note(&mut out, Status::Fail, format!("no leaf contains {p:?}"));
            continue;
        }
        for k in 0..=depth {
            let u = p.prefix(k);
            let target = SetExpr::inter(SetExpr::cyl(u.clone()), y.clone());
            out.neighborhoods += 1;
            let found = chain.iter().any(|z| {
                (0..=count).any(|skip| {
                    let g = f.tail_flesh(z, skip);
                    !g.is_empty_exact() && g.subset_exact(&target)
                })
            });
            if !found {
                note(
                    &mut out,
                    Status::Undecidable,
                    format!("no shoot inside the neighborhood {u} of {p:?} within the bound"),
                );
            }
        }
    }
    out
}

/// Nodes whose leaves contain `p`, found by descending from the root through
/// the first `count` sons of each node.
pub fn scope_chain<L: LazyFoliage>(f: &L, p: &Point, steps: usize, count: usize) -> Vec<L::Node> {
    let mut out = Vec::new();
    let mut z = f.root();
    if !f.leaf(&z).contains(p) {
        return out;
    }
    for _ in 0..steps {
        out.push(z.clone());
        match f.sons(&z, count).into_iter().find(|s| f.leaf(s).contains(p)) {
            Some(s) => z = s,
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baire::{std_tree, StdTreeView};
    use std::collections::BTreeMap;

    #[test]
    fn identity_refinement() {
        let r = shoots_refinement(&StdLazy, &Seq::empty(), &StdLazy, &Seq::empty(), &BTreeSet::new(), |s| Some(s.clone()), 5);
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.checked, 5);
    }

    #[test]
    fn wrong_parent_fails() {
        let y = Seq::from(&[1u32][..]);
        let r = shoots_refinement(&StdLazy, &Seq::empty(), &StdLazy, &y, &BTreeSet::new(), |s| Some(s.clone()), 3);
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn larger_leaf_fails() {
        // A two-node tree whose son carries the full space.
        let t = crate::tree::FinTree::from_parents([(0, None), (1, Some(0))]).unwrap();
        let leaves: BTreeMap<_, _> = [(0, SetExpr::cyl(Seq::empty())), (1, SetExpr::Full)].into();
        let f = FoliageTree::new(t, leaves).unwrap();
        let target = |_: &NodeId| Some(Seq::from(&[0u32][..]));
        let r = shoots_refinement(&f, &0, &StdLazy, &Seq::empty(), &BTreeSet::new(), target, 1);
        assert_eq!(r.status, Status::Fail);
        assert!(r.detail.contains("not inside"), "{}", r.detail);
    }

    #[test]
    fn standard_tree_grows_into_the_space() {
        let g = grows_into(&StdLazy, &SetExpr::Full, 2, 3, 2);
        assert_eq!(g.status, Status::Pass, "{}", g.detail);
        assert_eq!(g.points, 9);
        assert_eq!(grows_into(&StdLazy, &SetExpr::Empty, 2, 3, 2).points, 0);
    }

    #[test]
    fn empty_leaves_do_not_grow() {
        let f = std_tree(StdTreeView::new(2, 2)).map_leaves(|_, _| SetExpr::Empty);
        let g = grows_into(&f, &SetExpr::Full, 1, 2, 2);
        assert_eq!(g.status, Status::Fail);
    }
}
