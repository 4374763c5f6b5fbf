//! Symbolic subsets of the Baire space and their classification on cylinders.
//!
//! Cylinders and fiber families are clopen and decided by a finite prefix;
//! compact codes denote finite sets of eventually-zero points. That keeps
//! classification exact: below the longest clopen prefix an expression is a
//! constant on all but finitely many points, and those points are enumerable.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::compact::{CompactCode, Point};
use super::fiber::FiberScheme;
use crate::seq::Seq;

/// Sons scanned when fiber families from different schemes share a parent.
const MIXED_SCHEME_SCAN: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("diff takes exactly two arguments, got {0}")]
    DiffArity(usize),
    #[error("fiber family parent {0} is not in the bad region of its scheme")]
    FamilyParent(Seq),
    #[error("fiber {fiber} is not below family parent {parent}")]
    FamilyFiber { parent: Seq, fiber: Seq },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Inside,
    Outside,
    Split,
}

/// `⋃ { S_z : z ∈ Ω_{w,d}, d ∈ fibers }`, all members sons of `w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiberFamily {
    pub scheme: Arc<FiberScheme>,
    pub parent: Seq,
    pub fibers: BTreeSet<Seq>,
    indices: BTreeSet<u64>,
}

impl FiberFamily {
    pub fn new(scheme: Arc<FiberScheme>, parent: Seq, fibers: BTreeSet<Seq>) -> Result<Self, ExprError> {
        if !scheme.in_delta(&parent) {
            return Err(ExprError::FamilyParent(parent));
        }
        let mut indices = BTreeSet::new();
        for d in &fibers {
            let i = scheme.delta_index(&parent, d).ok_or_else(|| ExprError::FamilyFiber {
                parent: parent.clone(),
                fiber: d.clone(),
            })?;
            indices.insert(i);
        }
        Ok(FiberFamily {
            scheme,
            parent,
            fibers,
            indices,
        })
    }

    /// Membership of the son `parent⌢n`.
    pub fn has_son(&self, n: u32) -> bool {
        self.scheme
            .son_fiber_index(&self.parent, n)
            .is_some_and(|i| self.indices.contains(&i))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Wire", into = "Wire")]
pub enum SetExpr {
    Empty,
    Full,
    Cylinder(Seq),
    Compact(Arc<CompactCode>),
    Union(Vec<SetExpr>),
    Inter(Vec<SetExpr>),
    Diff(Box<SetExpr>, Box<SetExpr>),
    Family(FiberFamily),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum Wire {
    Empty,
    Full,
    Cyl { seq: Seq },
    Compact(CompactCode),
    Union { args: Vec<SetExpr> },
    Inter { args: Vec<SetExpr> },
    Diff { args: Vec<SetExpr> },
    Fiber { scheme: FiberScheme, parent: Seq, fibers: Vec<Seq> },
}

impl TryFrom<Wire> for SetExpr {
    type Error = ExprError;

    fn try_from(w: Wire) -> Result<Self, ExprError> {
        Ok(match w {
            Wire::Empty => SetExpr::Empty,
            Wire::Full => SetExpr::Full,
            Wire::Cyl { seq } => SetExpr::Cylinder(seq),
            Wire::Compact(k) => SetExpr::Compact(Arc::new(k)),
            Wire::Union { args } => SetExpr::Union(args),
            Wire::Inter { args } => SetExpr::Inter(args),
            Wire::Diff { args } => {
                let n = args.len();
                let [a, b]: [SetExpr; 2] = args.try_into().map_err(|_| ExprError::DiffArity(n))?;
                SetExpr::Diff(Box::new(a), Box::new(b))
            }
            Wire::Fiber {
                scheme,
                parent,
                fibers,
            } => SetExpr::Family(FiberFamily::new(
                Arc::new(scheme),
                parent,
                fibers.into_iter().collect(),
            )?),
        })
    }
}

impl From<SetExpr> for Wire {
    fn from(e: SetExpr) -> Self {
        match e {
            SetExpr::Empty => Wire::Empty,
            SetExpr::Full => Wire::Full,
            SetExpr::Cylinder(seq) => Wire::Cyl { seq },
            SetExpr::Compact(k) => Wire::Compact((*k).clone()),
            SetExpr::Union(args) => Wire::Union { args },
            SetExpr::Inter(args) => Wire::Inter { args },
            SetExpr::Diff(a, b) => Wire::Diff {
                args: vec![*a, *b],
            },
            SetExpr::Family(f) => Wire::Fiber {
                scheme: (*f.scheme).clone(),
                parent: f.parent,
                fibers: f.fibers.into_iter().collect(),
            },
        }
    }
}

impl SetExpr {
    pub fn cyl(s: Seq) -> Self {
        SetExpr::Cylinder(s)
    }

    pub fn compact(k: CompactCode) -> Self {
        SetExpr::Compact(Arc::new(k))
    }

    pub fn union(a: SetExpr, b: SetExpr) -> Self {
        match (a, b) {
            (SetExpr::Empty, x) | (x, SetExpr::Empty) => x,
            (SetExpr::Full, _) | (_, SetExpr::Full) => SetExpr::Full,
            (SetExpr::Union(mut xs), SetExpr::Union(ys)) => {
                xs.extend(ys);
                SetExpr::Union(xs)
            }
            (SetExpr::Union(mut xs), y) => {
                xs.push(y);
                SetExpr::Union(xs)
            }
            (x, y) => SetExpr::Union(vec![x, y]),
        }
    }

    pub fn inter(a: SetExpr, b: SetExpr) -> Self {
        match (a, b) {
            (SetExpr::Empty, _) | (_, SetExpr::Empty) => SetExpr::Empty,
            (SetExpr::Full, x) | (x, SetExpr::Full) => x,
            (SetExpr::Inter(mut xs), y) => {
                xs.push(y);
                SetExpr::Inter(xs)
            }
            (x, y) => SetExpr::Inter(vec![x, y]),
        }
    }

    pub fn diff(a: SetExpr, b: SetExpr) -> Self {
        match (a, b) {
            (SetExpr::Empty, _) | (_, SetExpr::Full) => SetExpr::Empty,
            (x, SetExpr::Empty) => x,
            (x, y) => SetExpr::Diff(Box::new(x), Box::new(y)),
        }
    }

    pub fn union_all<I: IntoIterator<Item = SetExpr>>(items: I) -> Self {
        items.into_iter().fold(SetExpr::Empty, SetExpr::union)
    }

    /// Complement of a compact set: the open set `ω^ω \ K`.
    pub fn co_compact(k: CompactCode) -> Self {
        SetExpr::diff(SetExpr::Full, SetExpr::compact(k))
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            SetExpr::Empty => false,
            SetExpr::Full => true,
            SetExpr::Cylinder(c) => p.extends(c),
            SetExpr::Compact(k) => k.contains(p),
            SetExpr::Union(xs) => xs.iter().any(|x| x.contains(p)),
            SetExpr::Inter(xs) => xs.iter().all(|x| x.contains(p)),
            SetExpr::Diff(a, b) => a.contains(p) && !b.contains(p),
            SetExpr::Family(f) => p.extends(&f.parent) && f.has_son(p.at(f.parent.len())),
        }
    }

    fn polarity(&self) -> (bool, bool) {
        match self {
            SetExpr::Empty | SetExpr::Full | SetExpr::Cylinder(_) | SetExpr::Family(_) => (true, true),
            SetExpr::Compact(_) => (false, true),
            SetExpr::Union(xs) | SetExpr::Inter(xs) => xs.iter().fold((true, true), |(o, c), x| {
                let (xo, xc) = x.polarity();
                (o && xo, c && xc)
            }),
            SetExpr::Diff(a, b) => {
                let (ao, ac) = a.polarity();
                let (bo, bc) = b.polarity();
                (ao && bc, ac && bo)
            }
        }
    }

    /// Syntactic openness: compact sets occur only in subtracted positions.
    pub fn is_open(&self) -> bool {
        self.polarity().0
    }

    pub fn classify(&self, y: &Seq) -> Class {
        Compiled::new(self).classify(y)
    }

    pub fn shadow(&self, depth: usize, width: u32) -> Shadow {
        Compiled::new(self).shadow(&Seq::empty(), depth, width)
    }

    /// The shadow restricted to nodes `base⌢t` with `len (base⌢t) = depth`.
    pub fn shadow_below(&self, base: &Seq, depth: usize, width: u32) -> Shadow {
        Compiled::new(self).shadow(base, depth.max(base.len()), width)
    }

    pub fn is_empty_exact(&self) -> bool {
        self.classify(&Seq::empty()) == Class::Outside
    }

    pub fn subset_exact(&self, other: &SetExpr) -> bool {
        SetExpr::diff(self.clone(), other.clone()).is_empty_exact()
    }

    pub fn equal_exact(&self, other: &SetExpr) -> bool {
        self.subset_exact(other) && other.subset_exact(self)
    }

    pub fn disjoint_exact(&self, other: &SetExpr) -> bool {
        SetExpr::inter(self.clone(), other.clone()).is_empty_exact()
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, op: &str, xs: &[SetExpr]) -> fmt::Result {
            write!(f, "{op}(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        }
        match self {
            SetExpr::Empty => write!(f, "empty"),
            SetExpr::Full => write!(f, "full"),
            SetExpr::Cylinder(c) => write!(f, "S{c}"),
            SetExpr::Compact(k) => write!(f, "K{:?}", k.points()),
            SetExpr::Union(xs) => list(f, "union", xs),
            SetExpr::Inter(xs) => list(f, "inter", xs),
            SetExpr::Diff(a, b) => write!(f, "diff({a}, {b})"),
            SetExpr::Family(fam) => {
                let fibers: Vec<String> = fam.fibers.iter().map(|d| d.to_string()).collect();
                write!(f, "fibers{}[{}]", fam.parent, fibers.join(" "))
            }
        }
    }
}

impl fmt::Debug for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Classification of every node `x` with `len x = depth` and values below `width`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shadow {
    pub depth: usize,
    pub width: u32,
    pub inside: BTreeSet<Seq>,
    pub split: BTreeSet<Seq>,
}

impl Shadow {
    pub fn is_empty(&self) -> bool {
        self.inside.is_empty() && self.split.is_empty()
    }

    pub fn class_of(&self, x: &Seq) -> Class {
        if self.inside.contains(x) {
            Class::Inside
        } else if self.split.contains(x) {
            Class::Split
        } else {
            Class::Outside
        }
    }

    /// Stratum nodes that meet the set.
    pub fn touched(&self) -> BTreeSet<Seq> {
        self.inside.union(&self.split).cloned().collect()
    }
}

enum Prim<'a> {
    Cyl(&'a Seq),
    Compact(&'a CompactCode),
    Fam(&'a FiberFamily),
}

enum Node {
    Const(bool),
    Prim(usize),
    Or(Vec<Node>),
    And(Vec<Node>),
    Diff(Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, v: &dyn Fn(usize) -> bool) -> bool {
        match self {
            Node::Const(b) => *b,
            Node::Prim(i) => v(*i),
            Node::Or(xs) => xs.iter().any(|x| x.eval(v)),
            Node::And(xs) => xs.iter().all(|x| x.eval(v)),
            Node::Diff(a, b) => a.eval(v) && !b.eval(v),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Local {
    In,
    Out,
    /// Undecided at this node; only the son with this value can change that.
    Pending(u32),
    /// A compact set with points below this node.
    Points,
    /// A fiber family whose members are sons of this node.
    FamAt,
}

struct Compiled<'a> {
    prims: Vec<Prim<'a>>,
    root: Node,
}

impl<'a> Compiled<'a> {
    fn new(e: &'a SetExpr) -> Self {
        let mut prims = Vec::new();
        let root = Self::build(e, &mut prims);
        Compiled { prims, root }
    }

    fn build(e: &'a SetExpr, prims: &mut Vec<Prim<'a>>) -> Node {
        let push = |p: Prim<'a>, prims: &mut Vec<Prim<'a>>| {
            prims.push(p);
            Node::Prim(prims.len() - 1)
        };
        match e {
            SetExpr::Empty => Node::Const(false),
            SetExpr::Full => Node::Const(true),
            SetExpr::Cylinder(c) => push(Prim::Cyl(c), prims),
            SetExpr::Compact(k) => push(Prim::Compact(k), prims),
            SetExpr::Family(f) => push(Prim::Fam(f), prims),
            SetExpr::Union(xs) => Node::Or(xs.iter().map(|x| Self::build(x, prims)).collect()),
            SetExpr::Inter(xs) => Node::And(xs.iter().map(|x| Self::build(x, prims)).collect()),
            SetExpr::Diff(a, b) => Node::Diff(
                Box::new(Self::build(a, prims)),
                Box::new(Self::build(b, prims)),
            ),
        }
    }

    fn local(p: &Prim<'_>, y: &Seq) -> Local {
        let toward = |c: &Seq| {
            if c.is_prefix_of(y) {
                None
            } else if y.is_strict_prefix_of(c) {
                Some(c.items()[y.len()])
            } else {
                Some(u32::MAX)
            }
        };
        match p {
            Prim::Cyl(c) => match toward(c) {
                None => Local::In,
                Some(u32::MAX) => Local::Out,
                Some(n) => Local::Pending(n),
            },
            Prim::Compact(k) => {
                if k.meets(y) {
                    Local::Points
                } else {
                    Local::Out
                }
            }
            Prim::Fam(f) => {
                let w = &f.parent;
                if w == y {
                    Local::FamAt
                } else if w.is_strict_prefix_of(y) {
                    if f.has_son(y.items()[w.len()]) {
                        Local::In
                    } else {
                        Local::Out
                    }
                } else if y.is_strict_prefix_of(w) {
                    Local::Pending(w.items()[y.len()])
                } else {
                    Local::Out
                }
            }
        }
    }

    fn verdict(values: impl IntoIterator<Item = Class>) -> Class {
        let mut inside = false;
        let mut outside = false;
        for v in values {
            match v {
                Class::Inside => inside = true,
                Class::Outside => outside = true,
                Class::Split => return Class::Split,
            }
            if inside && outside {
                return Class::Split;
            }
        }
        if inside {
            Class::Inside
        } else {
            Class::Outside
        }
    }

    fn of(b: bool) -> Class {
        if b {
            Class::Inside
        } else {
            Class::Outside
        }
    }

    fn classify(&self, y: &Seq) -> Class {
        let status: Vec<Local> = self.prims.iter().map(|p| Self::local(p, y)).collect();
        let open = status
            .iter()
            .any(|s| matches!(s, Local::Pending(_) | Local::FamAt));
        if !open {
            let generic = self.root.eval(&|i| status[i] == Local::In);
            let points: BTreeSet<&Point> = self
                .prims
                .iter()
                .zip(&status)
                .filter(|(_, s)| **s == Local::Points)
                .flat_map(|(p, _)| match p {
                    Prim::Compact(k) => k.points_in(y).collect::<Vec<_>>(),
                    _ => Vec::new(),
                })
                .collect();
            let differs = points.iter().any(|pt| {
                let v = self.root.eval(&|i| match &self.prims[i] {
                    Prim::Compact(k) => k.contains(pt),
                    _ => status[i] == Local::In,
                });
                v != generic
            });
            return if differs { Class::Split } else { Self::of(generic) };
        }

        let mut special = BTreeSet::new();
        for (p, s) in self.prims.iter().zip(&status) {
            match (p, s) {
                (_, Local::Pending(n)) => {
                    special.insert(*n);
                }
                (Prim::Compact(k), Local::Points) => {
                    special.extend(k.points_in(y).map(|pt| pt.at(y.len())));
                }
                _ => {}
            }
        }
        let at: Vec<usize> = (0..self.prims.len())
            .filter(|&i| status[i] == Local::FamAt)
            .collect();
        let families: Vec<&FiberFamily> = at
            .iter()
            .map(|&i| match &self.prims[i] {
                Prim::Fam(f) => *f,
                _ => unreachable!("only families sit at their parent"),
            })
            .collect();
        let vectors = Self::generic_vectors(&families, &special);
        let generic = vectors.iter().map(|vec| {
            Self::of(self.root.eval(&|i| match at.iter().position(|&j| j == i) {
                Some(pos) => vec[pos],
                None => status[i] == Local::In,
            }))
        });
        let sons = special.iter().map(|&n| self.classify(&y.child(n)));
        Self::verdict(generic.chain(sons))
    }

    /// Membership patterns realised by sons outside `special`.
    fn generic_vectors(families: &[&FiberFamily], special: &BTreeSet<u32>) -> Vec<Vec<bool>> {
        if families.is_empty() {
            return vec![Vec::new()];
        }
        let same_scheme = families.iter().all(|f| f.scheme == families[0].scheme);
        if same_scheme {
            // Every fiber is infinite and fibers outside all families exist, so
            // each pattern below is taken by infinitely many sons.
            let mut out: BTreeSet<Vec<bool>> = BTreeSet::new();
            out.insert(vec![false; families.len()]);
            for f in families {
                for i in &f.indices {
                    out.insert(families.iter().map(|g| g.indices.contains(i)).collect());
                }
            }
            return out.into_iter().collect();
        }
        let out: BTreeSet<Vec<bool>> = (0..MIXED_SCHEME_SCAN)
            .filter(|n| !special.contains(n))
            .map(|n| families.iter().map(|f| f.has_son(n)).collect())
            .collect();
        out.into_iter().collect()
    }

    fn shadow(&self, base: &Seq, depth: usize, width: u32) -> Shadow {
        let mut sh = Shadow {
            depth,
            width,
            inside: BTreeSet::new(),
            split: BTreeSet::new(),
        };
        self.walk(base, depth, width, &mut sh);
        sh
    }

    fn walk(&self, y: &Seq, depth: usize, width: u32, sh: &mut Shadow) {
        match self.classify(y) {
            Class::Outside => {}
            Class::Inside => {
                let tail = depth - y.len();
                for t in crate::seq::stratum(tail, width) {
                    sh.inside.insert(y.concat(t.items()));
                }
            }
            Class::Split if y.len() == depth => {
                sh.split.insert(y.clone());
            }
            Class::Split => {
                for n in 0..width {
                    self.walk(&y.child(n), depth, width, sh);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Seq {
        Seq::from(v)
    }

    #[test]
    fn cylinder_rules() {
        let e = SetExpr::cyl(s(&[0]));
        assert_eq!(e.classify(&s(&[0, 1])), Class::Inside);
        assert_eq!(e.classify(&s(&[1])), Class::Outside);
        assert_eq!(e.classify(&s(&[])), Class::Split);
    }

    #[test]
    fn compact_rules() {
        let k = SetExpr::compact(CompactCode::zero());
        assert_eq!(k.classify(&s(&[0, 0])), Class::Split);
        assert_eq!(k.classify(&s(&[1])), Class::Outside);
        let co = SetExpr::co_compact(CompactCode::zero());
        assert_eq!(co.classify(&s(&[1])), Class::Inside);
        assert_eq!(co.classify(&s(&[0, 0])), Class::Split);
    }

    #[test]
    fn shadows() {
        let full = SetExpr::Full.shadow(1, 3);
        assert_eq!(full.inside.len(), 3);
        assert!(full.split.is_empty());
        let co = SetExpr::co_compact(CompactCode::zero()).shadow(2, 2);
        assert_eq!(co.split, [s(&[0, 0])].into());
        assert_eq!(co.inside, [s(&[0, 1]), s(&[1, 0]), s(&[1, 1])].into());
        assert!(SetExpr::Empty.shadow(3, 2).is_empty());
    }

    #[test]
    fn compact_inside_union_is_still_covered() {
        // S_<0> = (S_<0> \ K) ∪ K for K ⊆ S_<0>.
        let k = CompactCode::zero();
        let e = SetExpr::union(
            SetExpr::diff(SetExpr::cyl(s(&[0])), SetExpr::compact(k.clone())),
            SetExpr::compact(k),
        );
        assert_eq!(e.classify(&s(&[0])), Class::Inside);
        assert_eq!(e.classify(&s(&[])), Class::Split);
    }

    #[test]
    fn disjoint_fibers_intersect_empty() {
        let sch = Arc::new(FiberScheme::new(Seq::empty(), CompactCode::zero()).unwrap());
        let w = Seq::empty();
        let a = FiberFamily::new(sch.clone(), w.clone(), [sch.delta_at(&w, 0)].into()).unwrap();
        let b = FiberFamily::new(sch.clone(), w.clone(), [sch.delta_at(&w, 1)].into()).unwrap();
        let (ea, eb) = (SetExpr::Family(a), SetExpr::Family(b));
        assert_eq!(ea.classify(&w), Class::Split);
        assert_eq!(SetExpr::inter(ea.clone(), eb.clone()).classify(&w), Class::Outside);
        assert_eq!(SetExpr::union(ea, eb).classify(&w), Class::Split);
    }

    #[test]
    fn json_shapes() {
        let e = SetExpr::diff(
            SetExpr::cyl(s(&[1])),
            SetExpr::compact(CompactCode::singleton(&s(&[1]))),
        );
        let text = serde_json::to_string(&e).unwrap();
        assert!(text.starts_with(r#"{"op":"diff","args":[{"op":"cyl","seq":[1]}"#), "{text}");
        let back: SetExpr = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        let bad = r#"{"op":"diff","args":[{"op":"full"}]}"#;
        assert!(serde_json::from_str::<SetExpr>(bad).is_err());
    }

    #[test]
    fn openness_by_polarity() {
        assert!(SetExpr::co_compact(CompactCode::zero()).is_open());
        assert!(!SetExpr::compact(CompactCode::zero()).is_open());
        assert!(SetExpr::cyl(s(&[2])).is_open());
    }
}
