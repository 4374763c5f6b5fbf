//! The Baire space: cylinders, compact codes, symbolic sets and the standard
//! foliage tree, plus a window universe that makes set queries decidable.

pub mod compact;
pub mod density;
pub mod expr;
pub mod fiber;
pub mod std_tree;

pub use compact::{CompactCode, CompactError, Point};
pub use density::{dense_at, pi_dense_at};
pub use expr::{Class, ExprError, FiberFamily, SetExpr, Shadow};
pub use fiber::{pair, unpair, FiberError, FiberScheme};
pub use std_tree::{std_tree, StdTreeView};

use serde::{Deserialize, Serialize};

use crate::universe::Universe;

/// Symbolic Baire sets compared on the stratum of length `depth` with values
/// below `width`.
///
/// `is_empty` holds when every stratum node classifies `Outside`, so two sets
/// are equal here exactly when their shadows on this stratum agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaireWindow {
    pub depth: usize,
    pub width: u32,
}

impl BaireWindow {
    pub fn new(depth: usize, width: u32) -> Self {
        BaireWindow { depth, width }
    }

    pub fn shadow(&self, a: &SetExpr) -> Shadow {
        a.shadow(self.depth, self.width)
    }
}

impl Universe for BaireWindow {
    type Set = SetExpr;
    type Point = Point;

    fn empty(&self) -> SetExpr {
        SetExpr::Empty
    }

    fn is_empty(&self, a: &SetExpr) -> bool {
        self.shadow(a).is_empty()
    }

    fn union(&self, a: &SetExpr, b: &SetExpr) -> SetExpr {
        SetExpr::union(a.clone(), b.clone())
    }

    fn inter(&self, a: &SetExpr, b: &SetExpr) -> SetExpr {
        SetExpr::inter(a.clone(), b.clone())
    }

    fn diff(&self, a: &SetExpr, b: &SetExpr) -> SetExpr {
        SetExpr::diff(a.clone(), b.clone())
    }

    fn contains(&self, a: &SetExpr, p: &Point) -> bool {
        a.contains(p)
    }

    /// One stratum node meets the set.
    fn is_singleton(&self, a: &SetExpr) -> bool {
        self.shadow(a).touched().len() == 1
    }

    fn is_open(&self, a: &SetExpr) -> bool {
        a.is_open()
    }
}

/// Symbolic Baire sets with exact emptiness, subset and equality.
///
/// Points cannot be counted from a classification, so `is_singleton` falls
/// back to the stratum of `window`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaireExact {
    pub window: BaireWindow,
}

impl BaireExact {
    pub fn new(window: BaireWindow) -> Self {
        BaireExact { window }
    }
}

impl Universe for BaireExact {
    type Set = SetExpr;
    type Point = Point;

    fn empty(&self) -> SetExpr {
        SetExpr::Empty
    }

    fn is_empty(&self, a: &SetExpr) -> bool {
        a.is_empty_exact()
    }

    fn union(&self, a: &SetExpr, b: &SetExpr) -> SetExpr {
        SetExpr::union(a.clone(), b.clone())
    }

    fn inter(&self, a: &SetExpr, b: &SetExpr) -> SetExpr {
        SetExpr::inter(a.clone(), b.clone())
    }

    fn diff(&self, a: &SetExpr, b: &SetExpr) -> SetExpr {
        SetExpr::diff(a.clone(), b.clone())
    }

    fn contains(&self, a: &SetExpr, p: &Point) -> bool {
        a.contains(p)
    }

    fn is_singleton(&self, a: &SetExpr) -> bool {
        !a.is_empty_exact() && self.window.is_singleton(a)
    }

    fn is_open(&self, a: &SetExpr) -> bool {
        a.is_open()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::Seq;

    #[test]
    fn window_algebra() {
        let u = BaireWindow::new(2, 3);
        let a = SetExpr::cyl(Seq::from(&[0u32][..]));
        let b = SetExpr::cyl(Seq::from(&[0u32, 1][..]));
        assert!(u.subset(&b, &a));
        assert!(!u.subset(&a, &b));
        assert!(u.is_singleton(&b));
        assert!(u.disjoint(&b, &SetExpr::cyl(Seq::from(&[1u32][..]))));
        let k = SetExpr::compact(CompactCode::zero());
        assert!(!u.is_empty(&k));
        assert!(u.is_singleton(&k));
        assert!(u.equal(&SetExpr::union(u.diff(&a, &k), k.clone()), &a));
    }

    #[test]
    fn exact_sees_below_the_window() {
        let deep = SetExpr::cyl(Seq::from(&[0u32, 5][..]));
        let w = BaireWindow::new(2, 2);
        assert!(w.is_empty(&deep));
        let e = BaireExact::new(w);
        assert!(!e.is_empty(&deep));
        assert!(e.subset(&deep, &SetExpr::cyl(Seq::zeros(1))));
        let k = SetExpr::compact(CompactCode::zero());
        assert!(e.is_singleton(&k));
        assert!(e.disjoint(&deep, &k));
        let below = SetExpr::co_compact(CompactCode::zero()).shadow_below(&Seq::zeros(1), 2, 2);
        assert_eq!(below.split, [Seq::zeros(2)].into());
        assert_eq!(below.inside, [Seq::from(&[0u32, 1][..])].into());
    }
}
