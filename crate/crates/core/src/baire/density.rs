//! Truncated density checks below a node.

use super::expr::{Class, SetExpr};
use crate::seq::{full_tree, Seq};

fn below(x: &Seq, depth: usize, width: u32) -> impl Iterator<Item = Seq> + '_ {
    full_tree(depth.saturating_sub(x.len()) + 1, width)
        .into_iter()
        .map(move |t| x.concat(t.items()))
}

/// Every `y ⊇ x` with `len y ≤ depth` and values below `width` has at least
/// `threshold` sons `y⌢n`, `n < width`, whose cylinders lie inside `e`.
pub fn pi_dense_at(e: &SetExpr, x: &Seq, depth: usize, width: u32, threshold: u32) -> bool {
    below(x, depth, width).all(|y| {
        (0..width)
            .filter(|&n| e.classify(&y.child(n)) == Class::Inside)
            .count()
            >= threshold as usize
    })
}

/// Every `y ⊇ x` with `len y ≤ depth` and values below `width` meets `e`.
pub fn dense_at(e: &SetExpr, x: &Seq, depth: usize, width: u32) -> bool {
    below(x, depth, width).all(|y| e.classify(&y) != Class::Outside)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baire::CompactCode;

    #[test]
    fn co_zero_is_pi_dense() {
        let e = SetExpr::co_compact(CompactCode::zero());
        assert!(pi_dense_at(&e, &Seq::empty(), 3, 4, 3));
        assert!(!pi_dense_at(&e, &Seq::empty(), 3, 4, 4));
        assert!(dense_at(&e, &Seq::empty(), 3, 4));
    }

    #[test]
    fn cylinder_is_not_pi_dense_at_root() {
        let e = SetExpr::cyl(Seq::from(&[0u32][..]));
        assert!(!pi_dense_at(&e, &Seq::empty(), 2, 3, 1));
        assert!(pi_dense_at(&e, &Seq::from(&[0u32][..]), 2, 3, 3));
        assert!(!dense_at(&e, &Seq::empty(), 2, 3));
    }

    #[test]
    fn full_is_pi_dense() {
        assert!(pi_dense_at(&SetExpr::Full, &Seq::empty(), 2, 3, 3));
    }
}
