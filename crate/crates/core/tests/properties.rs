use std::collections::BTreeSet;
use std::sync::OnceLock;

use foliage::baire::{Class, Point, SetExpr};
use foliage::config::parse_config;
use foliage::foliage::pi_refines;
use foliage::graft::{hybrid_build, ConsistentFamily};
use foliage::laws::instances::{families, hosts};
use foliage::laws::oracle::{closure_order, maximal_chains, order_pairs};
use foliage::report::{CheckRecord, Report};
use foliage::{FinTree, FiniteSets, NodeId, Seq};
use proptest::prelude::*;

/// A forest on `n` nodes: node `i` hangs below an earlier node or is a root,
/// then ids are permuted.
fn forest() -> impl Strategy<Value = FinTree> {
    (1usize..8)
        .prop_flat_map(|n| {
            let parents: Vec<BoxedStrategy<Option<usize>>> = (0..n)
                .map(|i| if i == 0 { Just(None).boxed() } else { proptest::option::of(0..i).boxed() })
                .collect();
            (parents, Just((0..n as NodeId).collect::<Vec<_>>()).prop_shuffle())
        })
        .prop_map(|(parents, ids)| {
            FinTree::from_parents(parents.iter().enumerate().map(|(i, p)| (ids[i], p.map(|p| ids[p])))).unwrap()
        })
}

fn seq() -> impl Strategy<Value = Seq> {
    proptest::collection::vec(0u32..3, 0..4).prop_map(Seq::new)
}

fn expr() -> impl Strategy<Value = SetExpr> {
    let leaf = prop_oneof![seq().prop_map(SetExpr::cyl), Just(SetExpr::Empty), Just(SetExpr::Full)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::union(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::inter(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| SetExpr::diff(a, b)),
        ]
    })
}

fn small_families() -> &'static [ConsistentFamily] {
    static ALL: OnceLock<Vec<ConsistentFamily>> = OnceLock::new();
    ALL.get_or_init(|| hosts(4).iter().flat_map(|h| families(h, 2)).collect())
}

proptest! {
    #[test]
    fn the_order_is_a_tree_order(t in forest()) {
        let nodes: Vec<NodeId> = t.nodes().collect();
        let pairs = order_pairs(&t);
        for &x in &nodes {
            prop_assert!(!t.lt(x, x));
            for &y in &nodes {
                prop_assert_eq!(t.lt(x, y), pairs.contains(&(x, y)));
                if t.lt(x, y) {
                    prop_assert!(!t.lt(y, x));
                }
            }
            let below: BTreeSet<NodeId> = t.ancestors(x).unwrap().into_iter().collect();
            prop_assert!(t.is_chain(&below));
        }
    }

    #[test]
    fn branches_are_the_maximal_chains(t in forest()) {
        let branches: BTreeSet<_> = t.branches().into_iter().collect();
        prop_assert_eq!(branches, maximal_chains(&t));
    }

    #[test]
    fn hybrids_match_the_closure_oracle(i in 0usize..10_000) {
        let all = small_families();
        let fam = &all[i % all.len()];
        let h = hybrid_build(fam).unwrap();
        let tags = h.tags().to_vec();
        let built: BTreeSet<_> = order_pairs(&h.tree).into_iter().map(|(x, y)| (h.tag(x), h.tag(y))).collect();
        prop_assert_eq!(built, closure_order(fam, &tags));
    }

    #[test]
    fn sequence_keys_round_trip(s in proptest::collection::vec(any::<u32>(), 0..6)) {
        let s = Seq::new(s);
        prop_assert_eq!(Seq::parse_key(&s.key()).unwrap(), s);
    }

    #[test]
    fn classification_agrees_with_membership(e in expr(), p in proptest::collection::vec(0u32..3, 0..5), k in 0usize..6) {
        let point = Point::new(Seq::new(p));
        match e.classify(&point.prefix(k)) {
            Class::Inside => prop_assert!(e.contains(&point)),
            Class::Outside => prop_assert!(!e.contains(&point)),
            Class::Split => {}
        }
    }

    #[test]
    fn set_algebra_identities(a in expr(), b in expr()) {
        prop_assert!(SetExpr::union(a.clone(), b.clone()).equal_exact(&SetExpr::union(b.clone(), a.clone())));
        prop_assert!(SetExpr::inter(a.clone(), b.clone()).subset_exact(&a));
        prop_assert!(SetExpr::diff(a.clone(), b.clone()).disjoint_exact(&b));
        prop_assert_eq!(
            SetExpr::union(a.clone(), b.clone()).shadow(3, 3).inside.is_superset(&a.shadow(3, 3).inside),
            true
        );
    }

    #[test]
    fn refinement_is_a_preorder(
        g in proptest::collection::vec(proptest::collection::btree_set(0u32..4, 0..4), 1..4),
        d in proptest::collection::vec(proptest::collection::btree_set(0u32..4, 0..4), 1..4),
    ) {
        let u = FiniteSets::new(4);
        prop_assert!(pi_refines(&u, &g, &g));
        // Every member of a coarsening contains a nonempty member of `g`.
        let solid: Vec<_> = g.iter().filter(|x| !x.is_empty()).collect();
        prop_assume!(!solid.is_empty());
        let coarse: Vec<_> = d.iter().zip(solid.iter().cycle()).map(|(x, y)| x | *y).collect();
        prop_assert!(pi_refines(&u, &g, &coarse));
        let coarser: Vec<_> = coarse.iter().map(|x| x | &d[0]).collect();
        prop_assert!(pi_refines(&u, &coarse, &coarser) && pi_refines(&u, &g, &coarser));
    }

    #[test]
    fn report_order_never_shows(ids in proptest::collection::vec("[a-e][0-9]", 1..12), seed in any::<u64>()) {
        let records: Vec<CheckRecord> = ids.iter().enumerate().map(|(i, id)| CheckRecord::check(id.clone(), i % 3 != 0).param("n", i)).collect();
        let mut shuffled = records.clone();
        let k = (seed as usize) % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let a = Report { records }.finish();
        let b = Report { records: shuffled }.finish();
        prop_assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn configs_round_trip(depth in 1usize..6, width in 1u32..6, threshold in 1u32..4, seed in any::<u64>()) {
        let text = format!(
            r#"{{"pipeline": {{"compacts": [], "trunc": {{"depth": {depth}, "width": {width}, "threshold": {threshold}}}}}, "seed": {seed}}}"#
        );
        let cfg = parse_config(&text).unwrap();
        prop_assert_eq!(parse_config(&cfg.to_json()).unwrap(), cfg);
    }
}
