use proptest::collection::vec;
use proptest::prelude::*;
use twoknn_core::multi_join::{chained_nested_join, chained_right_deep, unchained_baseline, unchained_block_marking};
use twoknn_core::operators::baseline_select_join_inner;
use twoknn_core::select_join::{block_marking_select_join, counting_select_join};
use twoknn_core::two_select::{baseline_two_select, two_knn_select};
use twoknn_core::{
    get_knn, ChainedQuery, GridIndex, JoinFirst, Point, RelationId, SelectJoinQuery, TwoSelectQuery,
    UnchainedQuery,
};
use twoknn_oracle as oracle;

/// Coordinates on a coarse lattice so that distance ties are frequent.
fn relation(max: usize) -> impl Strategy<Value = Vec<(u64, f64, f64)>> {
    vec((0u32..40, 0u32..40), 1..max).prop_map(|cells| {
        cells
            .into_iter()
            .enumerate()
            .map(|(i, (x, y))| (i as u64, x as f64 * 0.5, y as f64 * 0.5))
            .collect()
    })
}

fn coord() -> impl Strategy<Value = (f64, f64)> {
    (-2.0..22.0f64, -2.0..22.0f64)
}

fn index(relations: &[(&str, &[(u64, f64, f64)])], grid: usize) -> GridIndex {
    let named = relations
        .iter()
        .map(|(name, pts)| {
            let points = pts.iter().map(|&(id, x, y)| Point::new(id, x, y)).collect();
            (RelationId::from(*name), points)
        })
        .collect();
    GridIndex::build_fitted(named, Some(grid)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn knn_is_the_prefix_of_the_full_order(e in relation(300), f in coord(), k in 1usize..40, g in 1usize..10) {
        let idx = index(&[("E", &e)], g);
        let rel = idx.relation(&"E".into()).unwrap();
        let nbr = get_knn(&rel, f, k);
        prop_assert_eq!(nbr.len(), k.min(e.len()));
        prop_assert_eq!(nbr.ids().collect::<Vec<_>>(), oracle::knn(&e, f, k));
    }

    #[test]
    fn select_join_plans_agree(
        a in relation(200), b in relation(200), f in coord(),
        k_join in 1usize..8, k_select in 1usize..8, g in 1usize..10,
    ) {
        let idx = index(&[("A", &a), ("B", &b)], g);
        let q = SelectJoinQuery { outer: "A".into(), inner: "B".into(), k_join, k_select, focal: f.into() };
        let baseline = baseline_select_join_inner(&idx, &q).unwrap();
        let expected = oracle::select_join_inner(&a, &b, k_join, k_select, f);
        prop_assert_eq!(baseline.as_slice(), expected.as_slice());
        prop_assert_eq!(&counting_select_join(&idx, &q).unwrap().result, &baseline);
        prop_assert_eq!(&block_marking_select_join(&idx, &q).unwrap().result, &baseline);
    }

    #[test]
    fn unchained_orders_agree(
        a in relation(120), b in relation(120), c in relation(120),
        k_ab in 1usize..6, k_cb in 1usize..6, g in 1usize..10,
    ) {
        let idx = index(&[("A", &a), ("B", &b), ("C", &c)], g);
        let q = UnchainedQuery { a: "A".into(), b: "B".into(), c: "C".into(), k_ab, k_cb };
        let baseline = unchained_baseline(&idx, &q).unwrap().result;
        let expected = oracle::unchained(&a, &b, &c, k_ab, k_cb);
        prop_assert_eq!(baseline.as_slice(), expected.as_slice());
        for first in [JoinFirst::Ab, JoinFirst::Cb] {
            prop_assert_eq!(&unchained_block_marking(&idx, &q, first).unwrap().result, &baseline);
        }
    }

    #[test]
    fn chained_cache_never_changes_results(
        a in relation(120), b in relation(60), c in relation(120),
        k_ab in 1usize..6, k_bc in 1usize..6, g in 1usize..10,
    ) {
        let idx = index(&[("A", &a), ("B", &b), ("C", &c)], g);
        let q = ChainedQuery { a: "A".into(), b: "B".into(), c: "C".into(), k_ab, k_bc };
        let cached = chained_nested_join(&idx, &q, true).unwrap();
        let uncached = chained_nested_join(&idx, &q, false).unwrap();
        prop_assert_eq!(&cached.result, &uncached.result);
        prop_assert_eq!(&cached.result, &chained_right_deep(&idx, &q).unwrap().result);
        prop_assert!(cached.stats.chain_neighborhoods <= uncached.stats.chain_neighborhoods);
        prop_assert_eq!(cached.stats.chain_neighborhoods + cached.stats.cache_hits, uncached.stats.chain_neighborhoods);
    }

    #[test]
    fn two_select_is_symmetric_and_exact(
        e in relation(400), f1 in coord(), f2 in coord(), k1 in 1usize..12, shift in 0u32..7, g in 1usize..10,
    ) {
        let idx = index(&[("E", &e)], g);
        let k2 = k1 << shift;
        let expected = oracle::two_select(&e, f1, k1, f2, k2);
        for (fa, ka, fb, kb) in [(f1, k1, f2, k2), (f2, k2, f1, k1)] {
            let q = TwoSelectQuery { relation: "E".into(), f1: fa.into(), k1: ka, f2: fb.into(), k2: kb };
            let fast = two_knn_select(&idx, &q).unwrap();
            let base = baseline_two_select(&idx, &q).unwrap();
            prop_assert_eq!(&fast.result, &expected);
            prop_assert_eq!(&base.result, &expected);
            prop_assert!(fast.stats.locality_blocks <= base.stats.locality_blocks);
        }
    }
}
