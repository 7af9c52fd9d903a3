//! Brute-force evaluation of kNN predicates over plain `(id, x, y)` tuples.
//!
//! Nothing here touches an index. Every query is answered by sorting all
//! candidates by `(distance, id)`, the same order the library uses, so results
//! can be compared for exact equality.

use std::collections::{BTreeSet, HashMap};

pub type Pt = (u64, f64, f64);

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy).sqrt()
}

/// Ids of the `k` nearest points to `focal`, nearest first.
pub fn knn(points: &[Pt], focal: (f64, f64), k: usize) -> Vec<u64> {
    let mut scored: Vec<(f64, u64)> = points
        .iter()
        .map(|&(id, x, y)| (distance(focal, (x, y)), id))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    scored.into_iter().take(k).map(|(_, id)| id).collect()
}

pub fn knn_set(points: &[Pt], focal: (f64, f64), k: usize) -> BTreeSet<u64> {
    knn(points, focal, k).into_iter().collect()
}

/// Nested-loop kNN-join: sorted `(outer, inner)` pairs.
pub fn knn_join(outer: &[Pt], inner: &[Pt], k: usize) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = outer
        .iter()
        .flat_map(|&(id, x, y)| knn(inner, (x, y), k).into_iter().map(move |i| (id, i)))
        .collect();
    out.sort_unstable();
    out
}

/// Join of `outer` with `inner`, kept only where the inner point is among
/// the `k_select` nearest inner points to `focal`.
pub fn select_join_inner(outer: &[Pt], inner: &[Pt], k_join: usize, k_select: usize, focal: (f64, f64)) -> Vec<(u64, u64)> {
    let selected = knn_set(inner, focal, k_select);
    knn_join(outer, inner, k_join)
        .into_iter()
        .filter(|(_, i)| selected.contains(i))
        .collect()
}

/// Join of `outer` with `inner`, kept only where the outer point is among
/// the `k_select` nearest outer points to `focal`.
pub fn select_join_outer(outer: &[Pt], inner: &[Pt], k_join: usize, k_select: usize, focal: (f64, f64)) -> Vec<(u64, u64)> {
    let selected = knn_set(outer, focal, k_select);
    knn_join(outer, inner, k_join)
        .into_iter()
        .filter(|(o, _)| selected.contains(o))
        .collect()
}

/// Whether outer point `e` contributes any pair to the inner-select join.
pub fn contributes_to_select_join(e: Pt, inner: &[Pt], k_join: usize, k_select: usize, focal: (f64, f64)) -> bool {
    let selected = knn_set(inner, focal, k_select);
    knn(inner, (e.1, e.2), k_join).iter().any(|i| selected.contains(i))
}

/// `(a, b, c)` with `b` among the `k_ab` nearest of `a` and among the
/// `k_cb` nearest of `c`, sorted.
pub fn unchained(a: &[Pt], b: &[Pt], c: &[Pt], k_ab: usize, k_cb: usize) -> Vec<(u64, u64, u64)> {
    let mut by_b: HashMap<u64, Vec<u64>> = HashMap::new();
    for (cid, bid) in knn_join(c, b, k_cb) {
        by_b.entry(bid).or_default().push(cid);
    }
    let mut out = Vec::new();
    for (aid, bid) in knn_join(a, b, k_ab) {
        if let Some(cs) = by_b.get(&bid) {
            out.extend(cs.iter().map(|&cid| (aid, bid, cid)));
        }
    }
    out.sort_unstable();
    out
}

/// `(a, b, c)` with `b` among the `k_ab` nearest of `a` and `c` among the
/// `k_bc` nearest of `b`, sorted.
pub fn chained(a: &[Pt], b: &[Pt], c: &[Pt], k_ab: usize, k_bc: usize) -> Vec<(u64, u64, u64)> {
    let coords: HashMap<u64, (f64, f64)> = b.iter().map(|&(id, x, y)| (id, (x, y))).collect();
    let mut out = Vec::new();
    for &(aid, x, y) in a {
        for bid in knn(b, (x, y), k_ab) {
            for cid in knn(c, coords[&bid], k_bc) {
                out.push((aid, bid, cid));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Ids in both the `k1`-neighborhood of `f1` and the `k2`-neighborhood of
/// `f2`, ascending.
pub fn two_select(points: &[Pt], f1: (f64, f64), k1: usize, f2: (f64, f64), k2: usize) -> Vec<u64> {
    let first = knn_set(points, f1, k1);
    let second = knn_set(points, f2, k2);
    first.intersection(&second).copied().collect()
}


/// Small hand-built layouts whose results are known in advance.
pub mod layouts {
    use super::Pt;

    pub struct SelectJoinLayout {
        pub outer: Vec<Pt>,
        pub inner: Vec<Pt>,
        pub focal: (f64, f64),
        pub k_join: usize,
        pub k_select: usize,
    }

    pub struct ThreeRelations {
        pub a: Vec<Pt>,
        pub b: Vec<Pt>,
        pub c: Vec<Pt>,
        pub k_first: usize,
        pub k_second: usize,
    }

    pub struct TwoSelectLayout {
        pub points: Vec<Pt>,
        pub f1: (f64, f64),
        pub f2: (f64, f64),
        pub k1: usize,
        pub k2: usize,
    }

    /// Inner points `h1..h5` have ids `1..=5`, outer points `m1..m4` ids
    /// `11..=14`. The focal point selects `{h1, h2}`. Joining first and
    /// selecting afterwards gives `(m1,h1) (m2,h1) (m2,h2) (m3,h2) (m4,h1)`;
    /// joining against only the selected inner points pairs every `m` with
    /// both `h1` and `h2`.
    pub fn inner_select_pushdown() -> SelectJoinLayout {
        SelectJoinLayout {
            inner: vec![
                (1, 0.0, 0.0),
                (2, 2.0, 0.0),
                (3, -2.0, 1.5),
                (4, -2.0, -1.5),
                (5, 4.0, 1.5),
            ],
            outer: vec![(11, -1.0, 1.0), (12, 1.0, 0.5), (13, 3.0, 1.0), (14, -1.0, -1.0)],
            focal: (1.0, -1.0),
            k_join: 2,
            k_select: 2,
        }
    }

    /// `a1, a2` (ids 1, 2) sit near `b1`, `c1, c2` (ids 21, 22) near `b3`,
    /// with `b2` (id 12) between them; `b1, b3` are ids 11, 13. Evaluated
    /// independently with `k = 2`, only `b2` is shared: four triplets. If
    /// either join searches only the inner points produced by the other,
    /// eight triplets come out.
    pub fn unchained_filtering() -> ThreeRelations {
        ThreeRelations {
            a: vec![(1, 2.0, 0.5), (2, 2.0, -0.5)],
            b: vec![(11, 0.0, 0.0), (12, 5.0, 0.0), (13, 10.0, 0.0)],
            c: vec![(21, 8.0, 0.5), (22, 8.0, -0.5)],
            k_first: 2,
            k_second: 2,
        }
    }

    /// Chained layout where `b2` and `b3` (ids 12, 13) are each among the
    /// two nearest `B` points of both `a1` and `a2` (ids 1, 2); `b1` is id 11
    /// and `c1, c2, c3, c4` are ids 21..=24. Eight triplets result, and a
    /// cached nested plan computes two `C`-neighborhoods instead of four.
    pub fn shared_chain() -> ThreeRelations {
        ThreeRelations {
            a: vec![(1, 0.0, 0.5), (2, 0.0, -0.5)],
            b: vec![(11, -5.0, 0.0), (12, 1.0, 1.0), (13, 1.0, -1.0)],
            c: vec![(21, 2.0, 1.9), (22, 2.0, 0.1), (23, -6.0, 1.0), (24, 2.0, -1.9)],
            k_first: 2,
            k_second: 2,
        }
    }

    /// Houses near two destinations: `l, m, z` (ids 1..=3) close to the
    /// first, `n, p, o` (ids 4..=6) close to the second, and `x, y` (ids 7, 8)
    /// midway. With `k = 5` for both, only `x` and `y` are near both.
    pub fn two_destinations() -> TwoSelectLayout {
        TwoSelectLayout {
            points: vec![
                (1, -1.0, 0.0),
                (2, 0.0, 1.0),
                (3, 0.0, -1.0),
                (4, 11.0, 0.0),
                (5, 10.0, 1.0),
                (6, 10.0, -1.0),
                (7, 5.0, 0.5),
                (8, 5.0, -0.5),
            ],
            f1: (0.0, 0.0),
            f2: (10.0, 0.0),
            k1: 5,
            k2: 5,
        }
    }

    /// Grid extent `[-3, 5]^2` with resolution 8, so the block `[0, 1]^2`
    /// has center `(0.5, 0.5)` and diagonal `sqrt(2)`. With `k = 1` the
    /// center's neighbor `a` (id 1) lies at distance 0.5; `b` (id 2) lies on
    /// the extension of the diagonal through the top-left corner, just beyond
    /// `0.5 + 0.9 * sqrt(2)` from the center, and the focal point lies a bit
    /// further out along the same line. The outer point (id 100) sits near
    /// the corner and has `b` as its nearest neighbor, so the block
    /// contributes. An added distance of `0.9 * diagonal` wrongly rules the
    /// block out; the full diagonal does not.
    pub fn added_distance_tightness() -> (SelectJoinLayout, [f64; 4], usize) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (cx, cy) = (0.5, 0.5);
        let r = 0.5;
        let along = r + 0.9 * std::f64::consts::SQRT_2 + 0.05;
        let b = (cx - along * s, cy + along * s);
        let layout = SelectJoinLayout {
            inner: vec![(1, cx + r * s, cy - r * s), (2, b.0, b.1)],
            outer: vec![(100, 0.001, 0.999)],
            focal: (b.0 - 0.1 * s, b.1 + 0.1 * s),
            k_join: 1,
            k_select: 1,
        };
        (layout, [-3.0, -3.0, 5.0, 5.0], 8)
    }
}
