//! Baseline operators: kNN-select, nested kNN-join, the `∩_B` matcher, and
//! the conceptually correct (unoptimized) select-join plans.
//!
//! [`invalid_inner_pushdown`] is deliberately wrong. It pushes the select
//! below the inner side of the join and is kept as a negative control for
//! equivalence testing.

use std::collections::HashMap;

use crate::error::Result;
use crate::geometry::{dist, Coord, PointId};
use crate::grid::{GridIndex, RelationId};
use crate::knn::{get_knn, select_best, Neighbor, Neighborhood};
use crate::query::SelectJoinQuery;

/// Join output as `(outer_id, inner_id)` pairs: sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PairSet(Vec<(PointId, PointId)>);

impl PairSet {
    pub fn from_pairs(mut pairs: Vec<(PointId, PointId)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        Self(pairs)
    }

    pub fn as_slice(&self) -> &[(PointId, PointId)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(PointId, PointId)> {
        self.0.iter()
    }

    pub fn contains(&self, pair: &(PointId, PointId)) -> bool {
        self.0.binary_search(pair).is_ok()
    }

    /// Pairs whose outer id satisfies `keep`.
    pub fn filter_outer(&self, mut keep: impl FnMut(PointId) -> bool) -> Self {
        Self(self.0.iter().copied().filter(|&(o, _)| keep(o)).collect())
    }

    /// Pairs whose inner id satisfies `keep`.
    pub fn filter_inner(&self, mut keep: impl FnMut(PointId) -> bool) -> Self {
        Self(self.0.iter().copied().filter(|&(_, i)| keep(i)).collect())
    }

    /// Distinct inner ids, ascending.
    pub fn inner_ids(&self) -> Vec<PointId> {
        let mut v: Vec<PointId> = self.0.iter().map(|&(_, i)| i).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn into_vec(self) -> Vec<(PointId, PointId)> {
        self.0
    }
}

/// Triplets `(a, b, c)`: sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TripletSet(Vec<(PointId, PointId, PointId)>);

impl TripletSet {
    pub fn from_triplets(mut triplets: Vec<(PointId, PointId, PointId)>) -> Self {
        triplets.sort_unstable();
        triplets.dedup();
        Self(triplets)
    }

    pub fn as_slice(&self) -> &[(PointId, PointId, PointId)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(PointId, PointId, PointId)> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<(PointId, PointId, PointId)> {
        self.0
    }
}

pub fn knn_select(
    index: &GridIndex,
    relation: &RelationId,
    focal: impl Into<Coord>,
    k: usize,
) -> Result<Neighborhood> {
    let rel = index.relation(relation)?;
    Ok(get_knn(&rel, focal, k))
}

/// `outer ⋈kNN inner`: every outer point paired with each of its `k` nearest
/// inner points.
pub fn knn_join(
    index: &GridIndex,
    outer: &RelationId,
    inner: &RelationId,
    k: usize,
) -> Result<PairSet> {
    let outer = index.relation(outer)?;
    let inner = index.relation(inner)?;
    let mut pairs = Vec::with_capacity(outer.len() * k.min(inner.len()));
    for e in outer.points() {
        let nbr = get_knn(&inner, e.coord(), k);
        pairs.extend(nbr.ids().map(|i| (e.id, i)));
    }
    Ok(PairSet::from_pairs(pairs))
}

/// `∩_B` for two joins sharing the inner relation: every `(a, b, c)` with
/// `(a, b)` in `ab` and `(c, b)` in `cb`.
pub fn intersect_pairs_on_inner(ab: &PairSet, cb: &PairSet) -> TripletSet {
    let mut by_inner: HashMap<PointId, Vec<PointId>> = HashMap::new();
    for &(c, b) in cb.iter() {
        by_inner.entry(b).or_default().push(c);
    }
    let mut out = Vec::new();
    for &(a, b) in ab.iter() {
        if let Some(cs) = by_inner.get(&b) {
            out.extend(cs.iter().map(|&c| (a, b, c)));
        }
    }
    TripletSet::from_triplets(out)
}

/// Conceptually correct plan for a select on the inner relation: the full
/// join, filtered to inner points selected around the focal point.
pub fn baseline_select_join_inner(index: &GridIndex, q: &SelectJoinQuery) -> Result<PairSet> {
    q.validate()?;
    let selected = knn_select(index, &q.inner, q.focal, q.k_select)?.sorted_ids();
    let joined = knn_join(index, &q.outer, &q.inner, q.k_join)?;
    Ok(joined.filter_inner(|i| selected.binary_search(&i).is_ok()))
}

/// Post-join filtering for a select on the outer relation.
pub fn baseline_select_join_outer(index: &GridIndex, q: &SelectJoinQuery) -> Result<PairSet> {
    q.validate()?;
    let selected = knn_select(index, &q.outer, q.focal, q.k_select)?.sorted_ids();
    let joined = knn_join(index, &q.outer, &q.inner, q.k_join)?;
    Ok(joined.filter_outer(|o| selected.binary_search(&o).is_ok()))
}

/// Negative control: joins every outer point against only the selected inner
/// points. Differs from [`baseline_select_join_inner`] in general.
pub fn invalid_inner_pushdown(index: &GridIndex, q: &SelectJoinQuery) -> Result<PairSet> {
    q.validate()?;
    let selected = knn_select(index, &q.inner, q.focal, q.k_select)?;
    let outer = index.relation(&q.outer)?;
    let mut pairs = Vec::new();
    for e in outer.points() {
        let mut candidates: Vec<Neighbor> = selected
            .members
            .iter()
            .map(|n| Neighbor {
                point: n.point,
                dist: dist(e.coord(), n.point),
            })
            .collect();
        select_best(&mut candidates, q.k_join);
        pairs.extend(candidates.iter().map(|n| (e.id, n.point.id)));
    }
    Ok(PairSet::from_pairs(pairs))
}
