//! Two kNN-selects over one relation.
//!
//! The optimized plan evaluates the select with the smaller `k` first. Only
//! points of `nbr1` can appear in the result, and all of them lie within
//! `T`, the distance from `f2` to the member of `nbr1` farthest from it. So
//! the locality of `f2` is truncated to blocks with MINDIST at most `T`, which
//! keeps the cost of the second select almost independent of `k2`.

use crate::error::Result;
use crate::geometry::{dist, mindist, PointId};
use crate::grid::{BlockId, GridIndex, Relation};
use crate::knn::{
    build_locality, get_knn, intersect, neighbor_order, neighborhood_from_blocks, select_best, Neighbor, Neighborhood,
};
use crate::query::{PlanOutput, PlanStats, TwoSelectQuery};

/// Both selects evaluated independently and intersected.
pub fn baseline_two_select(index: &GridIndex, q: &TwoSelectQuery) -> Result<PlanOutput<Vec<PointId>>> {
    q.validate()?;
    let q = q.normalized();
    let rel = index.relation(&q.relation)?;
    let nbr1 = get_knn(&rel, q.f1, q.k1);
    if rel.is_empty() {
        return Ok(PlanOutput::new(Vec::new(), PlanStats::default()));
    }
    let locality = build_locality(&rel, q.f2, q.k2);
    let stats = PlanStats {
        neighborhoods: 2,
        locality_blocks: locality.blocks.len() as u64,
        ..PlanStats::default()
    };
    let nbr2 = neighborhood_from_blocks(&rel, q.f2, q.k2, locality.blocks);
    Ok(PlanOutput::new(intersect(&nbr1, &nbr2), stats))
}

/// Truncated locality of the second focal point.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedLocality {
    /// Non-empty blocks kept, with no duplicates.
    pub blocks: Vec<BlockId>,
    /// Distance from `f2` to the member of `nbr1` farthest from it.
    pub threshold: f64,
}

/// Builds the truncated locality of `q.f2` (after normalization).
///
/// Blocks are first taken by MAXDIST from `f2`, accumulating the counts of
/// every block taken until they reach `k2`; of these, only blocks with
/// MINDIST at most `T` are kept. Remaining blocks are then taken by MINDIST
/// while their MINDIST stays within both `T` and the last MAXDIST seen. The
/// MAXDIST pass also stops as soon as that MAXDIST reaches `T`: every later
/// block would be kept or rejected by `T` alone, so the locality is the same
/// and the pass no longer grows with `k2`.
pub fn truncated_locality(index: &GridIndex, q: &TwoSelectQuery) -> Result<TruncatedLocality> {
    let q = q.normalized();
    let rel = index.relation(&q.relation)?;
    let nbr1 = get_knn(&rel, q.f1, q.k1);
    let threshold = nbr1.farthest_to(q.f2).map_or(f64::NEG_INFINITY, |(_, d)| d);
    Ok(TruncatedLocality {
        blocks: truncated_blocks(index, &q, threshold)?,
        threshold,
    })
}

fn truncated_blocks(index: &GridIndex, q: &TwoSelectQuery, threshold: f64) -> Result<Vec<BlockId>> {
    let rel = index.relation(&q.relation)?;
    let geometry = index.geometry();
    let mut taken = vec![false; geometry.block_count()];
    let mut blocks = Vec::new();

    let mut count = 0usize;
    let mut max_dist_so_far = f64::INFINITY;
    if rel.len() >= q.k2 {
        for ob in geometry.blocks_by_maxdist(q.f2) {
            count += rel.count(ob.block);
            max_dist_so_far = ob.dist;
            let min_dist = mindist(q.f2, &geometry.block_rect(ob.block));
            if min_dist <= threshold && rel.count(ob.block) > 0 {
                taken[geometry.linear(ob.block)] = true;
                blocks.push(ob.block);
            }
            if count >= q.k2 || max_dist_so_far >= threshold {
                break;
            }
        }
    }

    let bound = max_dist_so_far.min(threshold);
    for ob in geometry.blocks_by_mindist(q.f2) {
        if ob.dist > bound {
            break;
        }
        let i = geometry.linear(ob.block);
        if !taken[i] && rel.count(ob.block) > 0 {
            taken[i] = true;
            blocks.push(ob.block);
        }
    }
    Ok(blocks)
}

/// The threshold-truncated plan; its result equals [`baseline_two_select`].
pub fn two_knn_select(index: &GridIndex, q: &TwoSelectQuery) -> Result<PlanOutput<Vec<PointId>>> {
    q.validate()?;
    let q = q.normalized();
    let rel = index.relation(&q.relation)?;
    let nbr1 = get_knn(&rel, q.f1, q.k1);
    let Some((_, threshold)) = nbr1.farthest_to(q.f2) else {
        return Ok(PlanOutput::new(Vec::new(), PlanStats::default()));
    };
    let blocks = truncated_blocks(index, &q, threshold)?;
    let stats = PlanStats {
        neighborhoods: 2,
        locality_blocks: blocks.len() as u64,
        ..PlanStats::default()
    };
    Ok(PlanOutput::new(members_within(&rel, &q, &nbr1, &blocks), stats))
}

/// Members of `nbr1` among the best `k2` points of `blocks`. Only membership
/// matters here, so the candidates are partitioned around the `k2`-th rather
/// than sorted, keeping the cost linear in the truncated locality.
fn members_within(rel: &Relation<'_>, q: &TwoSelectQuery, nbr1: &Neighborhood, blocks: &[BlockId]) -> Vec<PointId> {
    let mut candidates: Vec<Neighbor> = blocks
        .iter()
        .flat_map(|&b| rel.bucket(b))
        .map(|p| Neighbor {
            point: *p,
            dist: dist(q.f2, p),
        })
        .collect();
    if candidates.len() > q.k2 {
        candidates.select_nth_unstable_by(q.k2 - 1, neighbor_order);
        candidates.truncate(q.k2);
    }
    let first = nbr1.sorted_ids();
    let mut out: Vec<PointId> = candidates
        .iter()
        .map(Neighbor::id)
        .filter(|id| first.binary_search(id).is_ok())
        .collect();
    out.sort_unstable();
    out
}

/// Negative control: the second select is evaluated over the output of the
/// first instead of over the relation. Not equivalent to the baseline.
pub fn sequential_two_select(index: &GridIndex, q: &TwoSelectQuery) -> Result<Vec<PointId>> {
    q.validate()?;
    let rel = index.relation(&q.relation)?;
    let nbr1 = get_knn(&rel, q.f1, q.k1);
    let mut candidates: Vec<Neighbor> = nbr1
        .members
        .iter()
        .map(|n| Neighbor {
            point: n.point,
            dist: dist(q.f2, n.point),
        })
        .collect();
    select_best(&mut candidates, q.k2);
    let mut ids: Vec<PointId> = candidates.iter().map(|n| n.point.id).collect();
    ids.sort_unstable();
    Ok(ids)
}
