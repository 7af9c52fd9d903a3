//! A kNN-select on the inner relation of a kNN-join, evaluated without
//! joining every outer point: the Counting and Block-Marking plans, plus the
//! valid pushdown of a select on the outer relation.
//!
//! Both inner-select plans compute `nbr_f` (the `k_select` nearest inner
//! points to the focal point) once and emit `(e1, i)` for every `i` that lies
//! in both `nbr_f` and the `k_join`-neighborhood of `e1`. They differ in how
//! they avoid computing neighborhoods of outer points that cannot contribute.

use crate::error::Result;
use crate::geometry::{dist, maxdist, Point};
use crate::grid::{BlockId, GridIndex, Relation};
use crate::knn::{get_knn, intersect, Neighborhood};
use crate::operators::{knn_select, PairSet};
use crate::query::{PlanOutput, PlanStats, SelectJoinQuery};

/// Mark of an outer block after Block-Marking preprocessing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockMark {
    Contributing,
    NonContributing,
}

/// Result of Block-Marking preprocessing: one mark per block of the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMarking {
    marks: Vec<BlockMark>,
    resolution: usize,
    /// Blocks whose center neighborhood was computed.
    pub scanned: u64,
}

impl BlockMarking {
    pub fn mark(&self, b: BlockId) -> BlockMark {
        self.marks[b.row as usize * self.resolution + b.col as usize]
    }

    pub fn is_contributing(&self, b: BlockId) -> bool {
        self.mark(b) == BlockMark::Contributing
    }

    /// Contributing blocks in row-major order.
    pub fn contributing(&self) -> impl Iterator<Item = BlockId> + '_ {
        let g = self.resolution;
        self.marks
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == BlockMark::Contributing)
            .map(move |(i, _)| BlockId::new((i / g) as u32, (i % g) as u32))
    }

    pub fn noncontributing_count(&self) -> usize {
        self.marks
            .iter()
            .filter(|m| **m == BlockMark::NonContributing)
            .count()
    }
}

/// Emits the pairs of `e1` against `nbr_f` from its full neighborhood.
fn probe(inner: &Relation<'_>, nbr_f: &Neighborhood, e1: &Point, k_join: usize, out: &mut Vec<(u64, u64)>) {
    let nbr = get_knn(inner, e1.coord(), k_join);
    out.extend(intersect(nbr_f, &nbr).into_iter().map(|i| (e1.id, i)));
}

/// Counting: an outer point is skipped when more than `k_join` inner points
/// lie in blocks entirely closer to it than the nearest member of `nbr_f`.
pub fn counting_select_join(index: &GridIndex, q: &SelectJoinQuery) -> Result<PlanOutput<PairSet>> {
    q.validate()?;
    let outer = index.relation(&q.outer)?;
    let inner = index.relation(&q.inner)?;
    let mut stats = PlanStats::default();
    if inner.is_empty() {
        return Ok(PlanOutput::new(PairSet::default(), stats));
    }
    let nbr_f = get_knn(&inner, q.focal, q.k_select);
    stats.neighborhoods += 1;

    let mut pairs = Vec::new();
    for e1 in outer.points() {
        stats.threshold_scans += 1;
        let (_, threshold) = nbr_f
            .nearest_to(e1.coord())
            .expect("non-empty inner relation yields a non-empty neighborhood");
        let mut count = 0usize;
        for ob in index.blocks_by_maxdist(e1.coord()) {
            // Only blocks strictly inside the threshold: a point exactly at
            // the threshold could tie with the nearest member of nbr_f.
            if count > q.k_join || ob.dist >= threshold {
                break;
            }
            count += inner.count(ob.block);
        }
        if count > q.k_join {
            stats.points_skipped += 1;
            continue;
        }
        stats.neighborhoods += 1;
        probe(&inner, &nbr_f, e1, q.k_join, &mut pairs);
    }
    Ok(PlanOutput::new(PairSet::from_pairs(pairs), stats))
}

/// Block-Marking preprocessing with the block diagonal as the added distance.
pub fn block_marking_preprocess(
    index: &GridIndex,
    q: &SelectJoinQuery,
    nbr_f: &Neighborhood,
) -> Result<BlockMarking> {
    block_marking_preprocess_scaled(index, q, nbr_f, 1.0)
}

/// Block-Marking preprocessing where the distance added to a center's
/// neighborhood radius is `diagonal_factor` times the block diagonal.
///
/// Blocks are scanned by MINDIST from the focal point. A block is
/// Non-Contributing when `r + x + f_farthest < f_center`, where `r` is the
/// radius of its center's `k_join`-neighborhood and `x` the added distance.
/// The first Non-Contributing block of a run records `M`, its MAXDIST from
/// the focal point; once a block with MINDIST at least `M` is reached without
/// an intervening Contributing block, the scan stops and every remaining block
/// is Non-Contributing. Factors below 1 are unsound and exist to demonstrate
/// that the diagonal is the smallest safe added distance.
pub fn block_marking_preprocess_scaled(
    index: &GridIndex,
    q: &SelectJoinQuery,
    nbr_f: &Neighborhood,
    diagonal_factor: f64,
) -> Result<BlockMarking> {
    let inner = index.relation(&q.inner)?;
    let geometry = index.geometry();
    let g = geometry.resolution();
    let mut marks = vec![BlockMark::NonContributing; geometry.block_count()];
    let mut scanned = 0;
    let f_farthest = nbr_f.radius();
    let added = diagonal_factor * geometry.block_diagonal();

    let mut watermark: Option<f64> = None;
    for ob in geometry.blocks_by_mindist(q.focal) {
        if watermark.is_some_and(|m| ob.dist >= m) {
            break;
        }
        scanned += 1;
        let center = geometry.block_center(ob.block);
        let r = get_knn(&inner, center, q.k_join).radius();
        let f_center = dist(center, q.focal);
        if r + added + f_farthest < f_center {
            if watermark.is_none() {
                watermark = Some(maxdist(q.focal, &geometry.block_rect(ob.block)));
            }
        } else {
            marks[ob.block.row as usize * g + ob.block.col as usize] = BlockMark::Contributing;
            watermark = None;
        }
    }
    Ok(BlockMarking {
        marks,
        resolution: g,
        scanned,
    })
}

/// Block-Marking: only outer points in Contributing blocks are joined.
pub fn block_marking_select_join(index: &GridIndex, q: &SelectJoinQuery) -> Result<PlanOutput<PairSet>> {
    q.validate()?;
    let outer = index.relation(&q.outer)?;
    let inner = index.relation(&q.inner)?;
    let mut stats = PlanStats::default();
    if inner.is_empty() || outer.is_empty() {
        return Ok(PlanOutput::new(PairSet::default(), stats));
    }
    let nbr_f = get_knn(&inner, q.focal, q.k_select);
    stats.neighborhoods += 1;
    let marking = block_marking_preprocess(index, q, &nbr_f)?;
    stats.center_neighborhoods = marking.scanned;
    stats.blocks_scanned = marking.scanned;
    stats.noncontributing_blocks = marking.noncontributing_count() as u64;

    let mut pairs = Vec::new();
    for b in outer.non_empty_blocks() {
        let bucket = outer.bucket(b);
        if !marking.is_contributing(b) {
            stats.points_skipped += bucket.len() as u64;
            continue;
        }
        for e1 in bucket {
            stats.neighborhoods += 1;
            probe(&inner, &nbr_f, e1, q.k_join, &mut pairs);
        }
    }
    Ok(PlanOutput::new(PairSet::from_pairs(pairs), stats))
}

/// Select on the outer relation pushed below the join: only the selected
/// outer points are joined, each against the full inner relation.
pub fn outer_pushdown_select_join(index: &GridIndex, q: &SelectJoinQuery) -> Result<PlanOutput<PairSet>> {
    q.validate()?;
    let inner = index.relation(&q.inner)?;
    let selected = knn_select(index, &q.outer, q.focal, q.k_select)?;
    let mut stats = PlanStats {
        neighborhoods: 1,
        ..PlanStats::default()
    };
    let mut pairs = Vec::new();
    for n in &selected.members {
        stats.neighborhoods += 1;
        let nbr = get_knn(&inner, n.point.coord(), q.k_join);
        pairs.extend(nbr.ids().map(|i| (n.point.id, i)));
    }
    Ok(PlanOutput::new(PairSet::from_pairs(pairs), stats))
}
