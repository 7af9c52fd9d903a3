use std::collections::HashMap;

use crate::error::Result;
use crate::geometry::{dist, Point, PointId};
use crate::grid::{BlockId, GridGeometry, GridIndex, RelationId};
use crate::knn::{get_knn, select_best, Neighbor};
use crate::operators::{intersect_pairs_on_inner, knn_join, PairSet, TripletSet};
use crate::query::{JoinFirst, PlanOutput, PlanStats, UnchainedQuery};

/// Coverage ratio under which the two outer relations count as equally spread.
pub const DEFAULT_COVERAGE_RATIO: f64 = 1.1;

/// Evaluation order recommended for an unchained query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JoinOrderAdvice {
    /// Block-Marking starting with the given join.
    First(JoinFirst),
    /// Both joins evaluated independently; no pruning is expected to pay off.
    Independent,
}

/// Outer relation, its `k`, and the other side of an unchained query, in
/// evaluation order.
struct Roles<'q> {
    first: (&'q RelationId, usize),
    second: (&'q RelationId, usize),
}

fn roles(q: &UnchainedQuery, first: JoinFirst) -> Roles<'_> {
    match first {
        JoinFirst::Ab => Roles {
            first: (&q.a, q.k_ab),
            second: (&q.c, q.k_cb),
        },
        JoinFirst::Cb => Roles {
            first: (&q.c, q.k_cb),
            second: (&q.a, q.k_ab),
        },
    }
}

/// Candidate/Safe marks over the shared grid: a block is Candidate when it
/// holds an inner point produced by the first join.
#[derive(Clone, Debug, PartialEq)]
pub struct SafetyMarking {
    candidate: Vec<bool>,
    resolution: usize,
}

impl SafetyMarking {
    fn new(geometry: &GridGeometry) -> Self {
        Self {
            candidate: vec![false; geometry.block_count()],
            resolution: geometry.resolution(),
        }
    }

    fn set(&mut self, b: BlockId) {
        self.candidate[b.row as usize * self.resolution + b.col as usize] = true;
    }

    pub fn is_candidate(&self, b: BlockId) -> bool {
        self.candidate[b.row as usize * self.resolution + b.col as usize]
    }

    pub fn candidate_count(&self) -> usize {
        self.candidate.iter().filter(|c| **c).count()
    }
}

/// Both joins evaluated in full and matched on `B`.
pub fn unchained_baseline(index: &GridIndex, q: &UnchainedQuery) -> Result<PlanOutput<TripletSet>> {
    q.validate()?;
    let ab = knn_join(index, &q.a, &q.b, q.k_ab)?;
    let cb = knn_join(index, &q.c, &q.b, q.k_cb)?;
    let stats = PlanStats {
        neighborhoods: (index.relation(&q.a)?.len() + index.relation(&q.c)?.len()) as u64,
        ..PlanStats::default()
    };
    Ok(PlanOutput::new(intersect_pairs_on_inner(&ab, &cb), stats))
}

fn triplet(first: JoinFirst, first_outer: PointId, b: PointId, second_outer: PointId) -> (PointId, PointId, PointId) {
    match first {
        JoinFirst::Ab => (first_outer, b, second_outer),
        JoinFirst::Cb => (second_outer, b, first_outer),
    }
}

/// Output of the unchained preprocessing: the first join, the Candidate
/// marks it induces, and the mark of every non-empty block of the second
/// join's outer relation.
#[derive(Clone, Debug)]
pub struct UnchainedMarking {
    pub first: JoinFirst,
    /// First-join outer ids grouped by their inner neighbor.
    pub by_b: HashMap<PointId, Vec<PointId>>,
    pub safety: SafetyMarking,
    /// Non-empty blocks of the second outer relation with whether they may
    /// contribute, in row-major order.
    pub second_outer: Vec<(BlockId, bool)>,
    pub stats: PlanStats,
}

/// Runs the first join in full and marks the second outer relation's blocks.
///
/// The blocks holding the first join's inner points become Candidate. A
/// block of the second join's outer relation can only produce triplets if
/// one of its points has a neighbor in a Candidate block. All neighbors of
/// any point in a block lie within `r + diagonal` of the block's center,
/// where `r` is the center's neighborhood radius, so a block whose disc of
/// that radius touches no Candidate block cannot contribute. Blocks that are
/// themselves Candidate are kept without computing the center neighborhood.
pub fn unchained_marking(index: &GridIndex, q: &UnchainedQuery, first: JoinFirst) -> Result<UnchainedMarking> {
    q.validate()?;
    let roles = roles(q, first);
    let b_rel = index.relation(&q.b)?;
    let first_outer = index.relation(roles.first.0)?;
    let second_outer = index.relation(roles.second.0)?;
    let geometry = index.geometry();
    let mut stats = PlanStats::default();

    let mut by_b: HashMap<PointId, Vec<PointId>> = HashMap::new();
    let mut safety = SafetyMarking::new(geometry);
    for o in first_outer.points() {
        stats.neighborhoods += 1;
        for n in get_knn(&b_rel, o.coord(), roles.first.1).members {
            let entry = by_b.entry(n.point.id).or_default();
            if entry.is_empty() {
                safety.set(index.locate(n.point)?);
            }
            entry.push(o.id);
        }
    }

    let k2 = roles.second.1;
    let diagonal = geometry.block_diagonal();
    let mut marks = Vec::new();
    for block in second_outer.non_empty_blocks() {
        let contributing = safety.is_candidate(block) || {
            stats.center_neighborhoods += 1;
            stats.blocks_scanned += 1;
            let center = geometry.block_center(block);
            let threshold = get_knn(&b_rel, center, k2).radius() + diagonal;
            geometry
                .blocks_by_mindist(center)
                .take_while(|ob| ob.dist <= threshold)
                .any(|ob| safety.is_candidate(ob.block))
        };
        if !contributing {
            stats.noncontributing_blocks += 1;
            stats.points_skipped += second_outer.count(block) as u64;
        }
        marks.push((block, contributing));
    }
    Ok(UnchainedMarking {
        first,
        by_b,
        safety,
        second_outer: marks,
        stats,
    })
}

/// Block-Marking for unchained joins: [`unchained_marking`], then the second
/// join probes only the points of contributing blocks and matches their
/// neighbors against the first join on `b`.
pub fn unchained_block_marking(
    index: &GridIndex,
    q: &UnchainedQuery,
    first: JoinFirst,
) -> Result<PlanOutput<TripletSet>> {
    let marking = unchained_marking(index, q, first)?;
    let roles = roles(q, first);
    let b_rel = index.relation(&q.b)?;
    let second_outer = index.relation(roles.second.0)?;
    let k2 = roles.second.1;
    let mut stats = marking.stats;
    let mut triplets = Vec::new();
    for &(block, contributing) in &marking.second_outer {
        if !contributing {
            continue;
        }
        for o in second_outer.bucket(block) {
            stats.neighborhoods += 1;
            for b in get_knn(&b_rel, o.coord(), k2).ids() {
                if let Some(firsts) = marking.by_b.get(&b) {
                    triplets.extend(firsts.iter().map(|&f| triplet(first, f, b, o.id)));
                }
            }
        }
    }
    Ok(PlanOutput::new(TripletSet::from_triplets(triplets), stats))
}

/// Negative control: the second join searches for neighbors only among the
/// inner points produced by the first join. Not equivalent to
/// [`unchained_baseline`] in general.
pub fn filtered_inner_plan(index: &GridIndex, q: &UnchainedQuery, first: JoinFirst) -> Result<TripletSet> {
    q.validate()?;
    let roles = roles(q, first);
    let first_pairs = knn_join(index, roles.first.0, &q.b, roles.first.1)?;
    let kept = first_pairs.inner_ids();
    let b_rel = index.relation(&q.b)?;
    let filtered: Vec<Point> = b_rel
        .points()
        .iter()
        .copied()
        .filter(|p| kept.binary_search(&p.id).is_ok())
        .collect();

    let mut second = Vec::new();
    for o in index.relation(roles.second.0)?.points() {
        let mut candidates: Vec<Neighbor> = filtered
            .iter()
            .map(|p| Neighbor {
                point: *p,
                dist: dist(o.coord(), p),
            })
            .collect();
        select_best(&mut candidates, roles.second.1);
        second.extend(candidates.iter().map(|n| (o.id, n.point.id)));
    }
    let second = PairSet::from_pairs(second);
    Ok(match first {
        JoinFirst::Ab => intersect_pairs_on_inner(&first_pairs, &second),
        JoinFirst::Cb => intersect_pairs_on_inner(&second, &first_pairs),
    })
}

/// Join order from block coverage with [`DEFAULT_COVERAGE_RATIO`].
pub fn advise_join_order(index: &GridIndex, q: &UnchainedQuery) -> Result<JoinOrderAdvice> {
    advise_join_order_with_ratio(index, q, DEFAULT_COVERAGE_RATIO)
}

/// Starts with the join whose outer relation occupies fewer blocks, since its
/// inner points mark fewer blocks Candidate and leave more to prune. When the
/// two coverages are within `ratio` of each other, pruning is unlikely to pay
/// for the preprocessing and independent evaluation is advised.
pub fn advise_join_order_with_ratio(
    index: &GridIndex,
    q: &UnchainedQuery,
    ratio: f64,
) -> Result<JoinOrderAdvice> {
    let total = index.geometry().block_count() as f64;
    let coverage_a = index.relation(&q.a)?.occupied_blocks() as f64 / total;
    let coverage_c = index.relation(&q.c)?.occupied_blocks() as f64 / total;
    let (low, high) = (coverage_a.min(coverage_c), coverage_a.max(coverage_c));
    if high <= low * ratio {
        return Ok(JoinOrderAdvice::Independent);
    }
    Ok(JoinOrderAdvice::First(if coverage_a < coverage_c {
        JoinFirst::Ab
    } else {
        JoinFirst::Cb
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(k_ab: usize, k_cb: usize) -> UnchainedQuery {
        UnchainedQuery {
            a: "A".into(),
            b: "B".into(),
            c: "C".into(),
            k_ab,
            k_cb,
        }
    }

    fn build(a: Vec<Point>, b: Vec<Point>, c: Vec<Point>, g: usize) -> GridIndex {
        let geometry = GridGeometry::new(Rect::new(0.0, 0.0, 100.0, 100.0), g).unwrap();
        GridIndex::build(
            geometry,
            [
                (RelationId::from("A"), a),
                (RelationId::from("B"), b),
                (RelationId::from("C"), c),
            ],
        )
        .unwrap()
    }

    fn uniform(n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
        (0..n as u64)
            .map(|i| Point::new(i, rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
            .collect()
    }

    fn blob(n: usize, cx: f64, cy: f64, rng: &mut ChaCha8Rng) -> Vec<Point> {
        (0..n as u64)
            .map(|i| Point::new(i, cx + rng.random_range(-3.0..3.0), cy + rng.random_range(-3.0..3.0)))
            .collect()
    }

    #[test]
    fn empty_c_gives_empty_result() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let idx = build(uniform(50, &mut rng), uniform(50, &mut rng), vec![], 4);
        assert!(unchained_baseline(&idx, &q(2, 2)).unwrap().result.is_empty());
        for first in [JoinFirst::Ab, JoinFirst::Cb] {
            assert!(unchained_block_marking(&idx, &q(2, 2), first).unwrap().result.is_empty());
        }
    }

    #[test]
    fn clustered_first_join_prunes_and_matches_baseline() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = blob(300, 20.0, 20.0, &mut rng);
        let idx = build(a, uniform(2000, &mut rng), uniform(1500, &mut rng), 12);
        let query = q(3, 3);
        let expected = unchained_baseline(&idx, &query).unwrap().result;
        let out = unchained_block_marking(&idx, &query, JoinFirst::Ab).unwrap();
        assert_eq!(out.result, expected);
        assert!(out.stats.noncontributing_blocks > 0);
        assert_eq!(unchained_block_marking(&idx, &query, JoinFirst::Cb).unwrap().result, expected);
    }

    #[test]
    fn uniform_outers_prune_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let idx = build(uniform(3000, &mut rng), uniform(300, &mut rng), uniform(500, &mut rng), 6);
        let query = q(4, 2);
        let out = unchained_block_marking(&idx, &query, JoinFirst::Ab).unwrap();
        assert_eq!(out.stats.noncontributing_blocks, 0);
        assert_eq!(out.result, unchained_baseline(&idx, &query).unwrap().result);
    }

    #[test]
    fn advice_follows_coverage() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let idx = build(blob(200, 50.0, 50.0, &mut rng), uniform(500, &mut rng), uniform(4000, &mut rng), 10);
        assert_eq!(advise_join_order(&idx, &q(1, 1)).unwrap(), JoinOrderAdvice::First(JoinFirst::Ab));
        let idx = build(uniform(4000, &mut rng), uniform(500, &mut rng), blob(200, 50.0, 50.0, &mut rng), 10);
        assert_eq!(advise_join_order(&idx, &q(1, 1)).unwrap(), JoinOrderAdvice::First(JoinFirst::Cb));
        let idx = build(uniform(4000, &mut rng), uniform(500, &mut rng), uniform(4000, &mut rng), 10);
        assert_eq!(advise_join_order(&idx, &q(1, 1)).unwrap(), JoinOrderAdvice::Independent);
    }
}
