//! Neighborhood computation through block localities.
//!
//! A locality of a focal location is a set of blocks guaranteed to contain
//! its `k` nearest points. It is built in two passes over the grid: blocks are
//! taken by increasing MAXDIST until their counts reach `k`, which fixes a
//! watermark `M` (the MAXDIST of the last block taken); then every block whose
//! MINDIST is at most `M` joins the locality. At least `k` points lie within
//! `M`, so the neighborhood lies inside the locality.
//!
//! Neighbors are ordered by `(distance, id)` everywhere, which makes every
//! neighborhood (and so every plan output) deterministic under ties.

use std::cmp::Ordering;

use crate::geometry::{dist, Coord, Point, PointId};
use crate::grid::{BlockId, Relation};

/// A point together with its distance to some focal location.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub point: Point,
    pub dist: f64,
}

impl Neighbor {
    #[inline]
    pub fn id(&self) -> PointId {
        self.point.id
    }
}

#[inline]
pub(crate) fn neighbor_order(a: &Neighbor, b: &Neighbor) -> Ordering {
    a.dist
        .total_cmp(&b.dist)
        .then_with(|| a.point.id.cmp(&b.point.id))
}

/// The `k` nearest points of a relation to a focal location, sorted by
/// `(distance, id)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Neighborhood {
    pub focal: Coord,
    pub k: usize,
    pub members: Vec<Neighbor>,
}

impl Neighborhood {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn nearest(&self) -> Option<&Neighbor> {
        self.members.first()
    }

    pub fn farthest(&self) -> Option<&Neighbor> {
        self.members.last()
    }

    /// Distance to the farthest member; zero when empty.
    pub fn radius(&self) -> f64 {
        self.farthest().map_or(0.0, |n| n.dist)
    }

    pub fn ids(&self) -> impl Iterator<Item = PointId> + '_ {
        self.members.iter().map(Neighbor::id)
    }

    /// Member ids in ascending order.
    pub fn sorted_ids(&self) -> Vec<PointId> {
        let mut ids: Vec<PointId> = self.ids().collect();
        ids.sort_unstable();
        ids
    }

    pub fn contains(&self, id: PointId) -> bool {
        self.members.iter().any(|n| n.point.id == id)
    }

    /// Member closest to `location` (not to the focal point), by `(distance, id)`.
    pub fn nearest_to(&self, location: Coord) -> Option<(Point, f64)> {
        self.members
            .iter()
            .map(|n| Neighbor {
                point: n.point,
                dist: dist(location, n.point),
            })
            .min_by(neighbor_order)
            .map(|n| (n.point, n.dist))
    }

    /// Member farthest from `location`, by `(distance, id)`.
    pub fn farthest_to(&self, location: Coord) -> Option<(Point, f64)> {
        self.members
            .iter()
            .map(|n| Neighbor {
                point: n.point,
                dist: dist(location, n.point),
            })
            .max_by(neighbor_order)
            .map(|n| (n.point, n.dist))
    }
}

/// Blocks guaranteed to hold a focal location's neighborhood.
#[derive(Clone, Debug, PartialEq)]
pub struct Locality {
    /// Non-empty blocks of the locality, in MINDIST order from the focal point.
    pub blocks: Vec<BlockId>,
    /// MAXDIST at which the accumulated count first reached `k`; infinite when
    /// the relation holds fewer than `k` points.
    pub watermark: f64,
}

impl Locality {
    /// Number of relation points held by the locality's blocks.
    pub fn point_count(&self, relation: &Relation<'_>) -> usize {
        self.blocks.iter().map(|&b| relation.count(b)).sum()
    }
}

/// MAXDIST pass: the MAXDIST of the block at which the running count first
/// reaches `k`, or `None` when the relation holds fewer than `k` points.
fn locality_watermark(relation: &Relation<'_>, focal: Coord, k: usize) -> Option<f64> {
    if relation.len() < k {
        return None;
    }
    let mut count = 0;
    for ob in relation.geometry().blocks_by_maxdist(focal) {
        count += relation.count(ob.block);
        if count >= k {
            return Some(ob.dist);
        }
    }
    None
}

pub fn build_locality(relation: &Relation<'_>, focal: impl Into<Coord>, k: usize) -> Locality {
    let focal = focal.into();
    let k = k.max(1);
    match locality_watermark(relation, focal, k) {
        None => Locality {
            blocks: relation.non_empty_blocks().collect(),
            watermark: f64::INFINITY,
        },
        Some(watermark) => {
            // Every block taken by the MAXDIST pass has MINDIST <= watermark,
            // so this pass alone yields the whole locality.
            let blocks = relation
                .geometry()
                .blocks_by_mindist(focal)
                .take_while(|ob| ob.dist <= watermark)
                .filter(|ob| relation.count(ob.block) > 0)
                .map(|ob| ob.block)
                .collect();
            Locality { blocks, watermark }
        }
    }
}

/// Best `k` points under `(distance, id)` among the given blocks' buckets.
pub fn neighborhood_from_blocks<I>(
    relation: &Relation<'_>,
    focal: impl Into<Coord>,
    k: usize,
    blocks: I,
) -> Neighborhood
where
    I: IntoIterator<Item = BlockId>,
{
    let focal = focal.into();
    let mut candidates: Vec<Neighbor> = Vec::new();
    for b in blocks {
        candidates.extend(relation.bucket(b).iter().map(|p| Neighbor {
            point: *p,
            dist: dist(focal, p),
        }));
    }
    select_best(&mut candidates, k);
    Neighborhood {
        focal,
        k,
        members: candidates,
    }
}

/// Keeps the `k` smallest neighbors, sorted.
pub(crate) fn select_best(candidates: &mut Vec<Neighbor>, k: usize) {
    if k == 0 {
        candidates.clear();
        return;
    }
    if candidates.len() > k {
        candidates.select_nth_unstable_by(k - 1, neighbor_order);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(neighbor_order);
}

/// The `k` nearest points of `relation` to `focal`. Returns fewer than `k`
/// members only when the relation is smaller than `k`.
pub fn get_knn(relation: &Relation<'_>, focal: impl Into<Coord>, k: usize) -> Neighborhood {
    let focal = focal.into();
    if k == 0 || relation.is_empty() {
        return Neighborhood {
            focal,
            k,
            members: Vec::new(),
        };
    }
    let locality = build_locality(relation, focal, k);
    neighborhood_from_blocks(relation, focal, k, locality.blocks)
}

/// Ids present in both neighborhoods, ascending.
pub fn intersect(a: &Neighborhood, b: &Neighborhood) -> Vec<PointId> {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let large_ids = large.sorted_ids();
    let mut out: Vec<PointId> = small
        .ids()
        .filter(|id| large_ids.binary_search(id).is_ok())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
