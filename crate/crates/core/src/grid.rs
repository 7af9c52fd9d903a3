//! Uniform grid index shared by all relations of a query.
//!
//! One [`GridGeometry`] tiles the indexed extent into `G x G` cells. Each
//! relation registered in a [`GridIndex`] keeps its points bucketed per cell,
//! stored contiguously by block so that a block's count is an O(1) lookup.
//!
//! Cells are half-open on their upper edges except for the last row and
//! column, which are closed. [`GridGeometry::locate`] and
//! [`GridGeometry::block_rect`] use the same edge positions, so a located
//! point always lies inside its block's rectangle.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{maxdist, mindist, Coord, Point, Rect};

/// Target number of points per non-empty block for the default resolution.
pub const DEFAULT_POINTS_PER_BLOCK: usize = 64;

/// Fraction of the bounding box added on every side of a fitted extent.
const EXTENT_MARGIN: f64 = 0.01;

/// Name of a point relation within an index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationId(String);

impl RelationId {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for RelationId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A cell of the grid; `row` grows with `y`, `col` with `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId {
    pub row: u32,
    pub col: u32,
}

impl BlockId {
    pub const fn new(row: u32, col: u32) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.row, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridGeometry {
    extent: Rect,
    resolution: usize,
}

impl GridGeometry {
    pub fn new(extent: Rect, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::InvalidGrid("resolution must be positive".into()));
        }
        if resolution > u32::MAX as usize {
            return Err(Error::InvalidGrid(format!("resolution {resolution} too large")));
        }
        let finite = [extent.x_min, extent.y_min, extent.x_max, extent.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || extent.width() <= 0.0 || extent.height() <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "extent must be finite with positive area, got {extent:?}"
            )));
        }
        Ok(Self { extent, resolution })
    }

    /// `max(1, ceil(sqrt(n_max / 64)))`.
    pub fn default_resolution(n_max: usize) -> usize {
        let cells = n_max.div_ceil(DEFAULT_POINTS_PER_BLOCK);
        let mut g = (cells as f64).sqrt().ceil() as usize;
        // Guard against sqrt rounding either way.
        while g > 1 && (g - 1) * (g - 1) >= cells {
            g -= 1;
        }
        while g * g < cells {
            g += 1;
        }
        g.max(1)
    }

    /// Square extent covering every given location, inflated by 1% per side.
    pub fn fitted_extent<'a, I>(locations: I) -> Option<Rect>
    where
        I: IntoIterator<Item = &'a Point>,
    {
        let mut it = locations.into_iter();
        let first = it.next()?;
        let mut r = Rect::new(first.x, first.y, first.x, first.y);
        for p in it {
            r.x_min = r.x_min.min(p.x);
            r.y_min = r.y_min.min(p.y);
            r.x_max = r.x_max.max(p.x);
            r.y_max = r.y_max.max(p.y);
        }
        let side = r.width().max(r.height());
        let side = if side > 0.0 { side } else { 1.0 };
        let half = 0.5 * side * (1.0 + 2.0 * EXTENT_MARGIN);
        let c = r.center();
        Some(Rect::new(c.x - half, c.y - half, c.x + half, c.y + half))
    }

    /// Geometry fitted to the union of `relations`. `resolution` overrides the
    /// default derived from the largest relation.
    pub fn fitted(relations: &[&[Point]], resolution: Option<usize>) -> Result<Self> {
        let extent = Self::fitted_extent(relations.iter().flat_map(|r| r.iter()))
            .unwrap_or(Rect::new(0.0, 0.0, 1.0, 1.0));
        let n_max = relations.iter().map(|r| r.len()).max().unwrap_or(0);
        Self::new(
            extent,
            resolution.unwrap_or_else(|| Self::default_resolution(n_max)),
        )
    }

    pub fn extent(&self) -> &Rect {
        &self.extent
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn block_count(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn blocks(&self) -> impl Iterator<Item = BlockId> + '_ {
        let g = self.resolution as u32;
        (0..g).flat_map(move |row| (0..g).map(move |col| BlockId::new(row, col)))
    }

    #[inline]
    pub fn linear(&self, b: BlockId) -> usize {
        b.row as usize * self.resolution + b.col as usize
    }

    #[inline]
    pub fn from_linear(&self, i: usize) -> BlockId {
        BlockId::new((i / self.resolution) as u32, (i % self.resolution) as u32)
    }

    #[inline]
    fn x_edge(&self, i: usize) -> f64 {
        if i >= self.resolution {
            self.extent.x_max
        } else {
            self.extent.x_min + self.extent.width() * i as f64 / self.resolution as f64
        }
    }

    #[inline]
    fn y_edge(&self, i: usize) -> f64 {
        if i >= self.resolution {
            self.extent.y_max
        } else {
            self.extent.y_min + self.extent.height() * i as f64 / self.resolution as f64
        }
    }

    /// Shortest cell side.
    pub fn cell_side(&self) -> f64 {
        let g = self.resolution as f64;
        (self.extent.width() / g).min(self.extent.height() / g)
    }

    /// Diagonal shared by all blocks.
    pub fn block_diagonal(&self) -> f64 {
        let g = self.resolution as f64;
        let (w, h) = (self.extent.width() / g, self.extent.height() / g);
        (w * w + h * h).sqrt()
    }

    #[inline]
    pub fn block_rect(&self, b: BlockId) -> Rect {
        let (r, c) = (b.row as usize, b.col as usize);
        Rect {
            x_min: self.x_edge(c),
            x_max: self.x_edge(c + 1),
            y_min: self.y_edge(r),
            y_max: self.y_edge(r + 1),
        }
    }

    pub fn block_center(&self, b: BlockId) -> Coord {
        self.block_rect(b).center()
    }

    /// Cell index along one axis under the half-open rule, clamped to the grid.
    #[inline]
    fn axis_cell(&self, v: f64, lo: f64, span: f64, edge: impl Fn(usize) -> f64) -> usize {
        let g = self.resolution;
        let guess = ((v - lo) / span * g as f64).floor();
        let mut i = if guess.is_nan() || guess < 0.0 {
            0
        } else {
            (guess as usize).min(g - 1)
        };
        // Settle against the exact edge positions used by `block_rect`.
        while i + 1 < g && v >= edge(i + 1) {
            i += 1;
        }
        while i > 0 && v < edge(i) {
            i -= 1;
        }
        i
    }

    /// Block of the nearest cell to `p`; equals `locate` for locations inside
    /// the extent.
    #[inline]
    pub fn clamped_block(&self, p: Coord) -> BlockId {
        let e = &self.extent;
        let col = self.axis_cell(p.x, e.x_min, e.width(), |i| self.x_edge(i));
        let row = self.axis_cell(p.y, e.y_min, e.height(), |i| self.y_edge(i));
        BlockId::new(row as u32, col as u32)
    }

    /// The unique block containing `p`.
    pub fn locate(&self, p: impl Into<Coord>) -> Result<BlockId> {
        let p = p.into();
        if !self.extent.contains(p) {
            return Err(Error::LocationOutsideExtent { x: p.x, y: p.y });
        }
        Ok(self.clamped_block(p))
    }

    pub fn blocks_by_mindist(&self, focal: impl Into<Coord>) -> BlockOrder<'_> {
        BlockOrder::new(self, focal.into(), Metric::MinDist)
    }

    pub fn blocks_by_maxdist(&self, focal: impl Into<Coord>) -> BlockOrder<'_> {
        BlockOrder::new(self, focal.into(), Metric::MaxDist)
    }
}

/// Ordering key for block streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    MinDist,
    MaxDist,
}

impl Metric {
    #[inline]
    pub fn eval(self, p: Coord, r: &Rect) -> f64 {
        match self {
            Metric::MinDist => mindist(p, r),
            Metric::MaxDist => maxdist(p, r),
        }
    }
}

/// A block emitted by a [`BlockOrder`] with its key distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderedBlock {
    pub block: BlockId,
    pub dist: f64,
}

#[derive(Debug)]
struct HeapEntry(OrderedBlock);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // Reversed: BinaryHeap is a max-heap and we pop the smallest key.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .dist
            .total_cmp(&self.0.dist)
            .then_with(|| other.0.block.cmp(&self.0.block))
    }
}

/// Lazily ordered stream of every block by non-decreasing MINDIST or MAXDIST
/// from a focal location, ties broken by `(row, col)`.
///
/// Blocks are pulled into a heap one Chebyshev ring (around the focal
/// location's nearest cell) at a time. Every block of ring `r` has
/// `mindist >= (r - 1) * side` and `maxdist >= r * side`, so the heap top may be
/// emitted as soon as it is below the bound of the first unexpanded ring.
pub struct BlockOrder<'g> {
    geometry: &'g GridGeometry,
    focal: Coord,
    metric: Metric,
    origin: (i64, i64),
    next_ring: i64,
    last_ring: i64,
    side: f64,
    slack: f64,
    heap: BinaryHeap<HeapEntry>,
}

impl<'g> BlockOrder<'g> {
    fn new(geometry: &'g GridGeometry, focal: Coord, metric: Metric) -> Self {
        let start = geometry.clamped_block(focal);
        let g = geometry.resolution as i64;
        let (r0, c0) = (start.row as i64, start.col as i64);
        let last_ring = r0.max(g - 1 - r0).max(c0).max(g - 1 - c0);
        let e = geometry.extent();
        let magnitude = [e.x_min, e.x_max, e.y_min, e.y_max, focal.x, focal.y]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let side = geometry.cell_side();
        Self {
            geometry,
            focal,
            metric,
            origin: (r0, c0),
            next_ring: 0,
            last_ring,
            side,
            slack: 1e-9 * side + 16.0 * f64::EPSILON * magnitude,
            heap: BinaryHeap::with_capacity(16),
        }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// Lower bound on the key of any block in `ring`, shaded downwards so that
    /// rounding in the exact key computation can never undercut it.
    #[inline]
    fn ring_bound(&self, ring: i64) -> f64 {
        let steps = match self.metric {
            Metric::MinDist => ring - 1,
            Metric::MaxDist => ring,
        };
        if steps <= 0 {
            f64::NEG_INFINITY
        } else {
            steps as f64 * self.side - self.slack
        }
    }

    fn push(&mut self, row: i64, col: i64) {
        let g = self.geometry.resolution as i64;
        if row < 0 || col < 0 || row >= g || col >= g {
            return;
        }
        let block = BlockId::new(row as u32, col as u32);
        let dist = self
            .metric
            .eval(self.focal, &self.geometry.block_rect(block));
        self.heap.push(HeapEntry(OrderedBlock { block, dist }));
    }

    fn expand_ring(&mut self) {
        let ring = self.next_ring;
        self.next_ring += 1;
        let (r0, c0) = self.origin;
        if ring == 0 {
            self.push(r0, c0);
            return;
        }
        for col in (c0 - ring)..=(c0 + ring) {
            self.push(r0 - ring, col);
            self.push(r0 + ring, col);
        }
        for row in (r0 - ring + 1)..=(r0 + ring - 1) {
            self.push(row, c0 - ring);
            self.push(row, c0 + ring);
        }
    }
}

impl Iterator for BlockOrder<'_> {
    type Item = OrderedBlock;

    fn next(&mut self) -> Option<OrderedBlock> {
        loop {
            if self.next_ring <= self.last_ring {
                let bound = self.ring_bound(self.next_ring);
                let ready = matches!(self.heap.peek(), Some(top) if top.0.dist < bound);
                if !ready {
                    self.expand_ring();
                    continue;
                }
            }
            return self.heap.pop().map(|e| e.0);
        }
    }
}

/// Per-relation occupancy: points grouped by block with prefix offsets.
#[derive(Clone, Debug)]
struct Occupancy {
    points: Vec<Point>,
    offsets: Vec<u32>,
}

/// A registered relation viewed through the shared geometry.
#[derive(Clone, Copy)]
pub struct Relation<'a> {
    id: &'a RelationId,
    geometry: &'a GridGeometry,
    occupancy: &'a Occupancy,
}

impl<'a> Relation<'a> {
    pub fn id(&self) -> &'a RelationId {
        self.id
    }

    pub fn geometry(&self) -> &'a GridGeometry {
        self.geometry
    }

    pub fn len(&self) -> usize {
        self.occupancy.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupancy.points.is_empty()
    }

    /// All points, grouped by block.
    pub fn points(&self) -> &'a [Point] {
        &self.occupancy.points
    }

    #[inline]
    pub fn count(&self, b: BlockId) -> usize {
        let i = self.geometry.linear(b);
        (self.occupancy.offsets[i + 1] - self.occupancy.offsets[i]) as usize
    }

    #[inline]
    pub fn bucket(&self, b: BlockId) -> &'a [Point] {
        let i = self.geometry.linear(b);
        let (lo, hi) = (
            self.occupancy.offsets[i] as usize,
            self.occupancy.offsets[i + 1] as usize,
        );
        &self.occupancy.points[lo..hi]
    }

    pub fn non_empty_blocks(&self) -> impl Iterator<Item = BlockId> + 'a {
        let geometry = self.geometry;
        let offsets = &self.occupancy.offsets;
        offsets
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0])
            .map(move |(i, _)| geometry.from_linear(i))
    }

    /// Number of blocks holding at least one point of this relation.
    pub fn occupied_blocks(&self) -> usize {
        self.occupancy
            .offsets
            .windows(2)
            .filter(|w| w[1] > w[0])
            .count()
    }
}

impl fmt::Debug for Relation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relation")
            .field("id", self.id)
            .field("len", &self.len())
            .finish()
    }
}

/// Immutable grid index over one or more relations.
#[derive(Clone, Debug)]
pub struct GridIndex {
    geometry: GridGeometry,
    relations: Vec<(RelationId, Occupancy)>,
}

impl GridIndex {
    pub fn build<I>(geometry: GridGeometry, relations: I) -> Result<Self>
    where
        I: IntoIterator<Item = (RelationId, Vec<Point>)>,
    {
        let mut built: Vec<(RelationId, Occupancy)> = Vec::new();
        for (id, points) in relations {
            if built.iter().any(|(existing, _)| *existing == id) {
                return Err(Error::DuplicateRelation(id.to_string()));
            }
            let occupancy = Self::bucket(&geometry, &id, points)?;
            built.push((id, occupancy));
        }
        Ok(Self {
            geometry,
            relations: built,
        })
    }

    /// Builds with a fitted extent; see [`GridGeometry::fitted`].
    pub fn build_fitted(
        relations: Vec<(RelationId, Vec<Point>)>,
        resolution: Option<usize>,
    ) -> Result<Self> {
        let slices: Vec<&[Point]> = relations.iter().map(|(_, p)| p.as_slice()).collect();
        let geometry = GridGeometry::fitted(&slices, resolution)?;
        Self::build(geometry, relations)
    }

    fn bucket(geometry: &GridGeometry, id: &RelationId, points: Vec<Point>) -> Result<Occupancy> {
        if points.len() > u32::MAX as usize {
            return Err(Error::InvalidGrid(format!("relation {id} is too large")));
        }
        let mut seen = HashSet::with_capacity(points.len());
        let mut cells = Vec::with_capacity(points.len());
        for p in &points {
            if !(p.x.is_finite() && p.y.is_finite()) || !geometry.extent.contains(p) {
                return Err(Error::OutsideExtent {
                    id: p.id,
                    x: p.x,
                    y: p.y,
                });
            }
            if !seen.insert(p.id) {
                return Err(Error::DuplicateId {
                    relation: id.to_string(),
                    id: p.id,
                });
            }
            cells.push(geometry.linear(geometry.clamped_block(p.coord())));
        }

        let mut offsets = vec![0u32; geometry.block_count() + 1];
        for &c in &cells {
            offsets[c + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut cursor: Vec<u32> = offsets[..geometry.block_count()].to_vec();
        let mut sorted = vec![Point::new(0, 0.0, 0.0); points.len()];
        for (p, &c) in points.into_iter().zip(&cells) {
            sorted[cursor[c] as usize] = p;
            cursor[c] += 1;
        }
        Ok(Occupancy {
            points: sorted,
            offsets,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn relation_ids(&self) -> impl Iterator<Item = &RelationId> {
        self.relations.iter().map(|(id, _)| id)
    }

    pub fn relation(&self, id: &RelationId) -> Result<Relation<'_>> {
        self.relations
            .iter()
            .find(|(rid, _)| rid == id)
            .map(|(rid, occupancy)| Relation {
                id: rid,
                geometry: &self.geometry,
                occupancy,
            })
            .ok_or_else(|| Error::UnknownRelation(id.to_string()))
    }

    pub fn locate(&self, p: impl Into<Coord>) -> Result<BlockId> {
        self.geometry.locate(p)
    }

    pub fn count(&self, block: BlockId, relation: &RelationId) -> Result<usize> {
        Ok(self.relation(relation)?.count(block))
    }

    pub fn blocks_by_mindist(&self, focal: impl Into<Coord>) -> BlockOrder<'_> {
        self.geometry.blocks_by_mindist(focal)
    }

    pub fn blocks_by_maxdist(&self, focal: impl Into<Coord>) -> BlockOrder<'_> {
        self.geometry.blocks_by_maxdist(focal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_grid(g: usize) -> GridGeometry {
        GridGeometry::new(Rect::new(0.0, 0.0, 1.0, 1.0), g).unwrap()
    }

    fn random_points(n: usize, seed: u64, extent: &Rect) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n as u64)
            .map(|id| {
                Point::new(
                    id,
                    rng.random_range(extent.x_min..=extent.x_max),
                    rng.random_range(extent.y_min..=extent.y_max),
                )
            })
            .collect()
    }

    fn full_sort(geometry: &GridGeometry, focal: Coord, metric: Metric) -> Vec<OrderedBlock> {
        let mut all: Vec<OrderedBlock> = geometry
            .blocks()
            .map(|block| OrderedBlock {
                block,
                dist: metric.eval(focal, &geometry.block_rect(block)),
            })
            .collect();
        all.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.block.cmp(&b.block)));
        all
    }

    #[test]
    fn default_resolution_targets_64_per_block() {
        assert_eq!(GridGeometry::default_resolution(0), 1);
        assert_eq!(GridGeometry::default_resolution(64), 1);
        assert_eq!(GridGeometry::default_resolution(65), 2);
        assert_eq!(GridGeometry::default_resolution(100_000), 40);
        assert_eq!(GridGeometry::default_resolution(500_000), 89);
    }

    #[test]
    fn fitted_extent_is_square_and_inflated() {
        let pts = [Point::new(0, 0.0, 0.0), Point::new(1, 10.0, 4.0)];
        let e = GridGeometry::fitted_extent(pts.iter()).unwrap();
        assert!((e.width() - 10.2).abs() < 1e-9);
        assert!((e.height() - 10.2).abs() < 1e-9);
        assert!(e.x_min < 0.0 && e.x_max > 10.0);
    }

    #[test]
    fn empty_relation_has_zero_counts() {
        let idx = GridIndex::build(unit_grid(4), [(RelationId::from("E"), vec![])]).unwrap();
        let rel = idx.relation(&"E".into()).unwrap();
        assert!(idx.geometry().blocks().all(|b| rel.count(b) == 0));
        assert_eq!(rel.non_empty_blocks().count(), 0);
    }

    #[test]
    fn single_point_occupies_one_block() {
        let idx = GridIndex::build(
            unit_grid(4),
            [(RelationId::from("E"), vec![Point::new(9, 0.5, 0.5)])],
        )
        .unwrap();
        let rel = idx.relation(&"E".into()).unwrap();
        let occupied: Vec<_> = idx.geometry().blocks().filter(|&b| rel.count(b) == 1).collect();
        assert_eq!(occupied, vec![BlockId::new(2, 2)]);
        assert_eq!(idx.count(BlockId::new(0, 0), &"E".into()).unwrap(), 0);
    }

    #[test]
    fn build_rejects_outside_and_duplicates() {
        let err = GridIndex::build(
            unit_grid(2),
            [(RelationId::from("E"), vec![Point::new(3, 1.5, 0.5)])],
        )
        .unwrap_err();
        assert!(matches!(err, Error::OutsideExtent { id: 3, .. }), "{err}");

        let err = GridIndex::build(
            unit_grid(2),
            [(
                RelationId::from("E"),
                vec![Point::new(1, 0.1, 0.1), Point::new(1, 0.2, 0.2)],
            )],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateId { id: 1, .. }));

        let err = GridIndex::build(
            unit_grid(2),
            [(RelationId::from("E"), vec![]), (RelationId::from("E"), vec![])],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateRelation(_)));
    }

    #[test]
    fn unknown_relation_is_an_error() {
        let idx = GridIndex::build(unit_grid(2), [(RelationId::from("E"), vec![])]).unwrap();
        assert!(matches!(
            idx.count(BlockId::new(0, 0), &"F".into()),
            Err(Error::UnknownRelation(_))
        ));
    }

    #[test]
    fn counts_match_direct_assignment() {
        let g = 16;
        let geometry = unit_grid(g);
        let pts = random_points(5000, 1, geometry.extent());
        let idx = GridIndex::build(geometry, [(RelationId::from("E"), pts.clone())]).unwrap();
        let rel = idx.relation(&"E".into()).unwrap();

        let mut oracle = vec![0usize; g * g];
        for p in &pts {
            let col = ((p.x * g as f64).floor() as usize).min(g - 1);
            let row = ((p.y * g as f64).floor() as usize).min(g - 1);
            oracle[row * g + col] += 1;
        }
        let mut total = 0;
        for b in idx.geometry().blocks() {
            assert_eq!(rel.count(b), oracle[idx.geometry().linear(b)], "{b}");
            assert_eq!(rel.count(b), rel.bucket(b).len());
            total += rel.count(b);
        }
        assert_eq!(total, 5000);
    }

    #[test]
    fn locate_examples() {
        let geometry = unit_grid(2);
        assert_eq!(geometry.locate((0.25, 0.75)).unwrap(), BlockId::new(1, 0));
        // Interior boundaries go to the higher cell, the far edge stays put.
        assert_eq!(geometry.locate((0.5, 0.5)).unwrap(), BlockId::new(1, 1));
        assert_eq!(geometry.locate((0.5, 0.0)).unwrap(), BlockId::new(0, 1));
        assert_eq!(geometry.locate((1.0, 1.0)).unwrap(), BlockId::new(1, 1));
        assert!(geometry.locate((1.0001, 0.5)).is_err());
    }

    #[test]
    fn locate_agrees_with_containment() {
        let geometry =
            GridGeometry::new(Rect::new(-3.0, 2.0, 7.0, 12.0), 7).unwrap();
        let pts = random_points(1000, 2, geometry.extent());
        for p in pts {
            let b = geometry.locate(p).unwrap();
            let containing: Vec<BlockId> = geometry
                .blocks()
                .filter(|&c| {
                    let r = geometry.block_rect(c);
                    let last_col = c.col as usize == geometry.resolution() - 1;
                    let last_row = c.row as usize == geometry.resolution() - 1;
                    p.x >= r.x_min
                        && (p.x < r.x_max || (last_col && p.x <= r.x_max))
                        && p.y >= r.y_min
                        && (p.y < r.y_max || (last_row && p.y <= r.y_max))
                })
                .collect();
            assert_eq!(containing, vec![b]);
            assert!(geometry.block_rect(b).contains(p));
        }
    }

    #[test]
    fn degenerate_grid_orders() {
        let geometry = unit_grid(1);
        for metric_order in [geometry.blocks_by_mindist((5.0, 5.0)), geometry.blocks_by_maxdist((0.3, 0.1))] {
            let v: Vec<_> = metric_order.map(|o| o.block).collect();
            assert_eq!(v, vec![BlockId::new(0, 0)]);
        }
    }

    #[test]
    fn containing_block_comes_first_by_mindist() {
        let geometry = unit_grid(8);
        let first = geometry.blocks_by_mindist((0.33, 0.61)).next().unwrap();
        assert_eq!(first.dist, 0.0);
        assert_eq!(first.block, geometry.locate((0.33, 0.61)).unwrap());
    }

    #[test]
    fn center_focal_ties_emit_in_row_col_order() {
        let geometry = unit_grid(4);
        let first: Vec<_> = geometry
            .blocks_by_maxdist((0.5, 0.5))
            .take(4)
            .map(|o| o.block)
            .collect();
        assert_eq!(
            first,
            vec![
                BlockId::new(1, 1),
                BlockId::new(1, 2),
                BlockId::new(2, 1),
                BlockId::new(2, 2)
            ]
        );
    }

    #[test]
    fn orderings_match_full_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [1, 2, 3, 8, 13] {
            let geometry = GridGeometry::new(Rect::new(-1.0, 0.0, 4.0, 2.0), g).unwrap();
            for _ in 0..40 {
                // Focal points both inside and outside the extent.
                let focal = Coord::new(rng.random_range(-4.0..7.0), rng.random_range(-3.0..5.0));
                for metric in [Metric::MinDist, Metric::MaxDist] {
                    let expected = full_sort(&geometry, focal, metric);
                    let got: Vec<_> = BlockOrder::new(&geometry, focal, metric).collect();
                    assert_eq!(got, expected, "g={g} focal={focal} {metric:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn orderings_are_sorted_permutations(
            g in 1usize..12, fx in -0.5..1.5f64, fy in -0.5..1.5f64,
        ) {
            let geometry = unit_grid(g);
            for order in [geometry.blocks_by_mindist((fx, fy)), geometry.blocks_by_maxdist((fx, fy))] {
                let v: Vec<_> = order.collect();
                prop_assert_eq!(v.len(), g * g);
                prop_assert!(v.windows(2).all(|w| w[0].dist <= w[1].dist));
                let distinct: HashSet<_> = v.iter().map(|o| o.block).collect();
                prop_assert_eq!(distinct.len(), g * g);
            }
        }

        #[test]
        fn bucketed_points_locate_back(seed in 0u64..1000, g in 1usize..20) {
            let geometry = unit_grid(g);
            let pts = random_points(200, seed, geometry.extent());
            let idx = GridIndex::build(geometry, [(RelationId::from("E"), pts)]).unwrap();
            let rel = idx.relation(&"E".into()).unwrap();
            for b in idx.geometry().blocks() {
                for p in rel.bucket(b) {
                    prop_assert_eq!(idx.locate(p).unwrap(), b);
                }
            }
        }
    }
}
