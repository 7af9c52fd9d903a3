//! Fixtures shared by the criterion benchmarks.

use twoknn_core::datagen::{gen_clustered, gen_uniform};
use twoknn_core::{Coord, GridGeometry, GridIndex, Point, Rect, RelationId};

pub const SIDE: f64 = 10_000.0;

pub fn extent() -> Rect {
    Rect::new(0.0, 0.0, SIDE, SIDE)
}

pub fn uniform(n: usize, seed: u64) -> Vec<Point> {
    gen_uniform(n, &extent(), seed)
}

/// `clusters` discs of radius `SIDE / 40` with `per_cluster` points each.
pub fn clustered(clusters: usize, per_cluster: usize, seed: u64) -> Vec<Point> {
    gen_clustered(clusters, per_cluster, SIDE / 40.0, &extent(), seed)
        .expect("clusters fit in the extent")
        .points
}

/// Index over the fixed square with the default resolution for the
/// largest relation.
pub fn index(relations: Vec<(&str, Vec<Point>)>) -> GridIndex {
    let n_max = relations.iter().map(|(_, p)| p.len()).max().unwrap_or(0);
    let geometry = GridGeometry::new(extent(), GridGeometry::default_resolution(n_max)).expect("valid grid");
    let named = relations.into_iter().map(|(n, p)| (RelationId::from(n), p)).collect::<Vec<_>>();
    GridIndex::build(geometry, named).expect("points inside the extent")
}

pub fn center() -> Coord {
    Coord::new(SIDE / 2.0, SIDE / 2.0)
}
