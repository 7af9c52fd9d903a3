#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoknn_core::{GridIndex, Point, RelationId};

pub type Pt = (u64, f64, f64);

/// Point layouts used by the randomized suites. Lattice and duplicate layouts
/// produce many exact distance ties.
#[derive(Clone, Copy, Debug)]
pub enum Layout {
    Uniform,
    Blobs,
    Lattice,
    Duplicates,
}

pub fn layout_for(rng: &mut ChaCha8Rng) -> Layout {
    match rng.random_range(0..4) {
        0 => Layout::Uniform,
        1 => Layout::Blobs,
        2 => Layout::Lattice,
        _ => Layout::Duplicates,
    }
}

pub fn points(rng: &mut ChaCha8Rng, n: usize, layout: Layout) -> Vec<Pt> {
    let centers: Vec<(f64, f64)> = (0..rng.random_range(1..5))
        .map(|_| (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect();
    let pool: Vec<(f64, f64)> = (0..(n / 3).max(1))
        .map(|_| (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect();
    (0..n as u64)
        .map(|id| {
            let (x, y) = match layout {
                Layout::Uniform => (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)),
                Layout::Blobs => {
                    let c = centers[rng.random_range(0..centers.len())];
                    (c.0 + rng.random_range(-6.0..6.0), c.1 + rng.random_range(-6.0..6.0))
                }
                Layout::Lattice => (rng.random_range(0..20) as f64 * 5.0, rng.random_range(0..20) as f64 * 5.0),
                Layout::Duplicates => pool[rng.random_range(0..pool.len())],
            };
            (id, x, y)
        })
        .collect()
}

pub fn focal(rng: &mut ChaCha8Rng) -> (f64, f64) {
    if rng.random_bool(0.3) {
        (rng.random_range(0..20) as f64 * 5.0, rng.random_range(0..20) as f64 * 5.0)
    } else {
        (rng.random_range(-10.0..110.0), rng.random_range(-10.0..110.0))
    }
}

pub fn to_points(pts: &[Pt]) -> Vec<Point> {
    pts.iter().map(|&(id, x, y)| Point::new(id, x, y)).collect()
}

pub fn index(relations: &[(&str, &[Pt])], grid: Option<usize>) -> GridIndex {
    GridIndex::build_fitted(
        relations
            .iter()
            .map(|(name, pts)| (RelationId::from(*name), to_points(pts)))
            .collect(),
        grid,
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A relation of `n` points in a randomly chosen layout.
pub fn relation(rng: &mut ChaCha8Rng, n: usize) -> Vec<Pt> {
    let layout = layout_for(rng);
    points(rng, n, layout)
}

/// A relation with a random size in `sizes` and a random layout.
pub fn random_relation(rng: &mut ChaCha8Rng, sizes: std::ops::Range<usize>) -> Vec<Pt> {
    let n = rng.random_range(sizes);
    relation(rng, n)
}
