//! Seeded synthetic point sets and the plain-text point file format.
//!
//! Files hold one point per line as `id,x,y`, without a header. Coordinates
//! are written with Rust's shortest round-trip formatting, so reading a
//! written file reproduces the points bit for bit.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{dist, Coord, Point, Rect};

/// Center placement attempts allowed per requested cluster.
const ATTEMPTS_PER_CLUSTER: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GenKind {
    Uniform {
        n: usize,
    },
    /// Non-overlapping discs of `radius`, each holding `per_cluster` points.
    Clustered {
        clusters: usize,
        per_cluster: usize,
        radius: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub extent: Rect,
    pub seed: u64,
}

impl GenSpec {
    pub fn uniform(n: usize, extent: Rect, seed: u64) -> Self {
        Self {
            kind: GenKind::Uniform { n },
            extent,
            seed,
        }
    }

    pub fn clustered(clusters: usize, per_cluster: usize, radius: f64, extent: Rect, seed: u64) -> Self {
        Self {
            kind: GenKind::Clustered {
                clusters,
                per_cluster,
                radius,
            },
            extent,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        match self.kind {
            GenKind::Uniform { n } => n,
            GenKind::Clustered {
                clusters,
                per_cluster,
                ..
            } => clusters * per_cluster,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn generate(&self) -> Result<Vec<Point>> {
        match self.kind {
            GenKind::Uniform { n } => Ok(gen_uniform(n, &self.extent, self.seed)),
            GenKind::Clustered {
                clusters,
                per_cluster,
                radius,
            } => gen_clustered(clusters, per_cluster, radius, &self.extent, self.seed).map(|c| c.points),
        }
    }
}

fn sample(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo < hi {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// `n` points uniform over `extent`, with ids `0..n`.
pub fn gen_uniform(n: usize, extent: &Rect, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n as u64)
        .map(|id| {
            let x = sample(&mut rng, extent.x_min, extent.x_max);
            let y = sample(&mut rng, extent.y_min, extent.y_max);
            Point::new(id, x, y)
        })
        .collect()
}

/// Clustered points with the centers they were drawn around.
#[derive(Clone, Debug, PartialEq)]
pub struct Clusters {
    pub centers: Vec<Coord>,
    pub radius: f64,
    /// Points of cluster `i` occupy `points[i * per_cluster..(i + 1) * per_cluster]`.
    pub points: Vec<Point>,
}

/// `clusters` discs of `radius` inside `extent`, centers at least
/// `2 * radius` apart, each with `per_cluster` points uniform over its disc.
pub fn gen_clustered(
    clusters: usize,
    per_cluster: usize,
    radius: f64,
    extent: &Rect,
    seed: u64,
) -> Result<Clusters> {
    if clusters == 0 {
        return Err(Error::InvalidSpec("at least one cluster is required".into()));
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvalidSpec(format!("invalid cluster radius {radius}")));
    }
    let placement_error = Error::ClusterPlacement {
        clusters,
        radius,
        attempts: clusters * ATTEMPTS_PER_CLUSTER,
    };
    if 2.0 * radius > extent.width() || 2.0 * radius > extent.height() {
        return Err(placement_error);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Coord> = Vec::with_capacity(clusters);
    let mut attempts = 0;
    while centers.len() < clusters {
        if attempts == clusters * ATTEMPTS_PER_CLUSTER {
            return Err(placement_error);
        }
        attempts += 1;
        let c = Coord::new(
            sample(&mut rng, extent.x_min + radius, extent.x_max - radius),
            sample(&mut rng, extent.y_min + radius, extent.y_max - radius),
        );
        if centers.iter().all(|&o| dist(o, c) >= 2.0 * radius) {
            centers.push(c);
        }
    }

    let mut points = Vec::with_capacity(clusters * per_cluster);
    for c in &centers {
        for _ in 0..per_cluster {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = TAU * rng.random::<f64>();
            let x = (c.x + r * theta.cos()).clamp(extent.x_min, extent.x_max);
            let y = (c.y + r * theta.sin()).clamp(extent.y_min, extent.y_max);
            points.push(Point::new(points.len() as u64, x, y));
        }
    }
    Ok(Clusters {
        centers,
        radius,
        points,
    })
}

pub fn write_points(path: impl AsRef<Path>, points: &[Point]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for p in points {
        writeln!(w, "{},{},{}", p.id, p.x, p.y)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_points(path: impl AsRef<Path>) -> Result<Vec<Point>> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut points = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse_error = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [id, x, y] = fields[..] else {
            return Err(parse_error(format!("expected `id,x,y`, got `{line}`")));
        };
        let id = id
            .parse()
            .map_err(|e| parse_error(format!("bad id `{id}`: {e}")))?;
        let x: f64 = x
            .parse()
            .map_err(|e| parse_error(format!("bad x `{x}`: {e}")))?;
        let y: f64 = y
            .parse()
            .map_err(|e| parse_error(format!("bad y `{y}`: {e}")))?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(parse_error("coordinates must be finite".into()));
        }
        points.push(Point::new(id, x, y));
    }
    Ok(points)
}
