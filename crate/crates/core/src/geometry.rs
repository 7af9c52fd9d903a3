//! Euclidean primitives between locations and axis-aligned blocks.
//!
//! All comparisons against these values happen in the callers. The functions
//! here are written so that, for any location `q` inside a rectangle `r`,
//! `mindist(p, r) <= dist(p, q) <= maxdist(p, r)` holds exactly in floating
//! point: each is built from the same per-axis differences, and IEEE rounding
//! is monotone.

use std::fmt;

/// Identifier of a point within its relation.
pub type PointId = u64;

/// A bare location in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Coord {
    pub x: f64,
    pub y: f64,
}

impl Coord {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<(f64, f64)> for Coord {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An identified data point; the atom of every relation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub id: PointId,
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(id: PointId, x: f64, y: f64) -> Self {
        Self { id, x, y }
    }

    #[inline]
    pub fn coord(&self) -> Coord {
        Coord::new(self.x, self.y)
    }
}

impl From<Point> for Coord {
    #[inline]
    fn from(p: Point) -> Self {
        p.coord()
    }
}

impl From<&Point> for Coord {
    #[inline]
    fn from(p: &Point) -> Self {
        p.coord()
    }
}

/// Axis-aligned rectangle, closed on all sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    /// Builds a rectangle, normalizing swapped bounds.
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self {
            x_min: x_min.min(x_max),
            y_min: y_min.min(y_max),
            x_max: x_min.max(x_max),
            y_max: y_min.max(y_max),
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn diagonal(&self) -> f64 {
        let (w, h) = (self.width(), self.height());
        (w * w + h * h).sqrt()
    }

    pub fn center(&self) -> Coord {
        Coord::new(
            self.x_min + 0.5 * self.width(),
            self.y_min + 0.5 * self.height(),
        )
    }

    pub fn contains(&self, p: impl Into<Coord>) -> bool {
        let p = p.into();
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn corners(&self) -> [Coord; 4] {
        [
            Coord::new(self.x_min, self.y_min),
            Coord::new(self.x_max, self.y_min),
            Coord::new(self.x_min, self.y_max),
            Coord::new(self.x_max, self.y_max),
        ]
    }
}

/// Euclidean distance.
#[inline]
pub fn dist(p: impl Into<Coord>, q: impl Into<Coord>) -> f64 {
    let (p, q) = (p.into(), q.into());
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    (dx * dx + dy * dy).sqrt()
}

/// Smallest distance from `p` to any location of `r`; zero inside or on `r`.
#[inline]
pub fn mindist(p: impl Into<Coord>, r: &Rect) -> f64 {
    let p = p.into();
    let dx = if p.x < r.x_min {
        r.x_min - p.x
    } else if p.x > r.x_max {
        p.x - r.x_max
    } else {
        0.0
    };
    let dy = if p.y < r.y_min {
        r.y_min - p.y
    } else if p.y > r.y_max {
        p.y - r.y_max
    } else {
        0.0
    };
    (dx * dx + dy * dy).sqrt()
}

/// Largest distance from `p` to any location of `r`: the distance to the
/// farthest corner, found by enumerating all four.
#[inline]
pub fn maxdist(p: impl Into<Coord>, r: &Rect) -> f64 {
    let p = p.into();
    r.corners()
        .into_iter()
        .map(|c| dist(p, c))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit() -> Rect {
        Rect::new(0.0, 0.0, 1.0, 1.0)
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist((0.0, 0.0), (3.0, 4.0)), 5.0);
        assert_eq!(dist((7.0, -2.0), (7.0, -2.0)), 0.0);
    }

    #[test]
    fn dist_matches_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let (ax, ay, bx, by): (f64, f64, f64, f64) = (
                rng.random_range(-1e3..1e3),
                rng.random_range(-1e3..1e3),
                rng.random_range(-1e3..1e3),
                rng.random_range(-1e3..1e3),
            );
            let expected = ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt();
            assert_eq!(
                dist((ax, ay), (bx, by)).to_bits(),
                expected.to_bits(),
                "({ax},{ay}) ({bx},{by})"
            );
        }
    }

    #[test]
    fn mindist_examples() {
        assert_eq!(mindist((0.5, 0.5), &unit()), 0.0);
        assert_eq!(mindist((0.0, 0.0), &Rect::new(1.0, 0.0, 2.0, 1.0)), 1.0);
        assert_eq!(mindist((-3.0, -4.0), &unit()), 5.0);
    }

    #[test]
    fn mindist_agrees_with_dense_boundary_sample() {
        // Minimum over 4 * 4000 boundary samples of the unit square.
        let p = Coord::new(-3.0, -4.0);
        let n = 4000;
        let mut best = f64::INFINITY;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            for q in [(t, 0.0), (t, 1.0), (0.0, t), (1.0, t)] {
                best = best.min(dist(p, q));
            }
        }
        assert!((mindist(p, &unit()) - best).abs() < 1e-12);
        assert_eq!(best, 5.0);
    }

    #[test]
    fn maxdist_examples() {
        assert_eq!(maxdist((0.0, 0.0), &unit()), 2f64.sqrt());
        let r = Rect::new(0.0, 0.0, 2.0, 2.0);
        assert_eq!(maxdist(r.center(), &r), 2f64.sqrt());
    }

    #[test]
    fn maxdist_matches_corner_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let r = Rect::new(
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
            );
            let p = Coord::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
            let corners = [
                (r.x_min, r.y_min),
                (r.x_min, r.y_max),
                (r.x_max, r.y_min),
                (r.x_max, r.y_max),
            ];
            let oracle = corners
                .iter()
                .map(|&(x, y)| ((p.x - x).powi(2) + (p.y - y).powi(2)).sqrt())
                .fold(f64::MIN, f64::max);
            assert_eq!(maxdist(p, &r), oracle);
        }
    }

    fn rect_strategy() -> impl Strategy<Value = Rect> {
        (-50.0..50.0f64, -50.0..50.0f64, 0.0..20.0f64, 0.0..20.0f64)
            .prop_map(|(x, y, w, h)| Rect::new(x, y, x + w, y + h))
    }

    proptest! {
        #[test]
        fn bounds_sandwich_inner_points(
            r in rect_strategy(),
            px in -100.0..100.0f64, py in -100.0..100.0f64,
            u in 0.0..=1.0f64, v in 0.0..=1.0f64,
        ) {
            let p = Coord::new(px, py);
            let q = Coord::new(r.x_min + u * r.width(), r.y_min + v * r.height());
            prop_assume!(r.contains(q));
            let (lo, hi) = (mindist(p, &r), maxdist(p, &r));
            prop_assert!(lo <= dist(p, q));
            prop_assert!(dist(p, q) <= hi);
            prop_assert!(lo <= hi);
            prop_assert!(hi <= lo + r.diagonal() + 1e-9);
        }

        #[test]
        fn degenerate_rect_collapses_bounds(px in -10.0..10.0f64, py in -10.0..10.0f64,
                                             x in -10.0..10.0f64, y in -10.0..10.0f64) {
            let r = Rect::new(x, y, x, y);
            prop_assert_eq!(mindist((px, py), &r), maxdist((px, py), &r));
        }
    }
}
