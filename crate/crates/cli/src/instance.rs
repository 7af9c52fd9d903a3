//! Small random query instances for verification, and shrinking of the ones
//! on which plans disagree.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoknn_core::datagen::write_points;
use twoknn_core::{Coord, GridIndex, JoinFirst, Point, RelationId};

use crate::plans::{run_plan, Params, QueryClass, ResultSet};

/// Side of the square random instances are drawn in.
const SIDE: f64 = 100.0;

/// Query parameters fixed on the command line; the rest are drawn at random.
#[derive(Clone, Copy, Debug, Default)]
pub struct Fixed {
    pub k_join: Option<usize>,
    pub k_select: Option<usize>,
    pub k1: Option<usize>,
    pub k2: Option<usize>,
    pub k_ab: Option<usize>,
    pub k_cb: Option<usize>,
    pub k_bc: Option<usize>,
    pub first: Option<JoinFirst>,
    pub grid: Option<usize>,
    pub max_points: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub class: QueryClass,
    /// Relations named `A`, `B`, `C`, as many as the class reads.
    pub relations: Vec<Vec<Point>>,
    pub params: Params,
    pub grid: Option<usize>,
}

impl Instance {
    pub fn index(&self) -> Result<GridIndex> {
        let named = self
            .class
            .relations()
            .iter()
            .zip(&self.relations)
            .map(|(name, pts)| (RelationId::from(*name), pts.clone()))
            .collect();
        Ok(GridIndex::build_fitted(named, self.grid)?)
    }

    /// Draws a random instance of `class`. Point sets mix uniform scatter,
    /// tight blobs and integer lattices, so distance ties are common.
    pub fn random(class: QueryClass, seed: u64, fixed: &Fixed) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let max = fixed.max_points.unwrap_or(400).max(1);
        let relations = class
            .relations()
            .iter()
            .map(|_| {
                let n = rng.random_range(1..=max);
                random_points(&mut rng, n)
            })
            .collect();
        let k_join = fixed.k_join.unwrap_or_else(|| rng.random_range(1..=16));
        let k_select = fixed.k_select.unwrap_or_else(|| rng.random_range(1..=16));
        let k1 = fixed.k1.unwrap_or_else(|| rng.random_range(1..=16));
        let k2 = fixed.k2.unwrap_or_else(|| k1 << rng.random_range(0..=6));
        let k_ab = fixed.k_ab.unwrap_or_else(|| rng.random_range(1..=12));
        let k_cb = fixed.k_cb.unwrap_or_else(|| rng.random_range(1..=12));
        let k_bc = fixed.k_bc.unwrap_or_else(|| rng.random_range(1..=12));
        let focal = random_coord(&mut rng);
        let focal2 = Coord::new(
            focal.x + rng.random_range(-20.0..20.0),
            focal.y + rng.random_range(-20.0..20.0),
        );
        let first = fixed
            .first
            .unwrap_or(if rng.random_bool(0.5) { JoinFirst::Ab } else { JoinFirst::Cb });
        let grid = fixed
            .grid
            .or_else(|| [None, Some(1), Some(3), Some(8)][rng.random_range(0..4)]);
        Self {
            class,
            relations,
            params: Params {
                k_join,
                k_select,
                k1,
                k2,
                k_ab,
                k_cb,
                k_bc,
                focal,
                focal2,
                first,
                cache: true,
            },
            grid,
        }
    }

    /// Results of every plan, in the order given.
    pub fn evaluate(&self, plans: &[String]) -> Result<Vec<ResultSet>> {
        let index = self.index()?;
        plans
            .iter()
            .map(|plan| Ok(run_plan(&index, self.class, plan, &self.params)?.result))
            .collect()
    }

    pub fn plans_agree(&self, plans: &[String]) -> Result<bool> {
        let results = self.evaluate(plans)?;
        Ok(results.windows(2).all(|w| w[0] == w[1]))
    }

    /// Greedily drops chunks of points, halving the chunk size, for as long
    /// as the plans still disagree.
    pub fn shrink(mut self, plans: &[String]) -> Result<Self> {
        for r in 0..self.relations.len() {
            let mut chunk = self.relations[r].len().div_ceil(2);
            while chunk > 0 {
                let mut start = 0;
                while start < self.relations[r].len() {
                    if self.relations[r].len() <= 1 {
                        break;
                    }
                    let mut candidate = self.clone();
                    let end = (start + chunk).min(candidate.relations[r].len());
                    candidate.relations[r].drain(start..end);
                    if !candidate.relations[r].is_empty() && !candidate.plans_agree(plans)? {
                        self = candidate;
                    } else {
                        start += chunk;
                    }
                }
                chunk /= 2;
            }
        }
        Ok(self)
    }

    /// Writes one point file per relation and a `query.txt` holding the
    /// arguments that reproduce the run.
    pub fn write(&self, dir: &Path, plans: &[String]) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut args = format!("--query {} {}", self.class, self.params.describe(self.class));
        if let Some(g) = self.grid {
            args.push_str(&format!(" --grid {g}"));
        }
        for (name, pts) in self.class.relations().iter().zip(&self.relations) {
            let file = format!("{name}.csv");
            write_points(dir.join(&file), pts)?;
            args.push_str(&format!(" --rel-{} {}", name.to_lowercase(), dir.join(&file).display()));
        }
        let text = format!("plans: {}\nargs: {args}\n", plans.join(","));
        fs::write(dir.join("query.txt"), text)?;
        Ok(())
    }
}

fn random_coord(rng: &mut ChaCha8Rng) -> Coord {
    Coord::new(rng.random_range(0.0..=SIDE), rng.random_range(0.0..=SIDE))
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    match rng.random_range(0..3) {
        0 => (0..n as u64)
            .map(|id| {
                let c = random_coord(rng);
                Point::new(id, c.x, c.y)
            })
            .collect(),
        1 => {
            let centers: Vec<Coord> = (0..rng.random_range(1..=5)).map(|_| random_coord(rng)).collect();
            (0..n as u64)
                .map(|id| {
                    let c = centers[rng.random_range(0..centers.len())];
                    let x = (c.x + rng.random_range(-5.0..5.0)).clamp(0.0, SIDE);
                    let y = (c.y + rng.random_range(-5.0..5.0)).clamp(0.0, SIDE);
                    Point::new(id, x, y)
                })
                .collect()
        }
        _ => (0..n as u64)
            .map(|id| {
                let x = rng.random_range(0..=20) as f64 * 5.0;
                let y = rng.random_range(0..=20) as f64 * 5.0;
                Point::new(id, x, y)
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_instances_are_reproducible() {
        let fixed = Fixed::default();
        for class in [QueryClass::SelectJoinInner, QueryClass::Chained, QueryClass::TwoSelect] {
            let a = Instance::random(class, 5, &fixed);
            assert_eq!(a, Instance::random(class, 5, &fixed));
            assert_eq!(a.relations.len(), class.relations().len());
            assert!(a.index().is_ok());
        }
    }

    #[test]
    fn shrinking_keeps_the_disagreement() {
        let plans = vec!["baseline".to_string(), "invalid-inner-pushdown".to_string()];
        let fixed = Fixed {
            k_select: Some(2),
            ..Fixed::default()
        };
        let found = (0..200)
            .map(|s| Instance::random(QueryClass::SelectJoinInner, s, &fixed))
            .find(|i| !i.plans_agree(&plans).unwrap())
            .expect("pushing the inner select below the join changes results");
        let before: usize = found.relations.iter().map(Vec::len).sum();
        let small = found.shrink(&plans).unwrap();
        assert!(!small.plans_agree(&plans).unwrap());
        assert!(small.relations.iter().map(Vec::len).sum::<usize>() <= before);
    }
}
