//! Timing sweeps over synthetic data.
//!
//! Every sweep builds its relations with [`twoknn_core::datagen`] inside a
//! fixed square, times each plan with [`median_time`], and reports one
//! [`Row`] per sweep value and plan. Sizes are multiplied by
//! [`Settings::scale`] so the same sweeps can run as quick smoke tests.

use std::fmt;
use std::io::Write;
use std::time::Duration;

use anyhow::Result;
use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoknn_core::datagen::{gen_clustered, gen_uniform};
use twoknn_core::multi_join::{advise_join_order, JoinOrderAdvice};
use twoknn_core::two_select::{baseline_two_select, two_knn_select};
use twoknn_core::{Coord, GridGeometry, GridIndex, JoinFirst, Point, Rect, RelationId};

use crate::plans::{run_plan, Params, QueryClass};
use crate::timing::median_time;

pub const EXTENT_SIDE: f64 = 10_000.0;

pub fn extent() -> Rect {
    Rect::new(0.0, 0.0, EXTENT_SIDE, EXTENT_SIDE)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Settings {
    pub reps: usize,
    pub scale: f64,
    pub seed: u64,
    pub grid: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            reps: 3,
            scale: 1.0,
            seed: 1,
            grid: None,
        }
    }
}

impl Settings {
    fn size(&self, n: usize) -> usize {
        ((n as f64 * self.scale).round() as usize).max(1)
    }

    fn seed(&self, salt: u64) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt)
    }

    fn resolution(&self, n: usize) -> usize {
        self.grid.unwrap_or_else(|| GridGeometry::default_resolution(n))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub sweep_value: f64,
    pub plan: String,
    pub median: Duration,
    pub cardinality: usize,
    pub prune: u64,
}

pub const CSV_HEADER: &str = "sweep_value,plan,median_time,result_cardinality,prune_counter";

pub fn write_csv(mut w: impl Write, rows: &[Row]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:.9},{},{}",
            r.sweep_value,
            r.plan,
            r.median.as_secs_f64(),
            r.cardinality,
            r.prune
        )?;
    }
    Ok(())
}

/// Median time of `plan`, or `None` when no row for it exists.
pub fn median_of(rows: &[Row], sweep_value: f64, plan: &str) -> Option<Duration> {
    rows.iter()
        .find(|r| r.sweep_value == sweep_value && r.plan == plan)
        .map(|r| r.median)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    /// Clustered outer relation of doubling size, uniform inner, inner select.
    OuterSize,
    /// Uniform outer relation from 1k to 200k points; Counting vs Block-Marking.
    Crossover,
    /// Unchained joins with `A` holding `c + d` clusters and `C` holding `c`.
    ClusterDifference,
    /// Chained joins with few distinct `B` neighbors; cached vs uncached.
    Cache,
    /// Chained joins with a growing number of `B` clusters away from `A`.
    BClusters,
    /// Two selects with `k1 = 10` and `k2 = k1 * 2^i`.
    KRatio,
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

pub fn run_sweep(sweep: Sweep, s: &Settings) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    match sweep {
        Sweep::OuterSize => {
            for n in [25_000, 50_000, 100_000, 200_000] {
                rows.extend(outer_size_point(s.size(n), s.size(100_000), 20, 8, s)?);
            }
        }
        Sweep::Crossover => {
            for n in [1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000, 200_000] {
                rows.extend(crossover_point(s.size(n), s.size(100_000), 8, s)?);
            }
        }
        Sweep::ClusterDifference => {
            for delta in 1..=10 {
                rows.extend(cluster_difference_point(2, delta, s.size(4_000), s.size(100_000), 8, s)?.rows);
            }
        }
        Sweep::Cache => {
            for n in [12_500, 25_000, 50_000] {
                rows.extend(cache_point(s.size(n), s.size(2_000), s.size(100_000), 4, 16, s)?.rows);
            }
        }
        Sweep::BClusters => {
            for clusters in [2, 5, 10] {
                rows.extend(b_clusters_point(clusters, s.size(8_000), s.size(2_000), s.size(100_000), 8, s)?);
            }
        }
        Sweep::KRatio => rows = k_ratio_sweep(s.size(500_000), 10, 0..=8, 500, s)?,
    }
    Ok(rows)
}

fn named(relations: Vec<(&str, Vec<Point>)>) -> Vec<(RelationId, Vec<Point>)> {
    relations.into_iter().map(|(n, p)| (RelationId::from(n), p)).collect()
}

fn build(relations: Vec<(&str, Vec<Point>)>, resolution: usize) -> Result<GridIndex> {
    let geometry = GridGeometry::new(extent(), resolution)?;
    Ok(GridIndex::build(geometry, named(relations))?)
}

fn random_focal(seed: u64) -> Coord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Coord::new(
        rng.random_range(0.0..EXTENT_SIDE),
        rng.random_range(0.0..EXTENT_SIDE),
    )
}

fn time_plans(
    index: &GridIndex,
    class: QueryClass,
    plans: &[(&str, &str, Params)],
    sweep_value: f64,
    reps: usize,
) -> Result<Vec<Row>> {
    plans
        .iter()
        .map(|(label, plan, params)| {
            let (median, run) = median_time(reps, || run_plan(index, class, plan, params));
            let run = run?;
            Ok(Row {
                sweep_value,
                plan: label.to_string(),
                median,
                cardinality: run.result.len(),
                prune: run.prune_counter(class),
            })
        })
        .collect()
}

/// Inner select over a clustered outer relation. The focal point sits at
/// the center of one outer cluster, where the most outer points contribute.
pub fn outer_size_point(outer: usize, inner: usize, clusters: usize, k: usize, s: &Settings) -> Result<Vec<Row>> {
    let per_cluster = outer.div_ceil(clusters);
    let a = gen_clustered(clusters, per_cluster, EXTENT_SIDE / 20.0, &extent(), s.seed(1))?;
    let focal = a.centers[0];
    let b = gen_uniform(inner, &extent(), s.seed(2));
    let index = build(vec![("A", a.points), ("B", b)], s.resolution(outer.max(inner)))?;
    let params = Params {
        k_join: k,
        k_select: k,
        focal,
        ..Params::default()
    };
    time_plans(
        &index,
        QueryClass::SelectJoinInner,
        &[
            ("baseline", "baseline", params),
            ("counting", "counting", params),
            ("block-marking", "block-marking", params),
        ],
        (per_cluster * clusters) as f64,
        s.reps,
    )
}

/// Counting against Block-Marking over uniform data. The grid resolution
/// follows the outer relation, so blocks hold about as many outer points
/// whatever its size.
pub fn crossover_point(outer: usize, inner: usize, k: usize, s: &Settings) -> Result<Vec<Row>> {
    let a = gen_uniform(outer, &extent(), s.seed(3));
    let b = gen_uniform(inner, &extent(), s.seed(4));
    let index = build(vec![("A", a), ("B", b)], s.resolution(outer))?;
    let params = Params {
        k_join: k,
        k_select: k,
        focal: random_focal(s.seed(5)),
        ..Params::default()
    };
    time_plans(
        &index,
        QueryClass::SelectJoinInner,
        &[("counting", "counting", params), ("block-marking", "block-marking", params)],
        outer as f64,
        s.reps,
    )
}

pub struct AdvisedRows {
    pub rows: Vec<Row>,
    pub advice: JoinOrderAdvice,
}

/// Unchained joins where `A` has `c + delta` clusters and `C` has `c`, all
/// clusters of `per_cluster` points, equal radius and pairwise disjoint;
/// `B` is uniform.
pub fn cluster_difference_point(
    c: usize,
    delta: usize,
    per_cluster: usize,
    b_size: usize,
    k: usize,
    s: &Settings,
) -> Result<AdvisedRows> {
    let total = 2 * c + delta;
    let clusters = gen_clustered(total, per_cluster, EXTENT_SIDE / 40.0, &extent(), s.seed(6 + delta as u64))?;
    let (c_points, a_points) = clusters.points.split_at(c * per_cluster);
    let b = gen_uniform(b_size, &extent(), s.seed(7));
    let index = build(
        vec![("A", a_points.to_vec()), ("B", b), ("C", c_points.to_vec())],
        s.resolution(b_size.max(total * per_cluster)),
    )?;
    let params = Params {
        k_ab: k,
        k_cb: k,
        ..Params::default()
    };
    let ab = Params {
        first: JoinFirst::Ab,
        ..params
    };
    let cb = Params {
        first: JoinFirst::Cb,
        ..params
    };
    let rows = time_plans(
        &index,
        QueryClass::Unchained,
        &[
            ("baseline", "baseline", params),
            ("ab-first", "block-marking", ab),
            ("cb-first", "block-marking", cb),
        ],
        delta as f64,
        s.reps,
    )?;
    let advice = advise_join_order(&index, &params.unchained())?;
    Ok(AdvisedRows { rows, advice })
}

pub struct CacheRows {
    pub rows: Vec<Row>,
    /// `(a, b)` pairs produced by the first join.
    pub pairs: usize,
    /// Distinct `b` among those pairs.
    pub distinct_b: usize,
}

/// Chained joins where a large `A` shares a small `B`, so most `b` are the
/// neighbors of many `a`.
pub fn cache_point(a_size: usize, b_size: usize, c_size: usize, k_ab: usize, k_bc: usize, s: &Settings) -> Result<CacheRows> {
    let a = gen_uniform(a_size, &extent(), s.seed(8));
    let b = gen_uniform(b_size, &extent(), s.seed(9));
    let c = gen_uniform(c_size, &extent(), s.seed(10));
    let index = build(vec![("A", a), ("B", b), ("C", c)], s.resolution(a_size.max(b_size).max(c_size)))?;
    let params = Params {
        k_ab,
        k_bc,
        ..Params::default()
    };
    let rows = time_plans(
        &index,
        QueryClass::Chained,
        &[
            ("nested-cached", "nested-cached", params),
            ("nested-uncached", "nested-uncached", params),
        ],
        a_size as f64,
        s.reps,
    )?;
    let ab = twoknn_core::operators::knn_join(&index, &"A".into(), &"B".into(), k_ab)?;
    let mut distinct = ab.inner_ids();
    distinct.dedup();
    Ok(CacheRows {
        rows,
        pairs: ab.len(),
        distinct_b: distinct.len(),
    })
}

/// Chained joins with `A` uniform over the left quarter of the square and
/// `B` made of `clusters` clusters placed in the right half; `C` is uniform.
/// Only the `B` points facing `A` are neighbors of some `a`.
pub fn b_clusters_point(
    clusters: usize,
    per_cluster: usize,
    a_size: usize,
    c_size: usize,
    k: usize,
    s: &Settings,
) -> Result<Vec<Row>> {
    let left = Rect::new(0.0, 0.0, EXTENT_SIDE / 4.0, EXTENT_SIDE);
    let right = Rect::new(EXTENT_SIDE / 2.0, 0.0, EXTENT_SIDE, EXTENT_SIDE);
    let a = gen_uniform(a_size, &left, s.seed(11));
    let b = gen_clustered(clusters, per_cluster, EXTENT_SIDE / 25.0, &right, s.seed(12 + clusters as u64))?;
    let c = gen_uniform(c_size, &extent(), s.seed(13));
    let n_max = a_size.max(clusters * per_cluster).max(c_size);
    let index = build(vec![("A", a), ("B", b.points), ("C", c)], s.resolution(n_max))?;
    let params = Params {
        k_ab: k,
        k_bc: k,
        ..Params::default()
    };
    time_plans(
        &index,
        QueryClass::Chained,
        &[
            ("join-intersection", "join-intersection", params),
            ("nested-cached", "nested-cached", params),
        ],
        clusters as f64,
        s.reps,
    )
}

/// Points per block of the grid used by the `k`-ratio sweep.
pub const K_RATIO_POINTS_PER_BLOCK: f64 = 8.0;

/// Two selects over one uniform relation with `k2 = k1 * 2^i`. Each timing
/// covers a batch of `batch` focal pairs, with `f2` at most
/// `EXTENT_SIDE / 200` from `f1` on each axis. The sweep value is `i`.
///
/// The grid holds about [`K_RATIO_POINTS_PER_BLOCK`] points per block, so
/// that the localities of small `k` values already differ in size.
pub fn k_ratio_sweep(
    n: usize,
    k1: usize,
    exponents: std::ops::RangeInclusive<u32>,
    batch: usize,
    s: &Settings,
) -> Result<Vec<Row>> {
    let points = gen_uniform(n, &extent(), s.seed(14));
    let fine = ((n as f64 / K_RATIO_POINTS_PER_BLOCK).sqrt().ceil() as usize).max(1);
    let index = build(vec![("A", points)], s.grid.unwrap_or(fine))?;
    let side = EXTENT_SIDE / 200.0;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed(15));
    let pairs: Vec<(Coord, Coord)> = (0..batch)
        .map(|_| {
            let f1 = Coord::new(
                rng.random_range(side..EXTENT_SIDE - side),
                rng.random_range(side..EXTENT_SIDE - side),
            );
            let f2 = Coord::new(f1.x + rng.random_range(-side..side), f1.y + rng.random_range(-side..side));
            (f1, f2)
        })
        .collect();

    let mut rows = Vec::new();
    for i in exponents {
        let k2 = k1 << i;
        let queries: Vec<_> = pairs
            .iter()
            .map(|&(f1, f2)| {
                Params {
                    k1,
                    k2,
                    focal: f1,
                    focal2: f2,
                    ..Params::default()
                }
                .two_select()
            })
            .collect();
        type TwoSelectPlan = fn(&GridIndex, &twoknn_core::TwoSelectQuery) -> twoknn_core::Result<twoknn_core::PlanOutput<Vec<u64>>>;
        let plans: [(&str, TwoSelectPlan); 2] = [("baseline", baseline_two_select), ("two-knn", two_knn_select)];
        for (label, plan) in plans {
            let (median, totals) = median_time(s.reps, || -> Result<(usize, u64)> {
                let mut card = 0;
                let mut blocks = 0;
                for q in &queries {
                    let out = plan(&index, q)?;
                    card += out.result.len();
                    blocks += out.stats.locality_blocks;
                }
                Ok((card, blocks))
            });
            let (cardinality, prune) = totals?;
            rows.push(Row {
                sweep_value: i as f64,
                plan: label.to_string(),
                median,
                cardinality,
                prune,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Settings {
        Settings {
            reps: 1,
            scale: 0.01,
            seed: 3,
            grid: None,
        }
    }

    #[test]
    fn equivalent_plans_report_equal_cardinalities() {
        for sweep in Sweep::value_variants() {
            let rows = run_sweep(*sweep, &tiny()).unwrap();
            assert!(!rows.is_empty(), "{sweep}");
            let mut values: Vec<f64> = rows.iter().map(|r| r.sweep_value).collect();
            values.dedup();
            for v in values {
                let cards: Vec<usize> = rows.iter().filter(|r| r.sweep_value == v).map(|r| r.cardinality).collect();
                assert!(cards.windows(2).all(|w| w[0] == w[1]), "{sweep} at {v}: {cards:?}");
            }
        }
    }

    #[test]
    fn csv_has_a_fixed_header() {
        let mut out = Vec::new();
        let row = Row {
            sweep_value: 2.0,
            plan: "two-knn".into(),
            median: Duration::from_micros(1500),
            cardinality: 4,
            prune: 9,
        };
        write_csv(&mut out, &[row]).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            format!("{CSV_HEADER}\n2,two-knn,0.001500000,4,9\n")
        );
    }
}
