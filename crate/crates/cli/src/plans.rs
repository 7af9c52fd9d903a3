//! Registry of query classes and the plans that evaluate them.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Result};
use clap::ValueEnum;
use twoknn_core::multi_join::{
    advise_join_order, chained_join_intersection, chained_nested_join, chained_right_deep,
    filtered_inner_plan, unchained_baseline, unchained_block_marking, JoinOrderAdvice,
};
use twoknn_core::operators::{
    baseline_select_join_inner, baseline_select_join_outer, invalid_inner_pushdown,
};
use twoknn_core::select_join::{block_marking_select_join, counting_select_join, outer_pushdown_select_join};
use twoknn_core::two_select::{baseline_two_select, sequential_two_select, two_knn_select};
use twoknn_core::{
    ChainedQuery, Coord, GridIndex, JoinFirst, PairSet, PlanOutput, PlanStats, PointId, RelationId,
    SelectJoinQuery, TripletSet, TwoSelectQuery, UnchainedQuery,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QueryClass {
    SelectJoinInner,
    SelectJoinOuter,
    Unchained,
    Chained,
    TwoSelect,
}

impl QueryClass {
    /// Plans accepted for this class. Plans marked invalid are not
    /// equivalent to the others and exist as negative controls.
    pub fn plans(self) -> &'static [&'static str] {
        match self {
            QueryClass::SelectJoinInner => &["baseline", "counting", "block-marking", "invalid-inner-pushdown"],
            QueryClass::SelectJoinOuter => &["baseline", "outer-pushdown"],
            QueryClass::Unchained => &["baseline", "block-marking", "advised", "invalid-filtered-inner"],
            QueryClass::Chained => &["right-deep", "join-intersection", "nested", "nested-cached", "nested-uncached"],
            QueryClass::TwoSelect => &["baseline", "two-knn", "invalid-sequential"],
        }
    }

    /// Relations the class reads, in `A, B, C` order.
    pub fn relations(self) -> &'static [&'static str] {
        match self {
            QueryClass::SelectJoinInner | QueryClass::SelectJoinOuter => &["A", "B"],
            QueryClass::Unchained | QueryClass::Chained => &["A", "B", "C"],
            QueryClass::TwoSelect => &["A"],
        }
    }

    pub fn check_plan(self, plan: &str) -> Result<()> {
        if !self.plans().contains(&plan) {
            bail!(
                "plan `{plan}` is not defined for {self}; expected one of: {}",
                self.plans().join(", ")
            );
        }
        Ok(())
    }
}

impl fmt::Display for QueryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

impl FromStr for QueryClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

/// Query parameters for every class; each class reads the ones it needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub k_join: usize,
    pub k_select: usize,
    pub k1: usize,
    pub k2: usize,
    pub k_ab: usize,
    pub k_cb: usize,
    pub k_bc: usize,
    pub focal: Coord,
    pub focal2: Coord,
    pub first: JoinFirst,
    pub cache: bool,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            k_join: 8,
            k_select: 8,
            k1: 10,
            k2: 10,
            k_ab: 8,
            k_cb: 8,
            k_bc: 8,
            focal: Coord::new(0.0, 0.0),
            focal2: Coord::new(0.0, 0.0),
            first: JoinFirst::Cb,
            cache: true,
        }
    }
}

impl Params {
    pub fn select_join(&self) -> SelectJoinQuery {
        SelectJoinQuery {
            outer: RelationId::from("A"),
            inner: RelationId::from("B"),
            k_join: self.k_join,
            k_select: self.k_select,
            focal: self.focal,
        }
    }

    pub fn unchained(&self) -> UnchainedQuery {
        UnchainedQuery {
            a: RelationId::from("A"),
            b: RelationId::from("B"),
            c: RelationId::from("C"),
            k_ab: self.k_ab,
            k_cb: self.k_cb,
        }
    }

    pub fn chained(&self) -> ChainedQuery {
        ChainedQuery {
            a: RelationId::from("A"),
            b: RelationId::from("B"),
            c: RelationId::from("C"),
            k_ab: self.k_ab,
            k_bc: self.k_bc,
        }
    }

    pub fn two_select(&self) -> TwoSelectQuery {
        TwoSelectQuery {
            relation: RelationId::from("A"),
            f1: self.focal,
            k1: self.k1,
            f2: self.focal2,
            k2: self.k2,
        }
    }

    /// Renders the parameters `class` reads, for summaries and saved instances.
    pub fn describe(&self, class: QueryClass) -> String {
        let f = |c: Coord| format!("{},{}", c.x, c.y);
        match class {
            QueryClass::SelectJoinInner | QueryClass::SelectJoinOuter => format!(
                "--kjoin {} --kselect {} --focal {}",
                self.k_join,
                self.k_select,
                f(self.focal)
            ),
            QueryClass::Unchained => format!("--kab {} --kcb {} --first {}", self.k_ab, self.k_cb, self.first),
            QueryClass::Chained => format!(
                "--kab {} --kbc {} --cache {}",
                self.k_ab,
                self.k_bc,
                if self.cache { "on" } else { "off" }
            ),
            QueryClass::TwoSelect => format!(
                "--k1 {} --k2 {} --focal {} --focal2 {}",
                self.k1,
                self.k2,
                f(self.focal),
                f(self.focal2)
            ),
        }
    }
}

/// Result of any plan.
#[derive(Clone, Debug, PartialEq)]
pub enum ResultSet {
    Pairs(PairSet),
    Triplets(TripletSet),
    Ids(Vec<PointId>),
}

impl ResultSet {
    pub fn len(&self) -> usize {
        match self {
            ResultSet::Pairs(p) => p.len(),
            ResultSet::Triplets(t) => t.len(),
            ResultSet::Ids(ids) => ids.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One comma-separated tuple per line, in sorted order.
    pub fn lines(&self) -> Vec<String> {
        match self {
            ResultSet::Pairs(p) => p.iter().map(|(a, b)| format!("{a},{b}")).collect(),
            ResultSet::Triplets(t) => t.iter().map(|(a, b, c)| format!("{a},{b},{c}")).collect(),
            ResultSet::Ids(ids) => ids.iter().map(|id| id.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanRun {
    pub result: ResultSet,
    pub stats: PlanStats,
}

impl PlanRun {
    fn from_output<T>(out: PlanOutput<T>, wrap: impl FnOnce(T) -> ResultSet) -> Self {
        Self {
            result: wrap(out.result),
            stats: out.stats,
        }
    }

    fn bare(result: ResultSet) -> Self {
        Self {
            result,
            stats: PlanStats::default(),
        }
    }

    /// The counter that best summarizes how much work the plan avoided.
    pub fn prune_counter(&self, class: QueryClass) -> u64 {
        match class {
            QueryClass::SelectJoinInner | QueryClass::SelectJoinOuter => self.stats.points_skipped,
            QueryClass::Unchained => self.stats.noncontributing_blocks,
            QueryClass::Chained => self.stats.cache_hits,
            QueryClass::TwoSelect => self.stats.locality_blocks,
        }
    }
}

/// Runs `plan` for `class` over relations `A`, `B`, `C` of `index`.
pub fn run_plan(index: &GridIndex, class: QueryClass, plan: &str, p: &Params) -> Result<PlanRun> {
    class.check_plan(plan)?;
    let run = match class {
        QueryClass::SelectJoinInner => {
            let q = p.select_join();
            match plan {
                "baseline" => PlanRun::bare(ResultSet::Pairs(baseline_select_join_inner(index, &q)?)),
                "counting" => PlanRun::from_output(counting_select_join(index, &q)?, ResultSet::Pairs),
                "block-marking" => PlanRun::from_output(block_marking_select_join(index, &q)?, ResultSet::Pairs),
                _ => PlanRun::bare(ResultSet::Pairs(invalid_inner_pushdown(index, &q)?)),
            }
        }
        QueryClass::SelectJoinOuter => {
            let q = p.select_join();
            match plan {
                "baseline" => PlanRun::bare(ResultSet::Pairs(baseline_select_join_outer(index, &q)?)),
                _ => PlanRun::from_output(outer_pushdown_select_join(index, &q)?, ResultSet::Pairs),
            }
        }
        QueryClass::Unchained => {
            let q = p.unchained();
            match plan {
                "baseline" => PlanRun::from_output(unchained_baseline(index, &q)?, ResultSet::Triplets),
                "block-marking" => {
                    PlanRun::from_output(unchained_block_marking(index, &q, p.first)?, ResultSet::Triplets)
                }
                "advised" => match advise_join_order(index, &q)? {
                    JoinOrderAdvice::First(first) => {
                        PlanRun::from_output(unchained_block_marking(index, &q, first)?, ResultSet::Triplets)
                    }
                    JoinOrderAdvice::Independent => {
                        PlanRun::from_output(unchained_baseline(index, &q)?, ResultSet::Triplets)
                    }
                },
                _ => PlanRun::bare(ResultSet::Triplets(filtered_inner_plan(index, &q, p.first)?)),
            }
        }
        QueryClass::Chained => {
            let q = p.chained();
            let out = match plan {
                "right-deep" => chained_right_deep(index, &q)?,
                "join-intersection" => chained_join_intersection(index, &q)?,
                "nested" => chained_nested_join(index, &q, p.cache)?,
                "nested-cached" => chained_nested_join(index, &q, true)?,
                _ => chained_nested_join(index, &q, false)?,
            };
            PlanRun::from_output(out, ResultSet::Triplets)
        }
        QueryClass::TwoSelect => {
            let q = p.two_select();
            match plan {
                "baseline" => PlanRun::from_output(baseline_two_select(index, &q)?, ResultSet::Ids),
                "two-knn" => PlanRun::from_output(two_knn_select(index, &q)?, ResultSet::Ids),
                _ => PlanRun::bare(ResultSet::Ids(sequential_two_select(index, &q)?)),
            }
        }
    };
    Ok(run)
}
