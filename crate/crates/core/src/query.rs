//! Query descriptions shared by the plans, and the counters plans report.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Coord;
use crate::grid::RelationId;

fn require_k(k: usize, name: &'static str) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidK { name })
    } else {
        Ok(())
    }
}

/// A kNN-join between `outer` and `inner` combined with a kNN-select of
/// `k_select` points around `focal`. Whether the select applies to the inner
/// or the outer relation is decided by the plan evaluating the query.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectJoinQuery {
    pub outer: RelationId,
    pub inner: RelationId,
    pub k_join: usize,
    pub k_select: usize,
    pub focal: Coord,
}

impl SelectJoinQuery {
    pub fn validate(&self) -> Result<()> {
        require_k(self.k_join, "k_join")?;
        require_k(self.k_select, "k_select")
    }
}

/// Two kNN-joins sharing the inner relation: `(A join B)` and `(C join B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnchainedQuery {
    pub a: RelationId,
    pub b: RelationId,
    pub c: RelationId,
    pub k_ab: usize,
    pub k_cb: usize,
}

impl UnchainedQuery {
    pub fn validate(&self) -> Result<()> {
        require_k(self.k_ab, "k_ab")?;
        require_k(self.k_cb, "k_cb")
    }
}

/// Two chained kNN-joins: `(A join B)` then `(B join C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainedQuery {
    pub a: RelationId,
    pub b: RelationId,
    pub c: RelationId,
    pub k_ab: usize,
    pub k_bc: usize,
}

impl ChainedQuery {
    pub fn validate(&self) -> Result<()> {
        require_k(self.k_ab, "k_ab")?;
        require_k(self.k_bc, "k_bc")
    }
}

/// Two kNN-selects over one relation.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSelectQuery {
    pub relation: RelationId,
    pub f1: Coord,
    pub k1: usize,
    pub f2: Coord,
    pub k2: usize,
}

impl TwoSelectQuery {
    pub fn validate(&self) -> Result<()> {
        require_k(self.k1, "k1")?;
        require_k(self.k2, "k2")
    }

    /// The same query with the smaller `k` first.
    pub fn normalized(&self) -> Self {
        let mut q = self.clone();
        if q.k1 > q.k2 {
            std::mem::swap(&mut q.k1, &mut q.k2);
            std::mem::swap(&mut q.f1, &mut q.f2);
        }
        q
    }
}

/// Which unchained join is evaluated first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JoinFirst {
    /// `(A join B)` first; `C`'s blocks are pruned.
    Ab,
    /// `(C join B)` first; `A`'s blocks are pruned.
    Cb,
}

impl fmt::Display for JoinFirst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JoinFirst::Ab => "ab",
            JoinFirst::Cb => "cb",
        })
    }
}

impl FromStr for JoinFirst {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ab" => Ok(JoinFirst::Ab),
            "cb" => Ok(JoinFirst::Cb),
            other => Err(format!("expected `ab` or `cb`, got `{other}`")),
        }
    }
}

/// Work counters reported by a plan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlanStats {
    /// Neighborhoods computed for data points (join probes, selects).
    pub neighborhoods: u64,
    /// Neighborhoods computed for block centers during preprocessing.
    pub center_neighborhoods: u64,
    /// Per-point MAXDIST threshold scans (Counting).
    pub threshold_scans: u64,
    /// Outer points never probed because they were pruned.
    pub points_skipped: u64,
    /// Blocks visited by a preprocessing scan.
    pub blocks_scanned: u64,
    /// Blocks marked Non-Contributing (including unscanned ones).
    pub noncontributing_blocks: u64,
    /// Neighborhoods computed for `B` points toward `C` in chained plans.
    pub chain_neighborhoods: u64,
    /// Neighborhood cache hits.
    pub cache_hits: u64,
    /// Blocks in the locality used for the final neighborhood.
    pub locality_blocks: u64,
}

/// A plan result with the work counters gathered while producing it.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanOutput<T> {
    pub result: T,
    pub stats: PlanStats,
}

impl<T> PlanOutput<T> {
    pub fn new(result: T, stats: PlanStats) -> Self {
        Self { result, stats }
    }
}
