//! Plans for queries with two kNN-joins.
//!
//! Unchained joins share their inner relation, `(A join B)` and `(C join B)`,
//! and must be evaluated independently before matching on `B`. Chained joins,
//! `(A join B)` then `(B join C)`, may be evaluated in several equivalent
//! orders.

mod chained;
mod unchained;

pub use chained::{
    chained_join_intersection, chained_nested_join, chained_right_deep, match_chain_on_b,
    NeighborhoodCache,
};
pub use unchained::{
    advise_join_order, advise_join_order_with_ratio, filtered_inner_plan, unchained_baseline,
    unchained_block_marking, unchained_marking, JoinOrderAdvice, SafetyMarking, UnchainedMarking,
    DEFAULT_COVERAGE_RATIO,
};
