//! Evaluation plans for spatial queries that combine two kNN predicates.
//!
//! Relations are point sets registered in a shared uniform [`GridIndex`].
//! Every optimized plan has a conceptually correct counterpart that joins or
//! selects everything and filters afterwards; the two always return the same
//! sets, which is what the test suites check.
//!
//! ```
//! use twoknn_core::{GridIndex, Point, RelationId, SelectJoinQuery, Coord};
//! use twoknn_core::select_join::block_marking_select_join;
//! use twoknn_core::operators::baseline_select_join_inner;
//!
//! let a: Vec<Point> = (0..50).map(|i| Point::new(i, (i % 10) as f64, (i / 10) as f64)).collect();
//! let b: Vec<Point> = (0..30).map(|i| Point::new(i, (i % 6) as f64 + 0.5, (i / 6) as f64 + 0.3)).collect();
//! let index = GridIndex::build_fitted(vec![("A".into(), a), ("B".into(), b)], None).unwrap();
//! let q = SelectJoinQuery {
//!     outer: RelationId::from("A"),
//!     inner: RelationId::from("B"),
//!     k_join: 3,
//!     k_select: 4,
//!     focal: Coord::new(2.0, 2.0),
//! };
//! let fast = block_marking_select_join(&index, &q).unwrap().result;
//! assert_eq!(fast, baseline_select_join_inner(&index, &q).unwrap());
//! ```

pub mod datagen;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod knn;
pub mod multi_join;
pub mod operators;
pub mod query;
pub mod select_join;
pub mod two_select;

pub use error::{Error, Result};
pub use geometry::{dist, maxdist, mindist, Coord, Point, PointId, Rect};
pub use grid::{BlockId, GridGeometry, GridIndex, Relation, RelationId};
pub use knn::{get_knn, intersect, Locality, Neighbor, Neighborhood};
pub use operators::{PairSet, TripletSet};
pub use query::{
    ChainedQuery, JoinFirst, PlanOutput, PlanStats, SelectJoinQuery, TwoSelectQuery, UnchainedQuery,
};
