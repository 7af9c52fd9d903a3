//! Command-line front end: data generation, single plan runs, randomized
//! equivalence checks and timing sweeps.

pub mod cli;
pub mod experiments;
pub mod instance;
pub mod plans;
pub mod timing;
