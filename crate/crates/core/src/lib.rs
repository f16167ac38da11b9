//! Maximum-independent-set search with Rydberg atom arrays: unit-disk graphs,
//! rotating-frame (gauge) schedules, state-vector evolution, path
//! optimization and measurement budgets.

pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod linalg;
pub mod metrology;
pub mod operators;
pub mod optimizer;
pub mod schedule;
pub mod units;

pub use error::{Error, Result};
