//! Agent-based simulation of organizational adaptation on NK landscapes.
//!
//! A population of experts, each able to work on one subtask of an NK task,
//! forms a group through recurring second-price auctions. Group members
//! pick their best known partial solution against last period's outcome;
//! every agent keeps learning one-bit variations and forgetting
//! non-maximizing solutions. [`engine`] drives replications and
//! [`metrics`] turns them into performance tables.

pub mod auction;
pub mod engine;
pub mod error;
pub mod landscape;
pub mod metrics;
pub mod population;
pub mod rng;

pub use error::{Error, Result};
