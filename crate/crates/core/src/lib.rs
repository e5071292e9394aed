//! Hybrid genetic algorithm with multiple populations (HGAMP) for the
//! capacitated location-routing problem.
//!
//! The solver chooses which depots to open and builds capacity-feasible
//! vehicle routes from them, minimizing depot opening costs, per-vehicle
//! fixed costs and travel distance. The search combines a coverage-ratio
//! heuristic that proposes promising depot configurations, one subpopulation
//! per configuration, a multi-depot edge assembly crossover, penalty-based
//! repair, Shaw-style mutation and granular variable neighborhood descent.

pub mod construct;
pub mod crossover;
pub mod engine;
pub mod io;
pub mod localsearch;
pub mod model;
pub mod population;
pub mod repairmutate;

mod error;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};

/// Monetary and travel cost units.
pub type Cost = f64;
/// Demand and capacity units.
pub type Load = i64;

pub use engine::{run, RunParams, RunStats};
pub use model::{DepotConfiguration, Instance, Solution};
