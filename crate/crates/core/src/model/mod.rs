//! Problem and solution data model, cost accounting and feasibility checks.

mod instance;
mod solution;

pub use instance::{CustomerSpec, DepotSpec, DistanceConvention, DistanceMatrix, Instance, Point};
pub use solution::{
    audit_caches, broken_pairs_distance, check_feasibility, compact_degree, mean_compact_degree,
    route_length, total_cost, DepotConfiguration, Feasibility, Route, Signature, Solution,
    Violations,
};

#[cfg(test)]
mod tests;
