//! Construction engine: MST cost estimates per depot, the two-stage
//! coverage-ratio filter for depot configurations, the random greedy
//! solution builder and random-greedy depot selection.

mod crh;
mod mst;
mod pick;
mod rgh;

pub use crh::{
    preliminary_filter, preliminary_filter_traced, random_config_build, secondary_filter,
    CrhParams, FilterStep, RankedConfig,
};
pub use mst::{estimate_all, mst_estimate, DepotEstimate};
pub use pick::{pick_index, probabilistic_pick, SortedCandidateList};
pub use rgh::rgh_build;
