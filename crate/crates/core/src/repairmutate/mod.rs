//! Capacity repair under the generalized cost and Shaw-style mutation.

mod mutate;
mod repair;

pub use mutate::{mutate, reinsert, removal_count, shaw_removal};
pub use repair::{expand_depots, generalized_cost, repair, PenaltyState, TabuList};
