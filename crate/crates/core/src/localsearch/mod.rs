//! Granular neighborhood search under variable neighborhood descent.

mod moves;
mod neighbors;
mod vnd;

pub use moves::{evaluate_move, Anchor, Delta, Move, MoveKind, Scope, Workspace};
pub use neighbors::NeighborLists;
pub use vnd::{
    vnd_improve, vnd_improve_traced, Neighborhood, VndTrace, IMPROVEMENT_EPS, VND_ORDER,
};

pub(crate) use vnd::candidates_for;
