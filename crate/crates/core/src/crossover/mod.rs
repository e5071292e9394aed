//! Multi-depot edge assembly crossover.
//!
//! Parents are turned into edge multisets, padded with dummy depot loops so
//! depot degrees agree, and their symmetric difference is split into
//! alternating AB-cycles. Cycles sharing a vertex form E-sets; each E-set is
//! exchanged into the base parent, then mega tours are split at depots and
//! depot-less subtours are linked into routes.

mod assemble;
mod edges;
mod joint;

pub use assemble::{apply_eset, eliminate_subtours, split_mega_tours, Intermediate, MegaTour};
pub use edges::{extend_with_dummy_loops, EdgeMultiset};
pub use joint::{group_esets, partition_ab_cycles, AbCycle, ESet, JointEdge, JointGraph, Side};

use rand::Rng;

use crate::localsearch::NeighborLists;
use crate::model::{Instance, Solution};
use crate::Result;

pub const DEFAULT_BETA: usize = 10;

/// Up to `beta` offspring of two parents, one per E-set. Offspring are
/// structurally valid but may violate capacities. Identical parents give
/// no offspring.
pub fn mdeax(
    parent_a: &Solution,
    parent_b: &Solution,
    beta: usize,
    rng: &mut impl Rng,
    instance: &Instance,
    lists: &NeighborLists,
) -> Result<Vec<Solution>> {
    let (ea, eb) = extend_with_dummy_loops(parent_a, parent_b, instance)?;
    let graph = JointGraph::build(&ea, &eb, instance.num_depots() + instance.num_customers())?;
    if graph.is_empty() {
        return Ok(Vec::new());
    }
    let cycles = partition_ab_cycles(&graph, rng)?;
    let esets = group_esets(&graph, &cycles, beta, rng);
    let (ba, bb) = (ea.without_loops(), eb.without_loops());
    let mut out = Vec::with_capacity(esets.len());
    for eset in &esets {
        let base = if rng.gen::<bool>() { Side::A } else { Side::B };
        let base_edges = if base == Side::A { &ba } else { &bb };
        let inter = apply_eset(base_edges, base, &graph, eset)?;
        let parts = Intermediate::decompose(&inter, instance)?;
        let parts = split_mega_tours(parts, instance, None);
        out.push(eliminate_subtours(parts, lists, instance)?);
    }
    Ok(out)
}
