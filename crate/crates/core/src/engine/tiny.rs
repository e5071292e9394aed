use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{CustomerSpec, DepotSpec, DistanceConvention, Instance, Point};
use crate::{Load, Result};

/// Reproducible random toy instance on a 100x100 grid with integer-scaled
/// distances (factor 10). Depot capacities always admit a feasible packing.
pub fn generate_tiny(num_customers: usize, num_depots: usize, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q: Load = rng.gen_range(12..=30);
    let customers: Vec<CustomerSpec> = (0..num_customers)
        .map(|_| CustomerSpec {
            demand: rng.gen_range(1..=q.min(10)),
            coords: Some(Point::new(
                rng.gen_range(0..=100) as f64,
                rng.gen_range(0..=100) as f64,
            )),
        })
        .collect();
    let total: Load = customers.iter().map(|c| c.demand).sum();
    let mut depots: Vec<DepotSpec> = (0..num_depots)
        .map(|_| {
            let share = (total as f64 * rng.gen_range(0.4..1.1)).ceil() as Load;
            DepotSpec {
                capacity: share.max(q),
                opening_cost: rng.gen_range(5..=40) as f64 * 10.0,
                coords: Some(Point::new(
                    rng.gen_range(0..=100) as f64,
                    rng.gen_range(0..=100) as f64,
                )),
            }
        })
        .collect();
    // First-fit decreasing; demand that fits nowhere is added to the largest depot.
    let mut demands: Vec<Load> = customers.iter().map(|c| c.demand).collect();
    demands.sort_unstable_by(|a, b| b.cmp(a));
    let mut left: Vec<Load> = depots.iter().map(|d| d.capacity).collect();
    let mut spill = 0;
    for d in demands {
        match left.iter_mut().find(|l| **l >= d) {
            Some(l) => *l -= d,
            None => spill += d,
        }
    }
    if spill > 0 {
        let largest = (0..depots.len())
            .max_by_key(|&i| (depots[i].capacity, std::cmp::Reverse(i)))
            .expect("depots");
        depots[largest].capacity += spill;
    }
    let vehicle_cost = rng.gen_range(2..=10) as f64 * 10.0;
    Instance::from_coordinates(
        format!("tiny-{num_customers}-{num_depots}-{seed}"),
        depots,
        customers,
        q,
        vehicle_cost,
        DistanceConvention::ScaledInteger { factor: 10 },
    )
}
