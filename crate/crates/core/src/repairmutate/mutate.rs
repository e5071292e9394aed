use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::model::{Instance, Solution};
use crate::{Cost, Error, Load, Result};

/// Number of customers removed by one mutation.
pub fn removal_count(num_customers: usize, xi: f64) -> usize {
    ((xi * num_customers as f64).round() as usize).clamp(1, num_customers.max(1))
}

/// With probability `zeta`, removes a cluster of related customers and
/// reinserts them greedily; otherwise returns the input unchanged.
pub fn mutate(
    solution: &Solution,
    zeta: f64,
    xi: f64,
    instance: &Instance,
    rng: &mut impl Rng,
) -> Result<Solution> {
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::InvalidArgument(format!(
            "mutation probability {zeta} outside [0, 1]"
        )));
    }
    if !rng.gen_bool(zeta) {
        return Ok(solution.clone());
    }
    let removed = shaw_removal(instance, removal_count(instance.num_customers(), xi), rng);
    Ok(reinsert(solution, &removed, instance).unwrap_or_else(|| solution.clone()))
}

/// Seed customer uniform, then roulette picks weighted by `1 / (1 + c)` to
/// the seed.
pub fn shaw_removal(instance: &Instance, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = instance.num_customers();
    let seed = rng.gen_range(0..n);
    let mut picked = vec![seed];
    let mut pool: Vec<usize> = (0..n).filter(|&j| j != seed).collect();
    while picked.len() < k && !pool.is_empty() {
        let weights: Vec<f64> = pool
            .iter()
            .map(|&j| 1.0 / (1.0 + instance.cc(seed, j)))
            .collect();
        let dist = WeightedIndex::new(&weights).expect("positive weights");
        picked.push(pool.swap_remove(dist.sample(rng)));
    }
    picked
}

/// Removes `customers` and reinserts each one, in order, at its cheapest
/// capacity-feasible position or on a new route at a depot that was open in
/// `solution`. `None` when greedy packing leaves a customer without room.
pub fn reinsert(solution: &Solution, customers: &[usize], instance: &Instance) -> Option<Solution> {
    let gone: Vec<bool> = {
        let mut g = vec![false; instance.num_customers()];
        customers.iter().for_each(|&j| g[j] = true);
        g
    };
    let mut routes: Vec<(usize, Vec<usize>)> = solution
        .routes
        .iter()
        .map(|r| {
            (
                r.depot,
                r.customers
                    .iter()
                    .copied()
                    .filter(|&j| !gone[j])
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|r| !r.1.is_empty())
        .collect();
    let open = solution.config.open().to_vec();
    let load_of = |seq: &[usize]| seq.iter().map(|&j| instance.demand(j)).sum::<Load>();
    let mut depot_load = vec![0; instance.num_depots()];
    let mut route_load: Vec<Load> = routes.iter().map(|r| load_of(&r.1)).collect();
    for (r, (d, _)) in routes.iter().enumerate() {
        depot_load[*d] += route_load[r];
    }
    for &j in customers {
        let dj = instance.demand(j);
        let vj = instance.cv(j);
        // (cost, route or usize::MAX for a new route, position or depot)
        let mut best: Option<(Cost, usize, usize)> = None;
        for (r, (d, seq)) in routes.iter().enumerate() {
            if route_load[r] + dj > instance.vehicle_capacity
                || depot_load[*d] + dj > instance.depots[*d].capacity
            {
                continue;
            }
            for p in 0..=seq.len() {
                let a = if p == 0 { *d } else { instance.cv(seq[p - 1]) };
                let b = if p == seq.len() {
                    *d
                } else {
                    instance.cv(seq[p])
                };
                let c = instance.c(a, vj) + instance.c(vj, b) - instance.c(a, b);
                if best.map_or(true, |x| c < x.0) {
                    best = Some((c, r, p));
                }
            }
        }
        for &d in &open {
            if depot_load[d] + dj <= instance.depots[d].capacity {
                let c = instance.vehicle_cost + 2.0 * instance.c(d, vj);
                if best.map_or(true, |x| c < x.0) {
                    best = Some((c, usize::MAX, d));
                }
            }
        }
        match best? {
            (_, usize::MAX, d) => {
                routes.push((d, vec![j]));
                route_load.push(dj);
                depot_load[d] += dj;
            }
            (_, r, p) => {
                routes[r].1.insert(p, j);
                route_load[r] += dj;
                depot_load[routes[r].0] += dj;
            }
        }
    }
    Some(Solution::from_routes(instance, routes, &[]).expect("reinsertion keeps visitation"))
}
