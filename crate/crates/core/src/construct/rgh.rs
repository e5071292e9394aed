use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{DepotConfiguration, Instance, Solution};
use crate::{Error, Result};

/// Random greedy construction over the depots of `config`.
///
/// Depots are visited in random order. Each route starts at a random
/// customer that fits and then extends to the nearest unrouted customer that
/// fits both the vehicle and the depot. When nothing fits the depot any more
/// the builder moves on to another depot of the configuration that can still
/// host a remaining customer. If the greedy pass strands a customer, the
/// customers are instead packed into depots by first-fit then best-fit
/// decreasing demand and routed greedily per depot. All configuration depots
/// stay open.
pub fn rgh_build(
    instance: &Instance,
    config: &DepotConfiguration,
    rng: &mut impl Rng,
) -> Result<Solution> {
    if config.is_empty() {
        return Err(Error::InvalidArgument("empty depot configuration".into()));
    }
    let mut order = config.open().to_vec();
    order.shuffle(rng);
    let unrouted: Vec<usize> = (0..instance.num_customers()).collect();
    let routes = match greedy(instance, &order, unrouted, rng) {
        Some(r) => r,
        None => {
            let assignment = pack(instance, config.open(), false)
                .or_else(|| pack(instance, config.open(), true))
                .ok_or_else(|| {
                    Error::InfeasibleInstance(format!(
                        "configuration {config} cannot host the remaining demand"
                    ))
                })?;
            let mut routes = Vec::new();
            for (depot, customers) in assignment {
                routes.extend(
                    greedy(instance, &[depot], customers, rng).expect("assignment fits its depot"),
                );
            }
            routes
        }
    };
    Solution::from_routes(instance, routes, config.open())
}

/// Nearest-neighbor routes over `order`; `None` when a customer is stranded.
fn greedy(
    instance: &Instance,
    order: &[usize],
    mut unrouted: Vec<usize>,
    rng: &mut impl Rng,
) -> Option<Vec<(usize, Vec<usize>)>> {
    let q = instance.vehicle_capacity;
    let mut left: Vec<_> = instance.depots.iter().map(|d| d.capacity).collect();
    let mut routes: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut k = 0;
    while !unrouted.is_empty() {
        let hosts = |i: usize, left: &[i64], unrouted: &[usize]| {
            unrouted.iter().any(|&j| instance.demand(j) <= left[i])
        };
        if !hosts(order[k], &left, &unrouted) {
            k = (0..order.len()).find(|&t| hosts(order[t], &left, &unrouted))?;
        }
        let depot = order[k];
        let fits: Vec<usize> = (0..unrouted.len())
            .filter(|&p| instance.demand(unrouted[p]) <= left[depot])
            .collect();
        let first = unrouted.swap_remove(*fits.choose(rng).expect("depot hosts a customer"));
        let mut load = instance.demand(first);
        left[depot] -= load;
        let mut route = vec![first];
        loop {
            let last = instance.cv(*route.last().expect("nonempty"));
            let room = (q - load).min(left[depot]);
            let next = (0..unrouted.len())
                .filter(|&p| instance.demand(unrouted[p]) <= room)
                .min_by(|&a, &b| {
                    let (ja, jb) = (unrouted[a], unrouted[b]);
                    instance
                        .c(last, instance.cv(ja))
                        .total_cmp(&instance.c(last, instance.cv(jb)))
                        .then(ja.cmp(&jb))
                });
            let Some(p) = next else { break };
            let j = unrouted.swap_remove(p);
            load += instance.demand(j);
            left[depot] -= instance.demand(j);
            route.push(j);
        }
        routes.push((depot, route));
    }
    Some(routes)
}

/// Customers by decreasing demand into the first (or tightest) depot with
/// room.
fn pack(instance: &Instance, depots: &[usize], best_fit: bool) -> Option<Vec<(usize, Vec<usize>)>> {
    let mut customers: Vec<usize> = (0..instance.num_customers()).collect();
    customers.sort_by_key(|&j| (std::cmp::Reverse(instance.demand(j)), j));
    let mut left: Vec<i64> = depots
        .iter()
        .map(|&i| instance.depots[i].capacity)
        .collect();
    let mut bins: Vec<Vec<usize>> = vec![Vec::new(); depots.len()];
    for j in customers {
        let d = instance.demand(j);
        let room = (0..depots.len()).filter(|&k| left[k] >= d);
        let k = if best_fit {
            room.min_by_key(|&k| (left[k], k))
        } else {
            room.min()
        }?;
        left[k] -= d;
        bins[k].push(j);
    }
    Some(
        depots
            .iter()
            .copied()
            .zip(bins)
            .filter(|(_, b)| !b.is_empty())
            .collect(),
    )
}
