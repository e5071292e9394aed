use crate::model::Instance;
use crate::{Cost, Load};

/// Capacity-limited spanning tree grown from one depot.
#[derive(Debug, Clone, PartialEq)]
pub struct DepotEstimate {
    pub depot: usize,
    /// Customers covered by the tree, in insertion order.
    pub covered: Vec<usize>,
    pub covered_demand: Load,
    /// Opening cost + vehicles for the covered demand + tree weight.
    pub rough_cost: Cost,
}

/// Grows a Prim tree from `depot` over customers, stopping before the first
/// customer whose demand would push the covered demand past the depot
/// capacity.
pub fn mst_estimate(instance: &Instance, depot: usize) -> DepotEstimate {
    let n = instance.num_customers();
    let cap = instance.depots[depot].capacity;
    let mut key: Vec<Cost> = (0..n).map(|j| instance.dc(depot, j)).collect();
    let mut in_tree = vec![false; n];
    let mut covered = Vec::new();
    let mut load = 0;
    let mut weight = 0.0;
    loop {
        let next = (0..n)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| key[a].total_cmp(&key[b]).then(a.cmp(&b)));
        let Some(j) = next else { break };
        if load + instance.demand(j) > cap {
            break;
        }
        in_tree[j] = true;
        covered.push(j);
        load += instance.demand(j);
        weight += key[j];
        for k in 0..n {
            if !in_tree[k] {
                let c = instance.cc(j, k);
                if c < key[k] {
                    key[k] = c;
                }
            }
        }
    }
    let vehicles = (load + instance.vehicle_capacity - 1) / instance.vehicle_capacity;
    DepotEstimate {
        depot,
        covered,
        covered_demand: load,
        rough_cost: instance.depots[depot].opening_cost
            + instance.vehicle_cost * vehicles as Cost
            + weight,
    }
}

pub fn estimate_all(instance: &Instance) -> Vec<DepotEstimate> {
    (0..instance.num_depots())
        .map(|i| mst_estimate(instance, i))
        .collect()
}
