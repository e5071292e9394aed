use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Instance, Solution};

/// Builds a capacity-feasible start by chopping a random permutation into
/// routes that respect vehicle and depot capacities.
pub(crate) fn random_feasible(inst: &Instance, rng: &mut impl Rng) -> Solution {
    loop {
        let mut perm: Vec<usize> = (0..inst.num_customers()).collect();
        perm.shuffle(rng);
        let mut depot_left: Vec<i64> = inst.depots.iter().map(|d| d.capacity).collect();
        let mut routes: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut ok = true;
        let mut cur: Vec<usize> = Vec::new();
        let mut cur_load = 0;
        let mut cur_depot = rng.gen_range(0..inst.num_depots());
        for j in perm {
            let d = inst.demand(j);
            if cur_load + d > inst.vehicle_capacity
                || depot_left[cur_depot] < d
                || rng.gen_bool(0.2)
            {
                if !cur.is_empty() {
                    routes.push((cur_depot, std::mem::take(&mut cur)));
                }
                cur_load = 0;
                let choices: Vec<usize> = (0..inst.num_depots())
                    .filter(|&i| depot_left[i] >= d)
                    .collect();
                if choices.is_empty() {
                    ok = false;
                    break;
                }
                cur_depot = *choices.choose(rng).unwrap();
            }
            cur.push(j);
            cur_load += d;
            depot_left[cur_depot] -= d;
        }
        if !cur.is_empty() {
            routes.push((cur_depot, cur));
        }
        if ok {
            let s = Solution::from_routes(inst, routes, &[]).unwrap();
            if s.is_feasible() {
                return s;
            }
        }
    }
}
