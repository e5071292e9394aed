use crate::model::{Instance, Solution};
use crate::{Cost, Error, Load, Result};

pub const ORACLE_MAX_CUSTOMERS: usize = 8;
pub const ORACLE_MAX_DEPOTS: usize = 3;

/// Exact optimum by exhaustive dynamic programming: shortest tour per
/// (depot, customer subset), best route partition per (depot, subset), then
/// the best split of all customers over depots.
pub fn brute_force_oracle(instance: &Instance) -> Result<(Cost, Solution)> {
    let n = instance.num_customers();
    let m = instance.num_depots();
    if n > ORACLE_MAX_CUSTOMERS || m > ORACLE_MAX_DEPOTS {
        return Err(Error::InvalidArgument(format!(
            "oracle limited to {ORACLE_MAX_CUSTOMERS} customers and {ORACLE_MAX_DEPOTS} depots"
        )));
    }
    instance.ensure_feasible()?;
    let full = (1usize << n) - 1;
    let demand: Vec<Load> = (0..=full)
        .map(|s| {
            (0..n)
                .filter(|&j| s >> j & 1 == 1)
                .map(|j| instance.demand(j))
                .sum()
        })
        .collect();

    let mut tours: Vec<Vec<Option<(Cost, Vec<usize>)>>> = Vec::with_capacity(m);
    for d in 0..m {
        tours.push(depot_tours(instance, d, n, &demand));
    }
    // part[d][s]: cheapest set of routes from depot d covering exactly s.
    let mut part: Vec<Vec<(Cost, usize)>> = vec![vec![(Cost::INFINITY, 0); full + 1]; m];
    for d in 0..m {
        part[d][0] = (0.0, 0);
        for s in 1..=full {
            let low = s & s.wrapping_neg();
            let rest = s ^ low;
            let mut sub = rest;
            loop {
                let r = sub | low;
                if let Some((len, _)) = &tours[d][r] {
                    let c = len + instance.vehicle_cost + part[d][s ^ r].0;
                    if c < part[d][s].0 {
                        part[d][s] = (c, r);
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
    }
    // cover[k][u]: depots 0..k serve exactly u.
    let mut cover: Vec<Vec<(Cost, usize)>> = vec![vec![(Cost::INFINITY, 0); full + 1]; m + 1];
    cover[0][0] = (0.0, 0);
    for d in 0..m {
        for u in 0..=full {
            let mut best = (cover[d][u].0, 0usize);
            let mut t = u;
            while t != 0 {
                if demand[t] <= instance.depots[d].capacity && part[d][t].0.is_finite() {
                    let c = cover[d][u ^ t].0 + instance.depots[d].opening_cost + part[d][t].0;
                    if c < best.0 {
                        best = (c, t);
                    }
                }
                t = (t - 1) & u;
            }
            cover[d + 1][u] = best;
        }
    }
    if !cover[m][full].0.is_finite() {
        return Err(Error::InfeasibleInstance(
            "no feasible assignment exists".into(),
        ));
    }
    let mut routes = Vec::new();
    let mut u = full;
    for d in (0..m).rev() {
        let t = cover[d + 1][u].1;
        let mut s = t;
        while s != 0 {
            let r = part[d][s].1;
            routes.push((d, tours[d][r].as_ref().expect("tour exists").1.clone()));
            s ^= r;
        }
        u ^= t;
    }
    let sol = Solution::from_routes(instance, routes, &[])?;
    Ok((sol.cost, sol))
}

/// Held-Karp shortest closed tour from depot `d` through each subset whose
/// demand fits a vehicle.
fn depot_tours(
    instance: &Instance,
    d: usize,
    n: usize,
    demand: &[Load],
) -> Vec<Option<(Cost, Vec<usize>)>> {
    let full = (1usize << n) - 1;
    let mut dp = vec![vec![Cost::INFINITY; n]; full + 1];
    let mut parent = vec![vec![usize::MAX; n]; full + 1];
    for j in 0..n {
        dp[1 << j][j] = instance.dc(d, j);
    }
    for s in 1..=full {
        if demand[s] > instance.vehicle_capacity {
            continue;
        }
        for j in (0..n).filter(|&j| s >> j & 1 == 1) {
            let cur = dp[s][j];
            if !cur.is_finite() {
                continue;
            }
            for k in (0..n).filter(|&k| s >> k & 1 == 0) {
                let t = s | 1 << k;
                let c = cur + instance.cc(j, k);
                if c < dp[t][k] {
                    dp[t][k] = c;
                    parent[t][k] = j;
                }
            }
        }
    }
    (0..=full)
        .map(|s| {
            if s == 0 || demand[s] > instance.vehicle_capacity {
                return None;
            }
            let (len, last) = (0..n)
                .filter(|&j| s >> j & 1 == 1)
                .map(|j| (dp[s][j] + instance.dc(d, j), j))
                .min_by(|a, b| a.0.total_cmp(&b.0))?;
            let mut order = Vec::new();
            let (mut cur, mut set) = (last, s);
            while cur != usize::MAX {
                order.push(cur);
                let p = parent[set][cur];
                set ^= 1 << cur;
                cur = p;
            }
            order.reverse();
            Some((len, order))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::generate_tiny;
    use crate::model::{CustomerSpec, DepotSpec, DistanceConvention, Point};
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_customer_two_depots() {
        let inst = generate_tiny(1, 2, 3).unwrap();
        let (c, _) = brute_force_oracle(&inst).unwrap();
        let want = (0..2)
            .map(|d| inst.depots[d].opening_cost + inst.vehicle_cost + 2.0 * inst.dc(d, 0))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(c, want);
    }

    #[test]
    fn twin_depots_are_interchangeable() {
        let mk = |order: [usize; 2]| {
            let specs = [
                DepotSpec {
                    capacity: 9,
                    opening_cost: 30.0,
                    coords: Some(Point::new(0.0, 0.0)),
                },
                DepotSpec {
                    capacity: 9,
                    opening_cost: 30.0,
                    coords: Some(Point::new(0.0, 0.0)),
                },
            ];
            Instance::from_coordinates(
                "twin",
                order.iter().map(|&k| specs[k].clone()).collect(),
                (0..5)
                    .map(|j| CustomerSpec {
                        demand: 3,
                        coords: Some(Point::new(j as f64 * 3.0, 4.0)),
                    })
                    .collect(),
                7,
                10.0,
                DistanceConvention::ScaledInteger { factor: 10 },
            )
            .unwrap()
        };
        assert_eq!(
            brute_force_oracle(&mk([0, 1])).unwrap().0,
            brute_force_oracle(&mk([1, 0])).unwrap().0
        );
    }

    #[test]
    fn size_cap_enforced() {
        assert!(brute_force_oracle(&generate_tiny(9, 1, 0).unwrap()).is_err());
        assert!(brute_force_oracle(&generate_tiny(3, 4, 0).unwrap()).is_err());
    }

    /// Plain enumeration: every depot label per customer, every ordering of
    /// every depot's customers cut into consecutive routes.
    fn naive(inst: &Instance) -> f64 {
        let n = inst.num_customers();
        let m = inst.num_depots();
        let mut best = f64::INFINITY;
        for labels in (0..n).map(|_| 0..m).multi_cartesian_product() {
            let mut total = 0.0;
            let mut ok = true;
            for d in 0..m {
                let mine: Vec<usize> = (0..n).filter(|&j| labels[j] == d).collect();
                if mine.is_empty() {
                    continue;
                }
                let load: i64 = mine.iter().map(|&j| inst.demand(j)).sum();
                if load > inst.depots[d].capacity {
                    ok = false;
                    break;
                }
                let mut depot_best = f64::INFINITY;
                for perm in mine.iter().copied().permutations(mine.len()) {
                    // Every cut pattern of the permutation into routes.
                    for cuts in 0..(1u32 << (perm.len() - 1)) {
                        let mut cost = 0.0;
                        let mut start = 0;
                        let mut feasible = true;
                        for p in 0..perm.len() {
                            if p + 1 == perm.len() || cuts >> p & 1 == 1 {
                                let seg = &perm[start..=p];
                                if seg.iter().map(|&j| inst.demand(j)).sum::<i64>()
                                    > inst.vehicle_capacity
                                {
                                    feasible = false;
                                    break;
                                }
                                cost +=
                                    crate::model::route_length(inst, d, seg) + inst.vehicle_cost;
                                start = p + 1;
                            }
                        }
                        if feasible {
                            depot_best = depot_best.min(cost);
                        }
                    }
                }
                if !depot_best.is_finite() {
                    ok = false;
                    break;
                }
                total += depot_best + inst.depots[d].opening_cost;
            }
            if ok {
                best = best.min(total);
            }
        }
        best
    }

    #[test]
    fn matches_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..25 {
            let inst = generate_tiny(rng.gen_range(1..6), rng.gen_range(1..4), seed).unwrap();
            let (c, sol) = brute_force_oracle(&inst).unwrap();
            assert!(sol.is_feasible());
            assert_eq!(c, sol.cost);
            assert!((c - naive(&inst)).abs() < 1e-9, "seed {seed}");
        }
    }
}
