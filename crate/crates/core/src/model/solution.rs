use std::fmt;

use serde::{Deserialize, Serialize};

use super::Instance;
use crate::{Cost, Error, Load, Result};

/// A canonical set of opened depots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DepotConfiguration {
    open: Vec<usize>,
    total_capacity: Load,
}

impl DepotConfiguration {
    pub fn new(instance: &Instance, depots: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut open: Vec<usize> = depots.into_iter().collect();
        open.sort_unstable();
        open.dedup();
        if let Some(&bad) = open.iter().find(|&&i| i >= instance.num_depots()) {
            return Err(Error::Structural(format!("depot index {bad} out of range")));
        }
        let total_capacity = open.iter().map(|&i| instance.depots[i].capacity).sum();
        Ok(DepotConfiguration {
            open,
            total_capacity,
        })
    }

    pub fn open(&self) -> &[usize] {
        &self.open
    }

    pub fn contains(&self, depot: usize) -> bool {
        self.open.binary_search(&depot).is_ok()
    }

    pub fn total_capacity(&self) -> Load {
        self.total_capacity
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    pub fn covers(&self, instance: &Instance) -> bool {
        self.total_capacity >= instance.total_demand()
    }

    pub fn opening_cost(&self, instance: &Instance) -> Cost {
        self.open
            .iter()
            .map(|&i| instance.depots[i].opening_cost)
            .sum()
    }
}

impl fmt::Display for DepotConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.open.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A vehicle tour `depot -> customers... -> depot` with cached load and length.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub depot: usize,
    pub customers: Vec<usize>,
    pub load: Load,
    pub length: Cost,
}

impl Route {
    pub fn new(instance: &Instance, depot: usize, customers: Vec<usize>) -> Self {
        let load = customers.iter().map(|&j| instance.demand(j)).sum();
        let length = route_length(instance, depot, &customers);
        Route {
            depot,
            customers,
            load,
            length,
        }
    }
}

/// Travel cost of the closed tour from `depot` through `customers`.
pub fn route_length(instance: &Instance, depot: usize, customers: &[usize]) -> Cost {
    let (Some(&first), Some(&last)) = (customers.first(), customers.last()) else {
        return 0.0;
    };
    let mut len = instance.dc(depot, first) + instance.dc(depot, last);
    for w in customers.windows(2) {
        len += instance.cc(w[0], w[1]);
    }
    len
}

/// Capacity violations of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Violations {
    /// Total depot overload.
    pub depot: Load,
    /// Total route overload.
    pub route: Load,
}

impl Violations {
    pub fn is_zero(&self) -> bool {
        self.depot == 0 && self.route == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible,
    Violated {
        depot_overload: Load,
        route_overload: Load,
        structural: Option<String>,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// A (possibly capacity-infeasible) CLRP solution.
///
/// Every stored route is nonempty. `config` holds every depot owning a route
/// plus any depot that was explicitly opened while empty; all of them pay
/// their opening cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub config: DepotConfiguration,
    pub cost: Cost,
    pub violations: Violations,
    num_customers: usize,
}

impl Solution {
    /// Builds a solution from `(depot, customers)` pairs. Empty sequences are
    /// dropped; `extra_open` lists depots to keep open even without routes.
    pub fn from_routes(
        instance: &Instance,
        routes: impl IntoIterator<Item = (usize, Vec<usize>)>,
        extra_open: &[usize],
    ) -> Result<Self> {
        let mut built = Vec::new();
        for (depot, customers) in routes {
            if depot >= instance.num_depots() {
                return Err(Error::Structural(format!(
                    "route depot {depot} out of range"
                )));
            }
            if let Some(&bad) = customers.iter().find(|&&j| j >= instance.num_customers()) {
                return Err(Error::Structural(format!(
                    "customer index {bad} out of range"
                )));
            }
            if !customers.is_empty() {
                built.push(Route::new(instance, depot, customers));
            }
        }
        let config = DepotConfiguration::new(
            instance,
            built
                .iter()
                .map(|r| r.depot)
                .chain(extra_open.iter().copied()),
        )?;
        let mut sol = Solution {
            routes: built,
            config,
            cost: 0.0,
            violations: Violations::default(),
            num_customers: instance.num_customers(),
        };
        check_visitation(&sol, instance)?;
        sol.refresh(instance);
        Ok(sol)
    }

    /// Recomputes cost and violation caches from the routes' cached fields.
    pub fn refresh(&mut self, instance: &Instance) {
        self.cost = self.config.opening_cost(instance)
            + instance.vehicle_cost * self.routes.len() as Cost
            + self.routes.iter().map(|r| r.length).sum::<Cost>();
        self.violations = compute_violations(&self.routes, instance);
    }

    pub fn num_customers(&self) -> usize {
        self.num_customers
    }

    pub fn is_feasible(&self) -> bool {
        self.violations.is_zero()
    }

    /// Per-depot assigned load.
    pub fn depot_loads(&self, instance: &Instance) -> Vec<Load> {
        let mut loads = vec![0; instance.num_depots()];
        for r in &self.routes {
            loads[r.depot] += r.load;
        }
        loads
    }

    /// Depot owning each customer.
    pub fn assignment(&self) -> Vec<usize> {
        let mut a = vec![usize::MAX; self.num_customers];
        for r in &self.routes {
            for &j in &r.customers {
                a[j] = r.depot;
            }
        }
        a
    }

    /// Route sequences, sorted for a representation that ignores route order.
    pub fn canonical_routes(&self) -> Vec<(usize, Vec<usize>)> {
        let mut v: Vec<(usize, Vec<usize>)> = self
            .routes
            .iter()
            .map(|r| {
                let mut c = r.customers.clone();
                if c.len() > 1 && c[0] > c[c.len() - 1] {
                    c.reverse();
                }
                (r.depot, c)
            })
            .collect();
        v.sort();
        v
    }
}

fn compute_violations(routes: &[Route], instance: &Instance) -> Violations {
    let mut loads = vec![0; instance.num_depots()];
    let mut route = 0;
    for r in routes {
        loads[r.depot] += r.load;
        route += (r.load - instance.vehicle_capacity).max(0);
    }
    let depot = loads
        .iter()
        .zip(&instance.depots)
        .map(|(&l, d)| (l - d.capacity).max(0))
        .sum();
    Violations { depot, route }
}

fn check_visitation(sol: &Solution, instance: &Instance) -> Result<()> {
    let n = instance.num_customers();
    if sol.num_customers != n {
        return Err(Error::Structural(format!(
            "solution covers {} customers, instance has {n}",
            sol.num_customers
        )));
    }
    let mut seen = vec![0u32; n];
    for r in &sol.routes {
        for &j in &r.customers {
            if j >= n {
                return Err(Error::Structural(format!(
                    "customer index {j} out of range"
                )));
            }
            seen[j] += 1;
        }
    }
    for (j, &k) in seen.iter().enumerate() {
        match k {
            1 => {}
            0 => return Err(Error::Structural(format!("customer {j} is not visited"))),
            _ => {
                return Err(Error::Structural(format!(
                    "customer {j} is visited {k} times"
                )))
            }
        }
    }
    Ok(())
}

/// Objective recomputed from scratch: opening costs + vehicle fixed costs +
/// travel.
pub fn total_cost(solution: &Solution, instance: &Instance) -> Result<Cost> {
    check_visitation(solution, instance)?;
    let mut cost = 0.0;
    for &i in solution.config.open() {
        cost += instance.depots[i].opening_cost;
    }
    for r in &solution.routes {
        if !solution.config.contains(r.depot) {
            return Err(Error::Structural(format!(
                "route uses closed depot {}",
                r.depot
            )));
        }
        cost += instance.vehicle_cost + route_length(instance, r.depot, &r.customers);
    }
    Ok(cost)
}

pub fn check_feasibility(solution: &Solution, instance: &Instance) -> Feasibility {
    let structural = check_visitation(solution, instance)
        .err()
        .map(|e| e.to_string());
    let rebuilt: Vec<Route> = solution
        .routes
        .iter()
        .map(|r| {
            Route::new(
                instance,
                r.depot,
                r.customers
                    .iter()
                    .copied()
                    .filter(|&j| j < instance.num_customers())
                    .collect(),
            )
        })
        .collect();
    let v = compute_violations(&rebuilt, instance);
    if structural.is_none() && v.is_zero() {
        Feasibility::Feasible
    } else {
        Feasibility::Violated {
            depot_overload: v.depot,
            route_overload: v.route,
            structural,
        }
    }
}

/// Verifies that every cached field matches a from-scratch recomputation.
pub fn audit_caches(solution: &Solution, instance: &Instance) -> Result<()> {
    let tol = instance.tolerance();
    for (k, r) in solution.routes.iter().enumerate() {
        if r.customers.is_empty() {
            return Err(Error::Integrity(format!("route {k} is empty")));
        }
        let load: Load = r.customers.iter().map(|&j| instance.demand(j)).sum();
        if load != r.load {
            return Err(Error::Integrity(format!(
                "route {k}: cached load {} != {load}",
                r.load
            )));
        }
        let len = route_length(instance, r.depot, &r.customers);
        if (len - r.length).abs() > tol {
            return Err(Error::Integrity(format!(
                "route {k}: cached length {} != {len}",
                r.length
            )));
        }
    }
    let cost = total_cost(solution, instance)?;
    if (cost - solution.cost).abs() > tol {
        return Err(Error::Integrity(format!(
            "cached cost {} != recomputed {cost}",
            solution.cost
        )));
    }
    let v = compute_violations(&solution.routes, instance);
    if v != solution.violations {
        return Err(Error::Integrity(format!(
            "cached violations {:?} != {v:?}",
            solution.violations
        )));
    }
    Ok(())
}

/// Compact structural fingerprint used for fast solution distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    edges: Vec<(u32, u32)>,
    assignment: Vec<u32>,
}

impl Signature {
    pub fn of(solution: &Solution, instance: &Instance) -> Self {
        let m = instance.num_depots() as u32;
        let mut edges = Vec::with_capacity(solution.num_customers + solution.routes.len());
        let key = |a: u32, b: u32| if a <= b { (a, b) } else { (b, a) };
        for r in &solution.routes {
            let d = r.depot as u32;
            let mut prev = d;
            for &j in &r.customers {
                let v = m + j as u32;
                edges.push(key(prev, v));
                prev = v;
            }
            edges.push(key(prev, d));
        }
        edges.sort_unstable();
        let assignment = solution
            .assignment()
            .into_iter()
            .map(|d| d as u32)
            .collect();
        Signature { edges, assignment }
    }

    /// Broken-pairs distance: half the edge-multiset symmetric difference
    /// (rounded up) plus the number of customers assigned to different depots.
    pub fn distance(&self, other: &Signature) -> Result<u32> {
        if self.assignment.len() != other.assignment.len() {
            return Err(Error::Structural(
                "solutions belong to different instances".into(),
            ));
        }
        let (a, b) = (&self.edges, &other.edges);
        let (mut i, mut k, mut common) = (0, 0, 0usize);
        while i < a.len() && k < b.len() {
            match a[i].cmp(&b[k]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => k += 1,
                std::cmp::Ordering::Equal => {
                    common += 1;
                    i += 1;
                    k += 1;
                }
            }
        }
        let sym = a.len() + b.len() - 2 * common;
        let moved = self
            .assignment
            .iter()
            .zip(&other.assignment)
            .filter(|(x, y)| x != y)
            .count();
        Ok((sym.div_ceil(2) + moved) as u32)
    }
}

pub fn broken_pairs_distance(a: &Solution, b: &Solution, instance: &Instance) -> Result<u32> {
    if a.num_customers != b.num_customers || a.num_customers != instance.num_customers() {
        return Err(Error::Structural(
            "solutions belong to different instances".into(),
        ));
    }
    Signature::of(a, instance).distance(&Signature::of(b, instance))
}

/// Total demand as a percentage of the opened depot capacity.
pub fn compact_degree(solution: &Solution, instance: &Instance) -> Result<f64> {
    if solution.config.is_empty() {
        return Err(Error::Structural("solution opens no depot".into()));
    }
    Ok(100.0 * instance.total_demand() as f64 / solution.config.total_capacity() as f64)
}

/// Arithmetic mean of per-instance compact degrees.
pub fn mean_compact_degree(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}
