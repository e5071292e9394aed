use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::localsearch::{
    candidates_for, Move, NeighborLists, Neighborhood, Workspace, IMPROVEMENT_EPS,
};
use crate::model::{Instance, Solution, Violations};
use crate::{Cost, Error, Load, Result};

/// Penalty factors for depot and route overload.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyState {
    pub p_depot: f64,
    pub p_route: f64,
}

impl Default for PenaltyState {
    fn default() -> Self {
        PenaltyState {
            p_depot: 1.0,
            p_route: 1.0,
        }
    }
}

impl PenaltyState {
    pub const CAP: f64 = 1e9;

    pub fn escalate(&mut self) {
        self.p_depot *= 10.0;
        self.p_route *= 10.0;
    }

    pub fn exhausted(&self) -> bool {
        self.p_depot >= Self::CAP && self.p_route >= Self::CAP
    }
}

/// `f + p_depot * f_l + p_route * f_r`.
pub fn generalized_cost(solution: &Solution, penalties: PenaltyState) -> Cost {
    solution.cost
        + penalties.p_depot * solution.violations.depot as f64
        + penalties.p_route * solution.violations.route as f64
}

type Edge = (usize, usize);

fn tour_edges(depot: usize, customers: &[usize], inst: &Instance) -> Vec<Edge> {
    let mut out = Vec::with_capacity(customers.len() + 1);
    let mut prev = depot;
    for &j in customers {
        let v = inst.cv(j);
        out.push((prev.min(v), prev.max(v)));
        prev = v;
    }
    out.push((prev.min(depot), prev.max(depot)));
    out
}

/// Multiset difference `a - b` of sorted edge lists.
fn minus(a: &[Edge], b: &[Edge]) -> Vec<Edge> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() {
        if j < b.len() && b[j] < a[i] {
            j += 1;
        } else if j < b.len() && b[j] == a[i] {
            i += 1;
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
        }
    }
    out
}

/// Edges a move adds and removes, computed from its preview.
fn edge_change(ws: &Workspace<'_>, mv: &Move) -> Option<(Vec<Edge>, Vec<Edge>)> {
    let inst = ws.instance();
    let (new, old) = ws.preview(mv)?;
    let collect = |seqs: &[(usize, Vec<usize>)]| {
        let mut e: Vec<Edge> = seqs
            .iter()
            .filter(|s| !s.1.is_empty())
            .flat_map(|(d, c)| tour_edges(*d, c, inst))
            .collect();
        e.sort_unstable();
        e
    };
    let (n, o) = (collect(&new), collect(&old));
    Some((minus(&n, &o), minus(&o, &n)))
}

/// Edges removed by recent moves. A move is tabu when every edge it would
/// add was removed less than `tenure` accepted moves ago.
#[derive(Debug, Clone)]
pub struct TabuList {
    tenure: usize,
    clock: usize,
    expiry: HashMap<Edge, usize>,
}

impl TabuList {
    pub const DEFAULT_TENURE: usize = 20;

    pub fn new(tenure: usize) -> Self {
        TabuList {
            tenure,
            clock: 0,
            expiry: HashMap::new(),
        }
    }

    pub fn is_tabu(&self, added: &[Edge]) -> bool {
        !added.is_empty()
            && added
                .iter()
                .all(|e| self.expiry.get(e).is_some_and(|&t| t > self.clock))
    }

    pub fn record(&mut self, removed: &[Edge]) {
        self.clock += 1;
        for &e in removed {
            self.expiry.insert(e, self.clock + self.tenure);
        }
    }
}

/// Opens closed depots until the open capacity covers the total demand.
/// Each step moves one customer of an overloaded depot onto a new
/// single-customer route at the closed depot that minimizes the travel
/// change, ignoring opening and vehicle costs.
pub fn expand_depots(solution: &Solution, instance: &Instance) -> Result<Solution> {
    let mut routes: Vec<(usize, Vec<usize>)> = solution
        .routes
        .iter()
        .map(|r| (r.depot, r.customers.clone()))
        .collect();
    let mut open: Vec<bool> = (0..instance.num_depots())
        .map(|d| solution.config.contains(d))
        .collect();
    let capacity = |open: &[bool]| {
        (0..open.len())
            .filter(|&d| open[d])
            .map(|d| instance.depots[d].capacity)
            .sum::<i64>()
    };
    while capacity(&open) < instance.total_demand() {
        let mut load = vec![0; instance.num_depots()];
        for (d, c) in &routes {
            load[*d] += c.iter().map(|&j| instance.demand(j)).sum::<i64>();
        }
        let mut best: Option<(Cost, usize, usize, usize)> = None;
        for (r, (d, seq)) in routes.iter().enumerate() {
            if load[*d] <= instance.depots[*d].capacity {
                continue;
            }
            for p in 0..seq.len() {
                let v = |q: Option<usize>| q.map_or(*d, |q| instance.cv(seq[q]));
                let (a, j, b) = (
                    v(p.checked_sub(1)),
                    instance.cv(seq[p]),
                    v((p + 1 < seq.len()).then_some(p + 1)),
                );
                let removal = instance.c(a, b) - instance.c(a, j) - instance.c(j, b);
                for nd in (0..instance.num_depots()).filter(|&nd| !open[nd]) {
                    let delta = removal + 2.0 * instance.c(nd, j);
                    if best.map_or(true, |bst| delta < bst.0) {
                        best = Some((delta, r, p, nd));
                    }
                }
            }
        }
        let Some((_, r, p, nd)) = best else {
            return Err(Error::InfeasibleInstance(
                "all depots open and capacity still short".into(),
            ));
        };
        let j = routes[r].1.remove(p);
        routes.push((nd, vec![j]));
        open[nd] = true;
    }
    Solution::from_routes(instance, routes, &[])
}

fn total_violation(v: Violations) -> Load {
    v.depot + v.route
}

const REPAIR_NEIGHBORHOODS: [Neighborhood; 3] = [
    Neighborhood::Relocate1Inter,
    Neighborhood::Swap11Inter,
    Neighborhood::TwoOptStarInter,
];

/// Penalized best-improvement descent over inter-route relocate, swap and
/// 2-opt* until the solution is capacity-feasible. A tabu move is still
/// accepted when it brings the total violation below its lowest value so far.
pub fn repair(
    solution: &Solution,
    instance: &Instance,
    lists: &NeighborLists,
    tenure: usize,
) -> Result<Solution> {
    if solution.is_feasible() {
        return Ok(solution.clone());
    }
    let start = if solution.config.total_capacity() < instance.total_demand() {
        expand_depots(solution, instance)?
    } else {
        solution.clone()
    };
    let mut ws = Workspace::new(instance, &start);
    let mut pen = PenaltyState::default();
    let mut tabu = TabuList::new(tenure);
    let n = instance.num_customers();
    let mut least_violation = total_violation(ws.violations());
    while !ws.violations().is_zero() {
        let mut improving: Vec<(Cost, Move)> = Vec::new();
        for u in 0..n {
            for nb in REPAIR_NEIGHBORHOODS {
                let _ = candidates_for(&ws, lists, nb, u, &mut |mv| {
                    if let Some(d) = ws.evaluate(&mv) {
                        let g = d.penalized(pen.p_depot, pen.p_route);
                        if g < -IMPROVEMENT_EPS {
                            improving.push((g, mv));
                        }
                    }
                    ControlFlow::Continue(())
                });
            }
        }
        improving.sort_by(|a, b| a.0.total_cmp(&b.0));
        let lowest = least_violation;
        let chosen = improving.into_iter().find_map(|(_, mv)| {
            let (added, removed) = edge_change(&ws, &mv)?;
            let d = ws.evaluate(&mv)?;
            let after = total_violation(ws.violations()) + d.depot_over + d.route_over;
            (!tabu.is_tabu(&added) || after < lowest).then_some((mv, removed))
        });
        match chosen {
            Some((mv, removed)) => {
                ws.apply(&mv)
                    .ok_or_else(|| Error::Internal("repair move became invalid".into()))?;
                tabu.record(&removed);
                least_violation = least_violation.min(total_violation(ws.violations()));
            }
            None => {
                if pen.exhausted() {
                    return Err(Error::RepairFailed(format!(
                        "violations {:?} remain at maximal penalties",
                        ws.violations()
                    )));
                }
                pen.escalate();
            }
        }
    }
    Ok(ws.to_solution())
}
