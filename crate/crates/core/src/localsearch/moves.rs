//! Mutable route workspace with O(1) move evaluation.
//!
//! Every move is compiled into a short list of route segments per affected
//! route. With per-route prefix sums of travel cost and load, the cost and
//! load of each rebuilt route follow from its segment endpoints, so
//! evaluation never walks a route.

use crate::model::{Instance, Route, Solution, Violations};
use crate::{Cost, Error, Load, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Relocate1,
    Relocate2,
    Swap11,
    Swap12,
    Swap22,
    TwoOpt,
    TwoOptStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    Intra,
    Inter,
}

/// Insertion point of a relocated block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchor {
    After(usize),
    Before(usize),
    /// A fresh single-block route at the given depot.
    NewRoute(usize),
}

/// A neighborhood move. Customers are referenced by index, so a move is only
/// meaningful against the state it was generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// Moves the block of `len` consecutive customers starting at `u`.
    Relocate {
        u: usize,
        len: u8,
        reversed: bool,
        to: Anchor,
    },
    /// Exchanges the block of `ulen` customers at `u` with `vlen` customers at `v`.
    Swap {
        u: usize,
        ulen: u8,
        v: usize,
        vlen: u8,
    },
    /// Reverses the path after `u` through `v` (same route), adding edge `(u, v)`.
    TwoOpt { u: usize, v: usize },
    /// Exchanges the tails of two routes so that `u` is followed by `v`
    /// (`reversed`: the head of `v`'s route is appended backwards instead).
    TwoOptStar { u: usize, v: usize, reversed: bool },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match *self {
            Move::Relocate { len: 1, .. } => MoveKind::Relocate1,
            Move::Relocate { .. } => MoveKind::Relocate2,
            Move::Swap {
                ulen: 1, vlen: 1, ..
            } => MoveKind::Swap11,
            Move::Swap {
                ulen: 2, vlen: 2, ..
            } => MoveKind::Swap22,
            Move::Swap { .. } => MoveKind::Swap12,
            Move::TwoOpt { .. } => MoveKind::TwoOpt,
            Move::TwoOptStar { .. } => MoveKind::TwoOptStar,
        }
    }

    /// The customer pair whose proximity justified the move, if any.
    pub fn endpoints(&self) -> (usize, Option<usize>) {
        match *self {
            Move::Relocate {
                u,
                to: Anchor::After(v) | Anchor::Before(v),
                ..
            } => (u, Some(v)),
            Move::Relocate { u, .. } => (u, None),
            Move::Swap { u, v, .. } | Move::TwoOpt { u, v } | Move::TwoOptStar { u, v, .. } => {
                (u, Some(v))
            }
        }
    }
}

/// Effect of a move on the objective and on capacity violations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delta {
    pub cost: Cost,
    pub depot_over: Load,
    pub route_over: Load,
    /// True when every rebuilt route and every touched depot respects capacity.
    pub local_feasible: bool,
}

impl Delta {
    pub fn penalized(&self, p_depot: f64, p_route: f64) -> Cost {
        self.cost + p_depot * self.depot_over as f64 + p_route * self.route_over as f64
    }
}

#[derive(Debug, Clone)]
struct WRoute {
    depot: usize,
    customers: Vec<usize>,
    load: Load,
    length: Cost,
    /// `dist[p]`: travel from the first customer to the customer at `p`.
    dist: Vec<Cost>,
    /// `acc[p]`: load of the first `p` customers.
    acc: Vec<Load>,
}

impl WRoute {
    fn new(inst: &Instance, depot: usize, customers: Vec<usize>) -> Self {
        let mut r = WRoute {
            depot,
            customers,
            load: 0,
            length: 0.0,
            dist: Vec::new(),
            acc: Vec::new(),
        };
        r.rebuild(inst);
        r
    }

    fn rebuild(&mut self, inst: &Instance) {
        let k = self.customers.len();
        self.dist.clear();
        self.acc.clear();
        self.acc.push(0);
        let mut d = 0.0;
        for p in 0..k {
            if p > 0 {
                d += inst.cc(self.customers[p - 1], self.customers[p]);
            }
            self.dist.push(d);
            self.acc.push(self.acc[p] + inst.demand(self.customers[p]));
        }
        self.load = self.acc[k];
        self.length = if k == 0 {
            0.0
        } else {
            d + inst.dc(self.depot, self.customers[0]) + inst.dc(self.depot, self.customers[k - 1])
        };
    }
}

#[derive(Debug, Clone, Copy)]
struct Seg {
    route: usize,
    a: usize,
    b: usize,
    rev: bool,
}

#[derive(Debug, Clone, Copy)]
enum Target {
    Existing(usize),
    New(usize),
}

const MAX_SEGS: usize = 5;

#[derive(Debug, Clone, Copy)]
struct Part {
    target: Target,
    segs: [Seg; MAX_SEGS],
    len: usize,
}

impl Part {
    fn new(target: Target) -> Self {
        Part {
            target,
            segs: [Seg {
                route: 0,
                a: 0,
                b: 0,
                rev: false,
            }; MAX_SEGS],
            len: 0,
        }
    }

    /// Appends positions `a..=b` of `route`; empty ranges are skipped.
    fn push(&mut self, route: usize, a: isize, b: isize, rev: bool) {
        if a <= b && a >= 0 {
            self.segs[self.len] = Seg {
                route,
                a: a as usize,
                b: b as usize,
                rev,
            };
            self.len += 1;
        }
    }

    fn segs(&self) -> &[Seg] {
        &self.segs[..self.len]
    }
}

#[derive(Debug, Clone, Copy)]
struct Plan {
    parts: [Part; 2],
    len: usize,
}

impl Plan {
    fn one(p: Part) -> Self {
        Plan {
            parts: [p, p],
            len: 1,
        }
    }

    fn two(p: Part, q: Part) -> Self {
        Plan {
            parts: [p, q],
            len: 2,
        }
    }

    fn parts(&self) -> &[Part] {
        &self.parts[..self.len]
    }
}

/// Editable solution state used by local search and repair.
#[derive(Debug, Clone)]
pub struct Workspace<'a> {
    inst: &'a Instance,
    routes: Vec<WRoute>,
    pos: Vec<(usize, usize)>,
    depot_load: Vec<Load>,
    depot_routes: Vec<usize>,
    cost: Cost,
    violations: Violations,
}

impl<'a> Workspace<'a> {
    /// Loads a solution. Depots without routes are dropped from the state.
    pub fn new(inst: &'a Instance, solution: &Solution) -> Self {
        let routes = solution
            .routes
            .iter()
            .filter(|r| !r.customers.is_empty())
            .map(|r| WRoute::new(inst, r.depot, r.customers.clone()))
            .collect();
        let mut ws = Workspace {
            inst,
            routes,
            pos: vec![(usize::MAX, usize::MAX); inst.num_customers()],
            depot_load: vec![0; inst.num_depots()],
            depot_routes: vec![0; inst.num_depots()],
            cost: 0.0,
            violations: Violations::default(),
        };
        ws.recompute_totals();
        for r in 0..ws.routes.len() {
            ws.index_route(r);
        }
        ws
    }

    fn recompute_totals(&mut self) {
        let inst = self.inst;
        self.depot_load.iter_mut().for_each(|l| *l = 0);
        self.depot_routes.iter_mut().for_each(|c| *c = 0);
        let mut cost = 0.0;
        let mut route_over = 0;
        for r in &self.routes {
            self.depot_load[r.depot] += r.load;
            self.depot_routes[r.depot] += 1;
            cost += r.length + inst.vehicle_cost;
            route_over += (r.load - inst.vehicle_capacity).max(0);
        }
        let mut depot_over = 0;
        for (d, spec) in inst.depots.iter().enumerate() {
            if self.depot_routes[d] > 0 {
                cost += spec.opening_cost;
            }
            depot_over += (self.depot_load[d] - spec.capacity).max(0);
        }
        self.cost = cost;
        self.violations = Violations {
            depot: depot_over,
            route: route_over,
        };
    }

    fn index_route(&mut self, r: usize) {
        for (p, &j) in self.routes[r].customers.iter().enumerate() {
            self.pos[j] = (r, p);
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.inst
    }

    pub fn cost(&self) -> Cost {
        self.cost
    }

    pub fn violations(&self) -> Violations {
        self.violations
    }

    pub fn num_routes(&self) -> usize {
        self.routes.len()
    }

    pub fn is_open(&self, depot: usize) -> bool {
        self.depot_routes[depot] > 0
    }

    pub fn depot_load(&self, depot: usize) -> Load {
        self.depot_load[depot]
    }

    pub fn route_of(&self, j: usize) -> usize {
        self.pos[j].0
    }

    pub fn route_depot(&self, r: usize) -> usize {
        self.routes[r].depot
    }

    pub fn route_customers(&self, r: usize) -> &[usize] {
        &self.routes[r].customers
    }

    pub fn route_load(&self, r: usize) -> Load {
        self.routes[r].load
    }

    /// Customer following `j` on its route.
    pub fn next(&self, j: usize) -> Option<usize> {
        let (r, p) = self.pos[j];
        self.routes[r].customers.get(p + 1).copied()
    }

    pub fn prev(&self, j: usize) -> Option<usize> {
        let (r, p) = self.pos[j];
        p.checked_sub(1).map(|q| self.routes[r].customers[q])
    }

    pub fn to_solution(&self) -> Solution {
        Solution::from_routes(
            self.inst,
            self.routes.iter().map(|r| (r.depot, r.customers.clone())),
            &[],
        )
        .expect("workspace preserves visitation")
    }

    /// Routes with cached fields, for callers that build solutions directly.
    pub fn routes(&self) -> Vec<Route> {
        self.routes
            .iter()
            .map(|r| Route {
                depot: r.depot,
                customers: r.customers.clone(),
                load: r.load,
                length: r.length,
            })
            .collect()
    }

    /// Scope of a move under the current state.
    pub fn scope(&self, mv: &Move) -> Scope {
        let same = |a: usize, b: usize| self.pos[a].0 == self.pos[b].0;
        let intra = match *mv {
            Move::Relocate {
                u,
                to: Anchor::After(v) | Anchor::Before(v),
                ..
            } => same(u, v),
            Move::Relocate { .. } => false,
            Move::Swap { u, v, .. } | Move::TwoOpt { u, v } | Move::TwoOptStar { u, v, .. } => {
                same(u, v)
            }
        };
        if intra {
            Scope::Intra
        } else {
            Scope::Inter
        }
    }

    fn block(&self, u: usize, len: u8) -> Option<(usize, isize, isize)> {
        let n = self.inst.num_customers();
        if u >= n || len == 0 || len > 2 {
            return None;
        }
        let (r, i) = self.pos[u];
        let end = i + len as usize - 1;
        (end < self.routes[r].customers.len()).then_some((r, i as isize, end as isize))
    }

    fn plan(&self, mv: &Move) -> Option<Plan> {
        let n = self.inst.num_customers();
        let last = |r: usize| self.routes[r].customers.len() as isize - 1;
        match *mv {
            Move::Relocate {
                u,
                len,
                reversed,
                to,
            } => {
                let (r1, i, e) = self.block(u, len)?;
                match to {
                    Anchor::After(v) | Anchor::Before(v) => {
                        if v >= n {
                            return None;
                        }
                        let (r2, jp) = self.pos[v];
                        let j = match to {
                            Anchor::After(_) => jp as isize,
                            _ => jp as isize - 1,
                        };
                        if r1 == r2 {
                            if j >= i && j < e {
                                return None;
                            }
                            let mut p = Part::new(Target::Existing(r1));
                            if j < i {
                                p.push(r1, 0, j, false);
                                p.push(r1, i, e, reversed);
                                p.push(r1, j + 1, i - 1, false);
                                p.push(r1, e + 1, last(r1), false);
                            } else {
                                p.push(r1, 0, i - 1, false);
                                p.push(r1, e + 1, j, false);
                                p.push(r1, i, e, reversed);
                                p.push(r1, j + 1, last(r1), false);
                            }
                            Some(Plan::one(p))
                        } else {
                            let mut p = Part::new(Target::Existing(r1));
                            p.push(r1, 0, i - 1, false);
                            p.push(r1, e + 1, last(r1), false);
                            let mut q = Part::new(Target::Existing(r2));
                            q.push(r2, 0, j, false);
                            q.push(r1, i, e, reversed);
                            q.push(r2, j + 1, last(r2), false);
                            Some(Plan::two(p, q))
                        }
                    }
                    Anchor::NewRoute(d) => {
                        if d >= self.inst.num_depots() {
                            return None;
                        }
                        let mut p = Part::new(Target::Existing(r1));
                        p.push(r1, 0, i - 1, false);
                        p.push(r1, e + 1, last(r1), false);
                        let mut q = Part::new(Target::New(d));
                        q.push(r1, i, e, reversed);
                        Some(Plan::two(p, q))
                    }
                }
            }
            Move::Swap { u, ulen, v, vlen } => {
                let (r1, i1, e1) = self.block(u, ulen)?;
                let (r2, i2, e2) = self.block(v, vlen)?;
                if r1 == r2 {
                    let ((i, e), (j, f)) = if i1 < i2 {
                        ((i1, e1), (i2, e2))
                    } else {
                        ((i2, e2), (i1, e1))
                    };
                    if e >= j {
                        return None;
                    }
                    let mut p = Part::new(Target::Existing(r1));
                    p.push(r1, 0, i - 1, false);
                    p.push(r1, j, f, false);
                    p.push(r1, e + 1, j - 1, false);
                    p.push(r1, i, e, false);
                    p.push(r1, f + 1, last(r1), false);
                    Some(Plan::one(p))
                } else {
                    let mut p = Part::new(Target::Existing(r1));
                    p.push(r1, 0, i1 - 1, false);
                    p.push(r2, i2, e2, false);
                    p.push(r1, e1 + 1, last(r1), false);
                    let mut q = Part::new(Target::Existing(r2));
                    q.push(r2, 0, i2 - 1, false);
                    q.push(r1, i1, e1, false);
                    q.push(r2, e2 + 1, last(r2), false);
                    Some(Plan::two(p, q))
                }
            }
            Move::TwoOpt { u, v } => {
                if u >= n || v >= n || u == v {
                    return None;
                }
                let (r1, a) = self.pos[u];
                let (r2, b) = self.pos[v];
                if r1 != r2 {
                    return None;
                }
                let (i, j) = if a < b {
                    (a as isize, b as isize)
                } else {
                    (b as isize, a as isize)
                };
                let mut p = Part::new(Target::Existing(r1));
                p.push(r1, 0, i, false);
                p.push(r1, i + 1, j, true);
                p.push(r1, j + 1, last(r1), false);
                Some(Plan::one(p))
            }
            Move::TwoOptStar { u, v, reversed } => {
                if u >= n || v >= n {
                    return None;
                }
                let (r1, i) = self.pos[u];
                let (r2, j) = self.pos[v];
                if r1 == r2 {
                    return None;
                }
                let (i, j) = (i as isize, j as isize);
                let mut p = Part::new(Target::Existing(r1));
                let mut q = Part::new(Target::Existing(r2));
                p.push(r1, 0, i, false);
                if !reversed {
                    p.push(r2, j, last(r2), false);
                    q.push(r2, 0, j - 1, false);
                    q.push(r1, i + 1, last(r1), false);
                } else {
                    p.push(r2, 0, j, true);
                    q.push(r1, i + 1, last(r1), true);
                    q.push(r2, j + 1, last(r2), false);
                }
                Some(Plan::two(p, q))
            }
        }
    }

    #[inline]
    fn seg_ends(&self, s: &Seg) -> (usize, usize) {
        let c = &self.routes[s.route].customers;
        if s.rev {
            (c[s.b], c[s.a])
        } else {
            (c[s.a], c[s.b])
        }
    }

    /// Length and load of the route obtained by concatenating `segs` at `depot`.
    fn part_metrics(&self, depot: usize, segs: &[Seg]) -> (Cost, Load) {
        if segs.is_empty() {
            return (0.0, 0);
        }
        let inst = self.inst;
        let mut len = 0.0;
        let mut load = 0;
        let mut prev: Option<usize> = None;
        for s in segs {
            let r = &self.routes[s.route];
            len += r.dist[s.b] - r.dist[s.a];
            load += r.acc[s.b + 1] - r.acc[s.a];
            let (first, lastc) = self.seg_ends(s);
            len += match prev {
                None => inst.dc(depot, first),
                Some(p) => inst.cc(p, first),
            };
            prev = Some(lastc);
        }
        len += inst.dc(depot, prev.unwrap());
        (len, load)
    }

    fn eval_plan(&self, plan: &Plan) -> Delta {
        let inst = self.inst;
        let q = inst.vehicle_capacity;
        let mut delta = Delta {
            cost: 0.0,
            depot_over: 0,
            route_over: 0,
            local_feasible: true,
        };
        // (depot, load change, route-count change)
        let mut touched: [(usize, Load, isize); 3] = [(usize::MAX, 0, 0); 3];
        let mut nt = 0;
        let mut touch = |d: usize, dl: Load, dr: isize| {
            for t in touched.iter_mut().take(nt) {
                if t.0 == d {
                    t.1 += dl;
                    t.2 += dr;
                    return;
                }
            }
            touched[nt] = (d, dl, dr);
            nt += 1;
        };
        for part in plan.parts() {
            let (depot, old_len, old_load, old_count) = match part.target {
                Target::Existing(r) => {
                    let wr = &self.routes[r];
                    (wr.depot, wr.length, wr.load, 1isize)
                }
                Target::New(d) => (d, 0.0, 0, 0),
            };
            let (len, load) = self.part_metrics(depot, part.segs());
            let count = isize::from(part.len > 0);
            delta.cost += len - old_len + inst.vehicle_cost * (count - old_count) as Cost;
            delta.route_over += (load - q).max(0) - (old_load - q).max(0);
            if load > q {
                delta.local_feasible = false;
            }
            touch(depot, load - old_load, count - old_count);
        }
        for &(d, dl, dr) in touched.iter().take(nt) {
            let spec = &inst.depots[d];
            let before = self.depot_routes[d] as isize;
            let after = before + dr;
            if before > 0 && after == 0 {
                delta.cost -= spec.opening_cost;
            } else if before == 0 && after > 0 {
                delta.cost += spec.opening_cost;
            }
            let old = self.depot_load[d];
            let new = old + dl;
            delta.depot_over += (new - spec.capacity).max(0) - (old - spec.capacity).max(0);
            if new > spec.capacity && dl > 0 {
                delta.local_feasible = false;
            }
        }
        delta
    }

    /// Evaluates `mv` without applying it. `None` when the move is not
    /// well-formed for the current state.
    pub fn evaluate(&self, mv: &Move) -> Option<Delta> {
        self.plan(mv).map(|p| self.eval_plan(&p))
    }

    fn materialize(&self, part: &Part) -> Vec<usize> {
        let mut out = Vec::new();
        for s in part.segs() {
            let c = &self.routes[s.route].customers[s.a..=s.b];
            if s.rev {
                out.extend(c.iter().rev());
            } else {
                out.extend_from_slice(c);
            }
        }
        out
    }

    /// Customer sequences `(depot, customers)` that `mv` would produce for the
    /// routes it touches, paired with the sequences it replaces.
    pub fn preview(
        &self,
        mv: &Move,
    ) -> Option<(Vec<(usize, Vec<usize>)>, Vec<(usize, Vec<usize>)>)> {
        let plan = self.plan(mv)?;
        let mut new = Vec::new();
        let mut old = Vec::new();
        for part in plan.parts() {
            let depot = match part.target {
                Target::Existing(r) => {
                    old.push((self.routes[r].depot, self.routes[r].customers.clone()));
                    self.routes[r].depot
                }
                Target::New(d) => d,
            };
            new.push((depot, self.materialize(part)));
        }
        Some((new, old))
    }

    /// Applies `mv`, returning its delta. Routes left empty are deleted and
    /// depots left without routes close.
    pub fn apply(&mut self, mv: &Move) -> Option<Delta> {
        let plan = self.plan(mv)?;
        let delta = self.eval_plan(&plan);
        let built: Vec<(Target, Vec<usize>)> = plan
            .parts()
            .iter()
            .map(|p| (p.target, self.materialize(p)))
            .collect();
        let inst = self.inst;
        for (target, seq) in built {
            match target {
                Target::Existing(r) => {
                    self.routes[r].customers = seq;
                    self.routes[r].rebuild(inst);
                    self.index_route(r);
                }
                Target::New(d) => {
                    self.routes.push(WRoute::new(inst, d, seq));
                    let r = self.routes.len() - 1;
                    self.index_route(r);
                }
            }
        }
        let mut r = self.routes.len();
        while r > 0 {
            r -= 1;
            if self.routes[r].customers.is_empty() {
                self.routes.swap_remove(r);
                if r < self.routes.len() {
                    self.index_route(r);
                }
            }
        }
        self.cost += delta.cost;
        self.violations.depot += delta.depot_over;
        self.violations.route += delta.route_over;
        self.depot_load.iter_mut().for_each(|l| *l = 0);
        self.depot_routes.iter_mut().for_each(|c| *c = 0);
        for wr in &self.routes {
            self.depot_load[wr.depot] += wr.load;
            self.depot_routes[wr.depot] += 1;
        }
        Some(delta)
    }
}

/// Cost difference of applying `mv` to `solution`, checked against the
/// solution's current state.
pub fn evaluate_move(solution: &Solution, instance: &Instance, mv: &Move) -> Result<Cost> {
    let ws = Workspace::new(instance, solution);
    ws.evaluate(mv)
        .map(|d| d.cost)
        .ok_or_else(|| Error::InvalidArgument(format!("move {mv:?} has invalid endpoints")))
}
