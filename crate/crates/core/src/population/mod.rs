//! Configuration-keyed subpopulations with distance-and-quality survivor
//! selection.

mod adq;

pub use adq::adq_removals;

use rand::Rng;

use crate::construct::{
    estimate_all, preliminary_filter, random_config_build, rgh_build, secondary_filter, CrhParams,
    DepotEstimate,
};
use crate::localsearch::{vnd_improve, NeighborLists};
use crate::model::{DepotConfiguration, Instance, Signature, Solution};
use crate::{Cost, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PopParams {
    /// Survivors after selection.
    pub mu: usize,
    /// Generation size: selection runs at `mu + lambda` members.
    pub lambda: usize,
    pub n_close: usize,
    pub n_elite: usize,
    /// Solutions generated per subpopulation at initialization, as a multiple of `mu`.
    pub init_factor: usize,
    /// Head bias for random depot selection in the free subpopulation.
    pub p_d: f64,
}

impl Default for PopParams {
    fn default() -> Self {
        PopParams::with_sizes(30, 30)
    }
}

impl PopParams {
    pub fn with_sizes(mu: usize, lambda: usize) -> Self {
        PopParams {
            mu,
            lambda,
            n_close: 5,
            n_elite: mu / 2,
            init_factor: 4,
            p_d: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubpopKey {
    Config(DepotConfiguration),
    Free,
}

#[derive(Debug, Clone)]
struct Member {
    solution: Solution,
    signature: Signature,
}

#[derive(Debug, Clone)]
pub struct Subpopulation {
    key: SubpopKey,
    members: Vec<Member>,
}

impl Subpopulation {
    pub fn new(key: SubpopKey) -> Self {
        Subpopulation {
            key,
            members: Vec::new(),
        }
    }

    pub fn key(&self) -> &SubpopKey {
        &self.key
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn solutions(&self) -> impl Iterator<Item = &Solution> + '_ {
        self.members.iter().map(|m| &m.solution)
    }

    pub fn get(&self, k: usize) -> &Solution {
        &self.members[k].solution
    }

    /// Mean objective of the members; infinite when empty.
    pub fn average_objective(&self) -> Cost {
        if self.members.is_empty() {
            return Cost::INFINITY;
        }
        self.members.iter().map(|m| m.solution.cost).sum::<Cost>() / self.members.len() as Cost
    }

    fn has_clone(&self, sig: &Signature) -> bool {
        self.members
            .iter()
            .any(|m| m.signature.distance(sig).map_or(false, |d| d == 0))
    }

    /// Reduces the subpopulation to `mu` members.
    pub fn adq_select(&mut self, params: &PopParams) {
        let costs: Vec<Cost> = self.members.iter().map(|m| m.solution.cost).collect();
        let sigs: Vec<Signature> = self.members.iter().map(|m| m.signature.clone()).collect();
        let mut gone = adq_removals(&costs, &sigs, params.mu, params.n_close, params.n_elite);
        gone.sort_unstable();
        for k in gone.into_iter().rev() {
            self.members.remove(k);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Inserted {
        subpop: usize,
    },
    Clone,
    /// No subpopulation takes the configuration (possible after halving).
    NoHome,
}

/// Keyed subpopulations followed by at most one free subpopulation.
#[derive(Debug, Clone)]
pub struct Population {
    subpops: Vec<Subpopulation>,
    best: Option<Solution>,
    stagnation: u64,
    halved: bool,
}

impl Population {
    pub fn empty(configs: &[DepotConfiguration]) -> Self {
        let mut subpops: Vec<Subpopulation> = configs
            .iter()
            .map(|c| Subpopulation::new(SubpopKey::Config(c.clone())))
            .collect();
        subpops.push(Subpopulation::new(SubpopKey::Free));
        Population {
            subpops,
            best: None,
            stagnation: 0,
            halved: false,
        }
    }

    pub fn subpops(&self) -> &[Subpopulation] {
        &self.subpops
    }

    pub fn best(&self) -> Option<&Solution> {
        self.best.as_ref()
    }

    pub fn stagnation(&self) -> u64 {
        self.stagnation
    }

    pub fn is_halved(&self) -> bool {
        self.halved
    }

    pub fn is_keyed(&self, config: &DepotConfiguration) -> bool {
        self.subpops
            .iter()
            .any(|s| s.key == SubpopKey::Config(config.clone()))
    }

    /// Records a feasible solution as a best-solution candidate. Returns true
    /// when it strictly improves the incumbent.
    pub fn offer_best(&mut self, solution: &Solution, tolerance: Cost) -> bool {
        if !solution.is_feasible() {
            return false;
        }
        let better = self
            .best
            .as_ref()
            .map_or(true, |b| solution.cost < b.cost - tolerance.max(1e-9));
        if better {
            self.best = Some(solution.clone());
            self.stagnation = 0;
        }
        better
    }

    /// Counts one local-search invocation that did not improve the incumbent.
    pub fn note_stagnant(&mut self) {
        self.stagnation += 1;
    }

    /// Routes a feasible solution to its keyed subpopulation or the free one,
    /// rejecting clones and running ADQ at `mu + lambda` members.
    pub fn insert(
        &mut self,
        solution: Solution,
        instance: &Instance,
        params: &PopParams,
    ) -> InsertOutcome {
        let target = self
            .subpops
            .iter()
            .position(|s| matches!(&s.key, SubpopKey::Config(c) if *c == solution.config))
            .or_else(|| self.subpops.iter().position(|s| s.key == SubpopKey::Free));
        let Some(k) = target else {
            return InsertOutcome::NoHome;
        };
        let signature = Signature::of(&solution, instance);
        let sp = &mut self.subpops[k];
        if sp.has_clone(&signature) {
            return InsertOutcome::Clone;
        }
        sp.members.push(Member {
            solution,
            signature,
        });
        if sp.members.len() >= params.mu + params.lambda {
            sp.adq_select(params);
        }
        InsertOutcome::Inserted { subpop: k }
    }
}

/// Shared inputs for building solutions.
pub struct BuildContext<'a> {
    pub instance: &'a Instance,
    pub lists: &'a NeighborLists,
    pub estimates: &'a [DepotEstimate],
    pub params: &'a PopParams,
}

fn build_one(
    ctx: &BuildContext<'_>,
    config: &DepotConfiguration,
    rng: &mut impl Rng,
) -> Result<Option<Solution>> {
    match rgh_build(ctx.instance, config, rng) {
        Ok(s) => vnd_improve(&s, ctx.lists, ctx.instance).map(Some),
        Err(Error::InfeasibleInstance(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Generates `init_factor * mu` solutions for subpopulation `k`, offering
/// each to the population and to the incumbent.
fn fill(pop: &mut Population, k: usize, ctx: &BuildContext<'_>, rng: &mut impl Rng) -> Result<()> {
    let tol = ctx.instance.tolerance();
    for _ in 0..ctx.params.init_factor * ctx.params.mu {
        let config = match pop.subpops[k].key.clone() {
            SubpopKey::Config(c) => c,
            SubpopKey::Free => {
                random_config_build(ctx.instance, ctx.estimates, ctx.params.p_d, rng)?
            }
        };
        if let Some(s) = build_one(ctx, &config, rng)? {
            pop.offer_best(&s, tol);
            pop.insert(s, ctx.instance, ctx.params);
        }
    }
    Ok(())
}

/// One subpopulation per configuration plus a free one, each seeded with
/// `init_factor * mu` improved RGH solutions.
pub fn init_population(
    configs: &[DepotConfiguration],
    ctx: &BuildContext<'_>,
    rng: &mut impl Rng,
) -> Result<Population> {
    let mut pop = Population::empty(configs);
    for k in 0..pop.subpops.len() {
        fill(&mut pop, k, ctx, rng)?;
    }
    if pop.best.is_none() {
        return Err(Error::InfeasibleInstance(
            "no feasible initial solution could be built".into(),
        ));
    }
    Ok(pop)
}

fn tournament_index(
    len: usize,
    better: impl Fn(usize, usize) -> bool,
    rng: &mut impl Rng,
) -> usize {
    let a = rng.gen_range(0..len);
    let b = rng.gen_range(0..len);
    if better(b, a) {
        b
    } else {
        a
    }
}

fn pick_member<'p>(sp: &'p Subpopulation, rng: &mut impl Rng) -> &'p Solution {
    let k = tournament_index(sp.len(), |x, y| sp.get(x).cost < sp.get(y).cost, rng);
    sp.get(k)
}

/// Binary tournament on a list of candidate subpopulations by average
/// objective (lower wins), with replacement.
fn pick_subpop(pop: &Population, cands: &[usize], rng: &mut impl Rng) -> usize {
    let avg = |k: usize| pop.subpops[cands[k]].average_objective();
    cands[tournament_index(cands.len(), |x, y| avg(x) < avg(y), rng)]
}

pub const PARENT_REDRAWS: usize = 10;

/// Two parents from distinct subpopulations when at least two are
/// nonempty; the second draw repeats up to `PARENT_REDRAWS` times while
/// both parents share a configuration.
pub fn select_parents(pop: &Population, rng: &mut impl Rng) -> Result<(Solution, Solution)> {
    let nonempty: Vec<usize> = (0..pop.subpops.len())
        .filter(|&k| !pop.subpops[k].is_empty())
        .collect();
    match nonempty.len() {
        0 => Err(Error::Internal(
            "parent selection on an empty population".into(),
        )),
        1 => {
            let sp = &pop.subpops[nonempty[0]];
            let a = pick_member(sp, rng).clone();
            let mut b = pick_member(sp, rng);
            for _ in 0..PARENT_REDRAWS {
                if b.config != a.config {
                    break;
                }
                b = pick_member(sp, rng);
            }
            Ok((a, b.clone()))
        }
        _ => {
            let s1 = pick_subpop(pop, &nonempty, rng);
            let a = pick_member(&pop.subpops[s1], rng).clone();
            let rest: Vec<usize> = nonempty.iter().copied().filter(|&k| k != s1).collect();
            let mut b = pick_member(&pop.subpops[pick_subpop(pop, &rest, rng)], rng);
            for _ in 0..PARENT_REDRAWS {
                if b.config != a.config {
                    break;
                }
                b = pick_member(&pop.subpops[pick_subpop(pop, &rest, rng)], rng);
            }
            Ok((a, b.clone()))
        }
    }
}

/// Rekeys the keyed subpopulation with the largest average objective to
/// `config`, seeds it with `improving` and refills it. No-op returning false
/// when `config` is already keyed or no keyed subpopulation exists.
pub fn replace_worst_config(
    pop: &mut Population,
    config: &DepotConfiguration,
    improving: &Solution,
    ctx: &BuildContext<'_>,
    rng: &mut impl Rng,
) -> Result<bool> {
    if pop.is_keyed(config) {
        return Ok(false);
    }
    let worst = (0..pop.subpops.len())
        .filter(|&k| matches!(pop.subpops[k].key, SubpopKey::Config(_)))
        .max_by(|&x, &y| {
            pop.subpops[x]
                .average_objective()
                .total_cmp(&pop.subpops[y].average_objective())
                .then(y.cmp(&x))
        });
    let Some(w) = worst else { return Ok(false) };
    pop.subpops[w] = Subpopulation::new(SubpopKey::Config(config.clone()));
    pop.insert(improving.clone(), ctx.instance, ctx.params);
    fill(pop, w, ctx, rng)?;
    Ok(true)
}

/// Rebuilds the population from fresh configurations once `stagnation`
/// reaches `eta`. The incumbent is kept as the reported best.
pub fn restart_if_stagnant(
    pop: &mut Population,
    eta: u64,
    crh: &CrhParams,
    ctx: &BuildContext<'_>,
    rng: &mut impl Rng,
) -> Result<bool> {
    if pop.stagnation < eta {
        return Ok(false);
    }
    let configs = fresh_configs(ctx.instance, crh, ctx.lists, rng)?;
    let best = pop.best.take();
    let mut fresh = init_population(&configs, ctx, rng)?;
    if let Some(b) = best {
        let keep = fresh.best.as_ref().map_or(true, |f| b.cost <= f.cost);
        if keep {
            fresh.best = Some(b);
        }
    }
    fresh.stagnation = 0;
    *pop = fresh;
    Ok(true)
}

/// Preliminary then secondary filter. When every preliminary attempt dead
/// ends, up to `h_max` random-greedy configurations stand in.
pub fn fresh_configs(
    instance: &Instance,
    crh: &CrhParams,
    lists: &NeighborLists,
    rng: &mut impl Rng,
) -> Result<Vec<DepotConfiguration>> {
    let mut candidates = preliminary_filter(instance, crh, rng)?;
    if candidates.is_empty() {
        let estimates = estimate_all(instance);
        for _ in 0..crh.h_max {
            let c = random_config_build(instance, &estimates, crh.p_d, rng)?;
            if !candidates.contains(&c) {
                candidates.push(c);
            }
        }
    }
    let ranked = secondary_filter(instance, &candidates, crh, lists, rng)?;
    Ok(ranked.into_iter().map(|r| r.config).collect())
}

/// Keeps the half (rounded up) of the subpopulations with the smallest
/// average objective. Only the first call per epoch has an effect.
pub fn halve_subpops(pop: &mut Population) -> bool {
    if pop.halved {
        return false;
    }
    pop.halved = true;
    let keep = pop.subpops.len().div_ceil(2);
    let mut order: Vec<usize> = (0..pop.subpops.len()).collect();
    order.sort_by(|&x, &y| {
        pop.subpops[x]
            .average_objective()
            .total_cmp(&pop.subpops[y].average_objective())
            .then(x.cmp(&y))
    });
    let mut survivors: Vec<usize> = order.into_iter().take(keep).collect();
    survivors.sort_unstable();
    let old = std::mem::take(&mut pop.subpops);
    pop.subpops = old
        .into_iter()
        .enumerate()
        .filter(|(k, _)| survivors.contains(k))
        .map(|(_, s)| s)
        .collect();
    true
}

#[cfg(test)]
mod tests;
