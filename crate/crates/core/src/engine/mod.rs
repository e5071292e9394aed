//! Main loop, run parameters, exact oracle and instance generator.

mod oracle;
mod tiny;

pub use oracle::{brute_force_oracle, ORACLE_MAX_CUSTOMERS, ORACLE_MAX_DEPOTS};
pub use tiny::generate_tiny;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::construct::{estimate_all, CrhParams};
use crate::crossover::mdeax;
use crate::localsearch::{vnd_improve, NeighborLists};
use crate::model::{DepotConfiguration, Instance, Solution};
use crate::population::{
    fresh_configs, halve_subpops, init_population, replace_worst_config, restart_if_stagnant,
    select_parents, BuildContext, InsertOutcome, PopParams, Population,
};
use crate::repairmutate::{mutate, repair, TabuList};
use crate::{Cost, Error, Result};

/// Search parameters. `gamma` overrides `crh.gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunParams {
    pub mu: usize,
    pub lambda: usize,
    /// Granular neighbor list length.
    pub alpha: usize,
    /// Mutation probability.
    pub zeta: f64,
    /// Fraction of customers removed by a mutation.
    pub xi: f64,
    /// Stagnant local-search calls before a restart.
    pub eta: u64,
    /// Maximum offspring per crossover.
    pub beta: usize,
    /// Keyed subpopulations.
    pub gamma: usize,
    pub max_iterations: Option<u64>,
    /// Wall-clock budget in seconds.
    pub time_limit: Option<f64>,
    pub crh: CrhParams,
    pub tabu_tenure: usize,
    /// Keyed configurations to use instead of running the CRH filters.
    pub seed_configs: Option<Vec<Vec<usize>>>,
    /// Stop as soon as the incumbent reaches this objective.
    pub target_objective: Option<Cost>,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            mu: 30,
            lambda: 30,
            alpha: 20,
            zeta: 0.15,
            xi: 0.25,
            eta: 70_000,
            beta: 10,
            gamma: 10,
            max_iterations: Some(300_000),
            time_limit: None,
            crh: CrhParams::default(),
            tabu_tenure: TabuList::DEFAULT_TENURE,
            seed_configs: None,
            target_objective: None,
        }
    }
}

impl RunParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.mu,
            self.lambda,
            self.alpha,
            self.beta,
            self.gamma,
            self.tabu_tenure,
        ];
        if positive.contains(&0) || self.eta == 0 {
            return Err(Error::InvalidArgument(
                "mu, lambda, alpha, beta, gamma, eta and tenure must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.zeta) || !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(Error::InvalidArgument(
                "require 0 <= zeta <= 1 and 0 < xi <= 1".into(),
            ));
        }
        if self.max_iterations.is_none() && self.time_limit.is_none() {
            return Err(Error::InvalidArgument(
                "set max_iterations or time_limit".into(),
            ));
        }
        if self.time_limit.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::InvalidArgument("time limit must be positive".into()));
        }
        self.crh_params().validate()
    }

    fn crh_params(&self) -> CrhParams {
        CrhParams {
            gamma: self.gamma,
            ..self.crh.clone()
        }
    }
}

/// Counters and timings of one run. Times are in seconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub best_cost: Cost,
    pub iteration_of_best: u64,
    pub wall_time: f64,
    pub time_to_best: f64,
    pub iterations: u64,
    pub restarts: u64,
    pub crossovers: u64,
    pub repairs: u64,
    pub local_search_calls: u64,
    pub crossover_offspring: u64,
    pub mutation_offspring: u64,
    /// `(iteration, objective)` each time the incumbent improved.
    pub improvements: Vec<(u64, Cost)>,
}

impl RunStats {
    /// Copy with the wall-clock fields zeroed.
    pub fn without_timings(&self) -> RunStats {
        RunStats {
            wall_time: 0.0,
            time_to_best: 0.0,
            ..self.clone()
        }
    }
}

struct Clock {
    start: Instant,
    limit: Option<f64>,
    max_iterations: Option<u64>,
    target: Option<Cost>,
}

impl Clock {
    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn done(&self, iterations: u64, best: Cost) -> bool {
        self.max_iterations.is_some_and(|m| iterations >= m)
            || self.limit.is_some_and(|t| self.elapsed() >= t)
            || self.target.is_some_and(|t| best <= t)
    }

    fn past_half(&self, iterations: u64) -> bool {
        match (self.max_iterations, self.limit) {
            (Some(m), _) => iterations >= m / 2,
            (None, Some(t)) => self.elapsed() >= t / 2.0,
            (None, None) => false,
        }
    }
}

/// Runs the hybrid genetic search and returns the best feasible solution.
pub fn run(instance: &Instance, params: &RunParams, seed: u64) -> Result<(Solution, RunStats)> {
    instance.ensure_feasible()?;
    params.validate()?;
    let clock = Clock {
        start: Instant::now(),
        limit: params.time_limit,
        max_iterations: params.max_iterations,
        target: params.target_objective,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let crh = params.crh_params();
    let lists = NeighborLists::build(instance, params.alpha);
    let estimates = estimate_all(instance);
    let pop_params = PopParams {
        p_d: crh.p_d,
        ..PopParams::with_sizes(params.mu, params.lambda)
    };
    let ctx = BuildContext {
        instance,
        lists: &lists,
        estimates: &estimates,
        params: &pop_params,
    };
    let tol = instance.tolerance();

    let configs = match &params.seed_configs {
        Some(sets) => sets
            .iter()
            .map(|s| DepotConfiguration::new(instance, s.iter().copied()))
            .collect::<Result<Vec<_>>>()?,
        None => fresh_configs(instance, &crh, &lists, &mut rng)?,
    };
    let mut pop = init_population(&configs, &ctx, &mut rng)?;
    let incumbent = |pop: &Population| pop.best().map(|b| b.cost).unwrap_or(Cost::INFINITY);
    let mut stats = RunStats {
        best_cost: incumbent(&pop),
        ..RunStats::default()
    };
    stats.improvements.push((0, stats.best_cost));
    stats.time_to_best = clock.elapsed();
    let mut halved = false;

    'search: while !clock.done(stats.iterations, stats.best_cost) {
        if !halved && clock.past_half(stats.iterations) {
            halve_subpops(&mut pop);
            halved = true;
        }
        let (a, b) = select_parents(&pop, &mut rng)?;
        stats.crossovers += 1;
        let mut offspring = mdeax(&a, &b, params.beta, &mut rng, instance, &lists)?;
        let mutation_path = offspring.is_empty();
        if mutation_path {
            offspring.push(mutate(&a, 1.0, params.xi, instance, &mut rng)?);
        }
        for child in offspring {
            if clock.done(stats.iterations, stats.best_cost) {
                break 'search;
            }
            let mut child = match improve(child, params, &lists, instance, &mut stats) {
                Ok(c) => c,
                Err(Error::RepairFailed(_)) => continue,
                Err(e) => return Err(e),
            };
            child = mutate(&child, params.zeta, params.xi, instance, &mut rng)?;
            if !child.is_feasible() {
                child = match improve(child, params, &lists, instance, &mut stats) {
                    Ok(c) => c,
                    Err(Error::RepairFailed(_)) => continue,
                    Err(e) => return Err(e),
                };
            }
            let child = vnd_improve(&child, &lists, instance)?;
            stats.local_search_calls += 1;
            stats.iterations += 1;
            if mutation_path {
                stats.mutation_offspring += 1;
            } else {
                stats.crossover_offspring += 1;
            }
            if pop.offer_best(&child, tol) {
                stats.best_cost = child.cost;
                stats.iteration_of_best = stats.iterations;
                stats.time_to_best = clock.elapsed();
                stats.improvements.push((stats.iterations, child.cost));
                if pop.is_keyed(&child.config)
                    || !replace_worst_config(&mut pop, &child.config, &child, &ctx, &mut rng)?
                {
                    insert(&mut pop, child, &ctx);
                }
            } else {
                pop.note_stagnant();
                insert(&mut pop, child, &ctx);
            }
            if restart_if_stagnant(&mut pop, params.eta, &crh, &ctx, &mut rng)? {
                stats.restarts += 1;
            }
        }
    }
    stats.wall_time = clock.elapsed();
    let best = pop
        .best()
        .cloned()
        .ok_or_else(|| Error::Internal("no incumbent after search".into()))?;
    Ok((best, stats))
}

fn improve(
    child: Solution,
    params: &RunParams,
    lists: &NeighborLists,
    instance: &Instance,
    stats: &mut RunStats,
) -> Result<Solution> {
    if child.is_feasible() {
        return Ok(child);
    }
    stats.repairs += 1;
    repair(&child, instance, lists, params.tabu_tenure)
}

/// Clones and homeless configurations are simply dropped.
fn insert(pop: &mut Population, child: Solution, ctx: &BuildContext<'_>) {
    let _: InsertOutcome = pop.insert(child, ctx.instance, ctx.params);
}
