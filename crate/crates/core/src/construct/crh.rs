use std::collections::HashSet;

use rand::Rng;

use super::mst::DepotEstimate;
use super::pick::{probabilistic_pick, SortedCandidateList};
use super::rgh::rgh_build;
use crate::localsearch::{vnd_improve, NeighborLists};
use crate::model::{DepotConfiguration, Instance};
use crate::{Cost, Error, Load, Result};

/// Coverage-ratio heuristic parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CrhParams {
    pub r_min: f64,
    pub r_max: f64,
    /// Maximum number of configurations kept by the preliminary filter.
    pub h_max: usize,
    /// Consecutive failed attempts before the preliminary filter gives up.
    pub i_max: usize,
    /// Head bias of the probabilistic pick (`> 1`).
    pub p_d: f64,
    /// Solutions built per configuration by the secondary filter.
    pub n_t: usize,
    /// Configurations kept by the secondary filter.
    pub gamma: usize,
}

impl Default for CrhParams {
    fn default() -> Self {
        CrhParams {
            r_min: 0.1,
            r_max: 0.6,
            h_max: 1000,
            i_max: 1000,
            p_d: 6.0,
            n_t: 10,
            gamma: 10,
        }
    }
}

impl CrhParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.r_min && self.r_min < self.r_max && self.r_max <= 1.0) {
            return Err(Error::InvalidArgument(
                "require 0 <= r_min < r_max <= 1".into(),
            ));
        }
        if !(self.p_d > 1.0) {
            return Err(Error::InvalidArgument("p_d must exceed 1".into()));
        }
        if self.gamma == 0 || self.gamma > self.h_max || self.n_t == 0 || self.i_max == 0 {
            return Err(Error::InvalidArgument(
                "require 0 < gamma <= h_max, n_t > 0, i_max > 0".into(),
            ));
        }
        Ok(())
    }
}

/// One candidate evaluation inside the preliminary filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterStep {
    /// Depots selected so far in the configuration under construction.
    pub selected: Vec<usize>,
    pub selected_capacity: Load,
    pub candidate: usize,
    pub overlap_ratio: f64,
    pub threshold: f64,
    pub accepted: bool,
}

/// Preliminary filter with MST estimates computed from the instance.
pub fn preliminary_filter(
    instance: &Instance,
    params: &CrhParams,
    rng: &mut impl Rng,
) -> Result<Vec<DepotConfiguration>> {
    let estimates = super::mst::estimate_all(instance);
    preliminary_filter_traced(instance, &estimates, params, rng, None)
}

/// Builds up to `h_max` distinct configurations, each covering the total
/// demand, by growing depot sets whose coverage areas overlap little.
/// Dead ends and duplicates both count toward the `i_max` failure budget.
pub fn preliminary_filter_traced(
    instance: &Instance,
    estimates: &[DepotEstimate],
    params: &CrhParams,
    rng: &mut impl Rng,
    mut trace: Option<&mut Vec<FilterStep>>,
) -> Result<Vec<DepotConfiguration>> {
    instance.ensure_feasible()?;
    let m = instance.num_depots();
    let n = instance.num_customers();
    let total = instance.total_demand() as f64;
    let cover: Vec<Vec<bool>> = estimates
        .iter()
        .map(|e| {
            let mut b = vec![false; n];
            e.covered.iter().for_each(|&j| b[j] = true);
            b
        })
        .collect();

    let mut found: Vec<DepotConfiguration> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut failures = 0;
    while found.len() < params.h_max && failures < params.i_max {
        let s = rng.gen_range(0..m);
        let mut selected = vec![s];
        let mut covered = cover[s].clone();
        let mut t_c = instance.depots[s].capacity;
        let mut dead_end = false;
        while (t_c as f64) < total {
            let mut list = SortedCandidateList::new();
            for i in (0..m).filter(|i| !selected.contains(i)) {
                let (mut inter, mut union) = (0usize, 0usize);
                for j in 0..n {
                    inter += usize::from(covered[j] && cover[i][j]);
                    union += usize::from(covered[j] || cover[i][j]);
                }
                let ratio = if union == 0 {
                    0.0
                } else {
                    inter as f64 / union as f64
                };
                let w_i = instance.depots[i].capacity;
                let threshold =
                    (params.r_max - params.r_min) * ((w_i + t_c) as f64 / total) + params.r_min;
                let accepted = ratio < threshold;
                if let Some(t) = trace.as_deref_mut() {
                    t.push(FilterStep {
                        selected: selected.clone(),
                        selected_capacity: t_c,
                        candidate: i,
                        overlap_ratio: ratio,
                        threshold,
                        accepted,
                    });
                }
                if accepted {
                    list.insert(estimates[i].rough_cost, i, i);
                }
            }
            if list.is_empty() {
                dead_end = true;
                break;
            }
            let (_, &i) = probabilistic_pick(&list, params.p_d, rng)?;
            for j in 0..n {
                covered[j] |= cover[i][j];
            }
            selected.push(i);
            t_c += instance.depots[i].capacity;
        }
        if dead_end {
            failures += 1;
            continue;
        }
        let config = DepotConfiguration::new(instance, selected)?;
        if seen.insert(config.open().to_vec()) {
            found.push(config);
            failures = 0;
        } else {
            failures += 1;
        }
    }
    Ok(found)
}

/// A configuration ranked by the mean objective of improved RGH solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedConfig {
    pub config: DepotConfiguration,
    pub attractiveness: Cost,
    pub objectives: Vec<Cost>,
}

/// Scores each configuration by the mean cost of `n_t` improved RGH
/// solutions and keeps the `gamma` best. Configurations RGH cannot pack are
/// dropped.
pub fn secondary_filter(
    instance: &Instance,
    configs: &[DepotConfiguration],
    params: &CrhParams,
    lists: &NeighborLists,
    rng: &mut impl Rng,
) -> Result<Vec<RankedConfig>> {
    if configs.is_empty() {
        return Err(Error::InvalidArgument(
            "secondary filter needs at least one configuration".into(),
        ));
    }
    let mut ranked = Vec::with_capacity(configs.len());
    'configs: for config in configs {
        let mut objectives = Vec::with_capacity(params.n_t);
        for _ in 0..params.n_t {
            let sol = match rgh_build(instance, config, rng) {
                Ok(s) => s,
                Err(Error::InfeasibleInstance(_)) => continue 'configs,
                Err(e) => return Err(e),
            };
            objectives.push(vnd_improve(&sol, lists, instance)?.cost);
        }
        let attractiveness = objectives.iter().sum::<Cost>() / objectives.len() as Cost;
        ranked.push(RankedConfig {
            config: config.clone(),
            attractiveness,
            objectives,
        });
    }
    ranked.sort_by(|a, b| a.attractiveness.total_cmp(&b.attractiveness));
    ranked.truncate(params.gamma);
    if ranked.is_empty() {
        return Err(Error::InfeasibleInstance(
            "no configuration could be packed".into(),
        ));
    }
    Ok(ranked)
}

/// Random-greedy depot selection by rough cost, ignoring dispersion.
pub fn random_config_build(
    instance: &Instance,
    estimates: &[DepotEstimate],
    p_d: f64,
    rng: &mut impl Rng,
) -> Result<DepotConfiguration> {
    instance.ensure_feasible()?;
    let mut list = SortedCandidateList::new();
    for e in estimates {
        list.insert(e.rough_cost, e.depot, e.depot);
    }
    let mut chosen = Vec::new();
    let mut cap = 0;
    while cap < instance.total_demand() {
        let (idx, _) = probabilistic_pick(&list, p_d, rng)?;
        let d = list.remove(idx);
        cap += instance.depots[d].capacity;
        chosen.push(d);
    }
    DepotConfiguration::new(instance, chosen)
}
