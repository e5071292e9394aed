use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::construct::estimate_all;
use crate::engine::generate_tiny;
use crate::model::Signature;
use crate::testutil::random_feasible;

fn distinct_solutions(inst: &Instance, count: usize, rng: &mut impl Rng) -> Vec<Solution> {
    let mut out: Vec<Solution> = Vec::new();
    while out.len() < count {
        let s = random_feasible(inst, rng);
        let sig = Signature::of(&s, inst);
        if out
            .iter()
            .all(|o| Signature::of(o, inst).distance(&sig).unwrap() > 0)
        {
            out.push(s);
        }
    }
    out
}

/// Straightforward restatement of the biased-fitness survivor rule.
fn reference_adq(
    costs: &[f64],
    d: &[Vec<u32>],
    keep: usize,
    n_close: usize,
    n_elite: usize,
) -> Vec<usize> {
    let mut alive: Vec<usize> = (0..costs.len()).collect();
    let mut out = Vec::new();
    while alive.len() > keep {
        let mut best = alive[0];
        for &a in &alive {
            if costs[a] < costs[best] {
                best = a;
            }
        }
        let mut victim = None;
        'outer: for &a in &alive {
            if a == best {
                continue;
            }
            for &b in &alive {
                if b != a && d[a][b] == 0 && (b < a || b == best) {
                    victim = Some(a);
                    break 'outer;
                }
            }
        }
        let victim = victim.unwrap_or_else(|| {
            let contrib = |a: usize| {
                let mut ds: Vec<u32> = alive
                    .iter()
                    .filter(|&&b| b != a)
                    .map(|&b| d[a][b])
                    .collect();
                ds.sort();
                let k = n_close.min(ds.len());
                ds[..k].iter().sum::<u32>() as f64 / k as f64
            };
            let size = alive.len() as f64;
            let mut worst = None;
            let mut worst_bf = f64::NEG_INFINITY;
            for &a in &alive {
                if a == best {
                    continue;
                }
                let rf = alive
                    .iter()
                    .filter(|&&b| costs[b] < costs[a] || (costs[b] == costs[a] && b < a))
                    .count();
                let ca = contrib(a);
                let rd = alive
                    .iter()
                    .filter(|&&b| {
                        let cb = contrib(b);
                        cb > ca || (cb == ca && b < a)
                    })
                    .count();
                let bf = rf as f64 + (1.0 - n_elite as f64 / size) * rd as f64;
                if bf >= worst_bf {
                    worst_bf = bf;
                    worst = Some(a);
                }
            }
            worst.unwrap()
        });
        alive.retain(|&x| x != victim);
        out.push(victim);
    }
    out
}

#[test]
fn adq_matches_reference_on_twelve_member_fixture() {
    let inst = generate_tiny(10, 3, 42).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let sols = distinct_solutions(&inst, 12, &mut rng);
    let costs: Vec<f64> = sols.iter().map(|s| s.cost).collect();
    let sigs: Vec<Signature> = sols.iter().map(|s| Signature::of(s, &inst)).collect();
    let d: Vec<Vec<u32>> = sigs
        .iter()
        .map(|a| sigs.iter().map(|b| a.distance(b).unwrap()).collect())
        .collect();
    let got = adq_removals(&costs, &sigs, 6, 5, 3);
    assert_eq!(got, reference_adq(&costs, &d, 6, 5, 3));
    assert_eq!(got.len(), 6);
    let best = (0..12)
        .min_by(|&a, &b| costs[a].total_cmp(&costs[b]))
        .unwrap();
    assert!(!got.contains(&best));
}

#[test]
fn adq_matches_reference_on_random_fixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..30 {
        let inst = generate_tiny(8, 2, seed).unwrap();
        let mut sols = distinct_solutions(&inst, 10, &mut rng);
        // Duplicate two members to exercise the clone rule.
        sols.push(sols[3].clone());
        sols.push(sols[0].clone());
        let costs: Vec<f64> = sols.iter().map(|s| s.cost).collect();
        let sigs: Vec<Signature> = sols.iter().map(|s| Signature::of(s, &inst)).collect();
        let d: Vec<Vec<u32>> = sigs
            .iter()
            .map(|a| sigs.iter().map(|b| a.distance(b).unwrap()).collect())
            .collect();
        let got = adq_removals(&costs, &sigs, 5, 3, 2);
        assert_eq!(got, reference_adq(&costs, &d, 5, 3, 2));
        assert!(got.contains(&10) && got.contains(&11));
    }
}

fn ctx_parts(inst: &Instance) -> (NeighborLists, Vec<DepotEstimate>) {
    (NeighborLists::build(inst, 8), estimate_all(inst))
}

#[test]
fn insert_routes_rejects_clones_and_bounds_size() {
    let inst = generate_tiny(10, 3, 3).unwrap();
    let params = PopParams::with_sizes(4, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let first = random_feasible(&inst, &mut rng);
    let mut pop = Population::empty(&[first.config.clone()]);
    assert_eq!(
        pop.insert(first.clone(), &inst, &params),
        InsertOutcome::Inserted { subpop: 0 }
    );
    assert_eq!(
        pop.insert(first.clone(), &inst, &params),
        InsertOutcome::Clone
    );
    for _ in 0..10_000 {
        let s = random_feasible(&inst, &mut rng);
        let keyed = s.config == first.config;
        match pop.insert(s, &inst, &params) {
            InsertOutcome::Inserted { subpop } => assert_eq!(subpop == 0, keyed),
            InsertOutcome::Clone => {}
            InsertOutcome::NoHome => panic!("free subpopulation exists"),
        }
        for sp in pop.subpops() {
            assert!(sp.len() < params.mu + params.lambda);
        }
    }
    for s in pop.subpops()[0].solutions() {
        assert_eq!(s.config, first.config);
    }
    for sp in pop.subpops() {
        let sigs: Vec<Signature> = sp.solutions().map(|s| Signature::of(s, &inst)).collect();
        for a in 0..sigs.len() {
            for b in (a + 1)..sigs.len() {
                assert!(sigs[a].distance(&sigs[b]).unwrap() > 0);
            }
        }
    }
}

#[test]
fn adq_keeps_best_member() {
    let inst = generate_tiny(9, 2, 5).unwrap();
    let params = PopParams::with_sizes(3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pop = Population::empty(&[]);
    let mut best = f64::INFINITY;
    for _ in 0..500 {
        let s = random_feasible(&inst, &mut rng);
        if let InsertOutcome::Inserted { .. } = pop.insert(s.clone(), &inst, &params) {
            best = best.min(s.cost);
        }
        let free = &pop.subpops()[0];
        assert_eq!(
            free.solutions()
                .map(|s| s.cost)
                .fold(f64::INFINITY, f64::min),
            best
        );
    }
}

#[test]
fn init_single_config_population() {
    let inst = generate_tiny(14, 3, 11).unwrap();
    let (nl, est) = ctx_parts(&inst);
    let params = PopParams::with_sizes(5, 5);
    let ctx = BuildContext {
        instance: &inst,
        lists: &nl,
        estimates: &est,
        params: &params,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let config = DepotConfiguration::new(&inst, 0..3).unwrap();
    let pop = init_population(&[config.clone()], &ctx, &mut rng).unwrap();
    assert_eq!(pop.subpops().len(), 2);
    for s in pop.subpops()[0].solutions() {
        assert_eq!(s.config, config);
    }
    for sp in pop.subpops() {
        assert!(sp.len() < params.mu + params.lambda);
    }
    assert!(pop.best().unwrap().is_feasible());
}

#[test]
fn free_subpopulation_mixes_configurations() {
    let mut mixed = false;
    for seed in 0..10 {
        let inst = generate_tiny(12, 3, seed).unwrap();
        let (nl, est) = ctx_parts(&inst);
        let params = PopParams::with_sizes(5, 5);
        let ctx = BuildContext {
            instance: &inst,
            lists: &nl,
            estimates: &est,
            params: &params,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pop = init_population(&[], &ctx, &mut rng).unwrap();
        let mut configs: Vec<Vec<usize>> = pop.subpops()[0]
            .solutions()
            .map(|s| s.config.open().to_vec())
            .collect();
        configs.sort();
        configs.dedup();
        mixed |= configs.len() >= 2;
    }
    assert!(mixed);
}

fn two_level_population(inst: &Instance, rng: &mut impl Rng) -> (Population, usize) {
    // Subpopulation 0 holds the cheapest half of a pool, the free one the rest.
    let mut sols = distinct_solutions(inst, 16, rng);
    sols.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    let mut pop = Population::empty(&[]);
    pop.subpops.insert(0, Subpopulation::new(SubpopKey::Free));
    for (k, s) in sols.into_iter().enumerate() {
        let target = if k < 8 { 0 } else { 1 };
        let sig = Signature::of(&s, inst);
        pop.subpops[target].members.push(Member {
            solution: s,
            signature: sig,
        });
    }
    (pop, 0)
}

#[test]
fn parents_come_from_distinct_subpops_with_tournament_law() {
    let inst = generate_tiny(10, 2, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (pop, better) = two_level_population(&inst, &mut rng);
    let better_costs: Vec<f64> = pop.subpops()[better].solutions().map(|s| s.cost).collect();
    let trials = 100_000;
    let mut first_better = 0;
    for _ in 0..trials {
        let (a, b) = select_parents(&pop, &mut rng).unwrap();
        let a_better = better_costs.contains(&a.cost);
        let b_better = better_costs.contains(&b.cost);
        assert_ne!(a_better, b_better, "parents from the same subpopulation");
        first_better += usize::from(a_better);
    }
    let rate = first_better as f64 / trials as f64;
    assert!((rate - 0.75).abs() < 0.01, "rate {rate}");
}

#[test]
fn member_tournament_law() {
    let inst = generate_tiny(10, 2, 9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut sols = distinct_solutions(&inst, 2, &mut rng);
    sols.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    if sols[0].cost == sols[1].cost {
        return;
    }
    let mut sp = Subpopulation::new(SubpopKey::Free);
    for s in sols.iter() {
        sp.members.push(Member {
            solution: s.clone(),
            signature: Signature::of(s, &inst),
        });
    }
    let trials = 100_000;
    let wins = (0..trials)
        .filter(|_| pick_member(&sp, &mut rng).cost == sols[0].cost)
        .count();
    assert!((wins as f64 / trials as f64 - 0.75).abs() < 0.01);
}

#[test]
fn halving_keeps_best_averages_once() {
    let inst = generate_tiny(10, 3, 10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut pop = Population::empty(&[]);
    pop.subpops.clear();
    let sols = distinct_solutions(&inst, 22, &mut rng);
    for k in 0..11 {
        let mut sp = Subpopulation::new(if k == 10 {
            SubpopKey::Free
        } else {
            SubpopKey::Config(sols[k].config.clone())
        });
        for s in &sols[2 * k..2 * k + 2] {
            sp.members.push(Member {
                solution: s.clone(),
                signature: Signature::of(s, &inst),
            });
        }
        pop.subpops.push(sp);
    }
    let mut avgs: Vec<f64> = pop
        .subpops()
        .iter()
        .map(|s| s.average_objective())
        .collect();
    avgs.sort_by(f64::total_cmp);
    assert!(halve_subpops(&mut pop));
    assert_eq!(pop.subpops().len(), 6);
    let mut kept: Vec<f64> = pop
        .subpops()
        .iter()
        .map(|s| s.average_objective())
        .collect();
    kept.sort_by(f64::total_cmp);
    assert_eq!(kept, avgs[..6].to_vec());
    assert!(!halve_subpops(&mut pop));
    assert_eq!(pop.subpops().len(), 6);
}

#[test]
fn replace_worst_config_guard_and_argmax() {
    let inst = generate_tiny(12, 3, 12).unwrap();
    let (nl, est) = ctx_parts(&inst);
    let params = PopParams::with_sizes(4, 4);
    let ctx = BuildContext {
        instance: &inst,
        lists: &nl,
        estimates: &est,
        params: &params,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let c01 = DepotConfiguration::new(&inst, [0, 1]).unwrap();
    let c12 = DepotConfiguration::new(&inst, [1, 2]).unwrap();
    let c012 = DepotConfiguration::new(&inst, [0, 1, 2]).unwrap();
    let configs: Vec<DepotConfiguration> = [c01.clone(), c12.clone()]
        .into_iter()
        .filter(|c| c.covers(&inst))
        .collect();
    if configs.len() < 2 {
        return;
    }
    let mut pop = init_population(&configs, &ctx, &mut rng).unwrap();
    let keyed_before = pop.subpops().len();
    let any = pop.best().unwrap().clone();
    assert!(!replace_worst_config(&mut pop, &c01, &any, &ctx, &mut rng).unwrap());
    let worst = (0..2).max_by(|&x, &y| {
        pop.subpops()[x]
            .average_objective()
            .total_cmp(&pop.subpops()[y].average_objective())
            .then(y.cmp(&x))
    });
    let improving = crate::construct::rgh_build(&inst, &c012, &mut rng).unwrap();
    let improving = vnd_improve(&improving, &nl, &inst).unwrap();
    if improving.config != c012 {
        return;
    }
    assert!(replace_worst_config(&mut pop, &c012, &improving, &ctx, &mut rng).unwrap());
    assert_eq!(pop.subpops().len(), keyed_before);
    assert_eq!(
        pop.subpops()[worst.unwrap()].key(),
        &SubpopKey::Config(c012.clone())
    );
    assert!(pop.subpops()[worst.unwrap()]
        .solutions()
        .any(|s| *s == improving));
}

#[test]
fn restart_only_at_threshold() {
    let inst = generate_tiny(10, 3, 13).unwrap();
    let (nl, est) = ctx_parts(&inst);
    let params = PopParams::with_sizes(3, 3);
    let ctx = BuildContext {
        instance: &inst,
        lists: &nl,
        estimates: &est,
        params: &params,
    };
    let crh = CrhParams {
        n_t: 2,
        gamma: 2,
        i_max: 20,
        ..CrhParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let configs = fresh_configs(&inst, &crh, &nl, &mut rng).unwrap();
    let mut pop = init_population(&configs, &ctx, &mut rng).unwrap();
    let best = pop.best().unwrap().cost;
    for _ in 0..4 {
        pop.note_stagnant();
    }
    assert!(!restart_if_stagnant(&mut pop, 5, &crh, &ctx, &mut rng).unwrap());
    pop.note_stagnant();
    assert!(restart_if_stagnant(&mut pop, 5, &crh, &ctx, &mut rng).unwrap());
    assert_eq!(pop.stagnation(), 0);
    assert!(pop.best().unwrap().cost <= best);
}
