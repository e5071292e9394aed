use hgamp::engine::{brute_force_oracle, generate_tiny};
use hgamp::io::{parse_instance_str, serialize_canonical, solution_from_json, solution_to_json, Format};
use hgamp::model::{check_feasibility, total_cost, Feasibility};
use hgamp::{run, RunParams};
use proptest::prelude::*;

fn small(max_iterations: u64) -> RunParams {
    RunParams { mu: 5, lambda: 5, gamma: 3, eta: 200, max_iterations: Some(max_iterations), ..RunParams::default() }
}

#[test]
fn text_to_solution_round_trip() {
    let text = serialize_canonical(&generate_tiny(7, 3, 11).unwrap());
    let inst = parse_instance_str(&text, "t", Format::Auto).unwrap();
    let (sol, stats) = run(&inst, &small(300), 5).unwrap();
    assert_eq!(stats.best_cost, sol.cost);
    let back = solution_from_json(&solution_to_json(&sol, &inst), &inst).unwrap();
    assert_eq!(back.cost, sol.cost);
    assert_eq!(check_feasibility(&back, &inst), Feasibility::Feasible);
}

#[test]
fn run_never_beats_the_oracle() {
    for seed in 0..6 {
        let inst = generate_tiny(5, 2, seed).unwrap();
        let (opt, _) = brute_force_oracle(&inst).unwrap();
        let (sol, _) = run(&inst, &small(500), seed).unwrap();
        assert!(sol.cost >= opt);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn run_returns_feasible_consistent_solutions(n in 3usize..12, m in 1usize..4, gen in 0u64..1000, seed in 0u64..100) {
        let inst = generate_tiny(n, m, gen).unwrap();
        let (sol, stats) = run(&inst, &small(150), seed).unwrap();
        prop_assert_eq!(check_feasibility(&sol, &inst), Feasibility::Feasible);
        prop_assert!((total_cost(&sol, &inst).unwrap() - sol.cost).abs() <= inst.tolerance());
        prop_assert!(stats.improvements.windows(2).all(|w| w[0].0 <= w[1].0 && w[1].1 < w[0].1));
        let (again, _) = run(&inst, &small(150), seed).unwrap();
        prop_assert_eq!(again, sol);
    }
}
