use super::*;
use crate::Error;

fn line_instance() -> Instance {
    // Depot at the origin, one customer five units away.
    Instance::from_coordinates(
        "single",
        vec![DepotSpec {
            capacity: 10,
            opening_cost: 100.0,
            coords: Some(Point::new(0.0, 0.0)),
        }],
        vec![CustomerSpec {
            demand: 4,
            coords: Some(Point::new(3.0, 4.0)),
        }],
        10,
        10.0,
        DistanceConvention::ExactReal,
    )
    .unwrap()
}

fn square_instance() -> Instance {
    let depot = |x, y| DepotSpec {
        capacity: 20,
        opening_cost: 50.0,
        coords: Some(Point::new(x, y)),
    };
    let cust = |x, y, d| CustomerSpec {
        demand: d,
        coords: Some(Point::new(x, y)),
    };
    Instance::from_coordinates(
        "square",
        vec![depot(0.0, 0.0), depot(10.0, 0.0)],
        vec![cust(0.0, 3.0, 4), cust(3.0, 3.0, 5), cust(10.0, 3.0, 6)],
        10,
        7.0,
        DistanceConvention::ScaledInteger { factor: 10 },
    )
    .unwrap()
}

#[test]
fn single_route_identity_cost() {
    let inst = line_instance();
    let sol = Solution::from_routes(&inst, [(0, vec![0])], &[]).unwrap();
    assert_eq!(total_cost(&sol, &inst).unwrap(), 120.0);
    assert_eq!(sol.cost, 120.0);
    audit_caches(&sol, &inst).unwrap();
}

#[test]
fn empty_open_depot_still_pays() {
    let inst = square_instance();
    let sol = Solution::from_routes(&inst, [(0, vec![0, 1, 2])], &[1]).unwrap();
    assert!(sol.config.contains(1));
    let travel = route_length(&inst, 0, &[0, 1, 2]);
    assert_eq!(sol.cost, 100.0 + 7.0 + travel);
}

#[test]
fn route_overload_measured() {
    let inst = square_instance();
    // loads 4+5+6 = 15 on a vehicle of capacity 10
    let sol = Solution::from_routes(&inst, [(0, vec![0, 1, 2])], &[]).unwrap();
    assert_eq!(sol.violations.route, 5);
    match check_feasibility(&sol, &inst) {
        Feasibility::Violated {
            route_overload,
            depot_overload,
            structural,
        } => {
            assert_eq!(route_overload, 5);
            assert_eq!(depot_overload, 0);
            assert!(structural.is_none());
        }
        Feasibility::Feasible => panic!("expected violation"),
    }
}

#[test]
fn q_plus_three_overload() {
    let inst = Instance::from_coordinates(
        "q3",
        vec![DepotSpec {
            capacity: 100,
            opening_cost: 0.0,
            coords: Some(Point::new(0.0, 0.0)),
        }],
        vec![
            CustomerSpec {
                demand: 7,
                coords: Some(Point::new(1.0, 0.0)),
            },
            CustomerSpec {
                demand: 6,
                coords: Some(Point::new(2.0, 0.0)),
            },
        ],
        10,
        0.0,
        DistanceConvention::ExactReal,
    )
    .unwrap();
    let sol = Solution::from_routes(&inst, [(0, vec![0, 1])], &[]).unwrap();
    assert_eq!(sol.violations.route, 3);
}

#[test]
fn missing_customer_is_structural() {
    let inst = square_instance();
    let err = Solution::from_routes(&inst, [(0, vec![0, 1])], &[]).unwrap_err();
    assert!(matches!(err, Error::Structural(_)));

    let mut sol = Solution::from_routes(&inst, [(0, vec![0, 1]), (1, vec![2])], &[]).unwrap();
    sol.routes[1].customers.clear();
    assert!(matches!(total_cost(&sol, &inst), Err(Error::Structural(_))));
    match check_feasibility(&sol, &inst) {
        Feasibility::Violated {
            structural: Some(msg),
            ..
        } => assert!(msg.contains("customer 2")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn double_visit_is_structural() {
    let inst = square_instance();
    let err = Solution::from_routes(&inst, [(0, vec![0, 1]), (1, vec![2, 1])], &[]).unwrap_err();
    assert!(matches!(err, Error::Structural(_)));
}

#[test]
fn depot_overload_measured() {
    let mut inst = square_instance();
    inst.depots[0].capacity = 12;
    let sol = Solution::from_routes(&inst, [(0, vec![0, 1]), (0, vec![2])], &[]).unwrap();
    assert_eq!(sol.violations.depot, 3);
    assert_eq!(sol.violations.route, 0);
    assert!(!sol.is_feasible());
}

#[test]
fn rejects_demand_above_vehicle_capacity() {
    let err = Instance::from_coordinates(
        "bad",
        vec![DepotSpec {
            capacity: 100,
            opening_cost: 0.0,
            coords: Some(Point::new(0.0, 0.0)),
        }],
        vec![CustomerSpec {
            demand: 11,
            coords: Some(Point::new(1.0, 0.0)),
        }],
        10,
        0.0,
        DistanceConvention::ExactReal,
    )
    .unwrap_err();
    assert!(err.to_string().contains("demand"));
}

#[test]
fn scaled_integer_rounds_up() {
    let c = DistanceConvention::ScaledInteger { factor: 100 };
    assert_eq!(c.apply(5.0), 500.0);
    assert_eq!(c.apply(2f64.sqrt()), 142.0);
    assert_eq!(c.apply(0.5), 50.0);
}

#[test]
fn configuration_is_canonical() {
    let inst = square_instance();
    let a = DepotConfiguration::new(&inst, [1, 0, 1]).unwrap();
    let b = DepotConfiguration::new(&inst, [0, 1]).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.total_capacity(), 40);
    assert_eq!(a.to_string(), "{0,1}");
}

#[test]
fn distance_identity_and_assignment_term() {
    let inst = square_instance();
    let a = Solution::from_routes(&inst, [(0, vec![0, 1]), (1, vec![2])], &[]).unwrap();
    assert_eq!(broken_pairs_distance(&a, &a, &inst).unwrap(), 0);

    // Same customer sequences, route of customer 2 moved to depot 0.
    let b = Solution::from_routes(&inst, [(0, vec![0, 1]), (0, vec![2])], &[]).unwrap();
    let d = broken_pairs_distance(&a, &b, &inst).unwrap();
    assert!(d > 0);
    assert_eq!(d, broken_pairs_distance(&b, &a, &inst).unwrap());
}

/// Brute-force count: symmetric difference of undirected edge multisets
/// plus differing depot assignments.
fn naive_distance(a: &Solution, b: &Solution) -> u32 {
    fn edges(s: &Solution, m: usize) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for r in &s.routes {
            let mut path = vec![r.depot];
            path.extend(r.customers.iter().map(|&j| m + j));
            path.push(r.depot);
            for w in path.windows(2) {
                e.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        e
    }
    let m = 3;
    let ea = edges(a, m);
    let mut eb = edges(b, m);
    let mut only_a = 0;
    for e in ea {
        if let Some(p) = eb.iter().position(|x| *x == e) {
            eb.remove(p);
        } else {
            only_a += 1;
        }
    }
    let sym = only_a + eb.len();
    let moved = a
        .assignment()
        .iter()
        .zip(b.assignment())
        .filter(|(x, y)| **x != *y)
        .count();
    (sym.div_ceil(2) + moved) as u32
}

#[test]
fn adjacent_swap_distance_matches_census() {
    let depot = |x| DepotSpec {
        capacity: 50,
        opening_cost: 0.0,
        coords: Some(Point::new(x, 0.0)),
    };
    let cust = |x, y| CustomerSpec {
        demand: 1,
        coords: Some(Point::new(x, y)),
    };
    let inst = Instance::from_coordinates(
        "three",
        vec![depot(0.0), depot(5.0), depot(9.0)],
        vec![cust(1.0, 1.0), cust(2.0, 2.0), cust(3.0, 1.0)],
        10,
        0.0,
        DistanceConvention::ExactReal,
    )
    .unwrap();
    let a = Solution::from_routes(&inst, [(0, vec![0, 1, 2])], &[]).unwrap();
    let b = Solution::from_routes(&inst, [(0, vec![1, 0, 2])], &[]).unwrap();
    let d = broken_pairs_distance(&a, &b, &inst).unwrap();
    assert_eq!(d, naive_distance(&a, &b));
    // edges {d0-c0, c1-c2} vs {d0-c1, c0-c2}: symmetric difference 4
    assert_eq!(d, 2);
}

#[test]
fn compact_degree_ratios() {
    let inst = square_instance();
    // demand 15, depot capacity 20 each
    let one = Solution::from_routes(&inst, [(0, vec![0, 1]), (0, vec![2])], &[]).unwrap();
    assert_eq!(compact_degree(&one, &inst).unwrap(), 75.0);

    let mut exact = square_instance();
    exact.depots[0].capacity = 15;
    let full = Solution::from_routes(&exact, [(0, vec![0, 1]), (0, vec![2])], &[]).unwrap();
    assert_eq!(compact_degree(&full, &exact).unwrap(), 100.0);

    let mut quarter = square_instance();
    quarter.depots[0].capacity = 60;
    let q = Solution::from_routes(&quarter, [(0, vec![0, 1]), (0, vec![2])], &[]).unwrap();
    assert_eq!(compact_degree(&q, &quarter).unwrap(), 25.0);

    let avg = mean_compact_degree(&[94.70, 95.17, 27.02]).unwrap();
    assert!((avg - (94.70 + 95.17 + 27.02) / 3.0).abs() < 1e-12);
    assert!(mean_compact_degree(&[]).is_none());
}

#[test]
fn compact_degree_needs_an_open_depot() {
    let inst = square_instance();
    let mut sol = Solution::from_routes(&inst, [(0, vec![0, 1]), (0, vec![2])], &[]).unwrap();
    sol.config = DepotConfiguration::new(&inst, []).unwrap();
    assert!(compact_degree(&sol, &inst).is_err());
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_solution_pair(
    ) -> impl Strategy<Value = (Vec<(usize, Vec<usize>)>, Vec<(usize, Vec<usize>)>)> {
        let split = |perm: Vec<usize>, cuts: Vec<bool>, depots: Vec<usize>| {
            let mut routes = Vec::new();
            let mut cur = Vec::new();
            for (k, j) in perm.into_iter().enumerate() {
                cur.push(j);
                if cuts[k] {
                    routes.push((depots[k] % 3, std::mem::take(&mut cur)));
                }
            }
            if !cur.is_empty() {
                routes.push((depots[0] % 3, cur));
            }
            routes
        };
        let one = (
            Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
            proptest::collection::vec(any::<bool>(), 6),
            proptest::collection::vec(0usize..3, 6),
        )
            .prop_map(move |(p, c, d)| split(p, c, d));
        (one.clone(), one)
    }

    fn inst6() -> Instance {
        let depot = |x, y| DepotSpec {
            capacity: 100,
            opening_cost: 3.0,
            coords: Some(Point::new(x, y)),
        };
        let cust = |x, y| CustomerSpec {
            demand: 2,
            coords: Some(Point::new(x, y)),
        };
        Instance::from_coordinates(
            "six",
            vec![depot(0.0, 0.0), depot(10.0, 0.0), depot(5.0, 9.0)],
            (0..6)
                .map(|k| cust(k as f64 * 1.7, (k * k) as f64 % 7.0))
                .collect(),
            100,
            2.0,
            DistanceConvention::ExactReal,
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn distance_symmetric_and_matches_census((ra, rb) in arb_solution_pair()) {
            let inst = inst6();
            let a = Solution::from_routes(&inst, ra, &[]).unwrap();
            let b = Solution::from_routes(&inst, rb, &[]).unwrap();
            let dab = broken_pairs_distance(&a, &b, &inst).unwrap();
            prop_assert_eq!(dab, broken_pairs_distance(&b, &a, &inst).unwrap());
            prop_assert_eq!(dab, naive_distance(&a, &b));
            let same = Signature::of(&a, &inst) == Signature::of(&b, &inst);
            prop_assert_eq!(dab == 0, same);
            audit_caches(&a, &inst).unwrap();
        }
    }
}
