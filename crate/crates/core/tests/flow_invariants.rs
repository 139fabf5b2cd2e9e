mod support;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use r3grid::powerflow::DcFlowSolver;
use r3grid::{solve_dc_flow, InjectionVector, NetworkCase, TopologyState};
use support::*;

fn scaled(c: &NetworkCase, factor: f64) -> NetworkCase {
    let lines = c
        .lines()
        .iter()
        .map(|l| {
            let mut l = l.clone();
            l.susceptance *= factor;
            l
        })
        .collect();
    case(c.bus_count(), lines, c.generators().to_vec(), c.loads().to_vec())
}

#[test]
fn triangle_flows() {
    let c = triangle(500.0);
    let inj = InjectionVector(vec![100.0, -60.0, -40.0]);
    let f = solve_dc_flow(&c, &TopologyState::intact(&c), &inj).unwrap().flows;
    assert_abs_diff_eq!(f[0], 53.333333333333336, epsilon = 1e-9);
    assert_abs_diff_eq!(f[1], 46.666666666666664, epsilon = 1e-9);
    assert_abs_diff_eq!(f[2], -6.666666666666667, epsilon = 1e-9);
    let g = solve_dc_flow(&scaled(&c, 2.0), &TopologyState::intact(&c), &inj).unwrap().flows;
    for (a, b) in f.iter().zip(&g) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
    }
}

/// Random balanced injections on a random connected network.
fn balanced(seed: u64) -> (NetworkCase, Vec<f64>) {
    use rand::Rng;
    let mut r = rng(seed);
    let c = random_network(&mut r, 10, 16);
    let mut p: Vec<f64> = (0..c.bus_count()).map(|_| r.random_range(-100.0..100.0)).collect();
    let s: f64 = p.iter().sum();
    p[0] -= s;
    (c, p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conservation_and_antisymmetry(seed in any::<u64>()) {
        let (c, p) = balanced(seed);
        let st = TopologyState::intact(&c);
        let sol = solve_dc_flow(&c, &st, &InjectionVector(p.clone())).unwrap();
        let mut net = vec![0.0; c.bus_count()];
        for (l, f) in c.lines().iter().zip(&sol.flows) {
            net[l.from_bus.index()] += f;
            net[l.to_bus.index()] -= f;
        }
        for (a, b) in net.iter().zip(&p) {
            prop_assert!((a - b).abs() < 1e-6);
        }
        let neg = solve_dc_flow(&c, &st, &InjectionVector(p.iter().map(|x| -x).collect())).unwrap();
        for (a, b) in sol.flows.iter().zip(&neg.flows) {
            prop_assert!((a + b).abs() < 1e-9);
        }
    }

    #[test]
    fn linear_in_injections_and_invariant_to_uniform_scaling(seed in any::<u64>(), k in 0.1f64..10.0) {
        let (c, p) = balanced(seed);
        let st = TopologyState::intact(&c);
        let base = solve_dc_flow(&c, &st, &InjectionVector(p.clone())).unwrap().flows;
        let times = solve_dc_flow(&c, &st, &InjectionVector(p.iter().map(|x| x * k).collect())).unwrap().flows;
        for (a, b) in base.iter().zip(&times) {
            prop_assert!((a * k - b).abs() < 1e-7 * (1.0 + b.abs()));
        }
        let s = solve_dc_flow(&scaled(&c, k), &st, &InjectionVector(p)).unwrap().flows;
        for (a, b) in base.iter().zip(&s) {
            prop_assert!((a - b).abs() < 1e-7 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn open_lines_carry_nothing(seed in any::<u64>(), which in 0usize..16) {
        let (c, _) = balanced(seed);
        let k = which % c.line_count();
        let mut status = vec![true; c.line_count()];
        status[k] = false;
        let solver = DcFlowSolver::new(&c, &status).unwrap();
        let zero = InjectionVector(vec![0.0; c.bus_count()]);
        let sol = solver.solve(&c, &zero).unwrap();
        prop_assert_eq!(sol.flows[k], 0.0);
        prop_assert!(sol.islands.is_partition_of(c.bus_count()));
    }
}
