mod common;

use proptest::prelude::*;

use robinstab::stationary::{shoot, solve_stationary, ScanOptions};

use common::{cubic, model, surface};

#[test]
fn returned_solutions_validate() {
    let cases = [
        (surface("cylinder", &[("c", 1.0)], 0.0, 2.0), cubic(-2.0, 1.0), 0.5),
        (surface("catenoid", &[("c", 1.0)], 0.0, 1.8), cubic(1.0, -1.0), -1.0),
        (model("sphere", 3, 0.5, 1.5), cubic(0.0, 1.0), -3.0),
    ];
    for (g, f, alpha) in cases {
        let set = solve_stationary(g, f, alpha, &ScanOptions::default()).unwrap();
        assert!(!set.solutions.is_empty());
        for s in &set.solutions {
            let v = s.validate();
            assert!(v.valid, "c = {}: {v:?}", s.c);
        }
    }
}

#[test]
fn doubling_the_scan_keeps_every_solution() {
    let g = surface("cylinder", &[("c", 1.0)], 0.0, 2.0);
    let coarse = ScanOptions {
        n_scan: 101,
        ..Default::default()
    };
    let fine = ScanOptions {
        n_scan: 201,
        ..Default::default()
    };
    let a = solve_stationary(g.clone(), cubic(-2.0, 1.0), 0.5, &coarse).unwrap();
    let b = solve_stationary(g, cubic(-2.0, 1.0), 0.5, &fine).unwrap();
    for s in &a.solutions {
        assert!(
            b.solutions.iter().any(|t| (t.c - s.c).abs() < 1e-8),
            "lost c = {}",
            s.c
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zero_is_a_fixed_point(alpha in -2.0f64..2.0, c1 in -3.0f64..3.0, c3 in -2.0f64..2.0) {
        let g = surface("catenoid", &[("c", 1.0)], 0.0, 1.8);
        let p = shoot(g.as_ref(), cubic(c1, c3).as_ref(), alpha, 0.0, 200, None).unwrap();
        prop_assert!(p.v.iter().chain(&p.v_prime).all(|&x| x == 0.0));
        prop_assert_eq!(p.residual, 0.0);
    }
}
