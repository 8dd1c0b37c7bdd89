mod common;

use robinstab::criteria::{
    barta_certificate, build_report, constant_solution_with_slope, ReportOptions, TestFunction, ZeroVerdict,
};
use robinstab::spectrum::linear_lambda_extrapolated;
use robinstab::stationary::{solve_stationary, ScanOptions};

use common::{cubic, model, surface};

#[test]
fn instability_verdicts_agree_with_the_spectrum() {
    let cases = [
        (surface("cylinder", &[("c", 1.0)], 0.0, 2.0), cubic(-2.0, 1.0), 0.5),
        (surface("cylinder", &[("c", 1.0)], 0.0, 2.0), cubic(1.0, -1.0), 0.5),
        (surface("cone", &[("c", 1.0), ("k", 0.5)], 0.0, 2.0), cubic(-1.0, 1.0), -1.0),
        (model("sphere", 3, 0.5, 1.5), cubic(0.0, 1.0), -3.0),
        (model("euclidean", 2, 0.5, 1.5), cubic(1.0, -1.0), -0.5),
    ];
    let opts = ReportOptions {
        n_eigen: 512,
        ..Default::default()
    };
    let mut proved = 0;
    for (g, f, alpha) in cases {
        for s in solve_stationary(g, f, alpha, &ScanOptions::default()).unwrap().solutions {
            let r = build_report(&s, &opts).unwrap();
            let lam = r.lambda1.unwrap();
            for v in r.verdicts.iter().filter(|v| v.proves_instability()) {
                assert!(lam < 1e-6, "{} holds at c = {} but lambda1 = {lam}", v.id, s.c);
                proved += 1;
            }
        }
    }
    assert!(proved > 0);
}

#[test]
fn constant_verdict_flips_at_the_linear_eigenvalue() {
    let g = surface("catenoid", &[("c", 1.0)], 0.0, 1.8);
    let alpha = 0.4;
    let n = 512;
    let lam = linear_lambda_extrapolated(g.as_ref(), alpha, n).unwrap().value;
    let unstable = |s: f64| constant_solution_with_slope(g.as_ref(), alpha, s, n).unwrap().verdict == ZeroVerdict::Unstable;
    let (mut lo, mut hi) = (lam - 1.0, lam + 1.0);
    assert!(!unstable(lo) && unstable(hi));
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if unstable(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    assert!((0.5 * (lo + hi) - lam).abs() < 1e-6);
}

#[test]
fn barta_pass_implies_nonnegative_spectrum() {
    // the zero solution with f' = -2 and w = 1: Δw + f'w = -2 < 0, ∂w/∂ν + αw = α > 0
    let g = surface("catenoid", &[("c", 1.0)], 0.0, 1.8);
    let set = solve_stationary(g, cubic(-2.0, 1.0), 0.5, &ScanOptions::default()).unwrap();
    let zero = set.solutions.iter().find(|s| s.is_zero()).unwrap();
    let w = vec![1.0; zero.n() + 1];
    let cert = barta_certificate(
        zero,
        &TestFunction {
            w: &w,
            w_prime: None,
            w_second: None,
        },
        1e-10,
    )
    .unwrap();
    assert!(cert.pass);
    let r = build_report(zero, &ReportOptions { n_eigen: 512, ..Default::default() }).unwrap();
    assert!(r.lambda1.unwrap() > -1e-6);
}
