mod common;

use std::sync::Arc;

use robinstab::geometry::RadialGeometry;
use robinstab::nonlinearity::Nonlinearity;
use robinstab::pattern::{construct_pattern, locate_window, solve_z1, solve_z2, PatternOptions, PatternResult};

use common::surface;

fn catenoid() -> Arc<dyn RadialGeometry> {
    surface("catenoid", &[("c", 1.0)], 0.0, 1.8)
}

fn pattern() -> PatternResult {
    construct_pattern(catenoid(), &PatternOptions::default()).unwrap()
}

#[test]
fn z_branches_are_monotone_in_r_and_b() {
    let g = catenoid();
    let w = locate_window(g.as_ref()).unwrap();
    let n = 2000;
    let bs = [40.0, 80.0, 160.0, 320.0];
    let at_r1: Vec<f64> = bs.iter().map(|&b| solve_z1(g.as_ref(), b, w.r1, n).unwrap().end.z).collect();
    assert!(at_r1.windows(2).all(|p| p[1] >= 2.0 * p[0]), "{at_r1:?}");
    for &b in &bs {
        let left = solve_z1(g.as_ref(), b, w.r1, n).unwrap();
        assert!(left.states.windows(2).all(|p| p[1].z > p[0].z));
        let right = solve_z2(g.as_ref(), b, 1.0, w.r2, n).unwrap();
        // z2 decreases in r from R2 toward the outer boundary, where z2 = β
        assert!(right.states.windows(2).all(|p| p[1].z < p[0].z));
    }
    let at_r2: Vec<f64> = bs.iter().map(|&b| solve_z2(g.as_ref(), b, 1.0, w.r2, n).unwrap().end.z).collect();
    assert!(at_r2.windows(2).all(|p| p[1] >= 2.0 * p[0]), "{at_r2:?}");
}

#[test]
fn z_solves_the_stationary_equation() {
    let p = pattern();
    let g = p.geometry.as_ref();
    let prof = &p.profile;
    let (r1, r2) = (p.window.r1, p.window.r2);
    let h = prof.grid[1] - prof.grid[0];
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 1..prof.n() {
        let r = prof.grid[i];
        if (r - r1).abs() <= h || (r - r2).abs() <= h {
            continue;
        }
        // Z' = z, Z'' = z'
        let res = prof.z_prime[i] + g.drift(r) * prof.z[i] + p.f.f(prof.big_z[i]);
        scale = scale.max(prof.z_prime[i].abs());
        worst = worst.max(res.abs());
    }
    assert!(worst < 1e-6 * scale, "residual {worst:e}, scale {scale:e}");
}

#[test]
fn f_is_c1_across_the_joints() {
    let p = pattern();
    let (u1, u2) = p.f.joints();
    for u in [u1, u2] {
        let e = 1e-9 * (1.0 + u.abs());
        // a jump in f would survive the shrinking window; the slope part vanishes with e
        let value_jump = (p.f.f(u + e) - p.f.f(u - e) - 2.0 * e * p.f.f_prime(u)).abs();
        assert!(value_jump < 1e-9 * (1.0 + p.f.f(u).abs()), "value jump {value_jump:e} at {u}");
    }
    // one-sided slopes: -B on the outer branches, the bridge formula at its ends
    let b = p.f.b();
    for t in [0.0, p.profile.bridge.len] {
        let jump = (p.f.bridge_slope(t) + b).abs();
        assert!(jump < 1e-6, "slope jump {jump:e} at t = {t}");
    }
}

#[test]
fn certificate_is_a_sharpness_witness() {
    let p = pattern();
    let c = &p.certificate;
    assert!(c.pass);
    assert!(c.alpha < 0.0);
    assert!(c.claim.boundary_sum.value < 0.0);
    assert!(c.lambda1.unwrap() > 0.0);
    assert!(c.barta.as_ref().unwrap().pass);
}

#[test]
fn flat_geometry_has_no_pattern() {
    let g = surface("cylinder", &[("c", 1.0)], 0.0, 2.0);
    let err = construct_pattern(g, &PatternOptions::default()).unwrap_err();
    assert!(matches!(err, robinstab::Error::NoConvexityWindow { .. }));
}
