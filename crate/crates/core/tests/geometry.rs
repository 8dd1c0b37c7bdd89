mod common;

use proptest::prelude::*;

use common::{model, surface};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_identity(c in -1.0f64..1.0, t in 0.0f64..1.0) {
        let g = surface("catenoid", &[("c", c)], -1.0, 2.0);
        let s = g.as_surface().unwrap();
        let r = -1.0 + 3.0 * t;
        let lhs = s.ricci(r).unwrap() + s.geodesic_curvature(r).unwrap().powi(2);
        prop_assert!((lhs + s.convexity(r).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cone_curvature_identity(k in -0.9f64..0.9, t in 0.0f64..1.0) {
        let g = surface("cone", &[("c", 2.0), ("k", k)], 0.0, 1.0);
        let s = g.as_surface().unwrap();
        let lhs = s.ricci(t).unwrap() + s.geodesic_curvature(t).unwrap().powi(2);
        prop_assert!((lhs + s.convexity(t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn volume_derivative_is_area(radius in 0.3f64..2.5, dim in 2usize..5) {
        let g = model("sphere", dim, 0.1, 3.0);
        let m = g.as_model_annulus().unwrap().model();
        let h = 1e-3;
        let vol = |r: f64| m.area_volume(r).unwrap().1;
        let derivative = (-vol(radius + 2.0 * h) + 8.0 * vol(radius + h) - 8.0 * vol(radius - h)
            + vol(radius - 2.0 * h))
            / (12.0 * h);
        let area = m.area_volume(radius).unwrap().0;
        let rel = (derivative - area).abs() / area;
        prop_assert!(rel < 1e-8, "relative defect {rel:e}");
    }

    #[test]
    fn sphere_as_surface_and_model_agree(t in 0.0f64..1.0) {
        let surf = surface("sphere", &[], 0.2, 2.9);
        let m = model("sphere", 2, 0.2, 2.9);
        let r = 0.2 + 2.7 * t;
        let a = surf.as_surface().unwrap().ricci(r).unwrap();
        let b = m.as_model_annulus().unwrap().model().ricci(r).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((surf.drift(r) - m.drift(r)).abs() < 1e-12);
    }
}

#[test]
fn flat_cone_matches_plane_annulus() {
    let cone = surface("cone", &[("c", 1.0), ("k", 1.0)], 0.0, 1.0);
    let plane = robinstab::geometry::GeometrySpec::PlaneAnnulus { r0: 1.0, outer: 2.0 }
        .build()
        .unwrap();
    for k in 0..=10 {
        let s = 0.1 * k as f64;
        assert!((cone.level_area(s) - plane.level_area(1.0 + s)).abs() < 1e-12);
        assert!((cone.drift(s) - plane.drift(1.0 + s)).abs() < 1e-12);
    }
    assert!((cone.mean_curvature_inner() - plane.mean_curvature_inner()).abs() < 1e-12);
    assert!((cone.mean_curvature_outer() - plane.mean_curvature_outer()).abs() < 1e-12);
}
