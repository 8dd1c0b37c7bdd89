//! Boundary criteria for planar domains with boundary curves sampled in
//! arclength.

use serde::Serialize;

use super::{strictly_negative, Holds, BOUNDARY_ZERO};
use crate::error::{Error, Result};
use crate::geometry::PlaneAnnulus;
use crate::nonlinearity::Nonlinearity;

/// One closed boundary curve: curvature and trace of `u` at uniformly
/// spaced arclength samples (periodic, no repeated endpoint).
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    pub length: f64,
    pub kappa: Vec<f64>,
    pub u: Vec<f64>,
}

impl BoundaryCurve {
    pub fn constant(length: f64, kappa: f64, u: f64) -> Self {
        Self {
            length,
            kappa: vec![kappa],
            u: vec![u],
        }
    }

    /// `u` constant along the curve, so its tangential derivative vanishes.
    pub fn is_level(&self) -> bool {
        let (lo, hi) = self
            .u
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let scale = 1.0 + lo.abs().max(hi.abs());
        hi - lo <= 1e-12 * scale
    }
}

/// The two boundary circles of an annulus carrying radial data.
pub fn annulus_boundary(annulus: &PlaneAnnulus, u_inner: f64, u_outer: f64) -> Vec<BoundaryCurve> {
    let (k0, k1) = annulus.curvatures();
    let (l0, l1) = annulus.lengths();
    vec![
        BoundaryCurve::constant(l0, k0, u_inner),
        BoundaryCurve::constant(l1, k1, u_outer),
    ]
}

/// Scalar form for radial data on an annulus:
/// `[r0α + 1 + r0 f(u0)/(αu0)] u0² + [Rα − 1 + R f(u1)/(αu1)] u1²`,
/// which is the boundary integral divided by `2πα²`.
pub fn annulus_scalar(annulus: &PlaneAnnulus, u_inner: f64, u_outer: f64, alpha: f64, f: &dyn Nonlinearity) -> f64 {
    let (r0, r1) = (annulus.r0, annulus.outer);
    let inner = (r0 * alpha + 1.0) * u_inner * u_inner + r0 * u_inner * f.f(u_inner) / alpha;
    let outer = (r1 * alpha - 1.0) * u_outer * u_outer + r1 * u_outer * f.f(u_outer) / alpha;
    inner + outer
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanarCriteria {
    /// `∮ α²u²[α − κ + f(u)/(αu)] ds`.
    pub boundary_integral: f64,
    pub boundary_integral_holds: bool,
    /// `min (α + κ)` over the boundary.
    pub curvature_floor: f64,
    pub curvature_floor_holds: bool,
    /// `u` is constant on every boundary curve, which removes the need for
    /// the curvature floor.
    pub level_boundary: bool,
    /// `max (α − κ + f(u)/(αu))`, absent when `u` vanishes somewhere on
    /// the boundary.
    pub pointwise_max: Option<f64>,
    pub pointwise_holds: Holds,
    /// Per component `α − min κ + max f(u)/(αu)` (two-curve boundaries only).
    pub per_component: Option<Vec<f64>>,
    pub per_component_holds: Holds,
    pub unstable: Holds,
}

pub fn plane_criteria(curves: &[BoundaryCurve], alpha: f64, f: &dyn Nonlinearity) -> Result<PlanarCriteria> {
    if alpha == 0.0 {
        return Err(Error::Precondition("planar criteria need alpha != 0".into()));
    }
    if curves.is_empty() || curves.iter().any(|c| c.u.is_empty() || c.u.len() != c.kappa.len()) {
        return Err(Error::InvalidArgument("boundary curves need matching, nonempty samples".into()));
    }
    let mut integral = 0.0;
    let mut integrand_max: f64 = 0.0;
    let mut floor = f64::INFINITY;
    let mut pointwise: Option<f64> = Some(f64::NEG_INFINITY);
    for c in curves {
        let ds = c.length / c.u.len() as f64;
        for (&k, &u) in c.kappa.iter().zip(&c.u) {
            let term = alpha * alpha * u * u * (alpha - k) + alpha * u * f.f(u);
            integral += ds * term;
            integrand_max = integrand_max.max(term.abs());
            floor = floor.min(alpha + k);
            if u.abs() < BOUNDARY_ZERO {
                pointwise = None;
            } else if let Some(m) = pointwise.as_mut() {
                *m = m.max(alpha - k + f.f(u) / (alpha * u));
            }
        }
    }
    let integral_holds = strictly_negative(integral, integrand_max);
    let floor_holds = floor >= -1e-10 * (1.0 + floor.abs());
    let level = curves.iter().all(BoundaryCurve::is_level);
    let pointwise_holds = match pointwise {
        None => Holds::NotApplicable,
        Some(m) if strictly_negative(m, m.abs()) => Holds::Yes,
        Some(_) => Holds::No,
    };
    let (per_component, per_component_holds) = if curves.len() == 2 {
        let mut vals = Vec::new();
        let mut ok = true;
        for c in curves {
            if c.u.iter().any(|u| u.abs() < BOUNDARY_ZERO) {
                ok = false;
                break;
            }
            let kmin = c.kappa.iter().copied().fold(f64::INFINITY, f64::min);
            let qmax = c
                .u
                .iter()
                .map(|&u| f.f(u) / (alpha * u))
                .fold(f64::NEG_INFINITY, f64::max);
            vals.push(alpha - kmin + qmax);
        }
        if ok {
            let holds = vals.iter().all(|&v| strictly_negative(v, v.abs()));
            (Some(vals), if holds { Holds::Yes } else { Holds::No })
        } else {
            (None, Holds::NotApplicable)
        }
    } else {
        (None, Holds::NotApplicable)
    };
    let unstable = if integral_holds && (floor_holds || level) {
        Holds::Yes
    } else {
        Holds::No
    };
    Ok(PlanarCriteria {
        boundary_integral: integral,
        boundary_integral_holds: integral_holds,
        curvature_floor: floor,
        curvature_floor_holds: floor_holds,
        level_boundary: level,
        pointwise_max: pointwise,
        pointwise_holds,
        per_component,
        per_component_holds,
        unstable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::{Cubic, Linear};
    use std::f64::consts::PI;

    #[test]
    fn unit_disk_pointwise() {
        let c = BoundaryCurve::constant(2.0 * PI, 1.0, 0.5);
        let r = plane_criteria(&[c], 1.0, &Linear { lambda: -3.0 }).unwrap();
        assert!((r.pointwise_max.unwrap() + 3.0).abs() < 1e-15);
        assert_eq!(r.pointwise_holds, Holds::Yes);
        assert_eq!(r.unstable, Holds::Yes);
    }

    #[test]
    fn annulus_integral_matches_scalar_form() {
        let a = PlaneAnnulus::new(1.0, 2.0).unwrap();
        let f = Cubic { c0: 0.0, c1: -2.0, c3: 1.0 };
        let alpha = 0.7;
        let (u0, u1) = (0.4, -1.3);
        let r = plane_criteria(&annulus_boundary(&a, u0, u1), alpha, &f).unwrap();
        let scalar = annulus_scalar(&a, u0, u1, alpha, &f);
        assert!((r.boundary_integral - 2.0 * PI * alpha * alpha * scalar).abs() < 1e-12);
        assert!(r.level_boundary);
    }

    #[test]
    fn zero_trace_disables_pointwise() {
        let a = PlaneAnnulus::new(1.0, 2.0).unwrap();
        let r = plane_criteria(&annulus_boundary(&a, 0.0, 1.0), 1.0, &Linear { lambda: 1.0 }).unwrap();
        assert_eq!(r.pointwise_holds, Holds::NotApplicable);
        assert!(plane_criteria(&annulus_boundary(&a, 1.0, 1.0), 0.0, &Linear { lambda: 1.0 }).is_err());
    }

    #[test]
    fn curvature_floor_needed_off_level_sets() {
        let c = BoundaryCurve {
            length: 1.0,
            kappa: vec![-2.0, -2.0],
            u: vec![1.0, 2.0],
        };
        let r = plane_criteria(&[c], 1.0, &Linear { lambda: -10.0 }).unwrap();
        assert!(r.boundary_integral_holds);
        assert!(!r.curvature_floor_holds);
        assert_eq!(r.unstable, Holds::No);
    }
}
