use std::f64::consts::PI;
use std::sync::Arc;

use super::{GeometrySpec, RadialFunction, RadialGeometry};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, DEFAULT_TOL};

/// Area ω_m of the unit sphere S^{m−1} ⊂ ℝ^m.
pub fn unit_sphere_area(m: usize) -> f64 {
    match m {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (m - 2) as f64 * unit_sphere_area(m - 2),
    }
}

/// Spherically symmetric manifold with metric `dr² + φ(r)² dθ²_{S^{m−1}}`.
#[derive(Debug, Clone)]
pub struct ModelManifold {
    name: String,
    phi: Arc<dyn RadialFunction>,
    dim: usize,
    r_max: f64,
}

impl ModelManifold {
    /// Checks φ(0) = 0, φ′(0) = 1 and positivity of φ up to its first zero
    /// (which becomes `r_max`).
    pub fn new(name: impl Into<String>, phi: Arc<dyn RadialFunction>, dim: usize) -> Result<Self> {
        let name = name.into();
        if dim < 2 {
            return Err(Error::InvalidGeometry(format!("{name}: dimension {dim} < 2")));
        }
        let j0 = phi.jet(0.0);
        if j0.value.abs() > 1e-12 || (j0.d1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidGeometry(format!(
                "{name}: warping function needs phi(0) = 0 and phi'(0) = 1 (got {}, {})",
                j0.value, j0.d1
            )));
        }
        // Scan outward for the first zero of φ; beyond 1e3 treat as unbounded.
        let step = 1e-3;
        let mut r_max = f64::INFINITY;
        let mut r = step;
        while r < 1e3 {
            if phi.value(r) <= 0.0 {
                let (mut a, mut b) = (r - step, r);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if phi.value(m) > 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                r_max = b;
                break;
            }
            r += if r < 10.0 { step } else { 1.0 };
        }
        Ok(Self {
            name,
            phi,
            dim,
            r_max,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn phi(&self) -> &Arc<dyn RadialFunction> {
        &self.phi
    }

    fn check(&self, r: f64) -> Result<()> {
        if !(r > 0.0 && r < self.r_max) {
            return Err(Error::Domain(format!(
                "r = {r} outside (0, {})",
                self.r_max
            )));
        }
        Ok(())
    }

    /// Ricci curvature in the radial direction, −(m−1)φ″/φ.
    pub fn ricci(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        let j = self.phi.jet(r);
        Ok(-((self.dim - 1) as f64) * j.d2 / j.value)
    }

    /// Area of the geodesic sphere `S(R) = ω_m φ(R)^{m−1}`.
    pub fn sphere_area(&self, r: f64) -> f64 {
        unit_sphere_area(self.dim) * self.phi.value(r).powi(self.dim as i32 - 1)
    }

    /// `(S(R), Vol(B_R))` with the volume by adaptive quadrature.
    pub fn area_volume(&self, radius: f64) -> Result<(f64, f64)> {
        self.check(radius)?;
        let vol = adaptive_simpson(|r| self.sphere_area(r), 0.0, radius, DEFAULT_TOL);
        Ok((self.sphere_area(radius), vol))
    }
}

/// Annulus `B_R \ B_ρ` of a model manifold.
#[derive(Debug, Clone)]
pub struct ModelAnnulus {
    model: ModelManifold,
    inner: f64,
    outer: f64,
}

impl ModelAnnulus {
    pub fn new(model: ModelManifold, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && inner < outer && outer < model.r_max) {
            return Err(Error::InvalidGeometry(format!(
                "annulus ({inner}, {outer}) must satisfy 0 < rho < R < {}",
                model.r_max
            )));
        }
        Ok(Self {
            model,
            inner,
            outer,
        })
    }

    pub fn model(&self) -> &ModelManifold {
        &self.model
    }

    fn m1(&self) -> f64 {
        (self.model.dim - 1) as f64
    }
}

impl RadialGeometry for ModelAnnulus {
    fn describe(&self) -> String {
        format!(
            "annulus ({}, {}) in model '{}' of dimension {}",
            self.inner, self.outer, self.model.name, self.model.dim
        )
    }
    fn interval(&self) -> (f64, f64) {
        (self.inner, self.outer)
    }
    fn dim(&self) -> usize {
        self.model.dim
    }
    fn level_area(&self, r: f64) -> f64 {
        self.model.sphere_area(r)
    }
    fn drift(&self, r: f64) -> f64 {
        self.m1() * self.level_curvature(r)
    }
    fn drift_prime(&self, r: f64) -> f64 {
        self.m1() * self.convexity_indicator(r)
    }
    fn level_curvature(&self, r: f64) -> f64 {
        let j = self.model.phi.jet(r);
        j.d1 / j.value
    }
    fn convexity_indicator(&self, r: f64) -> f64 {
        let j = self.model.phi.jet(r);
        let k = j.d1 / j.value;
        j.d2 / j.value - k * k
    }
    fn radial_ricci(&self, r: f64) -> f64 {
        let j = self.model.phi.jet(r);
        -self.m1() * j.d2 / j.value
    }
    fn angular_eigenvalue(&self, k: usize, r: f64) -> f64 {
        let p = self.model.phi.value(r);
        let k = k as f64;
        k * (k + self.m1() - 1.0) / (p * p)
    }
    fn spec(&self) -> GeometrySpec {
        GeometrySpec::Model {
            model: self.model.phi.kind().to_string(),
            dim: self.model.dim,
            interval: [self.inner, self.outer],
        }
    }
    fn as_model_annulus(&self) -> Option<&ModelAnnulus> {
        Some(self)
    }
    fn as_plane_annulus(&self) -> Option<super::PlaneAnnulus> {
        if self.model.dim == 2 && self.model.phi.kind() == "euclidean" {
            super::PlaneAnnulus::new(self.inner, self.outer).ok()
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{HyperbolicSine, Identity, Sine};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn ricci_model_examples() {
        let h = ModelManifold::new("h", Arc::new(HyperbolicSine), 2).unwrap();
        assert!((h.ricci(1.0).unwrap() + 1.0).abs() < 1e-14);
        let e = ModelManifold::new("e", Arc::new(Identity), 3).unwrap();
        assert_eq!(e.ricci(2.0).unwrap(), 0.0);
        let s = ModelManifold::new("s", Arc::new(Sine), 3).unwrap();
        assert!((s.ricci(FRAC_PI_3).unwrap() - 2.0).abs() < 1e-14);
        assert!((s.r_max() - PI).abs() < 1e-9);
        assert!(matches!(s.ricci(0.0), Err(Error::Domain(_))));
        assert!(matches!(s.ricci(3.2), Err(Error::Domain(_))));
    }

    #[test]
    fn area_volume_examples() {
        let e2 = ModelManifold::new("e", Arc::new(Identity), 2).unwrap();
        let (s, v) = e2.area_volume(1.0).unwrap();
        assert!((s - 2.0 * PI).abs() < 1e-13 && (v - PI).abs() < 1e-10);
        let e3 = ModelManifold::new("e", Arc::new(Identity), 3).unwrap();
        let (s, v) = e3.area_volume(2.0).unwrap();
        assert!((s - 16.0 * PI).abs() < 1e-12 && (v - 32.0 * PI / 3.0).abs() < 1e-9);
        let s2 = ModelManifold::new("s", Arc::new(Sine), 2).unwrap();
        let (s, v) = s2.area_volume(FRAC_PI_2).unwrap();
        assert!((s - 2.0 * PI).abs() < 1e-13 && (v - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_class_a() {
        let shifted = Arc::new(crate::geometry::Affine { c: 1.0, k: 1.0 });
        assert!(ModelManifold::new("bad", shifted, 2).is_err());
        let e = ModelManifold::new("e", Arc::new(Identity), 2).unwrap();
        assert!(ModelAnnulus::new(e, 2.0, 1.0).is_err());
    }
}
