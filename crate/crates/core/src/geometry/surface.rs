use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::{GeometrySpec, RadialFunction, RadialGeometry};
use crate::error::{Error, Result};

/// Admissible overshoot of |ψ′| above 1.
pub const UNIT_SPEED_TOL: f64 = 1e-9;

const VALIDATION_SAMPLES: usize = 257;

/// Surface of revolution with metric `dr² + ψ(r)² dθ²` over `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct ProfileSurface {
    name: String,
    psi: Arc<dyn RadialFunction>,
    lo: f64,
    hi: f64,
}

/// Curvature data of the two boundary circles of an annular domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryData {
    pub h_inner: f64,
    pub h_outer: f64,
    pub l_inner: f64,
    pub l_outer: f64,
    pub kappa_g_inner: f64,
    pub kappa_g_outer: f64,
}

impl ProfileSurface {
    /// Validates positivity, the unit-speed bound and the supplied
    /// derivatives before accepting the profile.
    pub fn new(
        name: impl Into<String>,
        psi: Arc<dyn RadialFunction>,
        lo: f64,
        hi: f64,
    ) -> Result<Self> {
        let name = name.into();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidGeometry(format!(
                "{name}: interval [{lo}, {hi}] is empty"
            )));
        }
        let n = VALIDATION_SAMPLES - 1;
        let h = (hi - lo) / n as f64;
        for i in 0..=n {
            let r = lo + i as f64 * h;
            let j = psi.jet(r);
            if (0 < i && i < n) && !(j.value > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "{name}: psi({r:.6}) = {} is not positive",
                    j.value
                )));
            }
            if j.d1.abs() > 1.0 + UNIT_SPEED_TOL {
                return Err(Error::InvalidGeometry(format!(
                    "{name}: |psi'({r:.6})| = {} exceeds 1; the profile cannot be unit speed",
                    j.d1.abs()
                )));
            }
        }
        // Spot-check the analytic derivatives against central differences.
        let d = 1e-4 * (hi - lo);
        for frac in [0.25, 0.5, 0.75] {
            let r = lo + frac * (hi - lo);
            let j = psi.jet(r);
            let scale = 1.0 + j.value.abs() + j.d1.abs() + j.d2.abs();
            let d1 = (psi.value(r + d) - psi.value(r - d)) / (2.0 * d);
            let d2 = (psi.value(r + d) - 2.0 * j.value + psi.value(r - d)) / (d * d);
            if (d1 - j.d1).abs() > 1e-5 * scale || (d2 - j.d2).abs() > 1e-3 * scale {
                return Err(Error::InvalidGeometry(format!(
                    "{name}: supplied derivatives disagree with finite differences at r = {r:.6}"
                )));
            }
        }
        Ok(Self { name, psi, lo, hi })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn profile(&self) -> &Arc<dyn RadialFunction> {
        &self.psi
    }

    pub fn psi(&self, r: f64) -> super::Jet {
        self.psi.jet(r)
    }

    /// Slope χ′ = √(1 − ψ′²) of the height function, never stored.
    pub fn chi_prime(&self, r: f64) -> f64 {
        (1.0 - self.psi.jet(r).d1.powi(2)).max(0.0).sqrt()
    }

    fn check(&self, r: f64) -> Result<()> {
        if r < self.lo || r > self.hi || !r.is_finite() {
            return Err(Error::Domain(format!(
                "r = {r} outside [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    /// Gaussian curvature −ψ″/ψ.
    pub fn ricci(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        let j = self.psi.jet(r);
        Ok(-j.d2 / j.value)
    }

    /// Geodesic curvature ψ′/ψ of the parallel circle at `r`.
    pub fn geodesic_curvature(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        let j = self.psi.jet(r);
        Ok(j.d1 / j.value)
    }

    /// (ψ′/ψ)′ = ψ″/ψ − (ψ′/ψ)².
    pub fn convexity(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(RadialGeometry::convexity_indicator(self, r))
    }

    pub fn boundary_data(&self) -> BoundaryData {
        let a = self.psi.jet(self.lo);
        let b = self.psi.jet(self.hi);
        BoundaryData {
            h_inner: a.d1 / a.value,
            h_outer: -b.d1 / b.value,
            l_inner: 2.0 * PI * a.value,
            l_outer: 2.0 * PI * b.value,
            kappa_g_inner: a.d1 / a.value,
            kappa_g_outer: b.d1 / b.value,
        }
    }

    /// Both boundary circles have a well-defined normal in the (ψ, χ) plane
    /// pointing along ±∂/∂r, i.e. χ′ > 0 at the ends.
    pub fn normals_transversal(&self) -> bool {
        self.chi_prime(self.lo) > 0.0 && self.chi_prime(self.hi) > 0.0
    }

    /// Maximum pointwise defect of the radial Bochner–Weitzenböck identity
    /// `½Δ|∇u|² = |Hess u|² + Ric(∇u,∇u) + ⟨∇Δu, ∇u⟩` for samples `u` on
    /// the uniform `grid`, all derivatives taken by centered differences.
    pub fn bochner_residual(&self, u: &[f64], grid: &[f64]) -> Result<f64> {
        let n = grid.len();
        if n < 8 || u.len() != n {
            return Err(Error::InvalidArgument(format!(
                "Bochner residual needs at least 8 matching samples (got {n})"
            )));
        }
        let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
        let kappa: Vec<f64> = grid
            .iter()
            .map(|&r| {
                let j = self.psi.jet(r);
                j.d1 / j.value
            })
            .collect();
        let mut du = vec![0.0; n];
        let mut ddu = vec![0.0; n];
        for i in 1..n - 1 {
            du[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
            ddu[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
        }
        let grad2: Vec<f64> = du.iter().map(|d| d * d).collect();
        let lap: Vec<f64> = (0..n).map(|i| ddu[i] + kappa[i] * du[i]).collect();
        let mut worst: f64 = 0.0;
        for i in 2..n - 2 {
            let g1 = (grad2[i + 1] - grad2[i - 1]) / (2.0 * h);
            let g2 = (grad2[i + 1] - 2.0 * grad2[i] + grad2[i - 1]) / (h * h);
            let lhs = 0.5 * (g2 + kappa[i] * g1);
            let j = self.psi.jet(grid[i]);
            let ric = -j.d2 / j.value;
            let hess2 = ddu[i] * ddu[i] + (kappa[i] * du[i]).powi(2);
            let dlap = (lap[i + 1] - lap[i - 1]) / (2.0 * h);
            let rhs = hess2 + ric * du[i] * du[i] + dlap * du[i];
            worst = worst.max((lhs - rhs).abs());
        }
        Ok(worst)
    }
}

impl RadialGeometry for ProfileSurface {
    fn describe(&self) -> String {
        format!("surface of revolution '{}' on [{}, {}]", self.name, self.lo, self.hi)
    }
    fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
    fn dim(&self) -> usize {
        2
    }
    fn level_area(&self, r: f64) -> f64 {
        2.0 * PI * self.psi.value(r)
    }
    fn drift(&self, r: f64) -> f64 {
        let j = self.psi.jet(r);
        j.d1 / j.value
    }
    fn drift_prime(&self, r: f64) -> f64 {
        self.convexity_indicator(r)
    }
    fn level_curvature(&self, r: f64) -> f64 {
        self.drift(r)
    }
    fn convexity_indicator(&self, r: f64) -> f64 {
        let j = self.psi.jet(r);
        let k = j.d1 / j.value;
        j.d2 / j.value - k * k
    }
    fn radial_ricci(&self, r: f64) -> f64 {
        let j = self.psi.jet(r);
        -j.d2 / j.value
    }
    fn angular_eigenvalue(&self, k: usize, r: f64) -> f64 {
        let p = self.psi.value(r);
        (k * k) as f64 / (p * p)
    }
    fn spec(&self) -> GeometrySpec {
        GeometrySpec::Revolution {
            profile: self.psi.kind().to_string(),
            params: self.psi.params(),
            interval: [self.lo, self.hi],
        }
    }
    fn as_surface(&self) -> Option<&ProfileSurface> {
        Some(self)
    }
    fn as_plane_annulus(&self) -> Option<super::PlaneAnnulus> {
        let k = self.psi.params().get("k").copied();
        if self.psi.kind() == "cone" && k == Some(1.0) {
            super::PlaneAnnulus::new(self.psi.value(self.lo), self.psi.value(self.hi)).ok()
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Affine, CatenoidArc, Constant, Exponential, Sine};
    use std::f64::consts::FRAC_PI_4;

    fn surf(f: Arc<dyn RadialFunction>, lo: f64, hi: f64) -> ProfileSurface {
        ProfileSurface::new("test", f, lo, hi).unwrap()
    }

    #[test]
    fn ricci_examples() {
        let cyl = surf(Arc::new(Constant { c: 1.0 }), 0.0, 2.0);
        assert_eq!(cyl.ricci(0.7).unwrap(), 0.0);
        let sph = surf(Arc::new(Sine), 0.1, 3.0);
        assert!((sph.ricci(FRAC_PI_4).unwrap() - 1.0).abs() < 1e-15);
        // −ψ″/ψ = −1/(1+s²)² at s = 0
        let cat = surf(Arc::new(CatenoidArc { c: 1.0 }), 0.0, 2.0);
        assert!((cat.ricci(1.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(cat.ricci(2.5), Err(Error::Domain(_))));
    }

    #[test]
    fn geodesic_curvature_and_convexity_examples() {
        let cyl = surf(Arc::new(Constant { c: 3.0 }), 0.0, 1.0);
        assert_eq!(cyl.geodesic_curvature(0.5).unwrap(), 0.0);
        assert_eq!(cyl.convexity(0.5).unwrap(), 0.0);
        let ex = surf(Arc::new(Exponential { c: 1.0 }), -2.0, 0.0);
        assert!((ex.geodesic_curvature(-1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(ex.convexity(-1.0).unwrap().abs() < 1e-15);
        let cat = surf(Arc::new(CatenoidArc { c: 1.0 }), 0.0, 2.0);
        assert!((cat.geodesic_curvature(1.5).unwrap() - 0.4).abs() < 1e-15);
        assert!((cat.convexity(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_data_examples() {
        let cyl = surf(Arc::new(Constant { c: 1.0 }), 0.0, 2.0);
        let b = cyl.boundary_data();
        assert!((b.l_inner - 2.0 * PI).abs() < 1e-15 && (b.l_outer - 2.0 * PI).abs() < 1e-15);
        assert_eq!((b.h_inner, b.h_outer), (0.0, 0.0));
        let sph = surf(Arc::new(Sine), FRAC_PI_4, std::f64::consts::FRAC_PI_2);
        assert!(sph.boundary_data().h_outer.abs() < 1e-15);
        let cat = surf(Arc::new(CatenoidArc { c: 1.0 }), 0.0, 2.0);
        assert!((cat.boundary_data().h_outer + 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_unit_speed_and_nonpositive_profiles() {
        assert!(ProfileSurface::new("c", Arc::new(Affine { c: 1.0, k: 1.5 }), 0.0, 1.0).is_err());
        assert!(ProfileSurface::new("s", Arc::new(Sine), -1.0, 1.0).is_err());
        assert!(ProfileSurface::new("e", Arc::new(Exponential { c: 1.0 }), 0.0, 1.0).is_err());
    }

    #[test]
    fn curvature_identity_holds_pointwise() {
        let cat = surf(Arc::new(CatenoidArc { c: 0.8 }), 0.0, 2.0);
        for i in 0..=20 {
            let r = 0.1 * i as f64;
            let lhs = cat.ricci(r).unwrap() + cat.geodesic_curvature(r).unwrap().powi(2);
            assert!((lhs + cat.convexity(r).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn bochner_vanishes_for_constants_and_converges() {
        let cyl = surf(Arc::new(Constant { c: 1.0 }), 0.0, 2.0);
        let grid = crate::geometry::uniform_grid(0.0, 2.0, 64);
        let u = vec![3.0; grid.len()];
        assert_eq!(cyl.bochner_residual(&u, &grid).unwrap(), 0.0);
        let res = |n: usize| {
            let g = crate::geometry::uniform_grid(0.0, 2.0, n);
            let u: Vec<f64> = g.iter().map(|r| r.sin()).collect();
            cyl.bochner_residual(&u, &g).unwrap()
        };
        let slope = (res(64) / res(128)).log2();
        assert!((slope - 2.0).abs() < 0.3, "slope {slope}");
        assert!(cyl.bochner_residual(&[0.0; 5], &[0.0, 1.0, 2.0, 3.0, 4.0]).is_err());
    }
}
