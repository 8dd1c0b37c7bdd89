//! Rotationally symmetric geometries: surfaces of revolution, annuli in
//! spherically symmetric model manifolds, and planar annuli.
//!
//! Everything downstream (shooting, eigenproblems, criteria, time stepping)
//! only needs the radial data exposed by [`RadialGeometry`]: the area of
//! the level sets `{r = const}`, the drift coefficient of the radial
//! Laplacian, curvature of the level sets, and the Ricci curvature in the
//! radial direction.

mod annulus;
mod functions;
mod model;
mod surface;

use std::fmt;
use std::sync::Arc;

pub use annulus::PlaneAnnulus;
pub use functions::{
    profile_registry, warp_registry, Affine, CatenoidArc, Constant, Exponential,
    HyperbolicSine, Identity, Jet, RadialFunction, Sine, Tabulated,
};
pub use model::{unit_sphere_area, ModelAnnulus, ModelManifold};
pub use surface::{BoundaryData, ProfileSurface, UNIT_SPEED_TOL};

use crate::quadrature::{adaptive_simpson, DEFAULT_TOL};

/// Radial description of an annular domain `{lo ≤ r ≤ hi}`.
///
/// The Laplacian of a function `u(r, θ)` splits as
/// `u_rr + drift(r) u_r + (angular part) / (level radius)²`.
pub trait RadialGeometry: Send + Sync + fmt::Debug {
    fn describe(&self) -> String;
    fn interval(&self) -> (f64, f64);
    /// Dimension of the ambient manifold.
    fn dim(&self) -> usize;
    /// Area of the level set `{r}`; `dμ = level_area(r) dr`.
    fn level_area(&self, r: f64) -> f64;
    /// Logarithmic derivative of the level area.
    fn drift(&self, r: f64) -> f64;
    fn drift_prime(&self, r: f64) -> f64;
    /// Curvature of a level set per tangential direction (ψ′/ψ or φ′/φ).
    fn level_curvature(&self, r: f64) -> f64;
    /// Derivative of [`level_curvature`](Self::level_curvature).
    fn convexity_indicator(&self, r: f64) -> f64;
    /// Ricci curvature in the radial direction.
    fn radial_ricci(&self, r: f64) -> f64;
    /// Eigenvalue of the angular part of −Δ for mode `k`, evaluated on the
    /// level set `{r}`.
    fn angular_eigenvalue(&self, k: usize, r: f64) -> f64;
    /// Serializable description for artifacts.
    fn spec(&self) -> GeometrySpec;

    fn length(&self) -> f64 {
        let (lo, hi) = self.interval();
        hi - lo
    }

    /// Mean curvature of the inner boundary component w.r.t. the outward
    /// normal (which points toward decreasing r).
    fn mean_curvature_inner(&self) -> f64 {
        self.level_curvature(self.interval().0)
    }

    /// Mean curvature of the outer boundary component w.r.t. the outward
    /// normal. The unit sphere seen from inside has H = −1.
    fn mean_curvature_outer(&self) -> f64 {
        -self.level_curvature(self.interval().1)
    }

    /// Areas of the inner and outer boundary components.
    fn boundary_areas(&self) -> (f64, f64) {
        let (lo, hi) = self.interval();
        (self.level_area(lo), self.level_area(hi))
    }

    fn volume(&self) -> f64 {
        let (lo, hi) = self.interval();
        adaptive_simpson(|r| self.level_area(r), lo, hi, DEFAULT_TOL)
    }

    fn as_surface(&self) -> Option<&ProfileSurface> {
        None
    }

    fn as_model_annulus(&self) -> Option<&ModelAnnulus> {
        None
    }

    /// The planar annulus this geometry is isometric to, if any.
    fn as_plane_annulus(&self) -> Option<PlaneAnnulus> {
        None
    }
}

/// Serializable geometry description, resolvable through the registries.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GeometrySpec {
    /// Surface of revolution with a built-in profile.
    Revolution {
        profile: String,
        #[serde(default)]
        params: crate::registry::Params,
        interval: [f64; 2],
    },
    /// Annulus `ρ < r < R` in a model manifold.
    Model {
        model: String,
        dim: usize,
        interval: [f64; 2],
    },
    /// Planar annulus `r0 < |x| < R`, represented as the Euclidean model.
    PlaneAnnulus { r0: f64, outer: f64 },
}

impl GeometrySpec {
    pub fn build(&self) -> crate::Result<Arc<dyn RadialGeometry>> {
        match self {
            GeometrySpec::Revolution {
                profile,
                params,
                interval,
            } => {
                let f = profile_registry().build(profile, params)?;
                let s = ProfileSurface::new(profile.clone(), f, interval[0], interval[1])?;
                Ok(Arc::new(s))
            }
            GeometrySpec::Model {
                model,
                dim,
                interval,
            } => {
                let phi = warp_registry().build(model, &Default::default())?;
                let m = ModelManifold::new(model.clone(), phi, *dim)?;
                Ok(Arc::new(ModelAnnulus::new(m, interval[0], interval[1])?))
            }
            GeometrySpec::PlaneAnnulus { r0, outer } => {
                Ok(Arc::new(PlaneAnnulus::new(*r0, *outer)?.as_model_annulus()))
            }
        }
    }
}

/// Uniform grid of `n + 1` nodes on the geometry's interval.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..=n)
        .map(|i| if i == n { hi } else { lo + i as f64 * h })
        .collect()
}
