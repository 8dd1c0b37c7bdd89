use std::f64::consts::PI;
use std::sync::Arc;

use super::{Affine, Identity, ModelAnnulus, ModelManifold, ProfileSurface};
use crate::error::{Error, Result};

/// Planar annulus `r0 < |x| < R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneAnnulus {
    pub r0: f64,
    pub outer: f64,
}

impl PlaneAnnulus {
    pub fn new(r0: f64, outer: f64) -> Result<Self> {
        if !(r0 > 0.0 && outer > r0) {
            return Err(Error::InvalidGeometry(format!(
                "annulus radii must satisfy 0 < r0 < R (got {r0}, {outer})"
            )));
        }
        Ok(Self { r0, outer })
    }

    /// Signed curvatures `(κ_inner, κ_outer)` of the boundary circles, with
    /// the sign convention in which a convex boundary has κ > 0.
    pub fn curvatures(&self) -> (f64, f64) {
        (-1.0 / self.r0, 1.0 / self.outer)
    }

    pub fn lengths(&self) -> (f64, f64) {
        (2.0 * PI * self.r0, 2.0 * PI * self.outer)
    }

    pub fn as_model_annulus(&self) -> ModelAnnulus {
        let plane = ModelManifold::new("euclidean", Arc::new(Identity), 2)
            .expect("identity warping is class A");
        ModelAnnulus::new(plane, self.r0, self.outer).expect("validated radii")
    }

    /// The same annulus as the flat cone `ψ(s) = r0 + s`, `s ∈ [0, R − r0]`.
    pub fn as_flat_cone(&self) -> ProfileSurface {
        ProfileSurface::new(
            "flat-cone",
            Arc::new(Affine { c: self.r0, k: 1.0 }),
            0.0,
            self.outer - self.r0,
        )
        .expect("unit-slope cone is admissible")
    }
}
