//! The reaction term read off from the constructed profile.

use std::sync::Arc;

use crate::error::Result;
use crate::geometry::RadialGeometry;
use crate::interp::MonotoneCubic;
use crate::nonlinearity::{Nonlinearity, NonlinearityKind};
use crate::quadrature::adaptive_simpson;

use super::profile::{Profile, Quintic};

const SEED_POINTS: usize = 257;

/// Piecewise `f`:
/// * `u ≤ Z(R1)`: `−Bu − 1`;
/// * `Z(R1) < u < Z(R2)`: `−[P′ + DP](r)` at the radius `r` with `Z(r) = u`;
/// * `u ≥ Z(R2)`: `−Bu + K` with `K = BZ(hi) + 1 − βD(hi)`.
///
/// On the outer intervals these are the closed forms the equation forces
/// on `Z`, so `f(Z(r)) = −(z′ + Dz)(r)` holds on the whole interval.
#[derive(Debug, Clone)]
pub struct ConstructedNonlinearity {
    geometry: Arc<dyn RadialGeometry>,
    b: f64,
    k: f64,
    z_r1: f64,
    z_r2: f64,
    bridge: Quintic,
    /// `u − Z(R1) ↦ t`, starting point for Newton.
    seed: MonotoneCubic,
    f_antiderivative_r1: f64,
    f_antiderivative_r2: f64,
}

impl ConstructedNonlinearity {
    pub fn new(geometry: Arc<dyn RadialGeometry>, b: f64, beta: f64, profile: &Profile) -> Result<Self> {
        let hi = geometry.interval().1;
        let k = b * profile.total + 1.0 - beta * geometry.drift(hi);
        let bridge = profile.bridge.clone();
        let ts: Vec<f64> = (0..SEED_POINTS)
            .map(|j| bridge.len * j as f64 / (SEED_POINTS - 1) as f64)
            .collect();
        let qs: Vec<f64> = ts.iter().map(|&t| bridge.integral(t)).collect();
        let seed = MonotoneCubic::new(qs, ts)?;
        let z_r1 = profile.z_at_r1;
        let f_antiderivative_r1 = -0.5 * b * z_r1 * z_r1 - z_r1;
        let mut out = Self {
            geometry,
            b,
            k,
            z_r1,
            z_r2: profile.z_at_r2,
            bridge,
            seed,
            f_antiderivative_r1,
            f_antiderivative_r2: 0.0,
        };
        out.f_antiderivative_r2 = out.bridge_antiderivative(out.bridge.len);
        Ok(out)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Constant of the upper outer branch.
    pub fn outer_constant(&self) -> f64 {
        self.k
    }

    /// `Z(R1)` and `Z(R2)`, where the branches meet.
    pub fn joints(&self) -> (f64, f64) {
        (self.z_r1, self.z_r2)
    }

    /// Bridge parameter `t ∈ [0, L]` with `Z(R1 + t) = u`.
    pub fn bridge_parameter(&self, u: f64) -> f64 {
        let target = u - self.z_r1;
        let len = self.bridge.len;
        let mut t = self.seed.eval(target).clamp(0.0, len);
        let (mut a, mut b) = (0.0, len);
        for _ in 0..60 {
            let g = self.bridge.integral(t) - target;
            if g > 0.0 {
                b = t;
            } else {
                a = t;
            }
            let step = g / self.bridge.value(t);
            let next = t - step;
            let next = if next > a && next < b { next } else { 0.5 * (a + b) };
            if (next - t).abs() <= 1e-15 * (1.0 + len) {
                return next;
            }
            t = next;
        }
        t
    }

    /// `f` on the bridge as a function of the radius parameter.
    pub fn bridge_value(&self, t: f64) -> f64 {
        let r = self.bridge.r1 + t;
        -(self.bridge.d1(t) + self.geometry.drift(r) * self.bridge.value(t))
    }

    /// `f′(Z(r))` on the bridge: `−[P″ + DP′ + D′P] / P`.
    pub fn bridge_slope(&self, t: f64) -> f64 {
        let r = self.bridge.r1 + t;
        let g = &self.geometry;
        let p = self.bridge.value(t);
        -(self.bridge.d2(t) + g.drift(r) * self.bridge.d1(t) + g.drift_prime(r) * p) / p
    }

    /// `F(Z(R1 + t))`.
    fn bridge_antiderivative(&self, t: f64) -> f64 {
        // ∫ f(Z) z dr with f(Z) z = −P′P − DP²; the first part integrates exactly.
        let p0 = self.bridge.value(0.0);
        let pt = self.bridge.value(t);
        let exact = -0.5 * (pt * pt - p0 * p0);
        let scale = 1.0 + p0 * p0;
        let r1 = self.bridge.r1;
        let quad = adaptive_simpson(
            |s| {
                let p = self.bridge.value(s);
                -self.geometry.drift(r1 + s) * p * p
            },
            0.0,
            t,
            1e-13 * scale,
        );
        self.f_antiderivative_r1 + exact + quad
    }
}

impl Nonlinearity for ConstructedNonlinearity {
    fn name(&self) -> String {
        format!("constructed(B={})", self.b)
    }
    fn kind(&self) -> NonlinearityKind {
        NonlinearityKind::Constructed
    }
    fn f(&self, u: f64) -> f64 {
        if u <= self.z_r1 {
            -self.b * u - 1.0
        } else if u >= self.z_r2 {
            -self.b * u + self.k
        } else {
            self.bridge_value(self.bridge_parameter(u))
        }
    }
    fn f_prime(&self, u: f64) -> f64 {
        if u <= self.z_r1 || u >= self.z_r2 {
            -self.b
        } else {
            self.bridge_slope(self.bridge_parameter(u))
        }
    }
    fn antiderivative(&self, u: f64) -> f64 {
        if u <= self.z_r1 {
            -0.5 * self.b * u * u - u
        } else if u >= self.z_r2 {
            let z2 = self.z_r2;
            self.f_antiderivative_r2 - 0.5 * self.b * (u * u - z2 * z2) + self.k * (u - z2)
        } else {
            self.bridge_antiderivative(self.bridge_parameter(u))
        }
    }
}
