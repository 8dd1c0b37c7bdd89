//! The positive test function `w` and the inequalities it must satisfy for
//! the constructed solution to be stable.

use serde::{Deserialize, Serialize};

use crate::criteria::{boundary_sum, BoundarySum};
use crate::geometry::RadialGeometry;
use crate::nonlinearity::Nonlinearity;

use super::profile::Profile;
use super::window::Window;

/// Constants entering the choice of `m1`, `m2` and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofConstants {
    /// `max |D|` on the interval.
    pub c: f64,
    /// `max |D′|` on the interval.
    pub b_bar: f64,
    /// `min D′` on `[R0, R1]` and on `[R2, R3]`.
    pub b_low_left: f64,
    pub b_low_right: f64,
}

fn sample_extremes(a: f64, b: f64, g: impl Fn(f64) -> f64) -> (f64, f64) {
    let samples = 4000;
    (0..=samples)
        .map(|k| g(a + (b - a) * k as f64 / samples as f64))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

impl ProofConstants {
    pub fn compute(geometry: &dyn RadialGeometry, window: &Window) -> Self {
        let (lo, hi) = geometry.interval();
        let (dmin, dmax) = sample_extremes(lo, hi, |r| geometry.drift(r));
        let (pmin, pmax) = sample_extremes(lo, hi, |r| geometry.drift_prime(r));
        let left = sample_extremes(window.r0, window.r1, |r| geometry.drift_prime(r)).0;
        let right = sample_extremes(window.r2, window.r3, |r| geometry.drift_prime(r)).0;
        Self {
            c: dmin.abs().max(dmax.abs()),
            b_bar: pmin.abs().max(pmax.abs()),
            b_low_left: left,
            b_low_right: right,
        }
    }

    /// Largest admissible `m` for a side of length `span` with floor `b_low`,
    /// scaled by `fraction < 1`.
    pub fn m_bound(&self, l: u32, span: f64, b_low: f64, fraction: f64) -> f64 {
        let e = 3.0 * l as f64;
        fraction * b_low / (e * span.powf(e - 2.0) * (self.c * span + e - 1.0))
    }

    /// Explicit lower bounds on `B` for the left piece of `w`.
    pub fn b_lower_bound(&self, l: u32, m1: f64, lo: f64, window: &Window) -> f64 {
        let e = 3.0 * l as f64;
        let d = window.r1 - window.r0;
        let s = window.r1 - lo;
        let first = e * (e - 1.0 + self.c * s) / (d * d);
        let second = (self.b_bar + e * m1 * d.powf(e - 2.0) * (self.c * s + e - 1.0)) / (m1 * d.powf(e));
        first.max(second)
    }
}

/// `w` with exact first and second derivatives on the grid.
#[derive(Debug, Clone)]
pub struct TestFunctionValues {
    pub w: Vec<f64>,
    pub w_prime: Vec<f64>,
    pub w_second: Vec<f64>,
    pub z_at_r0: f64,
    pub z_at_r3: f64,
}

/// `w = z − m1 z(R0)(r − R1)^{3l}` left of `R1`, `w = z` on the bridge,
/// `w = z + m2 z(R3)(r − R2)^{3l}` right of `R2`.
pub fn build_w(profile: &Profile, window: &Window, m1: f64, m2: f64, l: u32) -> TestFunctionValues {
    let e = 3 * l as i32;
    let ef = e as f64;
    let z_at_r0 = profile.z_at(window.r0);
    let z_at_r3 = profile.z_at(window.r3);
    let n = profile.n();
    let mut w = profile.z.clone();
    let mut wp = profile.z_prime.clone();
    let mut ws = profile.z_second.clone();
    let left_end = profile.left.nodes.end;
    let right_start = profile.right.nodes.start;
    for i in 0..=n {
        let (x, coef) = if i < left_end {
            (profile.grid[i] - window.r1, -m1 * z_at_r0)
        } else if i >= right_start {
            (profile.grid[i] - window.r2, m2 * z_at_r3)
        } else {
            continue;
        };
        w[i] += coef * x.powi(e);
        wp[i] += coef * ef * x.powi(e - 1);
        ws[i] += coef * ef * (ef - 1.0) * x.powi(e - 2);
    }
    TestFunctionValues {
        w,
        w_prime: wp,
        w_second: ws,
        z_at_r0,
        z_at_r3,
    }
}

pub const INTERIOR_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct ClaimCheck {
    /// `max (w″ + Dw′ + f′(Z)w)` over interior nodes.
    pub interior_max: f64,
    pub interior_argmax: f64,
    pub scale: f64,
    /// `−w′(lo) + αw(lo)`.
    pub inner_boundary: f64,
    /// `w′(hi) + αw(hi)`.
    pub outer_boundary: f64,
    pub min_w: f64,
    pub boundary_sum: BoundarySum,
    pub pass: bool,
    /// First inequality that fails, with its location.
    pub failure: Option<(String, String)>,
}

/// Evaluates every inequality; the first failure is recorded in the order
/// inner boundary, outer boundary, interior, positivity, boundary sum.
pub fn verify_claim(
    geometry: &dyn RadialGeometry,
    profile: &Profile,
    f: &dyn Nonlinearity,
    w: &TestFunctionValues,
) -> ClaimCheck {
    let n = profile.n();
    let alpha = profile.alpha;
    let mut worst = f64::NEG_INFINITY;
    let mut at = profile.grid[0];
    let mut scale: f64 = 1.0;
    let mut terms = Vec::with_capacity(n);
    for i in 1..n {
        let r = profile.grid[i];
        let a = w.w_second[i];
        let b = geometry.drift(r) * w.w_prime[i];
        let c = f.f_prime(profile.big_z[i]) * w.w[i];
        scale = scale.max(a.abs()).max(b.abs()).max(c.abs());
        terms.push((r, a + b + c));
    }
    for &(r, e) in &terms {
        if e > worst {
            worst = e;
            at = r;
        }
    }
    let inner = -w.w_prime[0] + alpha * w.w[0];
    let outer = w.w_prime[n] + alpha * w.w[n];
    let min_w = w.w.iter().copied().fold(f64::INFINITY, f64::min);
    let sum = boundary_sum(geometry, profile.big_z[0], profile.big_z[n], alpha, f);
    let (lo, hi) = geometry.interval();
    let failure = if !(inner > 0.0) {
        Some(("inner-boundary".to_string(), format!("-w'(lo) + alpha w(lo) = {inner:.6e} at r = {lo}")))
    } else if !(outer > 0.0) {
        Some(("outer-boundary".to_string(), format!("w'(hi) + alpha w(hi) = {outer:.6e} at r = {hi}")))
    } else if !(worst < -INTERIOR_MARGIN * scale) {
        Some((
            "interior".to_string(),
            format!("w'' + D w' + f'(Z) w = {worst:.6e} at r = {at}"),
        ))
    } else if !(min_w > 0.0) {
        Some(("w-positive".to_string(), format!("min w = {min_w:.6e}")))
    } else if !(sum.value < 0.0) {
        Some(("boundary-sum".to_string(), format!("boundary sum = {:.6e}", sum.value)))
    } else {
        None
    };
    ClaimCheck {
        interior_max: worst,
        interior_argmax: at,
        scale,
        inner_boundary: inner,
        outer_boundary: outer,
        min_w,
        boundary_sum: sum,
        pass: failure.is_none(),
        failure,
    }
}
