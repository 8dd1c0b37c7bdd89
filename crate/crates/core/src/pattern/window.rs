//! Locating an interval where the level curvature is increasing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RadialGeometry;

const SCAN_POINTS: usize = 2001;
const PEAK_FLOOR: f64 = 1e-10;

/// Peak of the convexity indicator and a symmetric window around it,
/// `R0 < R1 < R2 < R3` with `R1`, `R2` at the inner thirds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub r_hat: f64,
    pub peak: f64,
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl Window {
    /// Window `[r0, r3]` split into thirds.
    pub fn from_ends(r_hat: f64, peak: f64, r0: f64, r3: f64) -> Self {
        let third = (r3 - r0) / 3.0;
        Self {
            r_hat,
            peak,
            r0,
            r1: r0 + third,
            r2: r0 + 2.0 * third,
            r3,
        }
    }

    /// Checks ordering inside `(lo, hi)` and positivity of the indicator on
    /// `[r0, r3]`.
    pub fn validate(&self, geometry: &dyn RadialGeometry) -> Result<()> {
        let (lo, hi) = geometry.interval();
        let ordered = lo < self.r0 && self.r0 < self.r1 && self.r1 < self.r2 && self.r2 < self.r3 && self.r3 < hi;
        if !ordered {
            return Err(Error::InvalidArgument(format!(
                "window must satisfy {lo} < R0 < R1 < R2 < R3 < {hi}, got [{}, {}, {}, {}]",
                self.r0, self.r1, self.r2, self.r3
            )));
        }
        let samples = 401;
        let min = (0..=samples)
            .map(|k| geometry.convexity_indicator(self.r0 + (self.r3 - self.r0) * k as f64 / samples as f64))
            .fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::NoConvexityWindow { max: min });
        }
        Ok(())
    }
}

fn golden_max(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv * (b - a);
    let mut d = a + inv * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv * (b - a);
            fd = g(d);
        }
    }
    0.5 * (a + b)
}

fn bisect_crossing(g: &dyn Fn(f64) -> f64, level: f64, mut above: f64, mut below: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (above + below);
        if mid == above || mid == below {
            break;
        }
        if g(mid) >= level {
            above = mid;
        } else {
            below = mid;
        }
    }
    0.5 * (above + below)
}

/// Scans the convexity indicator, refines its maximiser and returns the
/// half-maximum window, shrunk to stay strictly inside the interval.
pub fn locate_window(geometry: &dyn RadialGeometry) -> Result<Window> {
    let (lo, hi) = geometry.interval();
    let g = |r: f64| geometry.convexity_indicator(r);
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..SCAN_POINTS).map(|k| lo + k as f64 * step).collect();
    let vals: Vec<f64> = xs.iter().map(|&r| g(r)).collect();
    let imax = (0..SCAN_POINTS)
        .max_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .expect("non-empty scan");
    if !(vals[imax] > PEAK_FLOOR) {
        return Err(Error::NoConvexityWindow { max: vals[imax] });
    }
    let a = xs[imax.saturating_sub(1)];
    let b = xs[(imax + 1).min(SCAN_POINTS - 1)];
    let mut r_hat = golden_max(&g, a, b);
    if g(r_hat) < vals[imax] {
        r_hat = xs[imax];
    }
    let peak = g(r_hat);
    let half = 0.5 * peak;

    let mut left = lo;
    let mut k = imax;
    while k > 0 {
        if vals[k - 1] < half {
            left = bisect_crossing(&g, half, xs[k].min(r_hat), xs[k - 1]);
            break;
        }
        k -= 1;
    }
    let mut right = hi;
    let mut k = imax;
    while k + 1 < SCAN_POINTS {
        if vals[k + 1] < half {
            right = bisect_crossing(&g, half, xs[k].max(r_hat), xs[k + 1]);
            break;
        }
        k += 1;
    }
    // Keep a margin from the boundary when the half-max region reaches it.
    let left_room = if left <= lo { 0.95 * (r_hat - lo) } else { r_hat - left };
    let right_room = if right >= hi { 0.95 * (hi - r_hat) } else { right - r_hat };
    let d = left_room.min(right_room);
    if !(d > 0.0) {
        return Err(Error::NoConvexityWindow { max: peak });
    }
    let w = Window::from_ends(r_hat, peak, r_hat - d, r_hat + d);
    w.validate(geometry)?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometrySpec;
    use crate::registry::Params;

    fn surface(profile: &str, c: f64, lo: f64, hi: f64) -> std::sync::Arc<dyn RadialGeometry> {
        GeometrySpec::Revolution {
            profile: profile.into(),
            params: Params::from([("c".to_string(), c)]),
            interval: [lo, hi],
        }
        .build()
        .unwrap()
    }

    #[test]
    fn catenoid_peak_is_at_the_neck() {
        let g = surface("catenoid", 1.0, 0.0, 2.0);
        let w = locate_window(g.as_ref()).unwrap();
        // a quadratic maximum is only located to about √ε
        assert!((w.r_hat - 1.0).abs() < 5e-8);
        assert!((w.peak - 1.0).abs() < 1e-12);
        // half maximum at s² = √5 − 2
        let d = (5f64.sqrt() - 2.0).sqrt();
        assert!((w.r0 - (1.0 - d)).abs() < 1e-7);
        assert!((w.r3 - (1.0 + d)).abs() < 1e-7);
        assert!((w.r2 - w.r1 - (w.r3 - w.r0) / 3.0).abs() < 1e-14);
    }

    #[test]
    fn flat_profiles_have_no_window() {
        for (p, c) in [("cylinder", 1.0), ("exponential", 0.1)] {
            let g = surface(p, c, 0.0, 1.0);
            assert!(matches!(locate_window(g.as_ref()), Err(Error::NoConvexityWindow { .. })));
        }
    }

    #[test]
    fn window_is_kept_inside_a_short_interval() {
        let g = surface("catenoid", 1.0, 0.8, 1.5);
        let w = locate_window(g.as_ref()).unwrap();
        assert!(w.r0 > 0.8 && w.r3 < 1.5);
    }
}
