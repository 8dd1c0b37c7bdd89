//! Positive supersolution certificates for `λ₁ > 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stationary::RadialSolution;

/// Values of a positive test function on the solution grid, with optional
/// exact first and second derivatives.
#[derive(Debug, Clone)]
pub struct TestFunction<'a> {
    pub w: &'a [f64],
    pub w_prime: Option<&'a [f64]>,
    pub w_second: Option<&'a [f64]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BartaCertificate {
    pub pass: bool,
    /// `max Δw + f′(Z)w` over interior nodes and where it occurs.
    pub interior_max: f64,
    pub interior_argmax: f64,
    pub margin: f64,
    /// `−w′(lo) + αw(lo)`.
    pub inner_boundary: f64,
    /// `w′(hi) + αw(hi)`.
    pub outer_boundary: f64,
}

/// Checks `Δw + f′(Z)w < −margin` in the interior and `∂w/∂ν + αw ≥ 0` on
/// the boundary. Missing derivatives are replaced by second-order
/// differences.
pub fn barta_certificate(solution: &RadialSolution, test: &TestFunction<'_>, margin: f64) -> Result<BartaCertificate> {
    let n = solution.n();
    let w = test.w;
    if w.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "test function has {} values for {} nodes",
            w.len(),
            n + 1
        )));
    }
    if let Some(i) = w.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::Precondition(format!(
            "test function is not positive at r = {}",
            solution.grid[i]
        )));
    }
    let h = solution.h();
    let d1 = |i: usize| -> f64 {
        if let Some(d) = test.w_prime {
            return d[i];
        }
        if i == 0 {
            (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h)
        } else if i == n {
            (3.0 * w[n] - 4.0 * w[n - 1] + w[n - 2]) / (2.0 * h)
        } else {
            (w[i + 1] - w[i - 1]) / (2.0 * h)
        }
    };
    let d2 = |i: usize| -> f64 {
        match test.w_second {
            Some(d) => d[i],
            None => (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h),
        }
    };
    let g = solution.geometry.as_ref();
    let f = solution.nonlinearity.as_ref();
    let mut worst = f64::NEG_INFINITY;
    let mut at = solution.grid[0];
    for i in 1..n {
        let r = solution.grid[i];
        let e = d2(i) + g.drift(r) * d1(i) + f.f_prime(solution.v[i]) * w[i];
        if e > worst {
            worst = e;
            at = r;
        }
    }
    let alpha = solution.alpha;
    let inner = -d1(0) + alpha * w[0];
    let outer = d1(n) + alpha * w[n];
    Ok(BartaCertificate {
        pass: worst < -margin && inner >= 0.0 && outer >= 0.0,
        interior_max: worst,
        interior_argmax: at,
        margin,
        inner_boundary: inner,
        outer_boundary: outer,
    })
}
