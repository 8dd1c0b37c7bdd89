//! The trivial solution and a priori bounds for stable solutions.

use serde::Serialize;

use super::Holds;
use crate::error::{Error, Result};
use crate::geometry::RadialGeometry;
use crate::nonlinearity::{Family, Nonlinearity};
use crate::spectrum::linear_lambda_extrapolated;
use crate::stationary::RadialSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroVerdict {
    Unstable,
    AsymptoticallyStable,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantSolution {
    pub linear_lambda: f64,
    pub f_prime_at_zero: f64,
    pub verdict: ZeroVerdict,
}

/// Compares `f′(0)` with the principal eigenvalue Λ₁ of the linear Robin
/// problem. Fails when `f(0) ≠ 0`, since then no constant solution exists.
pub fn constant_solution(
    geometry: &dyn RadialGeometry,
    alpha: f64,
    f: &dyn Nonlinearity,
    n: usize,
) -> Result<ConstantSolution> {
    if f.f(0.0) != 0.0 {
        return Err(Error::Precondition(format!(
            "no constant solution exists: f(0) = {:e} != 0",
            f.f(0.0)
        )));
    }
    let fp = f.f_prime(0.0);
    constant_solution_with_slope(geometry, alpha, fp, n)
}

pub fn constant_solution_with_slope(
    geometry: &dyn RadialGeometry,
    alpha: f64,
    f_prime_at_zero: f64,
    n: usize,
) -> Result<ConstantSolution> {
    if alpha == 0.0 {
        return Err(Error::Precondition("constant-solution test needs alpha != 0".into()));
    }
    let lam = linear_lambda_extrapolated(geometry, alpha, n)?.value;
    let tol = 1e-9 * (1.0 + lam.abs());
    let verdict = if f_prime_at_zero > lam + tol {
        ZeroVerdict::Unstable
    } else if f_prime_at_zero < lam - tol {
        ZeroVerdict::AsymptoticallyStable
    } else {
        ZeroVerdict::Inconclusive
    };
    Ok(ConstantSolution {
        linear_lambda: lam,
        f_prime_at_zero,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StableEstimates {
    pub applicable: Holds,
    /// Nonnegative Ricci curvature on the grid.
    pub ricci_nonnegative: bool,
    pub h_max: f64,
    pub checks: Vec<BoundCheck>,
}

/// Necessary conditions for stability when `Ric ≥ 0`, for `f(u) = λu` and
/// `f(u) = −c²u + |u|^{p−1}u` with `α > 0`.
pub fn stable_solution_estimates(solution: &RadialSolution, lambda1: f64) -> StableEstimates {
    let g = solution.geometry.as_ref();
    let alpha = solution.alpha;
    let m1 = (g.dim() - 1) as f64;
    let h_max = g.mean_curvature_inner().max(g.mean_curvature_outer());
    let ricci_nonnegative = solution.grid.iter().all(|&r| g.radial_ricci(r) >= -1e-10);
    let floor = -(alpha * alpha + m1 * h_max * alpha);
    let mut out = StableEstimates {
        applicable: Holds::NotApplicable,
        ricci_nonnegative,
        h_max,
        checks: Vec::new(),
    };
    if lambda1 < 0.0 || alpha <= 0.0 || !ricci_nonnegative {
        return out;
    }
    match solution.nonlinearity.family() {
        Family::Linear { lambda } => out.checks.push(BoundCheck {
            name: "linear coefficient".into(),
            lhs: lambda,
            rhs: floor,
            holds: lambda >= floor - 1e-10 * (1.0 + floor.abs()),
        }),
        Family::Power { c, p } => {
            let lhs = solution.max_norm().powf(p - 1.0);
            let rhs = floor + c * c;
            out.checks.push(BoundCheck {
                name: "power amplitude".into(),
                lhs,
                rhs,
                holds: lhs >= rhs - 1e-10 * (1.0 + rhs.abs()),
            });
        }
        Family::Other => return out,
    }
    // f(u)/(αu) ≥ −[α + (m−1)H] somewhere on the boundary.
    let f = solution.nonlinearity.as_ref();
    let ends = [
        (solution.v[0], g.mean_curvature_inner()),
        (solution.v[solution.n()], g.mean_curvature_outer()),
    ];
    let best = ends
        .iter()
        .filter(|(u, _)| u.abs() >= super::BOUNDARY_ZERO)
        .map(|&(u, h)| f.f(u) / (alpha * u) + alpha + m1 * h)
        .fold(f64::NEG_INFINITY, f64::max);
    if best.is_finite() {
        out.checks.push(BoundCheck {
            name: "boundary quotient".into(),
            lhs: best,
            rhs: 0.0,
            holds: best >= -1e-10,
        });
    }
    out.applicable = if out.checks.iter().all(|c| c.holds) {
        Holds::Yes
    } else {
        Holds::No
    };
    out
}
