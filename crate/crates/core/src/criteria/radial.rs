//! Boundary criteria for radial solutions on rotationally symmetric
//! domains.

use serde::Serialize;

use super::{strictly_negative, weakly_nonpositive, Holds, STRICT_TOL};
use crate::geometry::RadialGeometry;
use crate::nonlinearity::Nonlinearity;
use crate::stationary::RadialSolution;

/// `ρ[(m−1)Hα²v² + αvf(v) + α³v²]` summed over both boundary components
/// (ρ the level area), with the largest absolute term for tolerances.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundarySum {
    pub inner: f64,
    pub outer: f64,
    pub value: f64,
    pub scale: f64,
}

pub fn boundary_sum(
    geometry: &dyn RadialGeometry,
    v_inner: f64,
    v_outer: f64,
    alpha: f64,
    f: &dyn Nonlinearity,
) -> BoundarySum {
    let m1 = (geometry.dim() - 1) as f64;
    let (a0, a1) = geometry.boundary_areas();
    let terms = |h: f64, v: f64| {
        [
            m1 * h * alpha * alpha * v * v,
            alpha * v * f.f(v),
            alpha * alpha * alpha * v * v,
        ]
    };
    let t0 = terms(geometry.mean_curvature_inner(), v_inner);
    let t1 = terms(geometry.mean_curvature_outer(), v_outer);
    let inner = a0 * t0.iter().sum::<f64>();
    let outer = a1 * t1.iter().sum::<f64>();
    let scale = 1.0
        + t0.iter().map(|t| (a0 * t).abs()).fold(0.0, f64::max)
        + t1.iter().map(|t| (a1 * t).abs()).fold(0.0, f64::max);
    BoundarySum {
        inner,
        outer,
        value: inner + outer,
        scale,
    }
}

fn endpoint_values(solution: &RadialSolution) -> (f64, f64) {
    (solution.v[0], solution.v[solution.n()])
}

/// Instability test for radial solutions: the level sets must have
/// nonincreasing log-derivative of the level radius and the boundary sum
/// must be negative.
#[derive(Debug, Clone, Serialize)]
pub struct RadialInstability {
    /// `min −(ρ′/ρ)′` over the grid, per tangential direction.
    pub convexity_min: f64,
    pub convexity_holds: bool,
    pub boundary: BoundarySum,
    pub boundary_holds: bool,
    pub unstable: Holds,
}

pub fn radial_instability(solution: &RadialSolution) -> RadialInstability {
    let g = solution.geometry.as_ref();
    let convexity_min = solution
        .grid
        .iter()
        .map(|&r| -g.convexity_indicator(r))
        .fold(f64::INFINITY, f64::min);
    let convexity_holds = convexity_min >= -STRICT_TOL;
    let (v0, v1) = endpoint_values(solution);
    let boundary = boundary_sum(g, v0, v1, solution.alpha, solution.nonlinearity.as_ref());
    let boundary_holds = strictly_negative(boundary.value, boundary.scale);
    let unstable = match (convexity_holds, boundary_holds) {
        (false, _) => Holds::NotApplicable,
        (true, true) => Holds::Yes,
        (true, false) => Holds::No,
    };
    RadialInstability {
        convexity_min,
        convexity_holds,
        boundary,
        boundary_holds,
        unstable,
    }
}

/// Surfaces of revolution; `None` for other geometries.
pub fn revolution_instability(solution: &RadialSolution) -> Option<RadialInstability> {
    solution.geometry.as_surface()?;
    Some(radial_instability(solution))
}

/// Annuli in model manifolds; `None` for other geometries.
pub fn model_instability(solution: &RadialSolution) -> Option<RadialInstability> {
    solution.geometry.as_model_annulus()?;
    Some(radial_instability(solution))
}

/// Criteria on a straight cylinder for solutions depending on the axial
/// variable only.
#[derive(Debug, Clone, Serialize)]
pub struct CylinderCriteria {
    /// `∮ α³u² + αuf(u) dσ`.
    pub integral: f64,
    pub strict: Holds,
    pub weak_positive_alpha: Holds,
    pub weak_one_signed: Holds,
    pub unstable: Holds,
}

/// Boundary trace on one circle, sampled uniformly.
#[derive(Debug, Clone)]
pub struct CircleTrace {
    pub length: f64,
    pub u: Vec<f64>,
}

/// `u_one_signed` and `u_nonzero` refer to `u` on the whole closed domain.
pub fn cylinder_from_traces(
    traces: &[CircleTrace],
    alpha: f64,
    f: &dyn Nonlinearity,
    u_one_signed: bool,
    u_nonzero: bool,
) -> CylinderCriteria {
    let na = CylinderCriteria {
        integral: f64::NAN,
        strict: Holds::NotApplicable,
        weak_positive_alpha: Holds::NotApplicable,
        weak_one_signed: Holds::NotApplicable,
        unstable: Holds::NotApplicable,
    };
    let axial = traces.iter().all(|t| {
        let lo = t.u.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = t.u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        !t.u.is_empty() && hi - lo <= 1e-8 * (1.0 + lo.abs().max(hi.abs()))
    });
    if traces.is_empty() || !axial {
        return na;
    }
    let mut integral = 0.0;
    let mut scale: f64 = 0.0;
    for t in traces {
        let ds = t.length / t.u.len() as f64;
        for &u in &t.u {
            let term = alpha.powi(3) * u * u + alpha * u * f.f(u);
            integral += ds * term;
            scale = scale.max((ds * term).abs());
        }
    }
    let nonzero = u_nonzero;
    let strict = if strictly_negative(integral, scale) { Holds::Yes } else { Holds::No };
    let weak = weakly_nonpositive(integral, scale);
    let weak_positive_alpha = if !nonzero || alpha <= 0.0 {
        Holds::NotApplicable
    } else if weak {
        Holds::Yes
    } else {
        Holds::No
    };
    let weak_one_signed = if !nonzero || alpha >= 0.0 || !u_one_signed {
        Holds::NotApplicable
    } else if weak {
        Holds::Yes
    } else {
        Holds::No
    };
    let unstable = if [strict, weak_positive_alpha, weak_one_signed].contains(&Holds::Yes) {
        Holds::Yes
    } else {
        Holds::No
    };
    CylinderCriteria {
        integral,
        strict,
        weak_positive_alpha,
        weak_one_signed,
        unstable,
    }
}

/// Cylinder criteria for a radial solution; `None` unless the geometry is a
/// surface with constant profile.
pub fn cylinder_criteria(solution: &RadialSolution) -> Option<CylinderCriteria> {
    let s = solution.geometry.as_surface()?;
    if s.profile().kind() != "cylinder" {
        return None;
    }
    let (a0, a1) = s.boundary_areas();
    let (v0, v1) = endpoint_values(solution);
    let traces = [
        CircleTrace { length: a0, u: vec![v0] },
        CircleTrace { length: a1, u: vec![v1] },
    ];
    Some(cylinder_from_traces(
        &traces,
        solution.alpha,
        solution.nonlinearity.as_ref(),
        solution.one_signed(),
        !solution.is_zero(),
    ))
}

/// Sufficient instability conditions on domains with nonnegative Ricci
/// curvature, specialised to radial solutions whose boundary traces are
/// constant on each component.
#[derive(Debug, Clone, Serialize)]
pub struct ManifoldSufficient {
    pub ricci_min: f64,
    pub ricci_holds: bool,
    pub boundary: BoundarySum,
    /// Strict version: boundary sum < 0.
    pub strict: Holds,
    /// Weak version: boundary sum ≤ 0 with the sign conditions on α and u.
    pub weak: Holds,
    /// `H ≤ α` on both boundary components.
    pub mean_curvature_below_alpha: bool,
    /// The weak inequality is implied by the sign of `t f(t)` alone.
    pub automatically_satisfied: bool,
    pub unstable: Holds,
}

pub fn manifold_sufficient(solution: &RadialSolution) -> ManifoldSufficient {
    let g = solution.geometry.as_ref();
    let alpha = solution.alpha;
    let f = solution.nonlinearity.as_ref();
    let ricci_min = solution
        .grid
        .iter()
        .map(|&r| g.radial_ricci(r))
        .fold(f64::INFINITY, f64::min);
    let ricci_holds = ricci_min >= -STRICT_TOL;
    let (v0, v1) = endpoint_values(solution);
    let boundary = boundary_sum(g, v0, v1, alpha, f);
    let h_ok = g.mean_curvature_inner() <= alpha && g.mean_curvature_outer() <= alpha;
    let m = g.dim() as f64;
    let t_max = 2.0 * solution.max_norm() + 1.0;
    let samples = (0..=400).map(|i| -t_max + 2.0 * t_max * i as f64 / 400.0);
    let automatically_satisfied = h_ok
        && alpha != 0.0
        && samples.clone().all(|t| {
            let lhs = t * f.f(t);
            let rhs = -alpha * alpha * m * t * t;
            if alpha > 0.0 {
                lhs <= rhs
            } else {
                lhs >= rhs
            }
        });
    let nonzero = !solution.is_zero();
    let (strict, weak) = if !ricci_holds {
        (Holds::NotApplicable, Holds::NotApplicable)
    } else {
        let strict = if strictly_negative(boundary.value, boundary.scale) {
            Holds::Yes
        } else {
            Holds::No
        };
        let signs = alpha > 0.0 || (alpha < 0.0 && solution.one_signed());
        let weak = if !nonzero || !signs {
            Holds::NotApplicable
        } else if weakly_nonpositive(boundary.value, boundary.scale) {
            Holds::Yes
        } else {
            Holds::No
        };
        (strict, weak)
    };
    let unstable = if !ricci_holds {
        Holds::NotApplicable
    } else if strict == Holds::Yes || weak == Holds::Yes {
        Holds::Yes
    } else {
        Holds::No
    };
    ManifoldSufficient {
        ricci_min,
        ricci_holds,
        boundary,
        strict,
        weak,
        mean_curvature_below_alpha: h_ok,
        automatically_satisfied,
        unstable,
    }
}

/// Both sides of `λ₁∫|∇u|² ≤ Σ_boundary ρ(α³u² + αuf + α²(m−1)Hu²) − ∫Ric(∇u,∇u)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GradientInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub scale: f64,
    pub holds: bool,
}

pub fn gradient_inequality(solution: &RadialSolution, lambda1: f64) -> GradientInequality {
    let g = solution.geometry.as_ref();
    let n = solution.n();
    let h = solution.h();
    let mut grad = 0.0;
    let mut ric = 0.0;
    for (i, &r) in solution.grid.iter().enumerate() {
        let w = if i == 0 || i == n { 0.5 * h } else { h } * g.level_area(r);
        let d2 = solution.v_prime[i] * solution.v_prime[i];
        grad += w * d2;
        ric += w * g.radial_ricci(r) * d2;
    }
    let (v0, v1) = endpoint_values(solution);
    let b = boundary_sum(g, v0, v1, solution.alpha, solution.nonlinearity.as_ref());
    let lhs = lambda1 * grad;
    let rhs = b.value - ric;
    let scale = 1.0 + lhs.abs() + b.scale + ric.abs();
    let slack = rhs - lhs;
    GradientInequality {
        lhs,
        rhs,
        slack,
        scale,
        holds: slack >= -1e-6 * scale,
    }
}
