//! Closed-form stability and instability criteria, evaluated from the
//! geometry and a radial solution, and the report that combines them with
//! the spectral classification.

mod barta;
mod constant;
mod planar;
mod radial;

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use barta::{barta_certificate, BartaCertificate, TestFunction};
pub use constant::{
    constant_solution, constant_solution_with_slope, stable_solution_estimates, BoundCheck, ConstantSolution,
    StableEstimates, ZeroVerdict,
};
pub use planar::{annulus_boundary, annulus_scalar, plane_criteria, BoundaryCurve, PlanarCriteria};
pub use radial::{
    boundary_sum, cylinder_criteria, cylinder_from_traces, gradient_inequality, manifold_sufficient,
    model_instability, radial_instability, revolution_instability, BoundarySum, CircleTrace, CylinderCriteria,
    GradientInequality, ManifoldSufficient, RadialInstability,
};

use crate::error::Result;
use crate::registry::Registry;
use crate::spectrum::{extrapolated_lambda1, lambda1_full, Extrapolated, DEFAULT_K_MAX};
use crate::stationary::{RadialSolution, Validation};

/// Absolute tolerance for sign conditions on geometric quantities.
pub const STRICT_TOL: f64 = 1e-10;
/// Boundary values below this magnitude make `f(u)/(αu)` meaningless.
pub const BOUNDARY_ZERO: f64 = 1e-12;
/// Spectral classification threshold.
pub const LAMBDA_TOL: f64 = 1e-6;

/// `x < −1e−10 (1 + scale)`.
pub fn strictly_negative(x: f64, scale: f64) -> bool {
    x < -STRICT_TOL * (1.0 + scale.abs())
}

/// `x ≤ 1e−10 (1 + scale)`.
pub fn weakly_nonpositive(x: f64, scale: f64) -> bool {
    x <= STRICT_TOL * (1.0 + scale.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Holds {
    Yes,
    No,
    NotApplicable,
}

impl Holds {
    pub fn label(self) -> &'static str {
        match self {
            Holds::Yes => "yes",
            Holds::No => "no",
            Holds::NotApplicable => "n/a",
        }
    }
}

/// What a criterion proves when it holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Implication {
    Unstable,
    Stable,
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub holds: Holds,
    pub witness: Option<f64>,
    pub implies: Implication,
    pub detail: String,
}

impl Verdict {
    fn new(id: &str, holds: Holds, witness: Option<f64>, implies: Implication, detail: String) -> Self {
        Self {
            id: id.to_string(),
            holds,
            witness,
            implies,
            detail,
        }
    }

    pub fn proves_instability(&self) -> bool {
        self.holds == Holds::Yes && self.implies == Implication::Unstable
    }

    pub fn proves_stability(&self) -> bool {
        self.holds == Holds::Yes && self.implies == Implication::Stable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Unstable,
    AsymptoticallyStable,
    NeutrallyStable,
    Inconclusive,
}

/// Inputs shared by all criteria.
pub struct CriterionContext<'a> {
    pub solution: &'a RadialSolution,
    pub lambda1: Option<f64>,
    /// Grid size for auxiliary eigenproblems.
    pub n_eigen: usize,
}

pub trait Criterion: Send + Sync {
    fn id(&self) -> &'static str;
    /// `None` when the criterion does not apply to this geometry.
    fn evaluate(&self, ctx: &CriterionContext<'_>) -> Option<Verdict>;
}

struct FnCriterion<F> {
    id: &'static str,
    eval: F,
}

impl<F> Criterion for FnCriterion<F>
where
    F: Fn(&CriterionContext<'_>) -> Option<Verdict> + Send + Sync,
{
    fn id(&self) -> &'static str {
        self.id
    }
    fn evaluate(&self, ctx: &CriterionContext<'_>) -> Option<Verdict> {
        (self.eval)(ctx)
    }
}

fn criterion<F>(id: &'static str, eval: F) -> Arc<dyn Criterion>
where
    F: Fn(&CriterionContext<'_>) -> Option<Verdict> + Send + Sync + 'static,
{
    Arc::new(FnCriterion { id, eval })
}

fn planar_verdict(ctx: &CriterionContext<'_>) -> Option<Verdict> {
    let s = ctx.solution;
    let annulus = s.geometry.as_plane_annulus()?;
    let curves = annulus_boundary(&annulus, s.v[0], s.v[s.n()]);
    let id = "planar-boundary";
    match plane_criteria(&curves, s.alpha, s.nonlinearity.as_ref()) {
        Ok(c) => Some(Verdict::new(
            id,
            c.unstable,
            Some(c.boundary_integral),
            Implication::Unstable,
            format!(
                "boundary integral {:.6e}, curvature floor {:.6e}{}, pointwise max {}",
                c.boundary_integral,
                c.curvature_floor,
                if c.level_boundary { " (not needed: level boundary)" } else { "" },
                c.pointwise_max.map_or("n/a".into(), |m| format!("{m:.6e}"))
            ),
        )),
        Err(e) => Some(Verdict::new(id, Holds::NotApplicable, None, Implication::Unstable, e.to_string())),
    }
}

fn radial_verdict(id: &str, r: RadialInstability) -> Verdict {
    Verdict::new(
        id,
        r.unstable,
        Some(r.boundary.value),
        Implication::Unstable,
        format!(
            "min -(log rho)'' = {:.6e} ({}), boundary sum {:.6e}",
            r.convexity_min,
            if r.convexity_holds { "ok" } else { "fails" },
            r.boundary.value
        ),
    )
}

fn constant_verdict(ctx: &CriterionContext<'_>) -> Option<Verdict> {
    let s = ctx.solution;
    if !s.is_zero() {
        return None;
    }
    let id = "constant-solution";
    Some(
        match constant_solution(s.geometry.as_ref(), s.alpha, s.nonlinearity.as_ref(), ctx.n_eigen) {
            Ok(c) => {
                let (holds, implies) = match c.verdict {
                    ZeroVerdict::Unstable => (Holds::Yes, Implication::Unstable),
                    ZeroVerdict::AsymptoticallyStable => (Holds::Yes, Implication::Stable),
                    ZeroVerdict::Inconclusive => (Holds::No, Implication::None),
                };
                Verdict::new(
                    id,
                    holds,
                    Some(c.f_prime_at_zero - c.linear_lambda),
                    implies,
                    format!("f'(0) = {:.6e}, linear lambda = {:.6e}", c.f_prime_at_zero, c.linear_lambda),
                )
            }
            Err(e) => Verdict::new(id, Holds::NotApplicable, None, Implication::None, e.to_string()),
        },
    )
}

/// All built-in criteria, keyed by id.
pub fn criterion_registry() -> Registry<Arc<dyn Criterion>> {
    let mut reg: Registry<Arc<dyn Criterion>> = Registry::new("criterion");
    reg.register("planar-boundary", |_| Ok(criterion("planar-boundary", planar_verdict)))
        .register("revolution", |_| {
            Ok(criterion("revolution", |ctx| {
                revolution_instability(ctx.solution).map(|r| radial_verdict("revolution", r))
            }))
        })
        .register("model", |_| {
            Ok(criterion("model", |ctx| {
                model_instability(ctx.solution).map(|r| radial_verdict("model", r))
            }))
        })
        .register("cylinder", |_| {
            Ok(criterion("cylinder", |ctx| {
                cylinder_criteria(ctx.solution).map(|c| {
                    Verdict::new(
                        "cylinder",
                        c.unstable,
                        Some(c.integral),
                        Implication::Unstable,
                        format!(
                            "integral {:.6e}; strict {}, weak (alpha > 0) {}, weak (one-signed) {}",
                            c.integral,
                            c.strict.label(),
                            c.weak_positive_alpha.label(),
                            c.weak_one_signed.label()
                        ),
                    )
                })
            }))
        })
        .register("ricci-boundary", |_| {
            Ok(criterion("ricci-boundary", |ctx| {
                let m = manifold_sufficient(ctx.solution);
                Some(Verdict::new(
                    "ricci-boundary",
                    m.unstable,
                    Some(m.boundary.value),
                    Implication::Unstable,
                    format!(
                        "min Ric = {:.6e}, boundary sum {:.6e}; strict {}, weak {}{}",
                        m.ricci_min,
                        m.boundary.value,
                        m.strict.label(),
                        m.weak.label(),
                        if m.automatically_satisfied { ", implied by sign of t f(t)" } else { "" }
                    ),
                ))
            }))
        })
        .register("constant-solution", |_| Ok(criterion("constant-solution", constant_verdict)))
        .register("stable-estimates", |_| {
            Ok(criterion("stable-estimates", |ctx| {
                let lam = ctx.lambda1?;
                let e = stable_solution_estimates(ctx.solution, lam);
                let detail = if e.checks.is_empty() {
                    "needs lambda1 >= 0, alpha > 0, Ric >= 0 and a linear or power nonlinearity".to_string()
                } else {
                    e.checks
                        .iter()
                        .map(|c| format!("{}: {:.6e} >= {:.6e} {}", c.name, c.lhs, c.rhs, if c.holds { "ok" } else { "fails" }))
                        .collect::<Vec<_>>()
                        .join("; ")
                };
                Some(Verdict::new("stable-estimates", e.applicable, None, Implication::None, detail))
            }))
        })
        .register("gradient-inequality", |_| {
            Ok(criterion("gradient-inequality", |ctx| {
                let lam = ctx.lambda1?;
                let g = gradient_inequality(ctx.solution, lam);
                Some(Verdict::new(
                    "gradient-inequality",
                    if g.holds { Holds::Yes } else { Holds::No },
                    Some(g.slack),
                    Implication::None,
                    format!("lambda1 * |grad u|^2 = {:.6e} <= {:.6e}", g.lhs, g.rhs),
                ))
            }))
        });
    reg
}

/// Evaluates every applicable criterion of the registry in name order.
pub fn evaluate_all(ctx: &CriterionContext<'_>) -> Vec<Verdict> {
    let reg = criterion_registry();
    reg.names()
        .into_iter()
        .filter_map(|name| reg.build(name, &Default::default()).ok())
        .filter_map(|c| c.evaluate(ctx))
        .collect()
}

/// Classification from criteria alone.
pub fn classify_verdicts(verdicts: &[Verdict]) -> Classification {
    if verdicts.iter().any(Verdict::proves_instability) {
        Classification::Unstable
    } else if verdicts.iter().any(Verdict::proves_stability) {
        Classification::AsymptoticallyStable
    } else {
        Classification::Inconclusive
    }
}

pub fn classify_lambda(lambda1: f64) -> Classification {
    if lambda1 < -LAMBDA_TOL {
        Classification::Unstable
    } else if lambda1 > LAMBDA_TOL {
        Classification::AsymptoticallyStable
    } else {
        Classification::NeutrallyStable
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub c: f64,
    pub max_norm: f64,
    pub v_inner: f64,
    pub v_outer: f64,
    pub one_parameter_family: bool,
    pub validation: Validation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub geometry: String,
    pub nonlinearity: String,
    pub alpha: f64,
    pub solution: SolutionSummary,
    /// Extrapolated principal eigenvalue (mode 0).
    pub lambda1: Option<f64>,
    pub lambda1_detail: Option<Extrapolated>,
    /// Principal eigenvalue per Fourier mode at the base grid size.
    pub mode_lambdas: Vec<f64>,
    pub verdicts: Vec<Verdict>,
    pub criteria_classification: Classification,
    pub classification: Classification,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub n_eigen: usize,
    pub k_max: usize,
    pub spectral: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            n_eigen: crate::spectrum::DEFAULT_EIGEN_N,
            k_max: DEFAULT_K_MAX,
            spectral: true,
        }
    }
}

/// λ₁, all applicable criteria and the resulting classification.
pub fn build_report(solution: &RadialSolution, opts: &ReportOptions) -> Result<StabilityReport> {
    let mut notes = Vec::new();
    let (detail, modes) = if opts.spectral {
        let ex = extrapolated_lambda1(solution, opts.n_eigen)?;
        let modes = lambda1_full(solution, opts.k_max, opts.n_eigen)?.lambdas;
        (Some(ex), modes)
    } else {
        (None, Vec::new())
    };
    let lambda1 = detail.as_ref().map(|d| d.value);
    if solution.family {
        notes.push("linear nonlinearity: solution is a normalised member of a one-parameter family".into());
    }
    if solution.nonlinearity.f(0.0) != 0.0 {
        notes.push("f(0) != 0: no constant solution exists".into());
    }
    let ctx = CriterionContext {
        solution,
        lambda1,
        n_eigen: opts.n_eigen.min(1024),
    };
    let verdicts = evaluate_all(&ctx);
    let criteria_classification = classify_verdicts(&verdicts);
    let classification = lambda1.map_or(criteria_classification, classify_lambda);
    if lambda1.is_some() && criteria_classification != Classification::Inconclusive && criteria_classification != classification {
        notes.push(format!(
            "criteria suggest {criteria_classification:?} but the spectrum gives {classification:?}"
        ));
    }
    let g = solution.geometry.as_ref();
    Ok(StabilityReport {
        geometry: g.describe(),
        nonlinearity: solution.nonlinearity.name(),
        alpha: solution.alpha,
        solution: SolutionSummary {
            c: solution.c,
            max_norm: solution.max_norm(),
            v_inner: solution.v[0],
            v_outer: solution.v[solution.n()],
            one_parameter_family: solution.family,
            validation: solution.validate(),
        },
        lambda1,
        lambda1_detail: detail,
        mode_lambdas: modes,
        verdicts,
        criteria_classification,
        classification,
        notes,
    })
}

impl StabilityReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "geometry      {}", self.geometry);
        let _ = writeln!(s, "nonlinearity  {}", self.nonlinearity);
        let _ = writeln!(s, "alpha         {:.6e}", self.alpha);
        let _ = writeln!(
            s,
            "solution      c = {:.10e}, max|v| = {:.6e}, residual {:.3e} ({})",
            self.solution.c,
            self.solution.max_norm,
            self.solution.validation.ode_residual,
            if self.solution.validation.valid { "valid" } else { "INVALID" }
        );
        match self.lambda1 {
            Some(l) => {
                let _ = writeln!(s, "lambda1       {l:.10e}");
            }
            None => {
                let _ = writeln!(s, "lambda1       not computed");
            }
        }
        let _ = writeln!(
            s,
            "verdict       {:?} (criteria: {:?})",
            self.classification, self.criteria_classification
        );
        let _ = writeln!(s, "{:<22} {:<5} {:>16}  {:<9} detail", "criterion", "holds", "witness", "implies");
        for v in &self.verdicts {
            let implies = match v.implies {
                Implication::Unstable => "unstable",
                Implication::Stable => "stable",
                Implication::None => "-",
            };
            let w = v.witness.map_or("-".to_string(), |w| format!("{w:.6e}"));
            let _ = writeln!(s, "{:<22} {:<5} {:>16}  {:<9} {}", v.id, v.holds.label(), w, implies, v.detail);
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}
