//! Synthesis of a stable nonconstant stationary solution on a surface with
//! a convexity window.
//!
//! A profile `z > 0` with `z(lo) = 0`, `z(hi) = β` is built from two
//! solutions of `z″ + Dz′ + (D′ − B)z = 0` joined by a quintic. Its
//! antiderivative `Z` solves `Z″ + DZ′ + f(Z) = 0` for the reaction term
//! read off from `z`, with Robin coefficient `α = −β / ∫z`. Stability is
//! certified by a positive strict supersolution `w` of the linearised
//! problem and cross-checked with the eigensolver.

mod claim;
mod constructed;
mod profile;
mod window;

use std::path::Path;
use std::sync::Arc;

use log::{debug, info};
use serde::{Deserialize, Serialize};

pub use claim::{build_w, verify_claim, ClaimCheck, ProofConstants, TestFunctionValues, INTERIOR_MARGIN};
pub use constructed::ConstructedNonlinearity;
pub use profile::{assemble, bridge, solve_z1, solve_z2, z_second, Branch, BranchState, Profile, Quintic};
pub use window::{locate_window, Window};

use crate::criteria::{barta_certificate, BartaCertificate, TestFunction};
use crate::error::{Error, Result};
use crate::geometry::{GeometrySpec, RadialGeometry};
use crate::io::write_csv;
use crate::nonlinearity::Nonlinearity;
use crate::spectrum::{extrapolated_lambda1, lambda1_full, Extrapolated, DEFAULT_K_MAX};
use crate::stationary::RadialSolution;

pub const DEFAULT_BETA: f64 = 1.0;
pub const DEFAULT_N: usize = 4000;
pub const B_CAP: f64 = 1e12;
pub const L_CAP: u32 = 99;
/// Fraction of the admissible upper bound used for `m1`, `m2`.
pub const M_FRACTION: f64 = 0.9;
pub const GLUING_TOL: f64 = 1e-6;
/// Smallest principal eigenvalue accepted as a stability certificate.
pub const LAMBDA_FLOOR: f64 = 1e-6;
pub const NONLINEARITY_SAMPLES: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternParams {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub beta: f64,
    pub b: f64,
    pub m1: f64,
    pub m2: f64,
    /// Odd exponent parameter; `w` uses powers `3l`.
    pub l: u32,
    pub n: usize,
}

impl PatternParams {
    pub fn window(&self, reference: &Window) -> Window {
        Window {
            r0: self.r0,
            r1: self.r1,
            r2: self.r2,
            r3: self.r3,
            ..*reference
        }
    }
}

/// Search settings. Fixed values replace the corresponding search
/// dimension.
#[derive(Debug, Clone)]
pub struct PatternOptions {
    pub beta: f64,
    pub n: usize,
    pub window: Option<Window>,
    pub l: Option<u32>,
    pub b: Option<f64>,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub k_max: usize,
}

impl Default for PatternOptions {
    fn default() -> Self {
        Self {
            beta: DEFAULT_BETA,
            n: DEFAULT_N,
            window: None,
            l: None,
            b: None,
            m1: None,
            m2: None,
            k_max: DEFAULT_K_MAX,
        }
    }
}

/// Agreement of `f(Z)` with `−(z′ + Dz)` and continuity at the joints.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Gluing {
    pub max_residual: f64,
    pub scale: f64,
    pub value_jump_inner: f64,
    pub value_jump_outer: f64,
    pub slope_jump_inner: f64,
    pub slope_jump_outer: f64,
    pub pass: bool,
}

fn gluing(geometry: &dyn RadialGeometry, profile: &Profile, f: &ConstructedNonlinearity) -> Gluing {
    let mut max_residual: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..profile.grid.len() {
        let r = profile.grid[i];
        let fz = f.f(profile.big_z[i]);
        let target = -(profile.z_prime[i] + geometry.drift(r) * profile.z[i]);
        scale = scale.max(fz.abs()).max(target.abs());
        max_residual = max_residual.max((fz - target).abs());
    }
    let b = f.b();
    let (u1, u2) = f.joints();
    let len = profile.bridge.len;
    let value_jump_inner = (-b * u1 - 1.0 - f.bridge_value(0.0)).abs();
    let value_jump_outer = (-b * u2 + f.outer_constant() - f.bridge_value(len)).abs();
    let slope_jump_inner = (-b - f.bridge_slope(0.0)).abs();
    let slope_jump_outer = (-b - f.bridge_slope(len)).abs();
    let tol = GLUING_TOL * scale;
    let slope_tol = GLUING_TOL * (1.0 + b.abs());
    Gluing {
        max_residual,
        scale,
        value_jump_inner,
        value_jump_outer,
        slope_jump_inner,
        slope_jump_outer,
        pass: max_residual <= tol
            && value_jump_inner <= tol
            && value_jump_outer <= tol
            && slope_jump_inner <= slope_tol
            && slope_jump_outer <= slope_tol,
    }
}

/// Everything checked about one candidate.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub alpha: f64,
    pub z_total: f64,
    pub robin_inner: f64,
    pub robin_outer: f64,
    pub min_bridge: f64,
    pub gluing: Gluing,
    pub claim: ClaimCheck,
    /// Present once the inequalities hold.
    pub barta: Option<BartaCertificate>,
    pub mode_lambdas: Option<Vec<f64>>,
    pub lambda1: Option<f64>,
    pub lambda1_extrapolated: Option<Extrapolated>,
    pub pass: bool,
    pub failure: Option<(String, String)>,
}

/// A constructed pattern with its certificate.
#[derive(Debug, Clone)]
pub struct PatternResult {
    pub geometry: Arc<dyn RadialGeometry>,
    pub window: Window,
    pub constants: ProofConstants,
    pub params: PatternParams,
    pub profile: Profile,
    pub f: Arc<ConstructedNonlinearity>,
    pub w: TestFunctionValues,
    pub certificate: Certificate,
    pub k_max: usize,
}

/// Deterministic recipe for a pattern: rebuilding it reproduces `f`, `α`
/// and `Z` bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternArtifact {
    pub geometry: GeometrySpec,
    pub window: Window,
    pub params: PatternParams,
    pub k_max: usize,
}

impl PatternArtifact {
    pub fn rebuild(&self) -> Result<PatternResult> {
        let geometry = self.geometry.build()?;
        assess(geometry, &self.params.window(&self.window), &self.params, self.k_max)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl PatternResult {
    pub fn alpha(&self) -> f64 {
        self.profile.alpha
    }

    /// `Z` as a stationary solution on the construction grid.
    pub fn solution(&self) -> RadialSolution {
        solution_of(&self.geometry, &self.profile, &self.f)
    }

    pub fn artifact(&self) -> PatternArtifact {
        PatternArtifact {
            geometry: self.geometry.spec(),
            window: self.window,
            params: self.params,
            k_max: self.k_max,
        }
    }

    pub fn write_profile_csv(&self, path: &Path) -> Result<()> {
        let p = &self.profile;
        write_csv(path, &["r", "z", "Z"], &[&p.grid, &p.z, &p.big_z])
    }

    /// `(u, f(u), f′(u))` on [`NONLINEARITY_SAMPLES`] points covering the
    /// range of `Z` with 20% margins.
    pub fn write_nonlinearity_csv(&self, path: &Path) -> Result<()> {
        let (u, f, fp) = self.nonlinearity_table();
        write_csv(path, &["u", "f", "f_prime"], &[&u, &f, &fp])
    }

    pub fn nonlinearity_table(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let z = &self.profile.big_z;
        let lo = z.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.2 * (hi - lo);
        let (a, b) = (lo - pad, hi + pad);
        let m = NONLINEARITY_SAMPLES;
        let u: Vec<f64> = (0..m).map(|k| a + (b - a) * k as f64 / (m - 1) as f64).collect();
        let f = u.iter().map(|&x| self.f.f(x)).collect();
        let fp = u.iter().map(|&x| self.f.f_prime(x)).collect();
        (u, f, fp)
    }

    pub fn certificate_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            geometry: GeometrySpec,
            window: &'a Window,
            constants: &'a ProofConstants,
            params: &'a PatternParams,
            certificate: &'a Certificate,
        }
        Ok(serde_json::to_string_pretty(&Doc {
            geometry: self.geometry.spec(),
            window: &self.window,
            constants: &self.constants,
            params: &self.params,
            certificate: &self.certificate,
        })?)
    }
}

fn solution_of(geometry: &Arc<dyn RadialGeometry>, profile: &Profile, f: &Arc<ConstructedNonlinearity>) -> RadialSolution {
    let (_, outer) = profile.robin_residuals();
    let nonlinearity: Arc<dyn Nonlinearity> = f.clone();
    RadialSolution {
        grid: profile.grid.clone(),
        v: profile.big_z.clone(),
        v_prime: profile.z.clone(),
        alpha: profile.alpha,
        geometry: geometry.clone(),
        nonlinearity,
        c: 0.0,
        residual: outer,
        family: false,
    }
}

/// Builds the profile for fixed parameters.
pub fn build_profile(geometry: &dyn RadialGeometry, params: &PatternParams) -> Result<Profile> {
    let left = solve_z1(geometry, params.b, params.r1, params.n)?;
    let right = solve_z2(geometry, params.b, params.beta, params.r2, params.n)?;
    let q = bridge(geometry, params.b, &left.end, &right.end)?;
    assemble(geometry, params.b, params.beta, left, right, q, params.n)
}

/// Builds and checks one candidate. Hard failures (branch monotonicity,
/// bridge positivity, overflow) are errors; failed inequalities are
/// recorded in the certificate.
pub fn assess(geometry: Arc<dyn RadialGeometry>, window: &Window, params: &PatternParams, k_max: usize) -> Result<PatternResult> {
    let g = geometry.as_ref();
    if params.l % 2 == 0 {
        return Err(Error::InvalidArgument(format!("l must be odd, got {}", params.l)));
    }
    if !(params.m1 >= 0.0 && params.m2 >= 0.0) {
        return Err(Error::InvalidArgument("m1 and m2 must be nonnegative".into()));
    }
    window.validate(g)?;
    let constants = ProofConstants::compute(g, window);
    let profile = build_profile(g, params)?;
    let f = Arc::new(ConstructedNonlinearity::new(geometry.clone(), params.b, params.beta, &profile)?);
    let w = build_w(&profile, window, params.m1, params.m2, params.l);
    let glue = gluing(g, &profile, &f);
    let claim = verify_claim(g, &profile, f.as_ref(), &w);
    let (robin_inner, robin_outer) = profile.robin_residuals();
    let robin_tol = 1e-10 * (1.0 + params.beta);
    let mut failure = if !glue.pass {
        Some((
            "gluing".to_string(),
            format!(
                "f(Z) vs -(z' + D z): {:.3e} (scale {:.3e}); slope jumps {:.3e}, {:.3e}",
                glue.max_residual, glue.scale, glue.slope_jump_inner, glue.slope_jump_outer
            ),
        ))
    } else if robin_inner.abs() > robin_tol || robin_outer.abs() > robin_tol {
        Some(("robin".to_string(), format!("Robin residuals {robin_inner:.3e}, {robin_outer:.3e}")))
    } else {
        claim.failure.clone()
    };
    let mut certificate = Certificate {
        alpha: profile.alpha,
        z_total: profile.total,
        robin_inner,
        robin_outer,
        min_bridge: profile.bridge.min_on_interval(2048),
        gluing: glue,
        claim,
        barta: None,
        mode_lambdas: None,
        lambda1: None,
        lambda1_extrapolated: None,
        pass: false,
        failure: None,
    };
    if failure.is_none() {
        let solution = solution_of(&geometry, &profile, &f);
        let test = TestFunction {
            w: &w.w,
            w_prime: Some(&w.w_prime),
            w_second: Some(&w.w_second),
        };
        let barta = barta_certificate(&solution, &test, INTERIOR_MARGIN * certificate.claim.scale)?;
        let scan = lambda1_full(&solution, k_max.max(1), params.n)?;
        let lambda1 = scan.lambdas[scan.argmin];
        let extrapolated = extrapolated_lambda1(&solution, params.n)?;
        if !barta.pass {
            failure = Some(("barta".to_string(), format!("interior max {:.6e}", barta.interior_max)));
        } else if !(lambda1 >= LAMBDA_FLOOR) {
            failure = Some(("lambda1".to_string(), format!("lambda1 = {lambda1:.6e}")));
        }
        certificate.barta = Some(barta);
        certificate.mode_lambdas = Some(scan.lambdas);
        certificate.lambda1 = Some(lambda1);
        certificate.lambda1_extrapolated = Some(extrapolated);
    }
    certificate.pass = failure.is_none();
    certificate.failure = failure;
    Ok(PatternResult {
        geometry,
        window: *window,
        constants,
        params: *params,
        profile,
        f,
        w,
        certificate,
        k_max,
    })
}

/// Searches `l = 1, 3, …` and, for each `l`, `B = 2B̄, 4B̄, …` until a
/// candidate passes every check.
pub fn construct_pattern(geometry: Arc<dyn RadialGeometry>, opts: &PatternOptions) -> Result<PatternResult> {
    let g = geometry.as_ref();
    let (lo, hi) = g.interval();
    let window = match opts.window {
        Some(w) => w,
        None => locate_window(g)?,
    };
    window.validate(g)?;
    let constants = ProofConstants::compute(g, &window);
    info!(
        "window R0..R3 = [{:.6}, {:.6}, {:.6}, {:.6}], C = {:.4}, Bbar = {:.4}",
        window.r0, window.r1, window.r2, window.r3, constants.c, constants.b_bar
    );
    let ls: Vec<u32> = match opts.l {
        Some(l) => vec![l],
        None => (1..=L_CAP).step_by(2).collect(),
    };
    let b_start = opts.b.unwrap_or((2.0 * constants.b_bar).max(1e-3));
    let mut last: Option<(String, String)> = None;
    for &l in &ls {
        let m1 = opts
            .m1
            .unwrap_or_else(|| constants.m_bound(l, window.r1 - lo, constants.b_low_left, M_FRACTION));
        let m2 = opts
            .m2
            .unwrap_or_else(|| constants.m_bound(l, hi - window.r2, constants.b_low_right, M_FRACTION));
        let mut b = b_start;
        loop {
            let params = PatternParams {
                r0: window.r0,
                r1: window.r1,
                r2: window.r2,
                r3: window.r3,
                beta: opts.beta,
                b,
                m1,
                m2,
                l,
                n: opts.n,
            };
            match assess(geometry.clone(), &window, &params, opts.k_max) {
                Ok(result) if result.certificate.pass => {
                    info!("pattern found: l = {l}, B = {b}, alpha = {:.6e}", result.alpha());
                    return Ok(result);
                }
                Ok(result) => {
                    debug!("l = {l}, B = {b}: {:?}", result.certificate.failure);
                    last = result.certificate.failure;
                }
                Err(Error::Construction { inequality, detail }) => {
                    debug!("l = {l}, B = {b}: {inequality}: {detail}");
                    let overflow = inequality == "overflow";
                    last = Some((inequality, detail));
                    if overflow {
                        break;
                    }
                }
                Err(e) => return Err(e),
            }
            if opts.b.is_some() {
                break;
            }
            b *= 2.0;
            if b > B_CAP {
                break;
            }
        }
    }
    let (inequality, detail) = last.unwrap_or_else(|| ("search".into(), "no candidate evaluated".into()));
    Err(Error::Construction { inequality, detail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Params;

    fn catenoid(hi: f64) -> Arc<dyn RadialGeometry> {
        GeometrySpec::Revolution {
            profile: "catenoid".into(),
            params: Params::from([("c".to_string(), 1.0)]),
            interval: [0.0, hi],
        }
        .build()
        .unwrap()
    }

    fn quick() -> PatternOptions {
        PatternOptions {
            n: 1200,
            k_max: 2,
            ..Default::default()
        }
    }

    #[test]
    fn catenoid_pattern_is_certified() {
        let r = construct_pattern(catenoid(1.8), &quick()).unwrap();
        let c = &r.certificate;
        assert!(c.pass, "{:?}", c.failure);
        assert!(c.alpha < 0.0);
        assert!(c.claim.boundary_sum.value < 0.0);
        assert!(c.lambda1.unwrap() > 0.0);
        assert!(c.barta.as_ref().unwrap().pass);
        assert_eq!(r.params.l, 1);
        // z(lo) = 0, z(hi) = β, Z increasing from 0
        let p = &r.profile;
        assert_eq!(p.z[0], 0.0);
        assert_eq!(p.z[p.n()], r.params.beta);
        assert!(p.big_z.windows(2).all(|w| w[1] > w[0]));
        assert!(c.robin_outer.abs() < 1e-10);
    }

    #[test]
    fn removing_the_left_correction_breaks_the_inner_inequality() {
        let opts = PatternOptions {
            m1: Some(0.0),
            l: Some(1),
            b: Some(128.0),
            ..quick()
        };
        match construct_pattern(catenoid(1.8), &opts) {
            Err(Error::Construction { inequality, .. }) => assert_eq!(inequality, "inner-boundary"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constructed_f_is_continuous_across_joints() {
        let r = construct_pattern(catenoid(1.8), &quick()).unwrap();
        let f = r.f.as_ref();
        let (u1, u2) = f.joints();
        for u in [u1, u2] {
            let d = 1e-9 * (1.0 + u.abs());
            assert!((f.f(u - d) - f.f(u + d)).abs() < 1e-6 * (1.0 + f.f(u).abs()));
            assert!((f.f_prime(u - d) - f.f_prime(u + d)).abs() < 1e-6 * (1.0 + f.b()));
        }
        assert_eq!(f.f(0.0), -1.0);
        let (u, fu, _) = r.nonlinearity_table();
        assert_eq!(u.len(), NONLINEARITY_SAMPLES);
        assert!(fu.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn antiderivative_matches_quadrature() {
        let r = construct_pattern(catenoid(1.8), &quick()).unwrap();
        let f = r.f.as_ref();
        let top = r.profile.total;
        for u in [0.3 * top, 0.5 * top, 1.1 * top] {
            let q = crate::quadrature::adaptive_simpson(|x| f.f(x), 0.0, u, 1e-9);
            let scale = 1.0 + q.abs();
            assert!((f.antiderivative(u) - q).abs() < 1e-7 * scale, "{u}: {} vs {q}", f.antiderivative(u));
        }
    }

    #[test]
    fn artifact_round_trip_is_exact() {
        let r = construct_pattern(catenoid(1.8), &quick()).unwrap();
        let text = serde_json::to_string(&r.artifact()).unwrap();
        let back = PatternArtifact::from_json(&text).unwrap().rebuild().unwrap();
        assert_eq!(back.profile.big_z, r.profile.big_z);
        assert_eq!(back.alpha(), r.alpha());
        assert_eq!(back.certificate.lambda1, r.certificate.lambda1);
    }

    #[test]
    fn alpha_shrinks_as_b_grows() {
        let g = catenoid(1.8);
        let window = locate_window(g.as_ref()).unwrap();
        let alphas: Vec<f64> = [16.0, 64.0, 256.0]
            .iter()
            .map(|&b| {
                let params = PatternParams {
                    r0: window.r0,
                    r1: window.r1,
                    r2: window.r2,
                    r3: window.r3,
                    beta: 1.0,
                    b,
                    m1: 0.05,
                    m2: 0.05,
                    l: 1,
                    n: 800,
                };
                build_profile(g.as_ref(), &params).unwrap().alpha
            })
            .collect();
        assert!(alphas.iter().all(|&a| a < 0.0));
        assert!(alphas.windows(2).all(|w| w[1].abs() < w[0].abs()));
    }
}
