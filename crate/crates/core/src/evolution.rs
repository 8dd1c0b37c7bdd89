//! Explicit time integration of `u_t = Δu + f(u)` with Robin conditions,
//! radially and on the `(r, θ)` grid of a surface, and exponential-rate
//! classification of the distance to an equilibrium.
//!
//! The radial operator is the same vertex-centred finite-volume stencil
//! the eigensolver uses, so the linearisation of the semi-discrete flow at
//! a discrete equilibrium has exactly the discrete spectrum computed by
//! [`crate::spectrum`].

use std::path::Path;
use std::sync::Arc;

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::RadialGeometry;
use crate::io::write_csv;
use crate::nonlinearity::Nonlinearity;
use crate::registry::Registry;
use crate::spectrum::{discretize_with, smallest_eigenvalue, EigenResult};
use crate::tridiag::SymTridiagonal;

/// Fraction of the stability bound used by default.
pub const SAFETY: f64 = 0.4;
pub const TRANSIENT_FRACTION: f64 = 0.2;
pub const MIN_FIT_SAMPLES: usize = 10;
pub const DEFAULT_RATE_TOL: f64 = 1e-4;
pub const DEFAULT_BLOWUP: f64 = 1e8;
pub const DEFAULT_SAMPLES: usize = 200;

/// One explicit step of `u′ = F(u)`.
pub trait Stepper: Send + Sync {
    fn name(&self) -> &'static str;
    fn step(&self, rhs: &dyn Fn(&[f64], &mut [f64]), u: &mut [f64], dt: f64);
}

pub struct ForwardEuler;

impl Stepper for ForwardEuler {
    fn name(&self) -> &'static str {
        "euler"
    }
    fn step(&self, rhs: &dyn Fn(&[f64], &mut [f64]), u: &mut [f64], dt: f64) {
        let mut k = vec![0.0; u.len()];
        rhs(u, &mut k);
        u.iter_mut().zip(&k).for_each(|(x, d)| *x += dt * d);
    }
}

/// Classical fourth-order Runge–Kutta.
pub struct RungeKutta4;

impl Stepper for RungeKutta4 {
    fn name(&self) -> &'static str {
        "rk4"
    }
    fn step(&self, rhs: &dyn Fn(&[f64], &mut [f64]), u: &mut [f64], dt: f64) {
        let m = u.len();
        let mut k1 = vec![0.0; m];
        let mut k2 = vec![0.0; m];
        let mut k3 = vec![0.0; m];
        let mut k4 = vec![0.0; m];
        let mut tmp = vec![0.0; m];
        rhs(u, &mut k1);
        for i in 0..m {
            tmp[i] = u[i] + 0.5 * dt * k1[i];
        }
        rhs(&tmp, &mut k2);
        for i in 0..m {
            tmp[i] = u[i] + 0.5 * dt * k2[i];
        }
        rhs(&tmp, &mut k3);
        for i in 0..m {
            tmp[i] = u[i] + dt * k3[i];
        }
        rhs(&tmp, &mut k4);
        for i in 0..m {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// `euler` and `rk4`.
pub fn stepper_registry() -> Registry<Arc<dyn Stepper>> {
    let mut reg: Registry<Arc<dyn Stepper>> = Registry::new("stepper");
    reg.register("euler", |_| Ok(Arc::new(ForwardEuler)))
        .register("rk4", |_| Ok(Arc::new(RungeKutta4)));
    reg
}

/// Semi-discrete radial Laplacian with Robin conditions, divided by the
/// lumped mass.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    pub grid: Vec<f64>,
    pub h: f64,
    /// Lumped `L²(dμ)` weights.
    pub w: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
    robin: Vec<f64>,
    /// Stiffness matrix `A` (diagonal and off-diagonal).
    stiff_diag: Vec<f64>,
    stiff_off: Vec<f64>,
}

impl RadialOperator {
    pub fn new(geometry: &dyn RadialGeometry, alpha: f64, n: usize) -> Result<Self> {
        let p = discretize_with(geometry, alpha, 0, n, &|_, _| 0.0)?;
        let (stiff_diag, stiff_off) = p.stiffness();
        let mut left = vec![0.0; n + 1];
        let mut right = vec![0.0; n + 1];
        let mut robin = vec![0.0; n + 1];
        for i in 0..=n {
            if i > 0 {
                left[i] = p.p_mid[i - 1] / (p.h * p.w[i]);
            }
            if i < n {
                right[i] = p.p_mid[i] / (p.h * p.w[i]);
            }
        }
        robin[0] = alpha * p.p[0] / p.w[0];
        robin[n] = alpha * p.p[n] / p.w[n];
        Ok(Self {
            grid: p.grid,
            h: p.h,
            w: p.w,
            left,
            right,
            robin,
            stiff_diag,
            stiff_off,
        })
    }

    pub fn n(&self) -> usize {
        self.grid.len() - 1
    }

    /// `out = Δ_h u + f(u)`, radial part only.
    pub fn apply(&self, u: &[f64], f: &dyn Nonlinearity, out: &mut [f64]) {
        let n = self.n();
        for i in 0..=n {
            let mut s = -self.robin[i] * u[i];
            if i > 0 {
                s += self.left[i] * (u[i - 1] - u[i]);
            }
            if i < n {
                s += self.right[i] * (u[i + 1] - u[i]);
            }
            out[i] = s + f.f(u[i]);
        }
    }

    /// `sqrt(Σ w_i (u_i − v_i)²)`.
    pub fn distance(&self, u: &[f64], v: Option<&[f64]>) -> f64 {
        u.iter()
            .enumerate()
            .map(|(i, &x)| {
                let d = x - v.map_or(0.0, |v| v[i]);
                self.w[i] * d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Explicit stability bound `SAFETY · h² / 2`.
    pub fn dt_bound(&self) -> f64 {
        SAFETY * self.h * self.h / 2.0
    }
}

/// Newton iteration for the discrete equilibrium `Δ_h u + f(u) = 0`
/// starting from `guess` on the operator's grid.
pub fn discrete_equilibrium(op: &RadialOperator, f: &dyn Nonlinearity, guess: &[f64]) -> Result<Vec<f64>> {
    let n = op.n();
    if guess.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "equilibrium guess has {} values for {} nodes",
            guess.len(),
            n + 1
        )));
    }
    let mut u = guess.to_vec();
    let mut g = vec![0.0; n + 1];
    let scale = 1.0 + u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    for it in 0..50 {
        op.apply(&u, f, &mut g);
        // Multiply through by the mass so the Jacobian is symmetric.
        let rhs: Vec<f64> = g.iter().zip(&op.w).map(|(gi, wi)| -gi * wi).collect();
        let diag: Vec<f64> = (0..=n)
            .map(|i| -op.stiff_diag[i] + op.w[i] * f.f_prime(u[i]))
            .collect();
        let off: Vec<f64> = op.stiff_off.iter().map(|x| -x).collect();
        let jac = SymTridiagonal::new(diag, off)?;
        let du = jac.solve_shifted(0.0, &rhs)?;
        let step = du.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        u.iter_mut().zip(&du).for_each(|(x, d)| *x += d);
        if !step.is_finite() {
            return Err(Error::Consistency("Newton iteration for the equilibrium diverged".into()));
        }
        if step <= 1e-14 * scale {
            debug!("discrete equilibrium after {} Newton steps", it + 1);
            return Ok(u);
        }
    }
    Err(Error::Consistency("Newton iteration for the equilibrium did not converge".into()))
}

/// Principal eigenpair of the linearisation at `u_star` on the operator's
/// grid (mode `k`).
pub fn principal_direction(
    geometry: &dyn RadialGeometry,
    f: &dyn Nonlinearity,
    alpha: f64,
    u_star: &[f64],
    mode_k: usize,
) -> Result<EigenResult> {
    let n = u_star.len() - 1;
    let pot = |i: usize, _r: f64| f.f_prime(u_star[i]);
    let p = discretize_with(geometry, alpha, mode_k, n, &pot)?;
    smallest_eigenvalue(&p)
}

/// Deterministic random perturbation with `L²(dμ)` norm `eps`.
pub fn random_perturbation(op: &RadialOperator, eps: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..=op.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = op.distance(&v, None);
    v.into_iter().map(|x| eps * x / norm).collect()
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub t_final: f64,
    /// Defaults to the stability bound.
    pub dt: Option<f64>,
    pub stepper: String,
    pub samples: usize,
    pub blowup: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            dt: None,
            stepper: "euler".into(),
            samples: DEFAULT_SAMPLES,
            blowup: DEFAULT_BLOWUP,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionRun {
    pub grid: Vec<f64>,
    /// Number of angular nodes; `None` for radial runs.
    pub n_theta: Option<usize>,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    /// `‖u(t) − u*‖` in `L²(dμ)` (against zero without a reference).
    pub norms: Vec<f64>,
    pub final_state: Vec<f64>,
    /// Stopped early because `‖u‖∞` exceeded the blow-up bound.
    pub truncated: bool,
}

impl EvolutionRun {
    pub fn write_trajectory_csv(&self, path: &Path) -> Result<()> {
        write_csv(path, &["t", "norm"], &[&self.times, &self.norms])
    }

    /// Radial final state as `(r, u)`; for 2D runs the `θ = 0` column.
    pub fn write_final_csv(&self, path: &Path) -> Result<()> {
        let m = self.grid.len();
        write_csv(path, &["r", "u"], &[&self.grid, &self.final_state[..m]])
    }

    pub fn fit(&self, tol_rate: f64) -> Result<RateFit> {
        classify(&self.times, &self.norms, tol_rate)
    }
}

fn resolve_dt(opts: &EvolveOptions, bound: f64) -> Result<(f64, usize)> {
    if !(opts.t_final > 0.0) {
        return Err(Error::InvalidArgument(format!("final time must be positive, got {}", opts.t_final)));
    }
    let dt = opts.dt.unwrap_or(bound);
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    if dt > bound {
        return Err(Error::Cfl { dt, bound });
    }
    let steps = (opts.t_final / dt).ceil().max(1.0) as usize;
    Ok((opts.t_final / steps as f64, steps))
}

fn integrate(
    rhs: &dyn Fn(&[f64], &mut [f64]),
    norm: &dyn Fn(&[f64]) -> f64,
    mut u: Vec<f64>,
    dt: f64,
    steps: usize,
    opts: &EvolveOptions,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, bool)> {
    let stepper = stepper_registry().build(&opts.stepper, &Default::default())?;
    let every = (steps / opts.samples.max(1)).max(1);
    let mut times = vec![0.0];
    let mut norms = vec![norm(&u)];
    let mut truncated = false;
    for k in 1..=steps {
        stepper.step(rhs, &mut u, dt);
        let peak = u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if !(peak <= opts.blowup) {
            truncated = true;
            times.push(k as f64 * dt);
            norms.push(norm(&u));
            break;
        }
        if k % every == 0 || k == steps {
            times.push(k as f64 * dt);
            norms.push(norm(&u));
        }
    }
    Ok((u, times, norms, truncated))
}

/// Radial method of lines. `u0` lives on the uniform grid with
/// `u0.len() − 1` intervals.
pub fn evolve_radial(
    geometry: &dyn RadialGeometry,
    f: &dyn Nonlinearity,
    alpha: f64,
    u0: &[f64],
    reference: Option<&[f64]>,
    opts: &EvolveOptions,
) -> Result<EvolutionRun> {
    let n = u0.len().saturating_sub(1);
    let op = RadialOperator::new(geometry, alpha, n)?;
    if reference.is_some_and(|r| r.len() != n + 1) {
        return Err(Error::InvalidArgument("reference and initial data differ in length".into()));
    }
    let (dt, steps) = resolve_dt(opts, op.dt_bound())?;
    let rhs = |u: &[f64], out: &mut [f64]| op.apply(u, f, out);
    let norm = |u: &[f64]| op.distance(u, reference);
    let (u, times, norms, truncated) = integrate(&rhs, &norm, u0.to_vec(), dt, steps, opts)?;
    Ok(EvolutionRun {
        grid: op.grid.clone(),
        n_theta: None,
        dt,
        steps,
        times,
        norms,
        final_state: u,
        truncated,
    })
}

/// `(r, θ)` method of lines on a two-dimensional domain. `u0` is stored by
/// angular rows: `u0[j·(n+1) + i] = u(r_i, θ_j)`, `θ_j = 2πj / n_theta`.
/// The reference equilibrium is radial.
pub fn evolve_2d(
    geometry: &dyn RadialGeometry,
    f: &dyn Nonlinearity,
    alpha: f64,
    u0: &[f64],
    n: usize,
    n_theta: usize,
    reference: Option<&[f64]>,
    opts: &EvolveOptions,
) -> Result<EvolutionRun> {
    if geometry.dim() != 2 {
        return Err(Error::InvalidArgument("two-dimensional evolution needs a surface".into()));
    }
    if n_theta < 3 || u0.len() != n_theta * (n + 1) {
        return Err(Error::InvalidArgument(format!(
            "expected {} x {} values, got {}",
            n_theta,
            n + 1,
            u0.len()
        )));
    }
    if reference.is_some_and(|r| r.len() != n + 1) {
        return Err(Error::InvalidArgument("reference must be radial on the same grid".into()));
    }
    let op = RadialOperator::new(geometry, alpha, n)?;
    let ht = 2.0 * std::f64::consts::PI / n_theta as f64;
    let ang: Vec<f64> = op
        .grid
        .iter()
        .map(|&r| geometry.angular_eigenvalue(1, r) / (ht * ht))
        .collect();
    let ang_max = ang.iter().fold(0.0_f64, |m, &x| m.max(x));
    let bound = SAFETY / (2.0 / (op.h * op.h) + 2.0 * ang_max);
    let (dt, steps) = resolve_dt(opts, bound)?;
    let m = n + 1;
    let rhs = |u: &[f64], out: &mut [f64]| {
        for j in 0..n_theta {
            let row = &u[j * m..(j + 1) * m];
            op.apply(row, f, &mut out[j * m..(j + 1) * m]);
        }
        for j in 0..n_theta {
            let (jm, jp) = ((j + n_theta - 1) % n_theta, (j + 1) % n_theta);
            for i in 0..m {
                let lap = u[jp * m + i] - 2.0 * u[j * m + i] + u[jm * m + i];
                out[j * m + i] += ang[i] * lap;
            }
        }
    };
    let norm = |u: &[f64]| {
        let mut s = 0.0;
        for j in 0..n_theta {
            for i in 0..m {
                let d = u[j * m + i] - reference.map_or(0.0, |v| v[i]);
                s += op.w[i] * d * d;
            }
        }
        (s / n_theta as f64).sqrt()
    };
    let (u, times, norms, truncated) = integrate(&rhs, &norm, u0.to_vec(), dt, steps, opts)?;
    Ok(EvolutionRun {
        grid: op.grid.clone(),
        n_theta: Some(n_theta),
        dt,
        steps,
        times,
        norms,
        final_state: u,
        truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    Decay,
    Growth,
    Neutral,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateFit {
    pub trend: Trend,
    /// Slope of `log ‖u − u*‖`; `−∞` when the distance reached zero.
    pub rate: f64,
    pub samples: usize,
}

/// Least-squares slope of `log norm` after dropping the first 20% of the
/// samples.
pub fn classify(times: &[f64], norms: &[f64], tol_rate: f64) -> Result<RateFit> {
    if times.len() != norms.len() {
        return Err(Error::InvalidArgument("times and norms differ in length".into()));
    }
    let skip = (TRANSIENT_FRACTION * times.len() as f64).ceil() as usize;
    let t = &times[skip.min(times.len())..];
    let y = &norms[skip.min(norms.len())..];
    if t.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "rate fit needs {MIN_FIT_SAMPLES} samples after the transient, got {}",
            t.len()
        )));
    }
    if y.iter().any(|&v| v == 0.0) {
        return Ok(RateFit {
            trend: Trend::Decay,
            rate: f64::NEG_INFINITY,
            samples: t.len(),
        });
    }
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let k = t.len() as f64;
    let mt = t.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = t.iter().map(|x| (x - mt) * (x - mt)).sum();
    let sxy: f64 = t.iter().zip(&ly).map(|(x, v)| (x - mt) * (v - my)).sum();
    let rate = sxy / sxx;
    let trend = if rate < -tol_rate {
        Trend::Decay
    } else if rate > tol_rate {
        Trend::Growth
    } else {
        Trend::Neutral
    };
    Ok(RateFit {
        trend,
        rate,
        samples: t.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometrySpec;
    use crate::nonlinearity::{Cubic, Zero};
    use crate::registry::Params;

    fn cylinder(a: f64) -> Arc<dyn RadialGeometry> {
        GeometrySpec::Revolution {
            profile: "cylinder".into(),
            params: Params::new(),
            interval: [0.0, a],
        }
        .build()
        .unwrap()
    }

    #[test]
    fn synthetic_exponential_rate() {
        let t: Vec<f64> = (0..100).map(|k| 0.05 * k as f64).collect();
        let y: Vec<f64> = t.iter().map(|x| (-2.0 * x).exp()).collect();
        let fit = classify(&t, &y, DEFAULT_RATE_TOL).unwrap();
        assert_eq!(fit.trend, Trend::Decay);
        assert!((fit.rate + 2.0).abs() < 1e-3);
        let flat = vec![0.3; 100];
        assert_eq!(classify(&t, &flat, DEFAULT_RATE_TOL).unwrap().trend, Trend::Neutral);
        assert!(classify(&t[..5], &flat[..5], DEFAULT_RATE_TOL).is_err());
    }

    #[test]
    fn constants_are_preserved() {
        let g = cylinder(1.0);
        let u0 = vec![0.7; 41];
        let run = evolve_radial(g.as_ref(), &Zero, 0.0, &u0, Some(&u0), &EvolveOptions::default()).unwrap();
        assert!(run.final_state.iter().all(|&x| x == 0.7));
        assert!(run.norms.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn neumann_cosine_decays_at_the_spectral_gap() {
        let a = 1.0;
        let n = 100;
        let g = cylinder(a);
        let op = RadialOperator::new(g.as_ref(), 0.0, n).unwrap();
        let c = 0.5;
        let u0: Vec<f64> = op
            .grid
            .iter()
            .map(|&r| c + 1e-3 * (std::f64::consts::PI * r / a).cos())
            .collect();
        let reference = vec![c; n + 1];
        let opts = EvolveOptions {
            t_final: 0.3,
            stepper: "rk4".into(),
            ..Default::default()
        };
        let run = evolve_radial(g.as_ref(), &Zero, 0.0, &u0, Some(&reference), &opts).unwrap();
        let fit = run.fit(DEFAULT_RATE_TOL).unwrap();
        let exact = -(std::f64::consts::PI / a).powi(2);
        assert!((fit.rate - exact).abs() < 1e-3 * exact.abs(), "{} vs {exact}", fit.rate);
    }

    #[test]
    fn oversized_steps_are_rejected() {
        let g = cylinder(1.0);
        let opts = EvolveOptions {
            dt: Some(1.0),
            ..Default::default()
        };
        let e = evolve_radial(g.as_ref(), &Zero, 0.0, &[0.0; 33], None, &opts).unwrap_err();
        assert!(matches!(e, Error::Cfl { .. }));
    }

    #[test]
    fn newton_reaches_the_discrete_equilibrium() {
        // u − u³ has the constant equilibrium 1 under Neumann conditions.
        let g = cylinder(2.0);
        let op = RadialOperator::new(g.as_ref(), 0.0, 64).unwrap();
        let f = Cubic { c0: 0.0, c1: 1.0, c3: -1.0 };
        let guess: Vec<f64> = op.grid.iter().map(|r| 1.0 + 0.05 * r.sin()).collect();
        let u = discrete_equilibrium(&op, &f, &guess).unwrap();
        assert!(u.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn angular_term_keeps_radial_data_radial() {
        let g = cylinder(2.0);
        let f = Cubic { c0: 0.0, c1: -2.0, c3: 1.0 };
        let n = 40;
        let nt = 8;
        let radial: Vec<f64> = (0..=n).map(|i| 1.0 + 0.1 * (i as f64 * 0.2).cos()).collect();
        let u0: Vec<f64> = (0..nt).flat_map(|_| radial.iter().copied()).collect();
        let opts = EvolveOptions {
            t_final: 0.01,
            dt: Some(1e-5),
            ..Default::default()
        };
        let r1 = evolve_radial(g.as_ref(), &f, 0.5, &radial, None, &opts).unwrap();
        let r2 = evolve_2d(g.as_ref(), &f, 0.5, &u0, n, nt, None, &opts).unwrap();
        for j in 0..nt {
            assert_eq!(&r2.final_state[j * (n + 1)..(j + 1) * (n + 1)], &r1.final_state[..]);
        }
    }

    #[test]
    fn random_perturbations_are_reproducible() {
        let g = cylinder(1.0);
        let op = RadialOperator::new(g.as_ref(), 0.0, 50).unwrap();
        let a = random_perturbation(&op, 1e-3, 7);
        assert_eq!(a, random_perturbation(&op, 1e-3, 7));
        assert_ne!(a, random_perturbation(&op, 1e-3, 8));
        assert!((op.distance(&a, None) - 1e-3).abs() < 1e-15);
    }
}
