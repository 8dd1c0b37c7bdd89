//! Principal eigenvalue of the linearised Robin problem
//! `Δφ + f′(u)φ + λφ = 0`, `∂φ/∂ν + αφ = 0`, restricted to Fourier mode `k`.
//!
//! The radial operator `(ρ g′)′/ρ` (ρ the level area) is discretised by
//! vertex-centred finite volumes with half cells at both ends, where the
//! Robin flux `αρg` closes the boundary cells. The result is a symmetric
//! pencil `A g = λ W g` with `W` the trapezoid mass of `dμ = ρ dr`, so the
//! discrete Rayleigh quotient is exactly the matrix quadratic form.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{uniform_grid, RadialGeometry};
use crate::io::write_csv;
use crate::nonlinearity::Nonlinearity;
use crate::stationary::RadialSolution;
use crate::tridiag::SymTridiagonal;

pub const MIN_EIGEN_NODES: usize = 32;
pub const DEFAULT_EIGEN_N: usize = 2048;
pub const DEFAULT_K_MAX: usize = 4;

/// Discrete Sturm–Liouville pencil on a uniform grid.
#[derive(Debug, Clone)]
pub struct SturmLiouvilleProblem {
    pub grid: Vec<f64>,
    pub h: f64,
    /// Level area at the nodes.
    pub p: Vec<f64>,
    /// Level area at the cell midpoints.
    pub p_mid: Vec<f64>,
    /// Mass weights, trapezoid rule for `ρ dr`.
    pub w: Vec<f64>,
    /// Pointwise potential `f′(v) − angular eigenvalue`.
    pub q: Vec<f64>,
    pub alpha: f64,
    pub mode_k: usize,
}

impl SturmLiouvilleProblem {
    pub fn n(&self) -> usize {
        self.grid.len() - 1
    }

    /// Stiffness matrix `A` (diagonal, off-diagonal).
    pub fn stiffness(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let h = self.h;
        let mut diag = vec![0.0; n + 1];
        let mut off = vec![0.0; n];
        for i in 0..n {
            let c = self.p_mid[i] / h;
            diag[i] += c;
            diag[i + 1] += c;
            off[i] = -c;
        }
        diag[0] += self.alpha * self.p[0];
        diag[n] += self.alpha * self.p[n];
        for i in 0..=n {
            diag[i] -= self.w[i] * self.q[i];
        }
        (diag, off)
    }

    /// `W^{-1/2} A W^{-1/2}`.
    pub fn matrix(&self) -> Result<SymTridiagonal> {
        let (diag, off) = self.stiffness();
        let s: Vec<f64> = self.w.iter().map(|w| w.sqrt()).collect();
        let d = diag.iter().zip(&s).map(|(a, si)| a / (si * si)).collect();
        let e = off
            .iter()
            .enumerate()
            .map(|(i, a)| a / (s[i] * s[i + 1]))
            .collect();
        SymTridiagonal::new(d, e)
    }

    /// Discrete quadratic form `gᵀAg`, evaluated in difference form.
    pub fn quadratic_form(&self, g: &[f64]) -> f64 {
        let n = self.n();
        let mut s = 0.0;
        for i in 0..n {
            let d = g[i + 1] - g[i];
            s += self.p_mid[i] * d * d / self.h;
        }
        s += self.alpha * (self.p[0] * g[0] * g[0] + self.p[n] * g[n] * g[n]);
        for i in 0..=n {
            s -= self.w[i] * self.q[i] * g[i] * g[i];
        }
        s
    }

    pub fn mass(&self, g: &[f64]) -> f64 {
        self.w.iter().zip(g).map(|(w, x)| w * x * x).sum()
    }

    pub fn rayleigh(&self, g: &[f64]) -> Result<f64> {
        let m = self.mass(g);
        if !(m > 0.0) {
            return Err(Error::InvalidArgument("Rayleigh quotient of the zero function".into()));
        }
        Ok(self.quadratic_form(g) / m)
    }
}

/// Assembles the pencil for an arbitrary potential `r ↦ V(r)` (in place of
/// `f′(u(r))`).
pub fn discretize_with(
    geometry: &dyn RadialGeometry,
    alpha: f64,
    mode_k: usize,
    n: usize,
    potential: &(dyn Fn(usize, f64) -> f64 + Sync),
) -> Result<SturmLiouvilleProblem> {
    if n < MIN_EIGEN_NODES {
        return Err(Error::InvalidArgument(format!(
            "eigenproblem needs n >= {MIN_EIGEN_NODES}, got {n}"
        )));
    }
    let (lo, hi) = geometry.interval();
    let grid = uniform_grid(lo, hi, n);
    let h = (hi - lo) / n as f64;
    let p: Vec<f64> = grid.iter().map(|&r| geometry.level_area(r)).collect();
    let p_mid: Vec<f64> = grid
        .windows(2)
        .map(|w| geometry.level_area(0.5 * (w[0] + w[1])))
        .collect();
    if p.iter().chain(&p_mid).any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidGeometry("level area must be positive on the closed interval".into()));
    }
    let w: Vec<f64> = p
        .iter()
        .enumerate()
        .map(|(i, &pi)| if i == 0 || i == n { 0.5 * h * pi } else { h * pi })
        .collect();
    let q: Vec<f64> = grid
        .iter()
        .enumerate()
        .map(|(i, &r)| potential(i, r) - geometry.angular_eigenvalue(mode_k, r))
        .collect();
    if q.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite potential".into()));
    }
    Ok(SturmLiouvilleProblem {
        grid,
        h,
        p,
        p_mid,
        w,
        q,
        alpha,
        mode_k,
    })
}

/// Pencil linearised at a stationary solution. On the solution's own grid
/// `f′(v_i)` is used directly; otherwise `v` is resampled.
pub fn discretize(solution: &RadialSolution, mode_k: usize, n: usize) -> Result<SturmLiouvilleProblem> {
    let f = solution.nonlinearity.clone();
    let same_grid = n == solution.n();
    let pot = move |i: usize, r: f64| {
        if same_grid {
            f.f_prime(solution.v[i])
        } else {
            f.f_prime(solution.sample(r).0)
        }
    };
    discretize_with(solution.geometry.as_ref(), solution.alpha, mode_k, n, &pot)
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenResult {
    pub lambda1: f64,
    /// Normalised to unit discrete `L²(dμ)` norm; positive at the inner end
    /// for `k = 0`.
    pub eigenfunction: Vec<f64>,
    pub grid: Vec<f64>,
    pub mode_k: usize,
    pub n: usize,
    /// Relative residual of the symmetric eigen-system.
    pub residual: f64,
}

impl EigenResult {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_csv(path, &["r", "phi"], &[&self.grid, &self.eigenfunction])
    }
}

/// Smallest eigenvalue of the pencil with its eigenfunction.
pub fn smallest_eigenvalue(problem: &SturmLiouvilleProblem) -> Result<EigenResult> {
    let t = problem.matrix()?;
    let guess = t.lowest_eigenvalue(0.0)?;
    let mut y = t.inverse_iteration(guess, 3)?;
    let mut lambda = rayleigh_sym(&t, &y);
    let mut residual = t.relative_residual(lambda, &y);
    let mut extra = 0;
    while residual >= 1e-10 && extra < 5 {
        y = t.inverse_iteration(lambda, 2)?;
        lambda = rayleigh_sym(&t, &y);
        residual = t.relative_residual(lambda, &y);
        extra += 1;
    }
    if residual >= 1e-10 {
        return Err(Error::Convergence {
            lo: guess,
            hi: lambda,
            iterations: 3 + 2 * extra,
        });
    }
    let mut g: Vec<f64> = y
        .iter()
        .zip(&problem.w)
        .map(|(yi, wi)| yi / wi.sqrt())
        .collect();
    let norm = problem.mass(&g).sqrt();
    let sign = if g[0] != 0.0 { g[0].signum() } else { g.iter().sum::<f64>().signum() };
    g.iter_mut().for_each(|x| *x *= sign / norm);
    let lambda1 = problem.rayleigh(&g)?;
    if problem.mode_k == 0 {
        let peak = g.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if g.iter().any(|&x| x < -1e-10 * peak) {
            return Err(Error::Consistency("principal eigenfunction changes sign".into()));
        }
    }
    Ok(EigenResult {
        lambda1,
        eigenfunction: g,
        grid: problem.grid.clone(),
        mode_k: problem.mode_k,
        n: problem.n(),
        residual,
    })
}

fn rayleigh_sym(t: &SymTridiagonal, y: &[f64]) -> f64 {
    let ty = t.mul(y);
    let num: f64 = ty.iter().zip(y).map(|(a, b)| a * b).sum();
    let den: f64 = y.iter().map(|b| b * b).sum();
    num / den
}

/// `(4 λ(2n) − λ(n)) / 3`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Extrapolated {
    pub n: usize,
    pub coarse: f64,
    pub fine: f64,
    pub value: f64,
}

/// λ₁ of mode `k` at `n` and `2n` with Richardson extrapolation.
pub fn extrapolate_with(
    geometry: &dyn RadialGeometry,
    alpha: f64,
    mode_k: usize,
    n: usize,
    potential: &(dyn Fn(usize, f64) -> f64 + Sync),
) -> Result<Extrapolated> {
    let (a, b) = rayon::join(
        || discretize_with(geometry, alpha, mode_k, n, potential).and_then(|p| smallest_eigenvalue(&p)),
        || discretize_with(geometry, alpha, mode_k, 2 * n, potential).and_then(|p| smallest_eigenvalue(&p)),
    );
    let (coarse, fine) = (a?.lambda1, b?.lambda1);
    Ok(Extrapolated {
        n,
        coarse,
        fine,
        value: richardson(coarse, fine),
    })
}

/// Extrapolated λ₁ (mode 0) of the problem linearised at `solution`.
pub fn extrapolated_lambda1(solution: &RadialSolution, n: usize) -> Result<Extrapolated> {
    let f = solution.nonlinearity.clone();
    let pot = move |_: usize, r: f64| f.f_prime(solution.sample(r).0);
    extrapolate_with(solution.geometry.as_ref(), solution.alpha, 0, n, &pot)
}

/// λ₁ per Fourier mode `0..=k_max`.
#[derive(Debug, Clone, Serialize)]
pub struct ModeScan {
    pub lambdas: Vec<f64>,
    pub argmin: usize,
    pub principal: EigenResult,
}

/// Principal eigenvalue over the modes `k = 0..=k_max`, checking that
/// λ₁(k) is nondecreasing in `k`.
pub fn lambda1_full(solution: &RadialSolution, k_max: usize, n: usize) -> Result<ModeScan> {
    if k_max < 1 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let results: Vec<Result<EigenResult>> = (0..=k_max)
        .into_par_iter()
        .map(|k| discretize(solution, k, n).and_then(|p| smallest_eigenvalue(&p)))
        .collect();
    let results: Vec<EigenResult> = results.into_iter().collect::<Result<_>>()?;
    let lambdas: Vec<f64> = results.iter().map(|r| r.lambda1).collect();
    for k in 1..lambdas.len() {
        if lambdas[k] < lambdas[k - 1] - 1e-9 * (1.0 + lambdas[k - 1].abs()) {
            return Err(Error::Consistency(format!(
                "lambda1 decreases from mode {} ({:.12e}) to mode {} ({:.12e})",
                k - 1,
                lambdas[k - 1],
                k,
                lambdas[k]
            )));
        }
    }
    let argmin = (0..lambdas.len())
        .min_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]))
        .unwrap_or(0);
    let principal = results.into_iter().nth(argmin).expect("argmin in range");
    Ok(ModeScan {
        lambdas,
        argmin,
        principal,
    })
}

/// Λ₁ of the linear Robin problem (`f′ ≡ 0`, mode 0) on an `n`-interval grid.
pub fn linear_lambda(geometry: &dyn RadialGeometry, alpha: f64, n: usize) -> Result<f64> {
    let p = discretize_with(geometry, alpha, 0, n, &|_, _| 0.0)?;
    Ok(smallest_eigenvalue(&p)?.lambda1)
}

/// Extrapolated Λ₁.
pub fn linear_lambda_extrapolated(geometry: &dyn RadialGeometry, alpha: f64, n: usize) -> Result<Extrapolated> {
    extrapolate_with(geometry, alpha, 0, n, &|_, _| 0.0)
}

/// Rayleigh quotient of a radial test function given on a uniform grid of
/// the geometry's interval. Without a solution the potential is zero.
pub fn rayleigh_quotient(
    geometry: &dyn RadialGeometry,
    test_fn: &[f64],
    solution: Option<&RadialSolution>,
    alpha: f64,
) -> Result<f64> {
    if test_fn.len() < 2 {
        return Err(Error::InvalidArgument("test function needs at least two nodes".into()));
    }
    let n = test_fn.len() - 1;
    let pot = |i: usize, r: f64| match solution {
        Some(s) if s.n() == n => s.nonlinearity.f_prime(s.v[i]),
        Some(s) => s.nonlinearity.f_prime(s.sample(r).0),
        None => 0.0,
    };
    let problem = discretize_with(geometry, alpha, 0, n.max(MIN_EIGEN_NODES), &pot);
    let problem = match problem {
        Ok(p) if p.n() == n => p,
        Ok(_) | Err(_) => {
            return Err(Error::InvalidArgument(format!(
                "test function needs at least {} nodes",
                MIN_EIGEN_NODES + 1
            )))
        }
    };
    problem.rayleigh(test_fn)
}

/// `E(u) = ∫|∇u|² dμ + α∮u² − 2∫F(u) dμ` for radial `u` on a uniform grid.
/// With `du` the gradient term uses the trapezoid rule on `(u′)²`,
/// otherwise forward differences.
pub fn energy(
    geometry: &dyn RadialGeometry,
    u: &[f64],
    du: Option<&[f64]>,
    f: &dyn Nonlinearity,
    alpha: f64,
) -> Result<f64> {
    if u.len() < 2 {
        return Err(Error::InvalidArgument("energy needs at least two nodes".into()));
    }
    let n = u.len() - 1;
    let (lo, hi) = geometry.interval();
    let grid = uniform_grid(lo, hi, n);
    let h = (hi - lo) / n as f64;
    let p: Vec<f64> = grid.iter().map(|&r| geometry.level_area(r)).collect();
    let w = |i: usize| if i == 0 || i == n { 0.5 * h * p[i] } else { h * p[i] };
    let grad = match du {
        Some(d) => (0..=n).map(|i| w(i) * d[i] * d[i]).sum::<f64>(),
        None => (0..n)
            .map(|i| {
                let pm = geometry.level_area(0.5 * (grid[i] + grid[i + 1]));
                let d = u[i + 1] - u[i];
                pm * d * d / h
            })
            .sum(),
    };
    let boundary = alpha * (p[0] * u[0] * u[0] + p[n] * u[n] * u[n]);
    let potential: f64 = (0..=n).map(|i| w(i) * f.antiderivative(u[i])).sum();
    Ok(grad + boundary - 2.0 * potential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Constant, ProfileSurface, Sine};
    use crate::nonlinearity::{Linear, Zero};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn cylinder(a: f64) -> ProfileSurface {
        ProfileSurface::new("cylinder", Arc::new(Constant { c: 1.0 }), 0.0, a).unwrap()
    }

    #[test]
    fn neumann_ground_state_is_constant() {
        let g = cylinder(1.0);
        let p = discretize_with(&g, 0.0, 0, 64, &|_, _| 0.0).unwrap();
        let e = smallest_eigenvalue(&p).unwrap();
        assert!(e.lambda1.abs() < 1e-12);
        let first = e.eigenfunction[0];
        assert!(e.eigenfunction.iter().all(|x| (x - first).abs() < 1e-10));
        assert!((p.mass(&e.eigenfunction) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mode_shift_on_cylinder() {
        let g = cylinder(1.0);
        let p0 = discretize_with(&g, 0.0, 0, 64, &|_, _| 0.0).unwrap();
        let p2 = discretize_with(&g, 0.0, 2, 64, &|_, _| 0.0).unwrap();
        for i in 0..=64 {
            assert_eq!(p0.q[i] - p2.q[i], 4.0);
        }
    }

    #[test]
    fn sphere_stencil_rows() {
        let g = ProfileSurface::new("sphere", Arc::new(Sine), PI / 4.0, PI / 2.0).unwrap();
        let n = 40;
        let alpha = 0.7;
        let p = discretize_with(&g, alpha, 1, n, &|_, r| r * r).unwrap();
        let (d, e) = p.stiffness();
        let h = (PI / 4.0) / n as f64;
        let area = |r: f64| 2.0 * PI * r.sin();
        for &i in &[0usize, 17, n] {
            let r = PI / 4.0 + i as f64 * h;
            let q = r * r - 1.0 / (r.sin() * r.sin());
            let mut expect = 0.0;
            let mut mass = h * area(r);
            if i > 0 {
                expect += area(r - 0.5 * h) / h;
            } else {
                expect += alpha * area(r);
                mass *= 0.5;
            }
            if i < n {
                expect += area(r + 0.5 * h) / h;
            } else {
                expect += alpha * area(r);
                mass *= 0.5;
            }
            expect -= mass * q;
            assert!((d[i] - expect).abs() < 1e-10 * expect.abs().max(1.0), "row {i}");
            if i < n {
                assert!((e[i] + area(r + 0.5 * h) / h).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mode_one_gap_on_cylinder() {
        let g: Arc<dyn RadialGeometry> = Arc::new(cylinder(1.0));
        let f: Arc<dyn Nonlinearity> = Arc::new(Zero);
        let path = crate::stationary::shoot(g.as_ref(), f.as_ref(), 0.0, 1.0, 64, None).unwrap();
        let sol = RadialSolution::from_path(path, 0.0, g, f);
        let scan = lambda1_full(&sol, 3, 64).unwrap();
        assert_eq!(scan.argmin, 0);
        assert!((scan.lambdas[1] - scan.lambdas[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_test_function_gives_robin_bound() {
        let g = cylinder(2.0);
        let q = rayleigh_quotient(&g, &vec![1.0; 101], None, 0.3).unwrap();
        let expect = 0.3 * (4.0 * PI) / (4.0 * PI);
        assert!((q - expect).abs() < 1e-12);
        assert!(rayleigh_quotient(&g, &vec![0.0; 101], None, 0.3).is_err());
    }

    #[test]
    fn energy_of_sine() {
        let a = 1.7;
        let g = cylinder(a);
        let n = 400;
        let grid = uniform_grid(0.0, a, n);
        let u: Vec<f64> = grid.iter().map(|r| (PI * r / a).sin()).collect();
        let du: Vec<f64> = grid.iter().map(|r| PI / a * (PI * r / a).cos()).collect();
        let e = energy(&g, &u, Some(&du), &Linear { lambda: 1.0 }, 0.8).unwrap();
        let exact = 2.0 * PI * ((PI / a).powi(2) * a / 2.0 - a / 2.0);
        assert!((e - exact).abs() < 1e-8, "{e} vs {exact}");
        assert_eq!(energy(&g, &vec![0.0; 11], None, &Linear { lambda: 1.0 }, 1.0).unwrap(), 0.0);
    }
}
