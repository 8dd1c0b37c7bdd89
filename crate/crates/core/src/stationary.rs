//! Radial stationary solutions `v″ + drift(r) v′ + f(v) = 0` with Robin
//! conditions `−v′(lo) + αv(lo) = 0`, `v′(hi) + αv(hi) = 0`, found by
//! shooting from the inner boundary.

use std::path::Path;
use std::sync::Arc;

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{uniform_grid, RadialGeometry};
use crate::interp::hermite;
use crate::io::write_csv;
use crate::nonlinearity::Nonlinearity;

pub const MIN_SHOOT_NODES: usize = 16;
pub const DEFAULT_BLOWUP_FACTOR: f64 = 1e8;
pub const ROOT_TOL: f64 = 1e-10;

/// Trajectory of one shot.
#[derive(Debug, Clone)]
pub struct ShootingPath {
    pub c: f64,
    pub grid: Vec<f64>,
    pub v: Vec<f64>,
    pub v_prime: Vec<f64>,
    /// `v′(hi) + αv(hi)`.
    pub residual: f64,
}

/// Drift coefficient sampled at nodes and midpoints, shared by all shots
/// on the same grid.
struct DriftTable {
    nodes: Vec<f64>,
    mids: Vec<f64>,
}

impl DriftTable {
    fn new(geometry: &dyn RadialGeometry, grid: &[f64]) -> Self {
        let nodes = grid.iter().map(|&r| geometry.drift(r)).collect();
        let mids = grid
            .windows(2)
            .map(|w| geometry.drift(0.5 * (w[0] + w[1])))
            .collect();
        Self { nodes, mids }
    }
}

fn shoot_with_table(
    table: &DriftTable,
    grid: &[f64],
    f: &dyn Nonlinearity,
    alpha: f64,
    c: f64,
    blowup: f64,
) -> Result<ShootingPath> {
    let n = grid.len() - 1;
    let mut v = Vec::with_capacity(n + 1);
    let mut vp = Vec::with_capacity(n + 1);
    let (mut y, mut p) = (c, alpha * c);
    v.push(y);
    vp.push(p);
    let rhs = |d: f64, y: f64, p: f64| -d * p - f.f(y);
    for i in 0..n {
        let h = grid[i + 1] - grid[i];
        let (d0, dm, d1) = (table.nodes[i], table.mids[i], table.nodes[i + 1]);
        let k1y = p;
        let k1p = rhs(d0, y, p);
        let k2y = p + 0.5 * h * k1p;
        let k2p = rhs(dm, y + 0.5 * h * k1y, k2y);
        let k3y = p + 0.5 * h * k2p;
        let k3p = rhs(dm, y + 0.5 * h * k2y, k3y);
        let k4y = p + h * k3p;
        let k4p = rhs(d1, y + h * k3y, k4y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if !(y.abs() <= blowup) || !p.is_finite() {
            return Err(Error::ShotDiverged {
                r: grid[i + 1],
                value: y.abs(),
            });
        }
        v.push(y);
        vp.push(p);
    }
    let residual = p + alpha * y;
    Ok(ShootingPath {
        c,
        grid: grid.to_vec(),
        v,
        v_prime: vp,
        residual,
    })
}

/// Integrates `v(lo) = c`, `v′(lo) = αc` with RK4 on `n` uniform steps.
pub fn shoot(
    geometry: &dyn RadialGeometry,
    f: &dyn Nonlinearity,
    alpha: f64,
    c: f64,
    n: usize,
    blowup: Option<f64>,
) -> Result<ShootingPath> {
    if n < MIN_SHOOT_NODES {
        return Err(Error::InvalidArgument(format!(
            "shooting needs n >= {MIN_SHOOT_NODES}, got {n}"
        )));
    }
    let (lo, hi) = geometry.interval();
    let grid = uniform_grid(lo, hi, n);
    let table = DriftTable::new(geometry, &grid);
    let bound = blowup.unwrap_or(DEFAULT_BLOWUP_FACTOR * (1.0 + c.abs()));
    shoot_with_table(&table, &grid, f, alpha, c, bound)
}

/// A radial stationary solution together with its problem data.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub grid: Vec<f64>,
    pub v: Vec<f64>,
    pub v_prime: Vec<f64>,
    pub alpha: f64,
    pub geometry: Arc<dyn RadialGeometry>,
    pub nonlinearity: Arc<dyn Nonlinearity>,
    /// Initial value `v(lo)` of the shot that produced the solution.
    pub c: f64,
    pub residual: f64,
    /// Representative of a one-parameter family (linear `f`), normalised
    /// to max-norm one.
    pub family: bool,
}

/// Residuals of a solution on its own grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Validation {
    pub ode_residual: f64,
    pub robin_inner: f64,
    pub robin_outer: f64,
    pub tolerance: f64,
    pub valid: bool,
}

impl RadialSolution {
    pub fn from_path(
        path: ShootingPath,
        alpha: f64,
        geometry: Arc<dyn RadialGeometry>,
        nonlinearity: Arc<dyn Nonlinearity>,
    ) -> Self {
        Self {
            grid: path.grid,
            v: path.v,
            v_prime: path.v_prime,
            alpha,
            geometry,
            nonlinearity,
            c: path.c,
            residual: path.residual,
            family: false,
        }
    }

    /// Number of grid intervals.
    pub fn n(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn h(&self) -> f64 {
        (self.grid[self.n()] - self.grid[0]) / self.n() as f64
    }

    pub fn max_norm(&self) -> f64 {
        self.v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|&x| x == 0.0)
    }

    /// `true` when `v` never changes sign (zeros allowed).
    pub fn one_signed(&self) -> bool {
        let pos = self.v.iter().any(|&x| x > 0.0);
        let neg = self.v.iter().any(|&x| x < 0.0);
        !(pos && neg)
    }

    /// Value and derivative at `r` by cubic Hermite interpolation of the
    /// stored `(v, v′)`.
    pub fn sample(&self, r: f64) -> (f64, f64) {
        let n = self.n();
        let lo = self.grid[0];
        let h = self.h();
        let i = (((r - lo) / h).floor().max(0.0) as usize).min(n - 1);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let v = hermite(x0, x1, self.v[i], self.v[i + 1], self.v_prime[i], self.v_prime[i + 1], r);
        let d = crate::interp::hermite_derivative(
            x0,
            x1,
            self.v[i],
            self.v[i + 1],
            self.v_prime[i],
            self.v_prime[i + 1],
            r,
        );
        (v, d)
    }

    /// Scale `1 + max|v| + max|v′| + max|f(v)|` used by residual tolerances.
    pub fn scale(&self) -> f64 {
        let f = &self.nonlinearity;
        let mv = self.max_norm();
        let mp = self.v_prime.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let mf = self.v.iter().fold(0.0_f64, |m, &x| m.max(f.f(x).abs()));
        1.0 + mv + mp + mf
    }

    /// Tolerance applied by [`validate`](Self::validate).
    pub fn tolerance(&self) -> f64 {
        let h = self.h();
        (100.0 * h * h * self.scale()).max(1e-8)
    }

    /// Interior residual from centered second differences, Robin residuals
    /// from the stored derivative.
    pub fn validate(&self) -> Validation {
        let n = self.n();
        let h = self.h();
        let g = &self.geometry;
        let f = &self.nonlinearity;
        let mut ode: f64 = 0.0;
        for i in 1..n {
            let d2 = (self.v[i + 1] - 2.0 * self.v[i] + self.v[i - 1]) / (h * h);
            let d1 = (self.v[i + 1] - self.v[i - 1]) / (2.0 * h);
            let res = d2 + g.drift(self.grid[i]) * d1 + f.f(self.v[i]);
            ode = ode.max(res.abs());
        }
        let robin_inner = (-self.v_prime[0] + self.alpha * self.v[0]).abs();
        let robin_outer = (self.v_prime[n] + self.alpha * self.v[n]).abs();
        let tolerance = self.tolerance();
        Validation {
            ode_residual: ode,
            robin_inner,
            robin_outer,
            tolerance,
            valid: ode <= tolerance && robin_inner <= tolerance && robin_outer <= tolerance,
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_csv(path, &["r", "v", "v_prime"], &[&self.grid, &self.v, &self.v_prime])
    }
}

/// Settings for [`solve_stationary`].
#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub c_min: f64,
    pub c_max: f64,
    pub n_scan: usize,
    pub n: usize,
    pub blowup_factor: f64,
    pub tol: f64,
    /// Relative residual below which a run of scan points is treated as a
    /// continuum of solutions.
    pub plateau_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            c_min: -3.0,
            c_max: 3.0,
            n_scan: 401,
            n: 2000,
            blowup_factor: DEFAULT_BLOWUP_FACTOR,
            tol: ROOT_TOL,
            plateau_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StationarySet {
    pub solutions: Vec<RadialSolution>,
    /// Scan points whose shot diverged.
    pub diverged: usize,
}

struct Shooter<'a> {
    f: &'a dyn Nonlinearity,
    alpha: f64,
    grid: Vec<f64>,
    table: DriftTable,
    blowup_factor: f64,
}

impl Shooter<'_> {
    fn shoot(&self, c: f64) -> Result<ShootingPath> {
        shoot_with_table(
            &self.table,
            &self.grid,
            self.f,
            self.alpha,
            c,
            self.blowup_factor * (1.0 + c.abs()),
        )
    }

    /// Bisection on `[a, b]` with residuals of opposite sign.
    fn refine(&self, mut a: f64, mut ra: f64, mut b: f64, tol: f64) -> Option<ShootingPath> {
        let mut best: Option<ShootingPath> = None;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let path = match self.shoot(m) {
                Ok(p) => p,
                Err(_) => return best,
            };
            let rm = path.residual;
            let better = best.as_ref().map_or(true, |p| rm.abs() < p.residual.abs());
            if rm == 0.0 || rm.abs() < tol {
                return Some(path);
            }
            if (rm < 0.0) == (ra < 0.0) {
                a = m;
                ra = rm;
            } else {
                b = m;
            }
            if better {
                best = Some(path);
            }
            if (b - a).abs() <= 4.0 * f64::EPSILON * (1.0 + m.abs()) {
                break;
            }
        }
        if let Some(p) = &best {
            warn!(
                "bisection stalled at c = {:.17e} with residual {:.3e}",
                p.c, p.residual
            );
        }
        best
    }
}

/// Finds radial stationary solutions by scanning the shooting parameter
/// over `[c_min, c_max]` and bisecting every sign change of the terminal
/// residual.
pub fn solve_stationary(
    geometry: Arc<dyn RadialGeometry>,
    f: Arc<dyn Nonlinearity>,
    alpha: f64,
    opts: &ScanOptions,
) -> Result<StationarySet> {
    if !(opts.c_min.is_finite() && opts.c_max.is_finite()) || opts.c_min >= opts.c_max {
        return Err(Error::InvalidArgument(format!(
            "invalid scan range [{}, {}]",
            opts.c_min, opts.c_max
        )));
    }
    if opts.n_scan < 2 {
        return Err(Error::InvalidArgument("n_scan must be at least 2".into()));
    }
    if opts.n < MIN_SHOOT_NODES {
        return Err(Error::InvalidArgument(format!("n must be at least {MIN_SHOOT_NODES}")));
    }
    let (lo, hi) = geometry.interval();
    let grid = uniform_grid(lo, hi, opts.n);
    let table = DriftTable::new(geometry.as_ref(), &grid);
    let shooter = Shooter {
        f: f.as_ref(),
        alpha,
        grid,
        table,
        blowup_factor: opts.blowup_factor,
    };

    let cs: Vec<f64> = (0..opts.n_scan)
        .map(|j| {
            if j + 1 == opts.n_scan {
                opts.c_max
            } else {
                opts.c_min + (opts.c_max - opts.c_min) * j as f64 / (opts.n_scan - 1) as f64
            }
        })
        .collect();
    let residuals: Vec<Option<f64>> = cs
        .par_iter()
        .map(|&c| shooter.shoot(c).ok().map(|p| p.residual))
        .collect();
    let diverged = residuals.iter().filter(|r| r.is_none()).count();
    if diverged > 0 {
        warn!("{diverged} of {} shots diverged", cs.len());
    }

    // Plateaus: runs of at least three scan points with negligible residual.
    let flat: Vec<bool> = residuals
        .iter()
        .zip(&cs)
        .map(|(r, c)| r.map_or(false, |r| r.abs() <= opts.plateau_tol * (1.0 + c.abs())))
        .collect();
    let mut in_plateau = vec![false; cs.len()];
    let mut plateaus = Vec::new();
    let mut j = 0;
    while j < cs.len() {
        if flat[j] {
            let start = j;
            while j < cs.len() && flat[j] {
                j += 1;
            }
            if j - start >= 3 {
                in_plateau[start..j].iter_mut().for_each(|x| *x = true);
                plateaus.push((start, j - 1));
            }
        } else {
            j += 1;
        }
    }

    let mut candidates: Vec<(f64, f64, f64)> = Vec::new();
    let mut exact: Vec<f64> = Vec::new();
    for j in 0..cs.len() {
        if in_plateau[j] {
            continue;
        }
        let Some(rj) = residuals[j] else { continue };
        if rj == 0.0 {
            exact.push(cs[j]);
            continue;
        }
        if j + 1 < cs.len() && !in_plateau[j + 1] {
            if let Some(rk) = residuals[j + 1] {
                if rk != 0.0 && (rj < 0.0) != (rk < 0.0) {
                    candidates.push((cs[j], rj, cs[j + 1]));
                }
            }
        }
    }

    let mut paths: Vec<(f64, ShootingPath, bool)> = candidates
        .par_iter()
        .filter_map(|&(a, ra, b)| shooter.refine(a, ra, b, opts.tol).map(|p| (p.c, p, false)))
        .collect();
    for c in exact {
        if let Ok(p) = shooter.shoot(c) {
            paths.push((c, p, false));
        }
    }
    if f.f(0.0) == 0.0 && opts.c_min <= 0.0 && opts.c_max >= 0.0 {
        paths.push((0.0, shooter.shoot(0.0)?, false));
    }
    for &(s, e) in &plateaus {
        // Normalised representative from the plateau point of largest |c|.
        let k = (s..=e)
            .max_by(|&x, &y| cs[x].abs().total_cmp(&cs[y].abs()))
            .unwrap();
        if cs[k] == 0.0 {
            continue;
        }
        if let Ok(p) = shooter.shoot(cs[k]) {
            let norm = p.v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if norm > 0.0 {
                let c = cs[k] / norm;
                if let Ok(q) = shooter.shoot(c) {
                    paths.push((c, q, true));
                }
            }
        }
    }
    paths.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut solutions: Vec<RadialSolution> = Vec::new();
    for (_, path, family) in paths {
        let norm = path.v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let duplicate = solutions.iter().any(|s| {
            let d = s
                .v
                .iter()
                .zip(&path.v)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            d < 1e-6 * (1.0 + norm)
        });
        if duplicate {
            continue;
        }
        let mut sol = RadialSolution::from_path(path, alpha, geometry.clone(), f.clone());
        sol.family = family;
        debug!("stationary solution c = {:.12e}, residual {:.3e}", sol.c, sol.residual);
        solutions.push(sol);
    }
    Ok(StationarySet { solutions, diverged })
}
