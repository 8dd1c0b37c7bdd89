//! The profile `z = Z′` of the constructed solution: two solutions of the
//! linear equation `z″ + Dz′ + (D′ − B)z = 0` started from the boundary,
//! joined by a quintic.

use crate::error::{Error, Result};
use crate::geometry::{uniform_grid, RadialGeometry};

/// `(∫z, z, z′)` at one radius. The integral runs from the boundary the
/// branch was started at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchState {
    pub r: f64,
    pub integral: f64,
    pub z: f64,
    pub z_prime: f64,
}

/// One branch tabulated on the grid nodes it covers, plus the state at the
/// window end where it is cut.
#[derive(Debug, Clone)]
pub struct Branch {
    /// Indices into the shared grid.
    pub nodes: std::ops::Range<usize>,
    pub states: Vec<BranchState>,
    pub end: BranchState,
}

fn construction(inequality: &str, detail: String) -> Error {
    Error::Construction {
        inequality: inequality.into(),
        detail,
    }
}

/// `z″` from the equation.
pub fn z_second(geometry: &dyn RadialGeometry, b: f64, r: f64, z: f64, z_prime: f64) -> f64 {
    -geometry.drift(r) * z_prime - (geometry.drift_prime(r) - b) * z
}

fn deriv(geometry: &dyn RadialGeometry, b: f64, sign: f64, r: f64, y: [f64; 3]) -> [f64; 3] {
    [sign * y[1], y[2], z_second(geometry, b, r, y[1], y[2])]
}

fn rk4(geometry: &dyn RadialGeometry, b: f64, sign: f64, r: f64, h: f64, y: [f64; 3]) -> [f64; 3] {
    let add = |y: [f64; 3], k: [f64; 3], s: f64| [y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2]];
    let k1 = deriv(geometry, b, sign, r, y);
    let k2 = deriv(geometry, b, sign, r + 0.5 * h, add(y, k1, 0.5 * h));
    let k3 = deriv(geometry, b, sign, r + 0.5 * h, add(y, k2, 0.5 * h));
    let k4 = deriv(geometry, b, sign, r + h, add(y, k3, h));
    let mut out = y;
    for j in 0..3 {
        out[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    out
}

fn state(r: f64, y: [f64; 3]) -> Result<BranchState> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(construction(
            "overflow",
            format!("profile is not finite at r = {r}; B is too large for double precision"),
        ));
    }
    Ok(BranchState {
        r,
        integral: y[0],
        z: y[1],
        z_prime: y[2],
    })
}

/// Forward branch `z(lo) = 0`, `z′(lo) = 1` on the grid nodes `≤ r1`, with
/// the integral `∫_lo^r z`. Checks `z > 0` and `z′ > 0`.
pub fn solve_z1(geometry: &dyn RadialGeometry, b: f64, r1: f64, n: usize) -> Result<Branch> {
    let (lo, hi) = geometry.interval();
    if !(lo < r1 && r1 < hi) {
        return Err(Error::InvalidArgument(format!("R1 = {r1} outside ({lo}, {hi})")));
    }
    let grid = uniform_grid(lo, hi, n);
    let mut y = [0.0, 0.0, 1.0];
    let mut states = vec![state(lo, y)?];
    let mut i = 0;
    while i < n && grid[i + 1] <= r1 {
        y = rk4(geometry, b, 1.0, grid[i], grid[i + 1] - grid[i], y);
        states.push(state(grid[i + 1], y)?);
        i += 1;
    }
    let tail = r1 - grid[i];
    let end = if tail > 0.0 {
        state(r1, rk4(geometry, b, 1.0, grid[i], tail, y))?
    } else {
        states[i]
    };
    for s in states.iter().skip(1).chain(std::iter::once(&end)) {
        if !(s.z > 0.0) || !(s.z_prime > 0.0) {
            return Err(construction(
                "z1-increasing",
                format!(
                    "z1 = {:.3e}, z1' = {:.3e} at r = {}; B too small",
                    s.z, s.z_prime, s.r
                ),
            ));
        }
    }
    Ok(Branch {
        nodes: 0..i + 1,
        states,
        end,
    })
}

/// Backward branch `z(hi) = β`, `z′(hi) = −1` on the grid nodes `≥ r2`,
/// with the integral `∫_r^hi z`. Checks `z > β` below `hi` and `z′ < 0`.
pub fn solve_z2(geometry: &dyn RadialGeometry, b: f64, beta: f64, r2: f64, n: usize) -> Result<Branch> {
    let (lo, hi) = geometry.interval();
    if !(lo < r2 && r2 < hi) {
        return Err(Error::InvalidArgument(format!("R2 = {r2} outside ({lo}, {hi})")));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let grid = uniform_grid(lo, hi, n);
    let mut y = [0.0, beta, -1.0];
    let mut rev = vec![state(hi, y)?];
    let mut j = n;
    while j > 0 && grid[j - 1] >= r2 {
        y = rk4(geometry, b, -1.0, grid[j], grid[j - 1] - grid[j], y);
        rev.push(state(grid[j - 1], y)?);
        j -= 1;
    }
    let tail = r2 - grid[j];
    let end = if tail < 0.0 {
        state(r2, rk4(geometry, b, -1.0, grid[j], tail, y))?
    } else {
        *rev.last().expect("non-empty")
    };
    for s in rev.iter().skip(1).chain(std::iter::once(&end)) {
        if !(s.z > beta) || !(s.z_prime < 0.0) {
            return Err(construction(
                "z2-decreasing",
                format!(
                    "z2 = {:.3e}, z2' = {:.3e} at r = {} (beta = {beta}); B too small",
                    s.z, s.z_prime, s.r
                ),
            ));
        }
    }
    rev.reverse();
    Ok(Branch {
        nodes: j..n + 1,
        states: rev,
        end,
    })
}

/// Quintic `P(t)`, `t = r − r1`, on `[r1, r1 + len]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Quintic {
    pub r1: f64,
    pub len: f64,
    pub c: [f64; 6],
}

impl Quintic {
    /// Matches value, slope and curvature `(y, d, s)` at both ends.
    pub fn hermite(r1: f64, r2: f64, left: (f64, f64, f64), right: (f64, f64, f64)) -> Self {
        let l = r2 - r1;
        let (c0, c1, c2) = (left.0, left.1, 0.5 * left.2);
        let dv = right.0 - (c0 + c1 * l + c2 * l * l);
        let dd = right.1 - (c1 + 2.0 * c2 * l);
        let ds = right.2 - 2.0 * c2;
        let (l2, l3) = (l * l, l * l * l);
        let c3 = (20.0 * dv - 8.0 * dd * l + ds * l2) / (2.0 * l3);
        let c4 = (-30.0 * dv + 14.0 * dd * l - 2.0 * ds * l2) / (2.0 * l3 * l);
        let c5 = (12.0 * dv - 6.0 * dd * l + ds * l2) / (2.0 * l3 * l2);
        Self {
            r1,
            len: l,
            c: [c0, c1, c2, c3, c4, c5],
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci)
    }

    pub fn d1(&self, t: f64) -> f64 {
        (1..6).rev().fold(0.0, |acc, k| acc * t + k as f64 * self.c[k])
    }

    pub fn d2(&self, t: f64) -> f64 {
        (2..6).rev().fold(0.0, |acc, k| acc * t + (k * (k - 1)) as f64 * self.c[k])
    }

    /// `∫_0^t P`.
    pub fn integral(&self, t: f64) -> f64 {
        (0..6).rev().fold(0.0, |acc, k| acc * t + self.c[k] / (k + 1) as f64) * t
    }

    pub fn min_on_interval(&self, samples: usize) -> f64 {
        (0..=samples)
            .map(|k| self.value(self.len * k as f64 / samples as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Joins the end states of the two branches with a C² quintic and checks
/// that it stays positive.
pub fn bridge(geometry: &dyn RadialGeometry, b: f64, left: &BranchState, right: &BranchState) -> Result<Quintic> {
    let s0 = z_second(geometry, b, left.r, left.z, left.z_prime);
    let s1 = z_second(geometry, b, right.r, right.z, right.z_prime);
    let q = Quintic::hermite(left.r, right.r, (left.z, left.z_prime, s0), (right.z, right.z_prime, s1));
    let min = q.min_on_interval(2048);
    if !(min > 0.0) {
        return Err(construction(
            "bridge-positive",
            format!("bridge reaches {min:.3e} on [{}, {}]; shrink [R1, R2] or adjust B", left.r, right.r),
        ));
    }
    Ok(q)
}

/// Profile on the whole grid: `z`, `z′`, `z″` and `Z = ∫_lo^r z`.
#[derive(Debug, Clone)]
pub struct Profile {
    pub grid: Vec<f64>,
    pub z: Vec<f64>,
    pub z_prime: Vec<f64>,
    pub z_second: Vec<f64>,
    pub big_z: Vec<f64>,
    /// `Z(R1)`, `Z(R2)` and `Z(hi) = ∫z`.
    pub z_at_r1: f64,
    pub z_at_r2: f64,
    pub total: f64,
    pub alpha: f64,
    pub left: Branch,
    pub right: Branch,
    pub bridge: Quintic,
}

/// Glues the three pieces, integrates and sets `α = −β / ∫z`.
pub fn assemble(
    geometry: &dyn RadialGeometry,
    b: f64,
    beta: f64,
    left: Branch,
    right: Branch,
    bridge: Quintic,
    n: usize,
) -> Result<Profile> {
    let (lo, hi) = geometry.interval();
    let grid = uniform_grid(lo, hi, n);
    let z_at_r1 = left.end.integral;
    let z_at_r2 = z_at_r1 + bridge.integral(bridge.len);
    let total = z_at_r2 + right.end.integral;
    if !(total > 0.0) || !total.is_finite() {
        return Err(construction("overflow", format!("integral of z is {total}")));
    }
    let mut z = vec![0.0; n + 1];
    let mut zp = vec![0.0; n + 1];
    let mut zs = vec![0.0; n + 1];
    let mut big = vec![0.0; n + 1];
    for (k, i) in left.nodes.clone().enumerate() {
        let s = &left.states[k];
        z[i] = s.z;
        zp[i] = s.z_prime;
        zs[i] = z_second(geometry, b, grid[i], s.z, s.z_prime);
        big[i] = s.integral;
    }
    for i in left.nodes.end..right.nodes.start {
        let t = grid[i] - bridge.r1;
        z[i] = bridge.value(t);
        zp[i] = bridge.d1(t);
        zs[i] = bridge.d2(t);
        big[i] = z_at_r1 + bridge.integral(t);
    }
    for (k, i) in right.nodes.clone().enumerate() {
        let s = &right.states[k];
        z[i] = s.z;
        zp[i] = s.z_prime;
        zs[i] = z_second(geometry, b, grid[i], s.z, s.z_prime);
        big[i] = total - s.integral;
    }
    big[0] = 0.0;
    big[n] = total;
    Ok(Profile {
        grid,
        z,
        z_prime: zp,
        z_second: zs,
        big_z: big,
        z_at_r1,
        z_at_r2,
        total,
        alpha: -beta / total,
        left,
        right,
        bridge,
    })
}

impl Profile {
    pub fn n(&self) -> usize {
        self.grid.len() - 1
    }

    /// `z` at an arbitrary radius by cubic Hermite interpolation of the
    /// node values (exact polynomial on the bridge).
    pub fn z_at(&self, r: f64) -> f64 {
        if r >= self.bridge.r1 && r <= self.bridge.r1 + self.bridge.len {
            return self.bridge.value(r - self.bridge.r1);
        }
        let n = self.n();
        let lo = self.grid[0];
        let h = (self.grid[n] - lo) / n as f64;
        let i = (((r - lo) / h).floor().max(0.0) as usize).min(n - 1);
        crate::interp::hermite(
            self.grid[i],
            self.grid[i + 1],
            self.z[i],
            self.z[i + 1],
            self.z_prime[i],
            self.z_prime[i + 1],
            r,
        )
    }

    /// `−Z′(lo) + αZ(lo)` and `Z′(hi) + αZ(hi)`.
    pub fn robin_residuals(&self) -> (f64, f64) {
        let n = self.n();
        (
            -self.z[0] + self.alpha * self.big_z[0],
            self.z[n] + self.alpha * self.big_z[n],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometrySpec;
    use crate::registry::Params;

    fn cylinder(a: f64) -> std::sync::Arc<dyn RadialGeometry> {
        GeometrySpec::Revolution {
            profile: "cylinder".into(),
            params: Params::new(),
            interval: [0.0, a],
        }
        .build()
        .unwrap()
    }

    #[test]
    fn cylinder_branches_are_hyperbolic() {
        let g = cylinder(2.0);
        let (r1, r2, beta) = (0.7, 1.3, 1.0);
        let z1 = solve_z1(g.as_ref(), 1.0, r1, 2000).unwrap();
        assert!((z1.end.z - r1.sinh()).abs() < 1e-12);
        assert!((z1.end.z_prime - r1.cosh()).abs() < 1e-12);
        assert!((z1.end.integral - (r1.cosh() - 1.0)).abs() < 1e-12);
        // z2 = β cosh(a − r) + sinh(a − r)
        let z2 = solve_z2(g.as_ref(), 1.0, beta, r2, 2000).unwrap();
        let s = 2.0 - r2;
        assert!((z2.end.z - (beta * s.cosh() + s.sinh())).abs() < 1e-12);
        assert!((z2.end.integral - (beta * s.sinh() + s.cosh() - 1.0)).abs() < 1e-12);
        let h = 2.0 / 2000.0;
        assert!((z1.states[1].z - h).abs() < h * h * h);
    }

    #[test]
    fn z1_grows_with_b() {
        let g = cylinder(2.0);
        let a = solve_z1(g.as_ref(), 2.0, 1.5, 300).unwrap();
        let b = solve_z1(g.as_ref(), 4.0, 1.5, 300).unwrap();
        assert!(a.states.iter().zip(&b.states).all(|(x, y)| y.z >= x.z));
        let a = solve_z2(g.as_ref(), 2.0, 0.5, 0.5, 300).unwrap();
        let b = solve_z2(g.as_ref(), 4.0, 0.5, 0.5, 300).unwrap();
        assert!(a.states.iter().zip(&b.states).all(|(x, y)| y.z >= x.z));
    }

    #[test]
    fn quintic_matches_end_data() {
        let q = Quintic::hermite(0.3, 1.1, (2.0, -1.0, 4.0), (5.0, 3.0, -7.0));
        let l = 0.8;
        let err = [
            q.value(0.0) - 2.0,
            q.d1(0.0) + 1.0,
            q.d2(0.0) - 4.0,
            q.value(l) - 5.0,
            q.d1(l) - 3.0,
            q.d2(l) + 7.0,
        ];
        assert!(err.iter().all(|e| e.abs() < 1e-12), "{err:?}");
        // integral against Simpson
        let s = crate::quadrature::adaptive_simpson(|t| q.value(t), 0.0, l, 1e-13);
        assert!((q.integral(l) - s).abs() < 1e-11);
        let flat = Quintic::hermite(0.0, 1.0, (1.5, 0.0, 0.0), (1.5, 0.0, 0.0));
        assert!(flat.c[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn small_b_violates_monotonicity() {
        // Negative B makes the cylinder branch oscillate.
        let g = cylinder(4.0);
        let e = solve_z1(g.as_ref(), -4.0, 3.0, 400).unwrap_err();
        assert!(matches!(e, Error::Construction { ref inequality, .. } if inequality == "z1-increasing"));
    }
}
