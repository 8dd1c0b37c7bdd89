//! Symmetric tridiagonal matrices: Sturm counts, bisection for the lowest
//! eigenvalue, and inverse iteration.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                off.len()
            )));
        }
        if diag.iter().chain(&off).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_inf(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + self.norm_inf());
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.len() {
            let e2 = if i > 0 {
                self.off[i - 1] * self.off[i - 1]
            } else {
                0.0
            };
            d = self.diag[i] - x - if i > 0 { e2 / d } else { 0.0 };
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Lowest eigenvalue by bisection, to absolute width `tol`.
    pub fn lowest_eigenvalue(&self, tol: f64) -> Result<f64> {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        lo -= pad;
        hi += pad;
        let max_iter = 400;
        for _ in 0..max_iter {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.sturm_count(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Convergence {
            lo,
            hi,
            iterations: max_iter,
        })
    }

    /// Solves `(T − σI) x = b` by Gaussian elimination with partial pivoting.
    pub fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if n == 1 {
            let d = self.diag[0] - sigma;
            return Ok(vec![b[0] / if d == 0.0 { f64::EPSILON } else { d }]);
        }
        let eps = f64::EPSILON * (1.0 + self.norm_inf());
        // Rows hold up to three nonzeros after pivoting: a (diag), c (super), s (second super).
        let mut sub: Vec<f64> = self.off.clone();
        let mut dia: Vec<f64> = self.diag.iter().map(|d| d - sigma).collect();
        let mut sup: Vec<f64> = self.off.clone();
        let mut sup2 = vec![0.0; n];
        let mut rhs = b.to_vec();
        for i in 0..n - 1 {
            if dia[i].abs() >= sub[i].abs() {
                if dia[i] == 0.0 {
                    dia[i] = eps;
                }
                let m = sub[i] / dia[i];
                dia[i + 1] -= m * sup[i];
                rhs[i + 1] -= m * rhs[i];
                sub[i] = 0.0;
            } else {
                // Swap rows i and i + 1.
                let m = dia[i] / sub[i];
                dia[i] = sub[i];
                let t = dia[i + 1];
                dia[i + 1] = sup[i] - m * t;
                sup[i] = t;
                if i + 1 < n - 1 {
                    sup2[i] = sup[i + 1];
                    sup[i + 1] *= -m;
                }
                rhs.swap(i, i + 1);
                rhs[i + 1] -= m * rhs[i];
                sub[i] = 0.0;
            }
        }
        if dia[n - 1] == 0.0 {
            dia[n - 1] = eps;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= sup[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= sup2[i] * x[i + 2];
            }
            x[i] = s / dia[i];
        }
        Ok(x)
    }

    /// Eigenvector for an eigenvalue estimate `lambda` by inverse iteration.
    /// Returns a unit Euclidean vector.
    pub fn inverse_iteration(&self, lambda: f64, iterations: usize) -> Result<Vec<f64>> {
        let n = self.len();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64).collect();
        normalize(&mut x);
        let shift = lambda - 1e-14 * (1.0 + self.norm_inf());
        for _ in 0..iterations.max(1) {
            let mut y = self.solve_shifted(shift, &x)?;
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::Consistency("inverse iteration produced non-finite values".into()));
            }
            normalize(&mut y);
            x = y;
        }
        Ok(x)
    }

    /// `‖Tx − λx‖ / (‖T‖ ‖x‖)`.
    pub fn relative_residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let tx = self.mul(x);
        let r: f64 = tx
            .iter()
            .zip(x)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let nx: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        r / (self.norm_inf().max(f64::MIN_POSITIVE) * nx)
    }
}

fn normalize(x: &mut [f64]) {
    let s: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn dirichlet_laplacian_lowest() {
        let n = 50;
        let t = laplacian(n);
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let l = t.lowest_eigenvalue(1e-15).unwrap();
        assert!((l - exact).abs() < 1e-13);
        let x = t.inverse_iteration(l, 3).unwrap();
        assert!(t.relative_residual(l, &x) < 1e-12);
        assert!(x.iter().all(|&v| v > 0.0) || x.iter().all(|&v| v < 0.0));
    }

    #[test]
    fn sturm_counts_are_monotone() {
        let t = laplacian(20);
        let mut prev = 0;
        for k in 0..=40 {
            let c = t.sturm_count(-0.1 + 0.105 * k as f64);
            assert!(c >= prev);
            prev = c;
        }
        assert_eq!(prev, 20);
    }

    proptest! {
        #[test]
        fn solve_shifted_inverts(d in prop::collection::vec(-3.0f64..3.0, 6), e in prop::collection::vec(-2.0f64..2.0, 5),
                                 b in prop::collection::vec(-1.0f64..1.0, 6), sigma in -1.0f64..1.0) {
            let t = SymTridiagonal::new(d, e).unwrap();
            let x = t.solve_shifted(sigma, &b).unwrap();
            let tx = t.mul(&x);
            let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs())) * (1.0 + t.norm_inf());
            for i in 0..6 {
                prop_assert!((tx[i] - sigma * x[i] - b[i]).abs() < 1e-9 * scale);
            }
        }
    }
}
