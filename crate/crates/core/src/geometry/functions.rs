//! Smooth radial functions (profiles ψ and warping functions φ) with their
//! first two derivatives, and the registries that build them by name.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interp::{hermite, hermite_derivative};
use crate::registry::{param, Params, Registry};

/// Value and first two derivatives of a function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }
}

/// A smooth real function of the radial coordinate, supplied with analytic
/// first and second derivatives.
pub trait RadialFunction: Send + Sync + fmt::Debug {
    /// Registry name of the function family.
    fn kind(&self) -> &'static str;
    /// Parameters that rebuild this function through its registry.
    fn params(&self) -> Params;
    fn jet(&self, r: f64) -> Jet;

    fn value(&self, r: f64) -> f64 {
        self.jet(r).value
    }
}

/// ψ ≡ c.
#[derive(Debug, Clone)]
pub struct Constant {
    pub c: f64,
}

impl RadialFunction for Constant {
    fn kind(&self) -> &'static str {
        "cylinder"
    }
    fn params(&self) -> Params {
        Params::from([("c".to_string(), self.c)])
    }
    fn jet(&self, _r: f64) -> Jet {
        Jet::new(self.c, 0.0, 0.0)
    }
}

/// ψ = c + k r.
#[derive(Debug, Clone)]
pub struct Affine {
    pub c: f64,
    pub k: f64,
}

impl RadialFunction for Affine {
    fn kind(&self) -> &'static str {
        "cone"
    }
    fn params(&self) -> Params {
        Params::from([("c".to_string(), self.c), ("k".to_string(), self.k)])
    }
    fn jet(&self, r: f64) -> Jet {
        Jet::new(self.c + self.k * r, self.k, 0.0)
    }
}

/// Arc-length profile of the catenoid, ψ = √(1 + (r − c)²).
#[derive(Debug, Clone)]
pub struct CatenoidArc {
    pub c: f64,
}

impl RadialFunction for CatenoidArc {
    fn kind(&self) -> &'static str {
        "catenoid"
    }
    fn params(&self) -> Params {
        Params::from([("c".to_string(), self.c)])
    }
    fn jet(&self, r: f64) -> Jet {
        let s = r - self.c;
        let q = 1.0 + s * s;
        let v = q.sqrt();
        Jet::new(v, s / v, 1.0 / (q * v))
    }
}

/// ψ = sin r (unit sphere); also the spherical warping function.
#[derive(Debug, Clone, Default)]
pub struct Sine;

impl RadialFunction for Sine {
    fn kind(&self) -> &'static str {
        "sphere"
    }
    fn params(&self) -> Params {
        Params::new()
    }
    fn jet(&self, r: f64) -> Jet {
        let (s, c) = r.sin_cos();
        Jet::new(s, c, -s)
    }
}

/// φ = r.
#[derive(Debug, Clone, Default)]
pub struct Identity;

impl RadialFunction for Identity {
    fn kind(&self) -> &'static str {
        "euclidean"
    }
    fn params(&self) -> Params {
        Params::new()
    }
    fn jet(&self, r: f64) -> Jet {
        Jet::new(r, 1.0, 0.0)
    }
}

/// φ = sinh r.
#[derive(Debug, Clone, Default)]
pub struct HyperbolicSine;

impl RadialFunction for HyperbolicSine {
    fn kind(&self) -> &'static str {
        "hyperbolic"
    }
    fn params(&self) -> Params {
        Params::new()
    }
    fn jet(&self, r: f64) -> Jet {
        let (s, c) = (r.sinh(), r.cosh());
        Jet::new(s, c, s)
    }
}

/// ψ = c·eʳ; unit speed only where c·eʳ ≤ 1.
#[derive(Debug, Clone)]
pub struct Exponential {
    pub c: f64,
}

impl RadialFunction for Exponential {
    fn kind(&self) -> &'static str {
        "exponential"
    }
    fn params(&self) -> Params {
        Params::from([("c".to_string(), self.c)])
    }
    fn jet(&self, r: f64) -> Jet {
        let v = self.c * r.exp();
        Jet::new(v, v, v)
    }
}

/// Table-defined function on a uniform grid. Derivatives at the nodes come
/// from 5-point stencils (one-sided near the ends); evaluation between
/// nodes is cubic Hermite for the value and slope, linear for ψ″.
#[derive(Debug, Clone)]
pub struct Tabulated {
    lo: f64,
    h: f64,
    values: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Tabulated {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 5 || hi <= lo {
            return Err(Error::InvalidArgument(
                "tabulated function needs at least 5 samples on a non-empty interval".into(),
            ));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let d1 = five_point_first(&values, h);
        let d2 = five_point_second(&values, h);
        Ok(Self { lo, h, values, d1, d2 })
    }

    fn cell(&self, r: f64) -> usize {
        let n = self.values.len();
        let i = ((r - self.lo) / self.h).floor();
        (i.max(0.0) as usize).min(n - 2)
    }
}

fn five_point_first(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h)
            } else if i < 2 {
                (-25.0 * v[i] + 48.0 * v[i + 1] - 36.0 * v[i + 2] + 16.0 * v[i + 3] - 3.0 * v[i + 4])
                    / (12.0 * h)
            } else {
                (25.0 * v[i] - 48.0 * v[i - 1] + 36.0 * v[i - 2] - 16.0 * v[i - 3] + 3.0 * v[i - 4])
                    / (12.0 * h)
            }
        })
        .collect()
}

fn five_point_second(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let h2 = h * h;
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / (12.0 * h2)
            } else if i < 2 {
                (35.0 * v[i] - 104.0 * v[i + 1] + 114.0 * v[i + 2] - 56.0 * v[i + 3]
                    + 11.0 * v[i + 4])
                    / (12.0 * h2)
            } else {
                (35.0 * v[i] - 104.0 * v[i - 1] + 114.0 * v[i - 2] - 56.0 * v[i - 3]
                    + 11.0 * v[i - 4])
                    / (12.0 * h2)
            }
        })
        .collect()
}

impl RadialFunction for Tabulated {
    fn kind(&self) -> &'static str {
        "tabulated"
    }
    fn params(&self) -> Params {
        Params::new()
    }
    fn jet(&self, r: f64) -> Jet {
        let i = self.cell(r);
        let x0 = self.lo + i as f64 * self.h;
        let x1 = x0 + self.h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (s0, s1) = (self.d1[i], self.d1[i + 1]);
        let t = (r - x0) / self.h;
        Jet::new(
            hermite(x0, x1, y0, y1, s0, s1, r),
            hermite_derivative(x0, x1, y0, y1, s0, s1, r),
            (1.0 - t) * self.d2[i] + t * self.d2[i + 1],
        )
    }
}

/// Built-in surface profiles: `cylinder`, `cone`, `catenoid`, `sphere`,
/// `exponential`.
pub fn profile_registry() -> Registry<Arc<dyn RadialFunction>> {
    let mut reg: Registry<Arc<dyn RadialFunction>> = Registry::new("profile");
    reg.register("cylinder", |p| {
        Ok(Arc::new(Constant { c: param(p, "c", 1.0) }))
    })
    .register("cone", |p| {
        Ok(Arc::new(Affine {
            c: param(p, "c", 1.0),
            k: param(p, "k", 0.5),
        }))
    })
    .register("catenoid", |p| {
        Ok(Arc::new(CatenoidArc { c: param(p, "c", 1.0) }))
    })
    .register("sphere", |_| Ok(Arc::new(Sine)))
    .register("exponential", |p| {
        Ok(Arc::new(Exponential { c: param(p, "c", 1.0) }))
    });
    reg
}

/// Built-in warping functions of model manifolds: `euclidean`, `sphere`,
/// `hyperbolic`.
pub fn warp_registry() -> Registry<Arc<dyn RadialFunction>> {
    let mut reg: Registry<Arc<dyn RadialFunction>> = Registry::new("model");
    reg.register("euclidean", |_| Ok(Arc::new(Identity)))
        .register("sphere", |_| Ok(Arc::new(Sine)))
        .register("hyperbolic", |_| Ok(Arc::new(HyperbolicSine)));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: &dyn RadialFunction, r: f64) {
        let d = 1e-4;
        let j = f.jet(r);
        let d1 = (f.value(r + d) - f.value(r - d)) / (2.0 * d);
        let d2 = (f.jet(r + d).d1 - f.jet(r - d).d1) / (2.0 * d);
        assert!((d1 - j.d1).abs() < 1e-7, "{}: d1 {d1} vs {}", f.kind(), j.d1);
        assert!((d2 - j.d2).abs() < 1e-7, "{}: d2 {d2} vs {}", f.kind(), j.d2);
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let fs: Vec<Box<dyn RadialFunction>> = vec![
            Box::new(Constant { c: 2.0 }),
            Box::new(Affine { c: 1.0, k: 0.3 }),
            Box::new(CatenoidArc { c: 1.0 }),
            Box::new(Sine),
            Box::new(HyperbolicSine),
            Box::new(Exponential { c: 0.5 }),
        ];
        for f in &fs {
            for r in [0.2, 0.7, 1.3] {
                fd_check(f.as_ref(), r);
            }
        }
    }

    #[test]
    fn tabulated_sine_is_accurate() {
        let n = 401;
        let (lo, hi) = (0.3, 2.5);
        let vals: Vec<f64> = (0..n)
            .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).sin())
            .collect();
        let t = Tabulated::new(lo, hi, vals).unwrap();
        for r in [0.3, 0.9123, 1.77, 2.5] {
            let j = t.jet(r);
            assert!((j.value - r.sin()).abs() < 1e-9);
            assert!((j.d1 - r.cos()).abs() < 1e-7);
            assert!((j.d2 + r.sin()).abs() < 1e-5);
        }
    }

    #[test]
    fn registries_build_by_name() {
        let p = Params::from([("c".to_string(), 2.0)]);
        let f = profile_registry().build("catenoid", &p).unwrap();
        assert_eq!(f.kind(), "catenoid");
        assert!((f.value(3.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!(warp_registry().build("torus", &Params::new()).is_err());
    }
}
