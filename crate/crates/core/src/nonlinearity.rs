//! Reaction terms `f`, their derivatives and antiderivatives.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::registry::{param, required, Params, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    ClosedForm,
    Constructed,
}

/// Algebraic family of a closed-form nonlinearity, where one is recognised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `f(u) = λ u`.
    Linear { lambda: f64 },
    /// `f(u) = −c² u + |u|^{p−1} u`.
    Power { c: f64, p: f64 },
    Other,
}

/// A reaction term `f ∈ C¹(ℝ)` with antiderivative `F`, `F(0) = 0`.
pub trait Nonlinearity: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn kind(&self) -> NonlinearityKind;
    fn f(&self, u: f64) -> f64;
    fn f_prime(&self, u: f64) -> f64;
    fn antiderivative(&self, u: f64) -> f64;

    fn family(&self) -> Family {
        Family::Other
    }
}

#[derive(Debug, Clone, Default)]
pub struct Zero;

impl Nonlinearity for Zero {
    fn name(&self) -> String {
        "zero".into()
    }
    fn kind(&self) -> NonlinearityKind {
        NonlinearityKind::ClosedForm
    }
    fn f(&self, _u: f64) -> f64 {
        0.0
    }
    fn f_prime(&self, _u: f64) -> f64 {
        0.0
    }
    fn antiderivative(&self, _u: f64) -> f64 {
        0.0
    }
    fn family(&self) -> Family {
        Family::Linear { lambda: 0.0 }
    }
}

/// `f(u) = λ u`.
#[derive(Debug, Clone)]
pub struct Linear {
    pub lambda: f64,
}

impl Nonlinearity for Linear {
    fn name(&self) -> String {
        format!("linear(lambda={})", self.lambda)
    }
    fn kind(&self) -> NonlinearityKind {
        NonlinearityKind::ClosedForm
    }
    fn f(&self, u: f64) -> f64 {
        self.lambda * u
    }
    fn f_prime(&self, _u: f64) -> f64 {
        self.lambda
    }
    fn antiderivative(&self, u: f64) -> f64 {
        0.5 * self.lambda * u * u
    }
    fn family(&self) -> Family {
        Family::Linear {
            lambda: self.lambda,
        }
    }
}

/// `f(u) = c0 + c1 u + c3 u³`.
#[derive(Debug, Clone)]
pub struct Cubic {
    pub c0: f64,
    pub c1: f64,
    pub c3: f64,
}

impl Nonlinearity for Cubic {
    fn name(&self) -> String {
        format!("cubic({} + {} u + {} u^3)", self.c0, self.c1, self.c3)
    }
    fn kind(&self) -> NonlinearityKind {
        NonlinearityKind::ClosedForm
    }
    fn f(&self, u: f64) -> f64 {
        self.c0 + u * (self.c1 + self.c3 * u * u)
    }
    fn f_prime(&self, u: f64) -> f64 {
        self.c1 + 3.0 * self.c3 * u * u
    }
    fn antiderivative(&self, u: f64) -> f64 {
        u * (self.c0 + u * (0.5 * self.c1 + 0.25 * self.c3 * u * u))
    }
    fn family(&self) -> Family {
        if self.c0 == 0.0 && self.c3 == 0.0 {
            Family::Linear { lambda: self.c1 }
        } else {
            Family::Other
        }
    }
}

/// `f(u) = −c² u + |u|^{p−1} u` with `p > 1`.
#[derive(Debug, Clone)]
pub struct Power {
    pub c: f64,
    pub p: f64,
}

impl Nonlinearity for Power {
    fn name(&self) -> String {
        format!("power(c={}, p={})", self.c, self.p)
    }
    fn kind(&self) -> NonlinearityKind {
        NonlinearityKind::ClosedForm
    }
    fn f(&self, u: f64) -> f64 {
        -self.c * self.c * u + u.abs().powf(self.p - 1.0) * u
    }
    fn f_prime(&self, u: f64) -> f64 {
        -self.c * self.c + self.p * u.abs().powf(self.p - 1.0)
    }
    fn antiderivative(&self, u: f64) -> f64 {
        -0.5 * self.c * self.c * u * u + u.abs().powf(self.p + 1.0) / (self.p + 1.0)
    }
    fn family(&self) -> Family {
        Family::Power {
            c: self.c,
            p: self.p,
        }
    }
}

/// Built-in closed-form nonlinearities: `zero`, `linear` (lambda),
/// `cubic` (c0, c1, c3), `power` (c, p).
pub fn nonlinearity_registry() -> Registry<Arc<dyn Nonlinearity>> {
    let mut reg: Registry<Arc<dyn Nonlinearity>> = Registry::new("nonlinearity");
    reg.register("zero", |_| Ok(Arc::new(Zero)))
        .register("linear", |p| {
            Ok(Arc::new(Linear {
                lambda: required(p, "lambda", "linear")?,
            }))
        })
        .register("cubic", |p| {
            Ok(Arc::new(Cubic {
                c0: param(p, "c0", 0.0),
                c1: param(p, "c1", 0.0),
                c3: param(p, "c3", 0.0),
            }))
        })
        .register("power", |p: &Params| {
            let pw = required(p, "p", "power")?;
            if pw <= 1.0 {
                return Err(Error::Config(format!("power: exponent p = {pw} must exceed 1")));
            }
            Ok(Arc::new(Power {
                c: param(p, "c", 0.0),
                p: pw,
            }))
        });
    reg
}

/// Relative agreement of `f_prime` with centered differences of `f` and of
/// `antiderivative′` with `f`, sampled on `[lo, hi]`.
pub fn consistency_defect(f: &dyn Nonlinearity, lo: f64, hi: f64, samples: usize) -> (f64, f64) {
    let d = 1e-5 * (1.0 + lo.abs().max(hi.abs()));
    let mut worst_fp: f64 = 0.0;
    let mut worst_big_f: f64 = 0.0;
    for i in 0..=samples {
        let u = lo + (hi - lo) * i as f64 / samples as f64;
        let fd = (f.f(u + d) - f.f(u - d)) / (2.0 * d);
        let scale = 1.0 + f.f_prime(u).abs();
        worst_fp = worst_fp.max((fd - f.f_prime(u)).abs() / scale);
        let big = (f.antiderivative(u + d) - f.antiderivative(u - d)) / (2.0 * d);
        worst_big_f = worst_big_f.max((big - f.f(u)).abs() / (1.0 + f.f(u).abs()));
    }
    (worst_fp, worst_big_f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_self_consistent() {
        let reg = nonlinearity_registry();
        let cases = [
            ("zero", Params::new()),
            ("linear", Params::from([("lambda".into(), 2.5)])),
            (
                "cubic",
                Params::from([("c1".into(), -2.0), ("c3".into(), 1.0), ("c0".into(), 0.3)]),
            ),
            ("power", Params::from([("c".into(), 1.5), ("p".into(), 3.0)])),
        ];
        for (name, p) in cases {
            let f = reg.build(name, &p).unwrap();
            assert_eq!(f.antiderivative(0.0), 0.0, "{name}");
            let (dfp, dbig) = consistency_defect(f.as_ref(), -2.0, 2.0, 40);
            assert!(dfp < 1e-8 && dbig < 1e-8, "{name}: {dfp} {dbig}");
        }
    }

    #[test]
    fn family_detection() {
        let c = Cubic { c0: 0.0, c1: 3.0, c3: 0.0 };
        assert_eq!(c.family(), Family::Linear { lambda: 3.0 });
        assert!(matches!(Power { c: 1.0, p: 3.0 }.family(), Family::Power { .. }));
        assert!(nonlinearity_registry().build("power", &Params::from([("p".into(), 1.0)])).is_err());
    }
}
