#![allow(dead_code)]

use std::sync::Arc;

use robinstab::geometry::{GeometrySpec, RadialGeometry};
use robinstab::nonlinearity::{nonlinearity_registry, Nonlinearity};
use robinstab::registry::Params;

pub fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn surface(profile: &str, kv: &[(&str, f64)], lo: f64, hi: f64) -> Arc<dyn RadialGeometry> {
    GeometrySpec::Revolution {
        profile: profile.into(),
        params: params(kv),
        interval: [lo, hi],
    }
    .build()
    .unwrap()
}

pub fn model(name: &str, dim: usize, lo: f64, hi: f64) -> Arc<dyn RadialGeometry> {
    GeometrySpec::Model {
        model: name.into(),
        dim,
        interval: [lo, hi],
    }
    .build()
    .unwrap()
}

pub fn cubic(c1: f64, c3: f64) -> Arc<dyn Nonlinearity> {
    nonlinearity_registry()
        .build("cubic", &params(&[("c1", c1), ("c3", c3)]))
        .unwrap()
}
