//! Name-keyed registries of strategy factories.
//!
//! Every interchangeable family in the crate (profiles, warping functions,
//! nonlinearities, stability criteria, time steppers) is exposed through a
//! [`Registry`] so that configuration files can select implementations by
//! name.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Numeric parameters handed to a factory, keyed by name.
pub type Params = BTreeMap<String, f64>;

/// Reads `key` from `params`, falling back to `default`.
pub fn param(params: &Params, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

/// Reads a required parameter.
pub fn required(params: &Params, key: &str, owner: &str) -> Result<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| Error::Config(format!("{owner}: missing parameter '{key}'")))
}

type Factory<T> = Box<dyn Fn(&Params) -> Result<T> + Send + Sync>;

pub struct Registry<T> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Factory<T>>,
}

impl<T> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn register<F>(&mut self, name: &'static str, factory: F) -> &mut Self
    where
        F: Fn(&Params) -> Result<T> + Send + Sync + 'static,
    {
        self.entries.insert(name, Box::new(factory));
        self
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn build(&self, name: &str, params: &Params) -> Result<T> {
        let factory = self.entries.get(name).ok_or_else(|| Error::UnknownName {
            kind: self.kind,
            name: name.to_string(),
            known: self.names().join(", "),
        })?;
        factory(params)
    }
}

impl<T> std::fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("entries", &self.names())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_names_list_alternatives() {
        let mut reg: Registry<f64> = Registry::new("widget");
        reg.register("double", |p| Ok(2.0 * param(p, "x", 1.0)));
        let mut p = Params::new();
        p.insert("x".into(), 4.0);
        assert_eq!(reg.build("double", &p).unwrap(), 8.0);
        let err = reg.build("triple", &p).unwrap_err().to_string();
        assert!(err.contains("double"));
    }
}
