//! TOML run configuration shared by all commands.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use robinstab::geometry::GeometrySpec;
use robinstab::registry::Params;
use robinstab::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySpec,
    pub nonlinearity: NonlinearitySpec,
    /// Robin coefficient; taken from the artifact for constructed terms.
    pub alpha: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Output directory, overridden by `--out`.
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub stationary: StationaryConfig,
    #[serde(default)]
    pub eigen: EigenConfig,
    #[serde(default)]
    pub pattern: PatternConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySpec {
    /// Registry name, or `constructed` together with `artifact`.
    pub name: String,
    #[serde(default)]
    pub params: Params,
    pub artifact: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StationaryConfig {
    pub c_min: f64,
    pub c_max: f64,
    pub n_scan: usize,
    pub n: usize,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        Self {
            c_min: -3.0,
            c_max: 3.0,
            n_scan: 401,
            n: 2000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigenConfig {
    /// Base grid; Richardson extrapolation also uses `2n`. Constructed
    /// patterns default to their own grid.
    pub n: Option<usize>,
    pub k_max: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self { n: None, k_max: 4 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PatternConfig {
    pub beta: f64,
    pub n: usize,
    pub l: Option<u32>,
    pub b: Option<f64>,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    /// `[R0, R3]`; located automatically when absent.
    pub window: Option<[f64; 2]>,
    pub k_max: usize,
}

impl Default for PatternConfig {
    fn default() -> Self {
        Self {
            beta: 1.0,
            n: 4000,
            l: None,
            b: None,
            m1: None,
            m2: None,
            window: None,
            k_max: 4,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub n: usize,
    pub t_final: f64,
    pub dt: Option<f64>,
    pub stepper: String,
    pub samples: usize,
    pub epsilon: f64,
    /// `principal`, `random` or `none`.
    pub perturbation: String,
    pub mode_k: usize,
    /// Angular nodes; `0` runs the radial problem.
    pub n_theta: usize,
    /// Index of the stationary solution (sorted by `v(lo)`).
    pub solution: usize,
    pub tol_rate: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            n: 200,
            t_final: 5.0,
            dt: None,
            stepper: "euler".into(),
            samples: 200,
            epsilon: 1e-4,
            perturbation: "principal".into(),
            mode_k: 0,
            n_theta: 0,
            solution: 0,
            tol_rate: 1e-4,
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {x}")))
    }
}

fn at_least(name: &str, x: usize, min: usize) -> Result<()> {
    if x >= min {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be at least {min}, got {x}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base = base.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base)
    }

    pub fn is_constructed(&self) -> bool {
        self.nonlinearity.name == "constructed"
    }

    pub fn artifact_path(&self) -> Option<PathBuf> {
        self.nonlinearity.artifact.as_ref().map(|p| self.base.join(p))
    }

    fn validate(&self) -> Result<()> {
        if self.is_constructed() {
            match self.artifact_path() {
                Some(p) if p.is_file() => {}
                Some(p) => return Err(Error::Config(format!("artifact {} does not exist", p.display()))),
                None => return Err(Error::Config("constructed nonlinearity needs 'artifact'".into())),
            }
            if self.alpha.is_some() {
                return Err(Error::Config("alpha comes from the artifact for constructed nonlinearities".into()));
            }
        } else if let Some(a) = self.alpha {
            if !a.is_finite() {
                return Err(Error::Config(format!("alpha must be finite, got {a}")));
            }
        }
        let s = &self.stationary;
        if !(s.c_min < s.c_max) {
            return Err(Error::Config("stationary.c_min must be below c_max".into()));
        }
        at_least("stationary.n_scan", s.n_scan, 2)?;
        at_least("stationary.n", s.n, 16)?;
        if let Some(n) = self.eigen.n {
            at_least("eigen.n", n, 32)?;
        }
        at_least("eigen.k_max", self.eigen.k_max, 1)?;
        let p = &self.pattern;
        positive("pattern.beta", p.beta)?;
        at_least("pattern.n", p.n, 64)?;
        at_least("pattern.k_max", p.k_max, 1)?;
        if let Some(b) = p.b {
            positive("pattern.b", b)?;
        }
        if let Some(l) = p.l {
            if l % 2 == 0 {
                return Err(Error::Config(format!("pattern.l must be odd, got {l}")));
            }
        }
        let m = &self.simulate;
        at_least("simulate.n", m.n, 32)?;
        positive("simulate.t_final", m.t_final)?;
        if let Some(dt) = m.dt {
            positive("simulate.dt", dt)?;
        }
        at_least("simulate.samples", m.samples, 1)?;
        if !(m.epsilon >= 0.0) {
            return Err(Error::Config("simulate.epsilon must be nonnegative".into()));
        }
        if !["principal", "random", "none"].contains(&m.perturbation.as_str()) {
            return Err(Error::Config(format!(
                "simulate.perturbation must be principal, random or none, got '{}'",
                m.perturbation
            )));
        }
        if m.n_theta != 0 && m.n_theta < 3 {
            return Err(Error::Config("simulate.n_theta must be 0 or at least 3".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
alpha = 0.5
[geometry]
class = "revolution"
profile = "cylinder"
interval = [0.0, 2.0]
[nonlinearity]
name = "cubic"
params = { c1 = -2.0, c3 = 1.0 }
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = RunConfig::from_toml(BASIC, Path::new(".")).unwrap();
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.simulate.stepper, "euler");
        assert_eq!(cfg.pattern.n, 4000);
        assert_eq!(cfg.nonlinearity.params["c1"], -2.0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_numbers() {
        let bad = format!("{BASIC}\n[simulate]\nt_final = -1.0\n");
        assert!(matches!(RunConfig::from_toml(&bad, Path::new(".")), Err(Error::Config(_))));
        let typo = BASIC.replace("alpha", "alpah");
        assert!(RunConfig::from_toml(&typo, Path::new(".")).is_err());
    }

    #[test]
    fn constructed_needs_an_existing_artifact() {
        let text = BASIC
            .replace("alpha = 0.5\n", "")
            .replace("name = \"cubic\"", "name = \"constructed\"\nartifact = \"missing.json\"");
        let e = RunConfig::from_toml(&text, Path::new("/nonexistent")).unwrap_err();
        assert!(e.to_string().contains("does not exist"));
    }
}
