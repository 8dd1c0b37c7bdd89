use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shot diverged at r = {r:.6} (|v| = {value:.3e})")]
    ShotDiverged { r: f64, value: f64 },

    #[error("eigensolver did not converge: bracket [{lo:.6e}, {hi:.6e}] after {iterations} iterations")]
    Convergence { lo: f64, hi: f64, iterations: usize },

    #[error("internal consistency violated: {0}")]
    Consistency(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no convexity window: max (psi'/psi)' = {max:.3e}")]
    NoConvexityWindow { max: f64 },

    #[error("construction failed: {inequality}: {detail}")]
    Construction { inequality: String, detail: String },

    #[error("time step {dt:.3e} exceeds stability bound {bound:.3e}")]
    Cfl { dt: f64, bound: f64 },

    #[error("unknown {kind} '{name}' (known: {known})")]
    UnknownName { kind: &'static str, name: String, known: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
