//! Stability of radial stationary solutions of `Δu + f(u) = 0` under Robin
//! boundary conditions on surfaces of revolution, model manifolds and
//! planar annuli, together with a constructive synthesis of stable
//! patterns.

pub mod criteria;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod interp;
pub mod io;
pub mod nonlinearity;
pub mod pattern;
pub mod quadrature;
pub mod registry;
pub mod spectrum;
pub mod stationary;
pub mod tridiag;

pub use error::{Error, Result};
