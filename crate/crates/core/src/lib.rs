//! Finite-velocity random motions with variable propagation speed.
//!
//! Exact laws, moment series and covariance kernels for telegraph-type
//! motions, each paired with a seeded Monte Carlo sampler.

// Negated float comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accept;
pub mod dirdep;
pub mod error;
pub mod eulergen;
pub mod geo2d;
pub mod mc;
pub mod planar;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod telegraph;
pub mod timevar;
pub mod velocitymap;

pub use error::{Error, Result};

/// Crate version, echoed into every CLI table.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
