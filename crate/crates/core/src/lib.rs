//! Optimal relational incentive contracts for a team of workers with normally
//! distributed performance, with and without a monitoring manager.
//!
//! * [`numerics`]: normal special functions, quadrature and root finding.
//! * [`contracts`]: solvers for the four management structures.
//! * [`oracle`]: quadrature and Monte-Carlo cross-checks of the solutions.
//! * [`chooser`]: sweeps, best-structure maps and crossover points.

pub mod chooser;
pub mod contracts;
pub mod error;
pub mod numerics;
pub mod oracle;
mod serde_inf;

pub use error::{Error, Result};
