//! Special functions of the normal distribution, adaptive quadrature and
//! bracketed root finding shared by every solver.

mod quadrature;
mod roots;
mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use quadrature::integrate;
pub use roots::{bisect, find_root_bracketed, golden_section_min, largest_root, smallest_root};
pub use special::{
    compute_p_n, compute_rho_n, erfc, integral_erfc_pow, inv_erfc, normal_cdf, normal_pdf,
    normal_quantile, p_n_definitional, tournament_constant,
};

/// Tolerances for the quadrature-backed special functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialFnConfig {
    pub quadrature_abs_tol: f64,
    /// Standardised z beyond which the normal tail is treated as exhausted.
    pub tail_truncation: f64,
    pub max_subdivisions: usize,
}

impl Default for SpecialFnConfig {
    fn default() -> Self {
        Self { quadrature_abs_tol: 1e-10, tail_truncation: 12.0, max_subdivisions: 2000 }
    }
}

impl SpecialFnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.quadrature_abs_tol > 0.0) {
            return Err(Error::InvalidArgument("quadrature_abs_tol must be positive".into()));
        }
        if !(self.tail_truncation >= 8.0) {
            return Err(Error::InvalidArgument("tail_truncation must be at least 8".into()));
        }
        if self.max_subdivisions < 64 {
            return Err(Error::InvalidArgument("max_subdivisions must be at least 64".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootFindConfig {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootFindConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-10, max_iter: 200 }
    }
}

impl RootFindConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument("abs_tol must be positive".into()));
        }
        if self.max_iter < 16 {
            return Err(Error::InvalidArgument("max_iter must be at least 16".into()));
        }
        Ok(())
    }
}
