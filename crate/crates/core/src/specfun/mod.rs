//! Real-valued special functions used by the analytical evaluators.
//!
//! Everything here is pure and double-precision oriented, but generic over
//! [`Scalar`](crate::Scalar) so the same kernels run in `f32`.

mod bessel;
mod erf;
mod gamma;
mod gg_product;
mod hypergeometric;

pub use bessel::{bessel_i, bessel_k, log_bessel_i, log_bessel_k};
pub use erf::{erf, erfc};
pub use gamma::{e1_scaled, expint_e1, expint_ei, gamma, ln_gamma, regularized_gamma_p, upper_incomplete_gamma};
pub use gg_product::{gamma_gamma_expectation, gamma_gamma_log_pdf, gg_product_cdf, GgProduct, GG_MAX_ORDER};
pub use hypergeometric::{gen_hypergeometric, laguerre};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Truncation control for the power-series kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl<T> {
    /// Stop once a term contributes less than this fraction of the running sum.
    pub rel_tol: T,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
}

impl<T: Scalar> SeriesControl<T> {
    pub fn new(rel_tol: T, max_terms: usize) -> Result<Self> {
        if !(rel_tol > T::zero() && rel_tol <= lit(1e-6)) {
            return Err(Error::invalid("rel_tol", "must lie in (0, 1e-6]"));
        }
        if max_terms < 100 {
            return Err(Error::invalid("max_terms", "must be at least 100"));
        }
        Ok(SeriesControl { rel_tol, max_terms })
    }
}

impl<T: Scalar> Default for SeriesControl<T> {
    fn default() -> Self {
        SeriesControl {
            rel_tol: lit::<T>(1e-12).max(T::tol_floor()),
            max_terms: 10_000,
        }
    }
}
