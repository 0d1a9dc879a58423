use super::SeriesControl;
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

fn is_non_positive_integer<T: Scalar>(v: T) -> bool {
    v <= T::zero() && v == v.floor()
}

/// Generalized hypergeometric series `pFq(a; b; x)`.
///
/// Terminating series (some `a` a non-positive integer) are summed exactly
/// regardless of `p`, `q` and `x`.
pub fn gen_hypergeometric<T: Scalar>(a: &[T], b: &[T], x: T, ctl: SeriesControl<T>) -> Result<T> {
    if b.iter().any(|&v| is_non_positive_integer(v)) {
        return Err(Error::domain(
            "gen_hypergeometric",
            "lower parameter is a non-positive integer",
        ));
    }
    if !x.is_finite() {
        return Err(Error::domain("gen_hypergeometric", "argument must be finite"));
    }
    let terminating = a.iter().any(|&v| is_non_positive_integer(v));
    let (p, q) = (a.len(), b.len());
    if !terminating && (p > q + 1 || (p == q + 1 && x.abs() >= T::one())) {
        return Err(Error::domain(
            "gen_hypergeometric",
            "series diverges for these parameters",
        ));
    }

    let mut term = T::one();
    let mut sum = T::one();
    for j in 0..ctl.max_terms {
        let jt: T = from_usize(j);
        let mut ratio = x / (jt + T::one());
        for &ai in a {
            ratio = ratio * (ai + jt);
        }
        for &bi in b {
            ratio = ratio / (bi + jt);
        }
        term = term * ratio;
        sum = sum + term;
        if term == T::zero() {
            return Ok(sum);
        }
        // Only trust the stopping test once terms have started to shrink.
        if term.abs() <= ctl.rel_tol * sum.abs() && ratio.abs() < T::one() {
            return Ok(sum);
        }
    }
    Err(Error::Convergence {
        func: "gen_hypergeometric",
        terms: ctl.max_terms,
    })
}

/// Laguerre function `L_α(x) = ₁F₁(−α; 1; x)`.
pub fn laguerre<T: Scalar>(order: T, x: T) -> Result<T> {
    if order < T::zero() {
        return Err(Error::domain("laguerre", "order must be non-negative"));
    }
    gen_hypergeometric(&[-order], &[T::one()], x, SeriesControl::default())
}
