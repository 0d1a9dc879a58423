//! CDF of a product of i.i.d. Gamma-Gamma variates.
//!
//! Works on the log-gain `u = ln x`, where the density `g(u) = e^u f(e^u)` is a
//! smooth unimodal bump with exponential tails. A product of `n` variates is a
//! sum of `n` log-gains, so its density is an `n`-fold convolution of `g`.
//! Convolutions use the trapezoid rule on a uniform grid, which is spectrally
//! accurate for integrands of this kind; the outer CDF integral uses a
//! cumulative Kronrod table of the single-variate CDF.

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_panels, kronrod15, QuadControl};
use crate::scalar::{from_usize, lit, Scalar};

use super::bessel::log_bessel_k;
use super::gamma::ln_gamma;

/// Largest product order accepted by [`gg_product_cdf`].
pub const GG_MAX_ORDER: usize = 6;

// Drop the density once it is this many nats below its peak.
const TAIL_NATS: f64 = 75.0;

/// Natural log of the unit-mean Gamma-Gamma density at `x > 0`.
pub fn gamma_gamma_log_pdf<T: Scalar>(a: T, b: T, x: T) -> Result<T> {
    let two: T = lit(2.0);
    let half_sum = (a + b) / two;
    let ab = a * b;
    let bessel = log_bessel_k(a - b, two * (ab * x).sqrt())?;
    Ok(two.ln() + half_sum * ab.ln() - ln_gamma(a) - ln_gamma(b) + (half_sum - T::one()) * x.ln() + bessel)
}

fn check_shape<T: Scalar>(a: T, b: T) -> Result<()> {
    if !(a > T::zero() && b > T::zero() && a.is_finite() && b.is_finite()) {
        return Err(Error::domain(
            "gg_product_cdf",
            "shaping parameters must be positive and finite",
        ));
    }
    Ok(())
}

/// Density of `ln X` for a unit-mean Gamma-Gamma `X`.
#[derive(Debug, Clone, Copy)]
struct LogGainDensity<T> {
    a: T,
    b: T,
}

impl<T: Scalar> LogGainDensity<T> {
    fn ln_density(&self, u: T) -> T {
        match gamma_gamma_log_pdf(self.a, self.b, u.exp()) {
            Ok(v) => u + v,
            Err(_) => T::neg_infinity(),
        }
    }

    fn density(&self, u: T) -> T {
        self.ln_density(u).exp()
    }

    /// Interval outside of which the density is below `e^{-TAIL_NATS}` of its peak.
    fn support(&self) -> (T, T) {
        let step: T = lit(0.1);
        let mut best_u = lit::<T>(-60.0);
        let mut best = self.ln_density(best_u);
        let mut u = best_u;
        while u < lit(20.0) {
            u = u + step;
            let v = self.ln_density(u);
            if v > best {
                best = v;
                best_u = u;
            }
        }
        let floor = best - lit(TAIL_NATS);
        let stride: T = lit(0.25);
        let mut lo = best_u;
        for _ in 0..100_000 {
            if self.ln_density(lo) < floor {
                break;
            }
            lo = lo - stride;
        }
        let mut hi = best_u;
        for _ in 0..100_000 {
            if self.ln_density(hi) < floor {
                break;
            }
            hi = hi + stride;
        }
        (lo, hi)
    }
}

/// Precomputed distribution of the product of `n` i.i.d. Gamma-Gamma(a, b) variates.
///
/// Building it costs one convolution chain; [`cdf`](Self::cdf) is then cheap.
#[derive(Debug, Clone)]
pub struct GgProduct<T> {
    density: LogGainDensity<T>,
    n: usize,
    lo: T,
    hi: T,
    step: T,
    // Density of the sum of n-1 log-gains on the grid (n-1)·lo + i·step.
    partial: Vec<T>,
}

impl<T: Scalar> GgProduct<T> {
    pub fn new(a: T, b: T, n: usize) -> Result<Self> {
        check_shape(a, b)?;
        if n == 0 {
            return Err(Error::domain("gg_product_cdf", "order must be at least 1"));
        }
        if n > GG_MAX_ORDER {
            return Err(Error::UnsupportedOrder { n, max: GG_MAX_ORDER });
        }
        let density = LogGainDensity { a, b };
        let (lo, hi) = density.support();
        // Resolve the bump width: sd of ln X is about sqrt(1/a + 1/b) for large shapes.
        let sd = (a.recip() + b.recip()).sqrt();
        let step = lit::<T>(0.02).min(sd * lit(0.05));
        let points = ((hi - lo) / step).ceil().to_usize().unwrap_or(0) + 1;
        let base: Vec<T> = (0..points)
            .map(|j| density.density(lo + step * from_usize(j)))
            .collect();

        let mut partial = vec![T::one()];
        if n >= 2 {
            partial = base.clone();
            for _ in 2..n {
                partial = convolve(&partial, &base, step);
            }
        }
        Ok(GgProduct {
            density,
            n,
            lo,
            hi,
            step,
            partial,
        })
    }

    /// `P(X₁⋯X_n ≤ x)`.
    pub fn cdf(&self, x: T) -> Result<T> {
        if x.is_nan() || x < T::zero() {
            return Err(Error::domain("gg_product_cdf", "argument must be non-negative"));
        }
        if x == T::zero() {
            return Ok(T::zero());
        }
        if x.is_infinite() {
            return Ok(T::one());
        }
        let y = x.ln();
        if self.n == 1 {
            return self.single_cdf(y);
        }
        // F_n(y) = ∫ f_{n-1}(v) F_1(y - v) dv on the grid v_i = (n-1)·lo + i·step.
        let origin = self.lo * from_usize(self.n - 1);
        let len = self.partial.len();
        // t_i = y - v_i decreases with i; walk i downward so t increases.
        let mut table = vec![T::zero(); len];
        let mut running: Option<(T, T)> = None; // (t, F_1(t))
        for i in (0..len).rev() {
            let t = y - origin - self.step * from_usize(i);
            let value = if t <= self.lo {
                T::zero()
            } else if t >= self.hi {
                T::one()
            } else {
                let v = match running {
                    Some((t_prev, f_prev)) if t_prev >= self.lo => {
                        f_prev + kronrod15(|u| self.density.density(u), t_prev, t)
                    }
                    _ => self.single_cdf(t)?,
                };
                running = Some((t, v));
                v
            };
            table[i] = value.min(T::one());
        }
        let mut acc = T::zero();
        for (f, c) in self.partial.iter().zip(table.iter()) {
            acc = acc + *f * *c;
        }
        Ok((acc * self.step).max(T::zero()).min(T::one()))
    }

    // Single-variate CDF at log-argument y by adaptive quadrature from the nearer tail.
    fn single_cdf(&self, y: T) -> Result<T> {
        let ctl = QuadControl::with_rel_tol(lit(1e-11));
        let shape_min = self.density.a.min(self.density.b);
        if y <= self.lo - lit::<T>(TAIL_NATS) / shape_min {
            return Ok(T::zero());
        }
        if y >= self.hi {
            return Ok(T::one());
        }
        let mid = lit::<T>(0.5) * (self.lo + self.hi);
        if y <= mid {
            let start = self.lo.min(y - lit::<T>(80.0) / shape_min);
            Ok(integrate(|u| self.density.density(u), start, y, ctl)?
                .value
                .min(T::one()))
        } else {
            let upper = integrate(|u| self.density.density(u), y, self.hi, ctl)?.value;
            Ok((T::one() - upper).max(T::zero()))
        }
    }
}

fn convolve<T: Scalar>(f: &[T], g: &[T], step: T) -> Vec<T> {
    let mut out = vec![T::zero(); f.len() + g.len() - 1];
    for (i, &fi) in f.iter().enumerate() {
        if fi == T::zero() {
            continue;
        }
        for (j, &gj) in g.iter().enumerate() {
            out[i + j] = out[i + j] + fi * gj;
        }
    }
    for v in out.iter_mut() {
        *v = *v * step;
    }
    out
}

/// `E[h(X)]` for a unit-mean Gamma-Gamma `X`, by adaptive quadrature over the log-gain.
pub fn gamma_gamma_expectation<T: Scalar, F: FnMut(T) -> T>(a: T, b: T, mut h: F, ctl: QuadControl<T>) -> Result<T> {
    check_shape(a, b)?;
    let density = LogGainDensity { a, b };
    let (lo, hi) = density.support();
    let panels = 16;
    let pts: Vec<T> = (0..=panels)
        .map(|i| lo + (hi - lo) * from_usize::<T>(i) / from_usize::<T>(panels))
        .collect();
    Ok(integrate_panels(|u: T| h(u.exp()) * density.density(u), &pts, ctl)?.value)
}

/// CDF at `x` of the product of `n` i.i.d. unit-mean Gamma-Gamma(a, b) variates, `1 ≤ n ≤ 6`.
pub fn gg_product_cdf<T: Scalar>(a: T, b: T, n: usize, x: T) -> Result<T> {
    GgProduct::new(a, b, n)?.cdf(x)
}
