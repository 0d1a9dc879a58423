use crate::scalar::{from_usize, lit, Scalar};

const MAX_ITER: usize = 5000;

/// Error function.
///
/// A positive-term series is used for `|x| < 2`, the complement's continued
/// fraction beyond that.
pub fn erf<T: Scalar>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    let v = if ax < lit(2.0) {
        erf_series(ax)
    } else {
        T::one() - erfc_cf(ax)
    };
    if x < T::zero() {
        -v
    } else {
        v
    }
}

/// Complementary error function, accurate in relative terms deep into the right tail.
pub fn erfc<T: Scalar>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < lit(2.0) {
        T::one() - erf(x)
    } else {
        erfc_cf(x)
    }
}

// erf(x) = 2/√π · e^{-x²} · Σ 2ⁿ x^{2n+1} / (1·3·…·(2n+1)); every term is positive.
fn erf_series<T: Scalar>(x: T) -> T {
    let two_x2 = lit::<T>(2.0) * x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_ITER {
        term = term * two_x2 / from_usize::<T>(2 * n + 1);
        sum = sum + term;
        if term <= sum * T::epsilon() {
            break;
        }
    }
    T::FRAC_2_SQRT_PI() * (-x * x).exp() * sum
}

// Continued fraction erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))).
fn erfc_cf<T: Scalar>(x: T) -> T {
    if x > lit(27.0) && T::epsilon() < lit(1e-10) {
        // Below the smallest subnormal in f64.
        return T::zero();
    }
    let tiny = T::min_positive_value() * lit(1e10);
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for n in 1..MAX_ITER {
        let a = from_usize::<T>(n) * lit(0.5);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = d.recip();
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (-x * x).exp() * T::FRAC_2_SQRT_PI() * lit(0.5) / f
}
