use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Scalar};

use super::gamma::ln_gamma;

const MAX_ITER: usize = 100_000;
const RESCALE: f64 = 1e250;

/// `ln I_ν(x)` for `ν ≥ 0`, `x ≥ 0`; finite wherever `I_ν(x)` itself would overflow.
pub fn log_bessel_i<T: Scalar>(order: T, x: T) -> Result<T> {
    if order < T::zero() || x < T::zero() || order.is_nan() || x.is_nan() {
        return Err(Error::domain("bessel_i", "order and argument must be non-negative"));
    }
    if x == T::zero() {
        return Ok(if order == T::zero() {
            T::zero()
        } else {
            T::neg_infinity()
        });
    }
    if x > lit(30.0) && order * order < x * lit(0.5) {
        return Ok(log_bessel_i_asymptotic(order, x));
    }
    // (x/2)^ν / Γ(ν+1) · Σ_k (x²/4)^k / (k! (ν+1)_k)
    let lead = order * (x * lit(0.5)).ln() - ln_gamma(order + T::one());
    let q = x * x * lit(0.25);
    let big: T = lit(RESCALE);
    let mut log_scale = T::zero();
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..MAX_ITER {
        let kt: T = from_usize(k);
        let ratio = q / (kt * (order + kt));
        term = term * ratio;
        sum = sum + term;
        if sum > big {
            sum = sum / big;
            term = term / big;
            log_scale = log_scale + big.ln();
        }
        if ratio < T::one() && term <= sum * T::epsilon() {
            return Ok(lead + sum.ln() + log_scale);
        }
    }
    Err(Error::Convergence {
        func: "bessel_i",
        terms: MAX_ITER,
    })
}

// Hankel expansion e^x/√(2πx) Σ (-1)^k Π(4ν² - (2j-1)²) / (k! (8x)^k), truncated at its smallest term.
fn log_bessel_i_asymptotic<T: Scalar>(order: T, x: T) -> T {
    let mu = lit::<T>(4.0) * order * order;
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..200 {
        let kt: T = from_usize(k);
        let odd = lit::<T>(2.0) * kt - T::one();
        let next = -term * (mu - odd * odd) / (kt * lit(8.0) * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum = sum + term;
        if term.abs() <= sum.abs() * T::epsilon() {
            break;
        }
    }
    x - lit::<T>(0.5) * (lit::<T>(2.0) * T::PI() * x).ln() + sum.ln()
}

/// Modified Bessel function of the first kind `I_ν(x)`.
pub fn bessel_i<T: Scalar>(order: T, x: T) -> Result<T> {
    log_bessel_i(order, x).map(T::exp)
}

// Taylor coefficients of 1/Γ(1+z) about z = 0.
const RGAMMA_TAYLOR: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

// (gam1, gam2, 1/Γ(1+μ), 1/Γ(1-μ)) for |μ| ≤ 1/2, as needed by Temme's series.
fn temme_gammas<T: Scalar>(mu: T) -> (T, T, T, T) {
    let mut gam1 = T::zero();
    let mut gam2 = T::zero();
    let mut even_pow = T::one(); // μ^k for the most recent even k
    for (k, &d) in RGAMMA_TAYLOR.iter().enumerate() {
        let d: T = lit(d);
        if k % 2 == 0 {
            if k > 0 {
                even_pow = even_pow * mu * mu;
            }
            gam2 = gam2 + d * even_pow;
        } else {
            gam1 = gam1 - d * even_pow;
        }
    }
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

// Returns (ln scale, e^x K_ν(x) / e^{ln scale}) so large orders do not overflow.
fn scaled_bessel_k<T: Scalar>(order: T, x: T) -> Result<(T, T)> {
    let nu = order.abs();
    let nl = (nu + lit(0.5)).floor().to_usize().unwrap_or(0);
    let xmu = nu - from_usize(nl);
    let xmu2 = xmu * xmu;
    let xi = x.recip();
    let xi2 = lit::<T>(2.0) * xi;
    let eps = T::epsilon();
    let (mut kmu, mut k1);
    if x < lit(2.0) {
        let x2 = lit::<T>(0.5) * x;
        let pimu = T::PI() * xmu;
        let fact = if pimu.abs() < eps { T::one() } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < eps { T::one() } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = lit::<T>(0.5) * ee / gampl;
        let mut q = lit::<T>(0.5) / (ee * gammi);
        let mut c = T::one();
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAX_ITER {
            let it: T = from_usize(i);
            ff = (it * ff + p + q) / (it * it - xmu2);
            c = c * dd / it;
            p = p / (it - xmu);
            q = q / (it + xmu);
            let del = c * ff;
            sum = sum + del;
            sum1 = sum1 + c * (p - it * ff);
            if del.abs() < sum.abs() * eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                func: "bessel_k",
                terms: MAX_ITER,
            });
        }
        let ex = x.exp();
        kmu = sum * ex;
        k1 = sum1 * xi2 * ex;
    } else {
        // Steed's continued fraction CF2 with Thompson–Barnett summation.
        let mut b = lit::<T>(2.0) * (T::one() + x);
        let mut d = b.recip();
        let mut h = d;
        let mut delh = d;
        let mut q1 = T::zero();
        let mut q2 = T::one();
        let a1 = lit::<T>(0.25) - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = T::one() + q * delh;
        let mut converged = false;
        for i in 2..MAX_ITER {
            let it: T = from_usize(i);
            a = a - lit::<T>(2.0) * (it - T::one());
            c = -a * c / it;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q = q + c * qnew;
            b = b + lit(2.0);
            d = (b + a * d).recip();
            delh = (b * d - T::one()) * delh;
            h = h + delh;
            let dels = q * delh;
            s = s + dels;
            if (dels / s).abs() < eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                func: "bessel_k",
                terms: MAX_ITER,
            });
        }
        h = a1 * h;
        kmu = (T::PI() / (lit::<T>(2.0) * x)).sqrt() / s;
        k1 = kmu * (xmu + x + lit(0.5) - h) * xi;
    }
    let big: T = lit(RESCALE);
    let mut log_scale = T::zero();
    for i in 1..=nl {
        let next = (xmu + from_usize(i)) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
        if k1 > big {
            kmu = kmu / big;
            k1 = k1 / big;
            log_scale = log_scale + big.ln();
        }
    }
    Ok((log_scale, kmu))
}

/// `ln K_ν(x)` for `x > 0`.
pub fn log_bessel_k<T: Scalar>(order: T, x: T) -> Result<T> {
    if !(x > T::zero()) || !order.is_finite() {
        return Err(Error::domain("bessel_k", "argument must be positive"));
    }
    if x.is_infinite() {
        return Ok(T::neg_infinity());
    }
    let (log_scale, v) = scaled_bessel_k(order, x)?;
    Ok(v.ln() + log_scale - x)
}

/// Modified Bessel function of the second kind `K_ν(x)`, `x > 0`; `K_{-ν} = K_ν`.
pub fn bessel_k<T: Scalar>(order: T, x: T) -> Result<T> {
    log_bessel_k(order, x).map(T::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_to_infinity, QuadControl};

    fn k_quadrature(nu: f64, x: f64) -> f64 {
        integrate_to_infinity(
            |t: f64| (-x * t.cosh()).exp() * (nu * t).cosh(),
            0.0,
            QuadControl::default(),
        )
        .unwrap()
        .value
    }

    fn i_series(nu: f64, x: f64, terms: usize) -> f64 {
        let mut s = 0.0;
        for k in 0..terms {
            let k = k as f64;
            s += ((2.0 * k + nu) * (x / 2.0).ln() - ln_gamma(k + 1.0) - ln_gamma(k + nu + 1.0)).exp();
        }
        s
    }

    #[test]
    fn bessel_i_examples() {
        assert_eq!(bessel_i(0.0f64, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1.0f64, 0.0).unwrap(), 0.0);
        let oracle = i_series(0.0, 2.0, 50);
        assert!((bessel_i(0.0f64, 2.0).unwrap() - oracle).abs() < 1e-13);
        assert!((oracle - 2.279_585_302_336_067).abs() < 1e-13);
        assert!(bessel_i(-1.0f64, 1.0).is_err());
    }

    #[test]
    fn asymptotic_branch_matches_series() {
        for &(nu, x) in &[(0.0, 31.0), (2.0, 40.0), (3.5, 60.0), (0.0, 200.0)] {
            let a = log_bessel_i_asymptotic(nu, x);
            let s = i_series(nu, x, 400).ln();
            assert!((a - s).abs() < 1e-13 * s.abs().max(1.0), "nu={nu} x={x}");
        }
    }

    #[test]
    fn log_form_survives_overflow() {
        let v = log_bessel_i(0.0f64, 2000.0).unwrap();
        let expect = 2000.0 - 0.5 * (2.0 * std::f64::consts::PI * 2000.0).ln()
            + (1.0 + 1.0 / 16000.0 + 9.0 / (2.0 * 16000.0f64.powi(2))).ln();
        assert!((v - expect).abs() < 1e-9);
        let v = log_bessel_i(400.0f64, 2000.0).unwrap();
        assert!(v.is_finite() && v > 1500.0);
    }

    #[test]
    fn recurrence_holds() {
        for nu in 1..=10 {
            let nu = nu as f64;
            for &x in &[0.5, 2.0, 10.0] {
                let lhs = bessel_i(nu - 1.0, x).unwrap() - bessel_i(nu + 1.0, x).unwrap();
                let rhs = 2.0 * nu / x * bessel_i(nu, x).unwrap();
                assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs(), "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn bessel_k_examples() {
        let half = (std::f64::consts::PI / 2.0).sqrt() * (-1.0f64).exp();
        assert!((bessel_k(0.5f64, 1.0).unwrap() - half).abs() < 1e-15);
        assert!((bessel_k(-0.5f64, 1.0).unwrap() - half).abs() < 1e-15);
        for &(nu, x) in &[
            (1.8303, 3.0),
            (1.8303, 0.1),
            (0.0, 1.0),
            (1.0, 1.0),
            (2.7, 1.999),
            (2.7, 2.0),
            (0.3, 25.0),
        ] {
            let oracle = k_quadrature(nu, x);
            let v = bessel_k(nu, x).unwrap();
            assert!((v - oracle).abs() <= 1e-11 * oracle, "nu={nu} x={x}: {v} vs {oracle}");
        }
        assert!(bessel_k(1.0f64, 0.0).is_err());
        assert!(bessel_k(1.0f64, -1.0).is_err());
    }

    #[test]
    fn large_order_k_in_log_form() {
        // K_ν(x) ~ ½ Γ(ν) (x/2)^{-ν} for x → 0.
        let v = log_bessel_k(120.0f64, 1e-3).unwrap();
        let approx = (0.5f64).ln() + ln_gamma(120.0) - 120.0 * (5e-4f64).ln();
        assert!((v - approx).abs() < 1e-6);
    }

    #[test]
    fn single_precision() {
        let v = bessel_k(0.5f32, 1.0).unwrap();
        assert!((v - 0.461_068_5).abs() < 1e-5);
        let v = bessel_i(0.0f32, 2.0).unwrap();
        assert!((v - 2.279_585_3).abs() < 1e-5);
    }
}
