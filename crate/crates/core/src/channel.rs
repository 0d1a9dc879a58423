//! Fading models for the RF (Rician MISO) and FSO (exponential, Gamma-Gamma) hops.
//!
//! Densities are generic over [`Scalar`]; samplers draw `f64` from a
//! [`RngStream`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::analysis::GaussianApprox;
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadControl};
use crate::scalar::{from_usize, lit, Scalar};
use crate::specfun::{gamma_gamma_log_pdf, laguerre, ln_gamma, log_bessel_i};

/// Rician fading seen by each of `antennas` transmit antennas of an RF hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianFading<T> {
    k: T,
    omega: T,
    antennas: usize,
}

impl<T: Scalar> RicianFading<T> {
    pub fn new(k: T, omega: T, antennas: usize) -> Result<Self> {
        if !(k >= T::zero() && k.is_finite()) {
            return Err(Error::invalid("K", "Rician factor must be finite and non-negative"));
        }
        if !(omega > T::zero() && omega.is_finite()) {
            return Err(Error::invalid("omega", "mean gain must be finite and positive"));
        }
        if antennas == 0 {
            return Err(Error::invalid("N", "at least one antenna is required"));
        }
        Ok(RicianFading { k, omega, antennas })
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    /// Same fading with a different antenna count.
    pub fn with_antennas(&self, antennas: usize) -> Result<Self> {
        Self::new(self.k, self.omega, antennas)
    }
}

/// Exponentially distributed FSO gain with rate `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoExponential<T> {
    lambda: T,
}

impl<T: Scalar> FsoExponential<T> {
    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::invalid("lambda", "rate must be finite and positive"));
        }
        Ok(FsoExponential { lambda })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }
}

/// Unit-mean Gamma-Gamma FSO gain with shaping parameters `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoGammaGamma<T> {
    a: T,
    b: T,
}

impl<T: Scalar> FsoGammaGamma<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a > T::zero() && a.is_finite()) {
            return Err(Error::invalid("a", "shaping parameter must be finite and positive"));
        }
        if !(b > T::zero() && b.is_finite()) {
            return Err(Error::invalid("b", "shaping parameter must be finite and positive"));
        }
        Ok(FsoGammaGamma { a, b })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }
}

/// Turbulence model of an FSO hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FsoModel<T> {
    Exponential(FsoExponential<T>),
    GammaGamma(FsoGammaGamma<T>),
}

impl<T> From<FsoExponential<T>> for FsoModel<T> {
    fn from(m: FsoExponential<T>) -> Self {
        FsoModel::Exponential(m)
    }
}

impl<T> From<FsoGammaGamma<T>> for FsoModel<T> {
    fn from(m: FsoGammaGamma<T>) -> Self {
        FsoModel::GammaGamma(m)
    }
}

/// Density of the single-antenna gain `|h|²`.
pub fn rician_gain_pdf<T: Scalar>(x: T, f: &RicianFading<T>) -> T {
    if x < T::zero() {
        return T::zero();
    }
    let (k, omega) = (f.k, f.omega);
    let kp1 = k + T::one();
    let arg = lit::<T>(2.0) * (k * kp1 * x / omega).sqrt();
    let log_i0 = log_bessel_i(T::zero(), arg).unwrap_or(T::nan());
    (kp1.ln() - k - omega.ln() - kp1 * x / omega + log_i0).exp()
}

/// Natural log of the density of the sum gain `G = Σ_j |h_j|²` over the hop's antennas.
pub fn rician_sum_log_pdf<T: Scalar>(x: T, f: &RicianFading<T>) -> T {
    let (k, omega) = (f.k, f.omega);
    let n: T = from_usize(f.antennas);
    if x < T::zero() {
        return T::neg_infinity();
    }
    if x == T::zero() {
        return if f.antennas == 1 {
            (k + T::one()).ln() - k - omega.ln()
        } else {
            T::neg_infinity()
        };
    }
    let kp1 = k + T::one();
    if k == T::zero() {
        // Erlang(N, Ω).
        return (n - T::one()) * x.ln() - x / omega - n * omega.ln() - ln_gamma(n);
    }
    let order = n - T::one();
    let arg = lit::<T>(2.0) * (k * kp1 * n * x / omega).sqrt();
    let log_i = match log_bessel_i(order, arg) {
        Ok(v) => v,
        Err(_) => return T::nan(),
    };
    kp1.ln() - k * n - omega.ln() + order * lit(0.5) * (kp1 * x / (k * n * omega)).ln() - kp1 * x / omega + log_i
}

/// Density of the sum gain `G = Σ_j |h_j|²` (modified-Bessel form, evaluated in log space).
pub fn rician_sum_pdf<T: Scalar>(x: T, f: &RicianFading<T>) -> T {
    rician_sum_log_pdf(x, f).exp()
}

/// Sum-gain density through its ₀F₁ representation; agrees with [`rician_sum_pdf`]
/// but overflows for large arguments.
pub fn rician_sum_pdf_hypergeometric<T: Scalar>(x: T, f: &RicianFading<T>) -> Result<T> {
    if x < T::zero() {
        return Ok(T::zero());
    }
    let (k, omega) = (f.k, f.omega);
    let n: T = from_usize(f.antennas);
    let kp1 = k + T::one();
    let series = crate::specfun::gen_hypergeometric(&[], &[n], k * kp1 * n * x / omega, Default::default())?;
    let log_lead = n * kp1.ln() - k * n - n * omega.ln() - ln_gamma(n) - kp1 * x / omega;
    let power = if f.antennas == 1 {
        T::one()
    } else {
        x.powf(n - T::one())
    };
    Ok(log_lead.exp() * power * series)
}

/// CDF of the sum gain, by quadrature of [`rician_sum_pdf`] from the nearer tail.
pub fn rician_sum_cdf<T: Scalar>(x: T, f: &RicianFading<T>) -> Result<T> {
    if x <= T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(T::one());
    }
    let ctl = QuadControl::with_rel_tol(lit(1e-10));
    let mean = from_usize::<T>(f.antennas) * f.omega;
    let pdf = |t: T| rician_sum_pdf(t, f);
    if x <= mean {
        // Put a breakpoint near the right end where the integrand is largest.
        let split = x * lit(0.5);
        let v = integrate(pdf, T::zero(), split, ctl)?.value + integrate(pdf, split, x, ctl)?.value;
        Ok(v.min(T::one()))
    } else {
        let upper = integrate(pdf, x, x + mean, ctl)?.value + integrate_to_infinity(pdf, x + mean, ctl)?.value;
        Ok((T::one() - upper).max(T::zero()))
    }
}

/// Density of the FSO gain.
pub fn fso_pdf<T: Scalar>(x: T, model: &FsoModel<T>) -> T {
    match model {
        FsoModel::Exponential(m) => {
            if x < T::zero() {
                T::zero()
            } else {
                m.lambda * (-m.lambda * x).exp()
            }
        }
        FsoModel::GammaGamma(m) => {
            if x <= T::zero() {
                T::zero()
            } else {
                gamma_gamma_log_pdf(m.a, m.b, x).map(T::exp).unwrap_or(T::nan())
            }
        }
    }
}

/// `n`-th moment of the single-antenna gain: `(Ω/(K+1))^{n/2} Γ(1+n/2) L_{n/2}(−K)`.
pub fn rician_gain_moment<T: Scalar>(n: T, f: &RicianFading<T>) -> Result<T> {
    let half = n * lit(0.5);
    let scale = (f.omega / (f.k + T::one())).powf(half);
    Ok(scale * ln_gamma(T::one() + half).exp() * laguerre(half, -f.k)?)
}

/// Gaussian surrogate `(Nζ, Nν²)` for the sum gain, with `ζ` and `ν²` the
/// single-antenna mean and variance.
pub fn clt_sum_gain_params<T: Scalar>(f: &RicianFading<T>) -> Result<GaussianApprox<T>> {
    let zeta = rician_gain_moment(lit(2.0), f)?;
    let second = rician_gain_moment(lit(4.0), f)?;
    let n: T = from_usize(f.antennas);
    GaussianApprox::new(n * zeta, n * (second - zeta * zeta))
}

/// Deterministic random stream identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub(crate) fn draw<D: Distribution<f64>>(&mut self, d: &D) -> f64 {
        d.sample(&mut self.rng)
    }
}

/// Sampler for the Rician sum gain.
///
/// `G / σ²` is noncentral chi-square with `2N` degrees of freedom and
/// noncentrality `2NK`, drawn as `(Z + √(2NK))² + χ²_{2N−1}`.
#[derive(Debug, Clone)]
pub struct RicianSumSampler {
    sigma2: f64,
    shift: f64,
    // χ²_{2N−1} = Gamma(N − ½, 2)
    chi: Gamma<f64>,
}

impl RicianSumSampler {
    pub fn new(f: &RicianFading<f64>) -> Self {
        let n = f.antennas as f64;
        let sigma2 = f.omega / (2.0 * (f.k + 1.0));
        let chi = Gamma::new(n - 0.5, 2.0).expect("positive shape");
        RicianSumSampler {
            sigma2,
            shift: (2.0 * n * f.k).sqrt(),
            chi,
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let z = rng.standard_normal() + self.shift;
        self.sigma2 * (z * z + rng.draw(&self.chi))
    }
}

/// One draw of the sum gain.
pub fn sample_rician_sum(f: &RicianFading<f64>, rng: &mut RngStream) -> f64 {
    RicianSumSampler::new(f).sample(rng)
}

/// One draw of the sum gain built antenna by antenna from complex Gaussians
/// with line-of-sight amplitude `√(ΩK/(K+1))` and per-component variance `Ω/(2(K+1))`.
pub fn sample_rician_sum_per_antenna(f: &RicianFading<f64>, rng: &mut RngStream) -> f64 {
    let los = (f.omega * f.k / (f.k + 1.0)).sqrt();
    let sd = (f.omega / (2.0 * (f.k + 1.0))).sqrt();
    (0..f.antennas)
        .map(|_| {
            let re = los + sd * rng.standard_normal();
            let im = sd * rng.standard_normal();
            re * re + im * im
        })
        .sum()
}

/// Sampler for FSO gains.
#[derive(Debug, Clone)]
pub enum FsoSampler {
    Exponential { lambda: f64 },
    GammaGamma { large: Gamma<f64>, small: Gamma<f64> },
}

impl FsoSampler {
    pub fn new(model: &FsoModel<f64>) -> Self {
        match model {
            FsoModel::Exponential(m) => FsoSampler::Exponential { lambda: m.lambda },
            FsoModel::GammaGamma(m) => FsoSampler::GammaGamma {
                large: Gamma::new(m.a, 1.0 / m.a).expect("positive shape"),
                small: Gamma::new(m.b, 1.0 / m.b).expect("positive shape"),
            },
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            FsoSampler::Exponential { lambda } => -(-rng.uniform()).ln_1p() / lambda,
            FsoSampler::GammaGamma { large, small } => rng.draw(large) * rng.draw(small),
        }
    }
}

/// One draw of the FSO gain.
pub fn sample_fso(model: &FsoModel<f64>, rng: &mut RngStream) -> f64 {
    FsoSampler::new(model).sample(rng)
}
