//! Closed-form outage approximations, short-codeword bounds and ergodic rates
//! for single RF and FSO hops.
//!
//! An RF hop with `M` HARQ rounds of `C` channel realizations each is in
//! outage when `(1/(MC)) Σ_c log(1 + P' G(c)) ≤ R/M`, with `P'` the PA output
//! power per antenna and `G(c)` the sum gain over the hop's antennas. FSO hops
//! are the same with `P̃` and `C̃`. The CLT evaluators replace the accumulated
//! rate by a Gaussian with the per-realization mean and variance of
//! `log(1 + P G)`; they differ only in how those two moments are obtained.

use std::fmt;
use std::str::FromStr;

use crate::channel::{clt_sum_gain_params, rician_sum_cdf, rician_sum_pdf, FsoModel, RicianFading};
use crate::error::{Error, Result};
use crate::hardware::PaConfig;
use crate::quad::{integrate, integrate_to_infinity, QuadControl};
use crate::scalar::{from_usize, lit, to_f64, Scalar};
use crate::specfun::{
    e1_scaled, erf, erfc, expint_e1, gamma_gamma_expectation, gen_hypergeometric, gg_product_cdf, SeriesControl,
};

/// Mean and variance of a Gaussian surrogate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianApprox<T> {
    mean: T,
    variance: T,
}

impl<T: Scalar> GaussianApprox<T> {
    pub fn new(mean: T, variance: T) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::invalid("mean", "must be finite"));
        }
        if !(variance >= T::zero() && variance.is_finite()) {
            return Err(Error::invalid("variance", "must be finite and non-negative"));
        }
        Ok(GaussianApprox { mean, variance })
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn variance(&self) -> T {
        self.variance
    }
}

/// Which evaluator produced an outage value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Lemma1,
    Lemma3,
    Lemma4,
    Lemma5,
    BoundMinkowski,
    BoundJensenLo,
    BoundJensenHi,
    SingleShot,
    MonteCarlo,
    /// Composition of hops evaluated by different methods.
    Composite,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Lemma1,
        Method::Lemma3,
        Method::Lemma4,
        Method::Lemma5,
        Method::BoundMinkowski,
        Method::BoundJensenLo,
        Method::BoundJensenHi,
        Method::SingleShot,
        Method::MonteCarlo,
        Method::Composite,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Lemma1 => "lemma1",
            Method::Lemma3 => "lemma3",
            Method::Lemma4 => "lemma4",
            Method::Lemma5 => "lemma5",
            Method::BoundMinkowski => "bound_minkowski",
            Method::BoundJensenLo => "bound_jensen_lo",
            Method::BoundJensenHi => "bound_jensen_hi",
            Method::SingleShot => "single_shot",
            Method::MonteCarlo => "monte_carlo",
            Method::Composite => "composite",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::invalid("method", format!("unknown method tag `{s}`")))
    }
}

/// Outage probability with its provenance; `ci_halfwidth` is zero for closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate<T> {
    value: T,
    method: Method,
    ci_halfwidth: T,
}

impl<T: Scalar> OutageEstimate<T> {
    /// Clamps `value` into `[0, 1]`; NaN is rejected.
    pub fn new(value: T, method: Method, ci_halfwidth: T) -> Result<Self> {
        if value.is_nan() || ci_halfwidth.is_nan() || ci_halfwidth < T::zero() {
            return Err(Error::invalid("outage", "probability must be a number"));
        }
        Ok(OutageEstimate {
            value: value.max(T::zero()).min(T::one()),
            method,
            ci_halfwidth,
        })
    }

    pub fn closed_form(value: T, method: Method) -> Result<Self> {
        Self::new(value, method, T::zero())
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn ci_halfwidth(&self) -> T {
        self.ci_halfwidth
    }
}

fn check_harq<T: Scalar>(rounds: usize, realizations: usize, rate: T, realizations_field: &'static str) -> Result<()> {
    if rounds == 0 {
        return Err(Error::invalid("M", "at least one HARQ round is required"));
    }
    if realizations == 0 {
        return Err(Error::invalid(
            realizations_field,
            "at least one realization per round is required",
        ));
    }
    if !(rate > T::zero() && rate.is_finite()) {
        return Err(Error::invalid("R", "rate must be finite and positive"));
    }
    Ok(())
}

/// RF hop: Rician MISO fading, PA, `M` rounds of `C` realizations, initial rate `R` (nats/channel use).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfHopParams<T> {
    fading: RicianFading<T>,
    pa: PaConfig<T>,
    rounds: usize,
    realizations: usize,
    rate: T,
}

impl<T: Scalar> RfHopParams<T> {
    pub fn new(fading: RicianFading<T>, pa: PaConfig<T>, rounds: usize, realizations: usize, rate: T) -> Result<Self> {
        check_harq(rounds, realizations, rate, "C")?;
        Ok(RfHopParams {
            fading,
            pa,
            rounds,
            realizations,
            rate,
        })
    }

    pub fn fading(&self) -> &RicianFading<T> {
        &self.fading
    }

    pub fn pa(&self) -> &PaConfig<T> {
        &self.pa
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn realizations(&self) -> usize {
        self.realizations
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    /// Radiated power per antenna `P'`.
    pub fn output_power(&self) -> T {
        self.pa.output_power()
    }

    pub fn with_pa(&self, pa: PaConfig<T>) -> Self {
        RfHopParams { pa, ..*self }
    }

    pub fn with_rate(&self, rate: T) -> Result<Self> {
        Self::new(self.fading, self.pa, self.rounds, self.realizations, rate)
    }
}

/// FSO hop: turbulence model, transmit SNR `P̃`, `M` rounds of `C̃` realizations, rate `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsoHopParams<T> {
    model: FsoModel<T>,
    p_tx: T,
    rounds: usize,
    realizations: usize,
    rate: T,
}

impl<T: Scalar> FsoHopParams<T> {
    pub fn new(model: FsoModel<T>, p_tx: T, rounds: usize, realizations: usize, rate: T) -> Result<Self> {
        check_harq(rounds, realizations, rate, "C_tilde")?;
        if !(p_tx > T::zero() && p_tx.is_finite()) {
            return Err(Error::invalid("p_tx", "transmit power must be finite and positive"));
        }
        Ok(FsoHopParams {
            model,
            p_tx,
            rounds,
            realizations,
            rate,
        })
    }

    pub fn model(&self) -> &FsoModel<T> {
        &self.model
    }

    pub fn p_tx(&self) -> T {
        self.p_tx
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn realizations(&self) -> usize {
        self.realizations
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn with_p_tx(&self, p_tx: T) -> Result<Self> {
        Self::new(self.model, p_tx, self.rounds, self.realizations, self.rate)
    }

    pub fn with_rate(&self, rate: T) -> Result<Self> {
        Self::new(self.model, self.p_tx, self.rounds, self.realizations, rate)
    }
}

/// `P(U ≤ R/M)` for `U ~ N(mean, variance / (M·CC))`.
///
/// Zero variance degenerates to a step at `R/M = mean` (value ½ on the step).
pub fn gaussian_outage<T: Scalar>(g: &GaussianApprox<T>, rounds: usize, realizations: usize, rate: T) -> T {
    let per_round = rate / from_usize(rounds);
    let gap = per_round - g.mean;
    if g.variance == T::zero() {
        return if gap > T::zero() {
            T::one()
        } else if gap < T::zero() {
            T::zero()
        } else {
            lit(0.5)
        };
    }
    // Depends on the inputs only through (mean, variance/(M·CC), R/M).
    let spread = g.variance / from_usize(rounds * realizations);
    let arg = gap / (lit::<T>(2.0) * spread).sqrt();
    // erfc keeps the lower tail accurate far below 1e-16.
    lit::<T>(0.5) * erfc(-arg)
}

fn sum_gain_moment<T: Scalar>(f: &RicianFading<T>, power: i32) -> Result<T> {
    let ctl = QuadControl::with_rel_tol(lit(1e-11));
    let mean = from_usize::<T>(f.antennas()) * f.omega();
    let h = |x: T| x.powi(power) * rician_sum_pdf(x, f);
    Ok(integrate(h, T::zero(), mean, ctl)?.value + integrate_to_infinity(h, mean, ctl)?.value)
}

/// Mean and variance of the sum gain `G`.
///
/// The mean uses `Ω e^{−KN} N/(K+1) ₁F₁(N+1; N; KN)`; the second moment is
/// integrated numerically against the sum-gain density.
pub fn rf_moments_low_snr<T: Scalar>(f: &RicianFading<T>) -> Result<GaussianApprox<T>> {
    let (k, omega) = (f.k(), f.omega());
    let n: T = from_usize(f.antennas());
    let kn = k * n;
    let hyper = gen_hypergeometric(&[n + T::one()], &[n], kn, SeriesControl::default())?;
    let mean = omega * (-kn).exp() * n / (k + T::one()) * hyper;
    let second = sum_gain_moment(f, 2)?;
    GaussianApprox::new(mean, (second - mean * mean).max(T::zero()))
}

/// Low-SNR outage: `log(1 + P'G) ≈ P'G`, Gaussian surrogate on the accumulated gain.
pub fn rf_outage_low_snr<T: Scalar>(h: &RfHopParams<T>) -> Result<OutageEstimate<T>> {
    let g = rf_moments_low_snr(&h.fading)?;
    let threshold = h.rate / h.output_power();
    OutageEstimate::closed_form(gaussian_outage(&g, h.rounds, h.realizations, threshold), Method::Lemma1)
}

// ∫ (a1 x + a2) φ(x) dx for φ = N(m, v), up to a constant.
fn linear_kernel<T: Scalar>(a1: T, a2: T, m: T, v: T, x: T) -> T {
    let two: T = lit(2.0);
    if x == T::infinity() {
        return (a1 * m + a2) / two;
    }
    let z = (m - x) / (two * v).sqrt();
    -(a1 * m + a2) / two * erf(z) - a1 * (v / (two * T::PI())).sqrt() * (-z * z).exp()
}

// ∫ (a1 x + a2)² φ(x) dx for φ = N(m, v), up to a constant.
fn quadratic_kernel<T: Scalar>(a1: T, a2: T, m: T, v: T, x: T) -> T {
    let two: T = lit(2.0);
    let level = a1 * a1 * (m * m + v) + two * a1 * a2 * m + a2 * a2;
    if x == T::infinity() {
        return level / two;
    }
    let z = (x - m) / (two * v).sqrt();
    level / two * erf(z) - a1 * (v / (two * T::PI())).sqrt() * (-z * z).exp() * (a1 * (x + m) + two * a2)
}

/// Moments of `log(1 + P'G)` with the log replaced by two tangent lines
/// (at `0` and at `(e^θ − 1)/P'`) and `G` by its Gaussian surrogate.
pub fn piecewise_moments<T: Scalar>(p: T, surrogate: &GaussianApprox<T>, theta: T) -> Result<GaussianApprox<T>> {
    if !(theta > T::zero() && theta.is_finite()) {
        return Err(Error::invalid("theta", "must be finite and positive"));
    }
    if !(p > T::zero() && p.is_finite()) {
        return Err(Error::invalid("p_out", "output power must be finite and positive"));
    }
    let (m, v) = (surrogate.mean, surrogate.variance);
    if v <= T::zero() {
        return Err(Error::ApproximationInvalid("surrogate variance is zero".into()));
    }
    let e_theta = theta.exp();
    let knee = (theta / (T::one() - (-theta).exp()) - T::one()) / p;
    let slope = p / e_theta;
    let offset = theta - slope * (e_theta - T::one()) / p;
    let inf = T::infinity();
    let zero = T::zero();
    let mean = linear_kernel(p, zero, m, v, knee) - linear_kernel(p, zero, m, v, zero)
        + linear_kernel(slope, offset, m, v, inf)
        - linear_kernel(slope, offset, m, v, knee);
    let second = quadratic_kernel(p, zero, m, v, knee) - quadratic_kernel(p, zero, m, v, zero)
        + quadratic_kernel(slope, offset, m, v, inf)
        - quadratic_kernel(slope, offset, m, v, knee);
    let variance = second - mean * mean;
    if !(variance > T::zero()) {
        return Err(Error::ApproximationInvalid(format!(
            "piecewise variance {:e} is not positive",
            to_f64(variance)
        )));
    }
    GaussianApprox::new(mean, variance)
}

/// Outage from the piecewise-linear surrogate of the rate.
pub fn rf_outage_piecewise<T: Scalar>(h: &RfHopParams<T>, theta: T) -> Result<OutageEstimate<T>> {
    let surrogate = clt_sum_gain_params(&h.fading)?;
    let g = piecewise_moments(h.output_power(), &surrogate, theta)?;
    OutageEstimate::closed_form(gaussian_outage(&g, h.rounds, h.realizations, h.rate), Method::Lemma3)
}

// (y − ln(1+y)) / a1 at y = a1 x, with a series for small y.
fn log_remainder<T: Scalar>(a1: T, x: T) -> T {
    let y = a1 * x;
    if y.abs() < lit(0.1) {
        // y²/2 − y³/3 + y⁴/4 − …
        let mut sum = T::zero();
        let mut pow = y * y;
        for k in 2..40 {
            let term = pow / from_usize(k);
            sum = if k % 2 == 0 { sum + term } else { sum - term };
            if term.abs() <= T::epsilon() * sum.abs() {
                break;
            }
            pow = pow * y;
        }
        sum / a1
    } else {
        (y - y.ln_1p()) / a1
    }
}

// ((1+y) ln(1+y) − y − ½ ln²(1+y)) / a1 at y = a1 x, with a series for small y.
fn log_square_remainder<T: Scalar>(a1: T, x: T) -> T {
    let y = a1 * x;
    if y.abs() < lit(0.1) {
        // Σ_{n≥2} (−1)^n H_{n−1} y^{n+1} / (n+1)
        let mut sum = T::zero();
        let mut harmonic = T::one();
        let mut pow = y * y * y;
        for n in 2..60 {
            let term = harmonic * pow / from_usize(n + 1);
            sum = if n % 2 == 0 { sum + term } else { sum - term };
            if term.abs() <= T::epsilon() * sum.abs() {
                break;
            }
            harmonic = harmonic + T::one() / from_usize(n);
            pow = pow * y;
        }
        sum / a1
    } else {
        let l = y.ln_1p();
        ((T::one() + y) * l - y - lit::<T>(0.5) * l * l) / a1
    }
}

/// Moments of `log(1 + P'G)` from a linearized CCDF of `G`: one on
/// `[0, L]`, linear down to zero on `[L, U]`, with `L, U = Nζ ∓ √(2πNν²)/2`.
pub fn linearized_moments<T: Scalar>(p: T, surrogate: &GaussianApprox<T>) -> Result<GaussianApprox<T>> {
    if !(p > T::zero() && p.is_finite()) {
        return Err(Error::invalid("p_out", "output power must be finite and positive"));
    }
    let (mean_gain, var_gain) = (surrogate.mean, surrogate.variance);
    let width = (lit::<T>(2.0) * T::PI() * var_gain).sqrt();
    let upper = mean_gain + width / lit(2.0);
    if upper <= T::zero() {
        return GaussianApprox::new(T::zero(), T::zero());
    }
    if width == T::zero() {
        let l = (p * mean_gain).ln_1p();
        return GaussianApprox::new(l, T::zero());
    }
    let lower = (mean_gain - width / lit(2.0)).max(T::zero());
    let slope = -width.recip();
    let level = lit::<T>(0.5) + mean_gain / width;
    let l_lo = (p * lower).ln_1p();
    let l_hi = (p * upper).ln_1p();
    // The linear piece equals `level + slope·x`; at the clamped lower end it may be below one.
    let mean = l_lo + level * (l_hi - l_lo) + slope * (log_remainder(p, upper) - log_remainder(p, lower));
    let second = l_lo * l_lo
        + level * (l_hi * l_hi - l_lo * l_lo)
        + lit::<T>(2.0) * slope * (log_square_remainder(p, upper) - log_square_remainder(p, lower));
    let variance = second - mean * mean;
    if !(variance > T::zero()) {
        return Err(Error::ApproximationInvalid(format!(
            "linearized variance {:e} is not positive",
            to_f64(variance)
        )));
    }
    GaussianApprox::new(mean, variance)
}

/// Outage from the linearized-CCDF moments.
pub fn rf_outage_linearized<T: Scalar>(h: &RfHopParams<T>) -> Result<OutageEstimate<T>> {
    let surrogate = clt_sum_gain_params(&h.fading)?;
    let g = linearized_moments(h.output_power(), &surrogate)?;
    OutageEstimate::closed_form(gaussian_outage(&g, h.rounds, h.realizations, h.rate), Method::Lemma4)
}

/// Ergodic rate `E[log(1 + P'G)]` of an RF hop, from the linearized CCDF.
pub fn rf_ergodic_rate<T: Scalar>(f: &RicianFading<T>, pa: &PaConfig<T>) -> Result<T> {
    let surrogate = clt_sum_gain_params(f)?;
    let p = pa.output_power();
    let (m, v) = (surrogate.mean, surrogate.variance);
    let width = (lit::<T>(2.0) * T::PI() * v).sqrt();
    let upper = m + width / lit(2.0);
    if upper <= T::zero() {
        return Ok(T::zero());
    }
    if width == T::zero() {
        return Ok((p * m).ln_1p());
    }
    let lower = (m - width / lit(2.0)).max(T::zero());
    let level = lit::<T>(0.5) + m / width;
    let l_lo = (p * lower).ln_1p();
    let l_hi = (p * upper).ln_1p();
    Ok(l_lo + level * (l_hi - l_lo) - (log_remainder(p, upper) - log_remainder(p, lower)) / width)
}

// ∫₀^z Ein(t)/t dt, equal to z ₃F₃(1,1,1; 2,2,2; −z).
fn ein_integral<T: Scalar>(z: T) -> Result<T> {
    if z <= lit(8.0) {
        let one = T::one();
        let two: T = lit(2.0);
        return Ok(z * gen_hypergeometric(&[one, one, one], &[two, two, two], -z, SeriesControl::default())?);
    }
    // Large z: ½ln²z + γ ln z + γ²/2 + π²/12 − ∫_z^∞ E₁(t)/t dt.
    let gamma = T::euler_gamma();
    let lz = z.ln();
    let constant = lit::<T>(0.5) * gamma * gamma + T::PI() * T::PI() / lit(12.0);
    Ok(lit::<T>(0.5) * lz * lz + gamma * lz + constant - e1_tail_integral(z)?)
}

// ∫_z^∞ E₁(t)/t dt.
fn e1_tail_integral<T: Scalar>(z: T) -> Result<T> {
    let ctl = QuadControl::with_rel_tol(lit(1e-12));
    let v = integrate_to_infinity(
        |t: T| match e1_scaled(t) {
            Ok(s) => s * (z - t).exp() / t,
            Err(_) => T::zero(),
        },
        z,
        ctl,
    )?
    .value;
    Ok(v * (-z).exp())
}

// H(x)/(2e^c) = F(cx) − ln x · Ein(cx) + ½ ln²x with Ein(z) = ln z + γ + E₁(z).
fn second_moment_primitive<T: Scalar>(c: T, x: T) -> Result<T> {
    let z = c * x;
    let lx = x.ln();
    let ein = z.ln() + T::euler_gamma() + expint_e1(z)?;
    Ok(ein_integral(z)? - lx * ein + lit::<T>(0.5) * lx * lx)
}

// lim_{x→∞} of the primitive, taken numerically on x = x₀·4^k.
fn second_moment_primitive_limit<T: Scalar>(c: T) -> Result<T> {
    let mut x = (lit::<T>(8.0) / c).max(T::one());
    let mut prev = second_moment_primitive(c, x)?;
    let mut prev_diff = T::infinity();
    for _ in 0..40 {
        x = x * lit(4.0);
        let cur = second_moment_primitive(c, x)?;
        let diff = (cur - prev).abs();
        let tol = lit::<T>(1e-13) * cur.abs().max(T::one());
        // Accept once successive values agree and the differences are shrinking,
        // so a Richardson correction would not move the estimate.
        if diff <= tol && diff <= prev_diff {
            return Ok(cur);
        }
        prev_diff = diff;
        prev = cur;
    }
    Err(Error::Convergence {
        func: "fso_moments",
        terms: 40,
    })
}

/// Mean and variance of `log(1 + P̃ G̃)` for one FSO realization.
pub fn fso_rate_moments<T: Scalar>(model: &FsoModel<T>, p_tx: T) -> Result<GaussianApprox<T>> {
    if !(p_tx > T::zero() && p_tx.is_finite()) {
        return Err(Error::invalid("p_tx", "transmit power must be finite and positive"));
    }
    let (mean, second) = match model {
        FsoModel::Exponential(m) => {
            let c = m.lambda() / p_tx;
            let mean = e1_scaled(c)?;
            let second = if c <= lit(8.0) {
                let two_ec = lit::<T>(2.0) * c.exp();
                two_ec * (second_moment_primitive_limit(c)? - second_moment_primitive(c, T::one())?)
            } else {
                // Same difference as 2e^c ∫_c^∞ E₁(t)/t dt; integrated directly to avoid cancellation.
                let ctl = QuadControl::with_rel_tol(lit(1e-12));
                integrate_to_infinity(|u: T| (-u).exp() * (u / c).ln_1p().powi(2), T::zero(), ctl)?.value
            };
            (mean, second)
        }
        FsoModel::GammaGamma(m) => {
            let ctl = QuadControl::with_rel_tol(lit(1e-11));
            let mean = gamma_gamma_expectation(m.a(), m.b(), |x| (p_tx * x).ln_1p(), ctl)?;
            let second = gamma_gamma_expectation(m.a(), m.b(), |x| (p_tx * x).ln_1p().powi(2), ctl)?;
            (mean, second)
        }
    };
    GaussianApprox::new(mean, (second - mean * mean).max(T::zero()))
}

/// Moments of the per-realization FSO rate for the hop's model and power.
pub fn fso_moments<T: Scalar>(h: &FsoHopParams<T>) -> Result<GaussianApprox<T>> {
    fso_rate_moments(&h.model, h.p_tx)
}

/// Ergodic rate `E[log(1 + P̃ G̃)]` of an FSO hop.
pub fn fso_ergodic_rate<T: Scalar>(model: &FsoModel<T>, p_tx: T) -> Result<T> {
    if let FsoModel::Exponential(m) = model {
        return e1_scaled(m.lambda() / p_tx);
    }
    Ok(fso_rate_moments(model, p_tx)?.mean)
}

/// CLT outage of an FSO hop.
pub fn fso_outage_clt<T: Scalar>(h: &FsoHopParams<T>) -> Result<OutageEstimate<T>> {
    let g = fso_moments(h)?;
    OutageEstimate::closed_form(gaussian_outage(&g, h.rounds, h.realizations, h.rate), Method::Lemma5)
}

/// Upper bound on Gamma-Gamma FSO outage from the geometric-mean (Minkowski) inequality.
pub fn fso_outage_bound_short<T: Scalar>(h: &FsoHopParams<T>) -> Result<OutageEstimate<T>> {
    let FsoModel::GammaGamma(m) = h.model else {
        return Err(Error::Contract(
            "the short-codeword bound needs a Gamma-Gamma FSO hop".into(),
        ));
    };
    let n = h.rounds * h.realizations;
    let per_round = h.rate / from_usize(h.rounds);
    let threshold = per_round.exp_m1() / h.p_tx;
    let value = gg_product_cdf(m.a(), m.b(), n, threshold.powi(n as i32))?;
    OutageEstimate::closed_form(value, Method::BoundMinkowski)
}

/// Jensen lower and upper bounds on RF outage through the CDF of the gain
/// summed over all `M·C·N` antenna-realizations.
pub fn rf_outage_bounds_short<T: Scalar>(h: &RfHopParams<T>) -> Result<(OutageEstimate<T>, OutageEstimate<T>)> {
    let n = h.rounds * h.realizations;
    let pooled = h.fading.with_antennas(n * h.fading.antennas())?;
    let p = h.output_power();
    let per_round = h.rate / from_usize(h.rounds);
    let lower_at = from_usize::<T>(n) * per_round.exp_m1() / p;
    let upper_at = (h.rate * from_usize(h.realizations)).exp_m1() / p;
    let lower = rician_sum_cdf(lower_at, &pooled)?;
    let upper = if n == 1 {
        lower
    } else {
        rician_sum_cdf(upper_at, &pooled)?
    };
    Ok((
        OutageEstimate::closed_form(lower, Method::BoundJensenLo)?,
        OutageEstimate::closed_form(upper, Method::BoundJensenHi)?,
    ))
}

/// Single-realization outage with the sum gain replaced by its Gaussian surrogate.
pub fn rf_outage_single_shot<T: Scalar>(h: &RfHopParams<T>) -> Result<OutageEstimate<T>> {
    if h.rounds * h.realizations != 1 {
        return Err(Error::Contract(format!(
            "single-shot approximation needs M = C = 1, got M = {}, C = {}",
            h.rounds, h.realizations
        )));
    }
    let g = clt_sum_gain_params(&h.fading)?;
    let threshold = h.rate.exp_m1() / h.output_power();
    let arg = (threshold - g.mean) / (lit::<T>(2.0) * g.variance).sqrt();
    OutageEstimate::closed_form(lit::<T>(0.5) * erfc(-arg), Method::SingleShot)
}

/// Default cap on the antenna search.
pub const ANTENNA_CAP: usize = 1_000_000;

/// Smallest antenna count whose ergodic rate reaches `target_rate` (within 1e-9).
///
/// The antenna count in `fading` is ignored.
pub fn min_rf_antennas<T: Scalar>(fading: &RicianFading<T>, pa: &PaConfig<T>, target_rate: T) -> Result<usize> {
    min_rf_antennas_capped(fading, pa, target_rate, ANTENNA_CAP)
}

/// [`min_rf_antennas`] with an explicit search cap.
pub fn min_rf_antennas_capped<T: Scalar>(
    fading: &RicianFading<T>,
    pa: &PaConfig<T>,
    target_rate: T,
    cap: usize,
) -> Result<usize> {
    if !(target_rate.is_finite()) || target_rate < T::zero() {
        return Err(Error::invalid("target_rate", "must be finite and non-negative"));
    }
    let slack: T = lit(1e-9);
    let meets =
        |n: usize| -> Result<bool> { Ok(rf_ergodic_rate(&fading.with_antennas(n)?, pa)? >= target_rate - slack) };
    if meets(1)? {
        return Ok(1);
    }
    // Double until the target is met, then bisect on the integer bracket (lo fails, hi meets).
    let mut lo = 1usize;
    let mut hi = 2usize;
    loop {
        if hi >= cap {
            if meets(cap)? {
                hi = cap;
                break;
            }
            return Err(Error::Infeasible {
                cap: cap as u64,
                target: to_f64(target_rate),
            });
        }
        if meets(hi)? {
            break;
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if meets(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
