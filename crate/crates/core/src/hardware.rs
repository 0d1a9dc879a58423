//! Imperfect power-amplifier model.
//!
//! The efficiency at output power `P` is `ε (P / P_max)^ϑ`, so the radiated
//! power for a consumed power `P_cons` solves `P = P_cons ε (P / P_max)^ϑ`:
//!
//! `P = (ε P_cons / P_max^ϑ)^{1/(1−ϑ)}`.
//!
//! All powers are linear and noise-normalized.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Power-amplifier settings for one antenna.
///
/// Construction rejects settings whose output power would exceed `p_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaConfig<T> {
    epsilon: T,
    theta_pa: T,
    p_max: T,
    p_cons: T,
}

impl<T: Scalar> PaConfig<T> {
    pub fn new(epsilon: T, theta_pa: T, p_max: T, p_cons: T) -> Result<Self> {
        if !(epsilon >= T::zero() && epsilon <= T::one()) {
            return Err(Error::invalid("epsilon", "maximum efficiency must lie in [0, 1]"));
        }
        if !(theta_pa >= T::zero() && theta_pa < T::one()) {
            return Err(Error::invalid("theta_pa", "PA-class exponent must lie in [0, 1)"));
        }
        if !(p_max > T::zero()) || p_max.is_nan() {
            return Err(Error::invalid("p_max", "maximum output power must be positive"));
        }
        if !(p_cons > T::zero() && p_cons.is_finite()) {
            return Err(Error::invalid("p_cons", "consumed power must be finite and positive"));
        }
        let pa = PaConfig {
            epsilon,
            theta_pa,
            p_max,
            p_cons,
        };
        let output = pa.output_power();
        if output > p_max * (T::one() + lit(1e-12)) {
            return Err(Error::Saturation {
                output: to_f64(output),
                p_max: to_f64(p_max),
            });
        }
        Ok(pa)
    }

    /// Lossless linear amplifier: radiated power equals consumed power.
    pub fn ideal(p_cons: T) -> Result<Self> {
        Self::new(T::one(), T::zero(), T::infinity(), p_cons)
    }

    /// Same amplifier driven with a different consumed power.
    pub fn with_p_cons(&self, p_cons: T) -> Result<Self> {
        Self::new(self.epsilon, self.theta_pa, self.p_max, p_cons)
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn theta_pa(&self) -> T {
        self.theta_pa
    }

    pub fn p_max(&self) -> T {
        self.p_max
    }

    pub fn p_cons(&self) -> T {
        self.p_cons
    }

    pub fn is_ideal(&self) -> bool {
        self.epsilon == T::one() && self.theta_pa == T::zero()
    }

    /// Radiated power per antenna.
    pub fn output_power(&self) -> T {
        if self.theta_pa == T::zero() {
            return self.epsilon * self.p_cons;
        }
        (self.epsilon * self.p_cons / self.p_max.powf(self.theta_pa)).powf((T::one() - self.theta_pa).recip())
    }

    /// Realized efficiency `ε (P / P_max)^ϑ`, equal to `P / P_cons`.
    pub fn effective_efficiency(&self) -> T {
        if self.theta_pa == T::zero() {
            return self.epsilon;
        }
        self.epsilon * (self.output_power() / self.p_max).powf(self.theta_pa)
    }
}
