use thiserror::Error;

/// Errors raised by the special-function kernel, the evaluators and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument outside the domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("{func}: series or iteration did not converge within {terms} terms")]
    Convergence { func: &'static str, terms: usize },

    #[error("product CDF of order {n} is not supported (maximum {max})")]
    UnsupportedOrder { n: usize, max: usize },

    #[error("{field}: {detail}")]
    InvalidParameter { field: &'static str, detail: String },

    #[error("PA output power {output:.6e} exceeds p_max {p_max:.6e}")]
    Saturation { output: f64, p_max: f64 },

    #[error("approximation invalid: {0}")]
    ApproximationInvalid(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("no antenna count up to {cap} reaches target rate {target:.6}")]
    Infeasible { cap: u64, target: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error(
        "bracket [{lo_db}, {hi_db}] dB does not enclose target outage {target:.3e} \
         (outage {outage_lo:.3e} at lo, {outage_hi:.3e} at hi)"
    )]
    Bracket {
        lo_db: f64,
        hi_db: f64,
        target: f64,
        outage_lo: f64,
        outage_hi: f64,
    },

    #[error(
        "Monte Carlo noise at {snr_db:.3} dB (estimate {estimate:.3e} ± {halfwidth:.1e}) \
         cannot resolve target {target:.3e}; increase the trial count"
    )]
    Precision {
        snr_db: f64,
        estimate: f64,
        halfwidth: f64,
        target: f64,
    },

    #[error("hop {index}: {source}")]
    Hop { index: usize, source: Box<Error> },

    #[error("route {index}: {source}")]
    Route { index: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(field: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
