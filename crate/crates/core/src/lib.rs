//! Outage probability and ergodic rate of HARQ-assisted RF-FSO multi-hop and mesh networks.

// `!(x > 0)` rejects NaN along with non-positive values; tabulated constants keep their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analysis;
pub mod channel;
pub mod error;
pub mod hardware;
pub mod network;
pub mod quad;
pub mod scalar;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Scalar;

// Double-precision aliases; the generic forms live in their modules.
pub type RicianFading = channel::RicianFading<f64>;
pub type FsoExponential = channel::FsoExponential<f64>;
pub type FsoGammaGamma = channel::FsoGammaGamma<f64>;
pub type FsoModel = channel::FsoModel<f64>;
pub type PaConfig = hardware::PaConfig<f64>;
pub type GaussianApprox = analysis::GaussianApprox<f64>;
pub type OutageEstimate = analysis::OutageEstimate<f64>;
pub type RfHopParams = analysis::RfHopParams<f64>;
pub type FsoHopParams = analysis::FsoHopParams<f64>;
pub type Hop = network::Hop<f64>;
pub type Route = network::Route<f64>;
pub type MeshNetwork = network::MeshNetwork<f64>;
pub type Analytical = network::Analytical<f64>;

pub use analysis::Method;
pub use simulate::McConfig;
