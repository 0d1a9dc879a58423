//! Composition of per-hop outage and rate into decode-and-forward routes and
//! meshes of non-overlapping routes.
//!
//! A route succeeds only if every hop decodes; a mesh fails only if every route
//! fails. Hop channels are independent, so both compositions are products.

use std::cmp::Ordering;

use crate::analysis::{
    fso_ergodic_rate, fso_outage_bound_short, fso_outage_clt, rf_ergodic_rate, rf_outage_bounds_short,
    rf_outage_linearized, rf_outage_low_snr, rf_outage_piecewise, rf_outage_single_shot, FsoHopParams, Method,
    OutageEstimate, RfHopParams,
};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

/// One hop of a route.
#[derive(Debug, Clone, PartialEq)]
pub enum Hop<T> {
    Rf(RfHopParams<T>),
    Fso(FsoHopParams<T>),
}

impl<T> From<RfHopParams<T>> for Hop<T> {
    fn from(h: RfHopParams<T>) -> Self {
        Hop::Rf(h)
    }
}

impl<T> From<FsoHopParams<T>> for Hop<T> {
    fn from(h: FsoHopParams<T>) -> Self {
        Hop::Fso(h)
    }
}

impl<T: Scalar> Hop<T> {
    /// Same hop at a common SNR: the FSO transmit power is `snr` and each RF
    /// antenna consumes `snr / N`, so every hop spends the same total power.
    pub fn at_snr(&self, snr: T) -> Result<Self> {
        Ok(match self {
            Hop::Rf(h) => {
                let n = h.fading().antennas();
                let per_antenna = snr / from_usize(n);
                Hop::Rf(h.with_pa(h.pa().with_p_cons(per_antenna)?))
            }
            Hop::Fso(h) => Hop::Fso(h.with_p_tx(snr)?),
        })
    }
}

/// Ordered hops from source to destination.
#[derive(Debug, Clone, PartialEq)]
pub struct Route<T> {
    hops: Vec<Hop<T>>,
}

impl<T: Scalar> Route<T> {
    pub fn new(hops: Vec<Hop<T>>) -> Result<Self> {
        if hops.is_empty() {
            return Err(Error::invalid("hops", "a route needs at least one hop"));
        }
        Ok(Route { hops })
    }

    pub fn hops(&self) -> &[Hop<T>] {
        &self.hops
    }

    pub fn push(&mut self, hop: Hop<T>) {
        self.hops.push(hop);
    }

    pub fn at_snr(&self, snr: T) -> Result<Self> {
        let hops = self
            .hops
            .iter()
            .enumerate()
            .map(|(index, h)| h.at_snr(snr).map_err(|e| hop_error(index, e)))
            .collect::<Result<_>>()?;
        Ok(Route { hops })
    }
}

/// Parallel routes between one source and one destination.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshNetwork<T> {
    routes: Vec<Route<T>>,
}

impl<T: Scalar> MeshNetwork<T> {
    pub fn new(routes: Vec<Route<T>>) -> Result<Self> {
        if routes.is_empty() {
            return Err(Error::invalid("routes", "a mesh needs at least one route"));
        }
        Ok(MeshNetwork { routes })
    }

    pub fn routes(&self) -> &[Route<T>] {
        &self.routes
    }

    pub fn push(&mut self, route: Route<T>) {
        self.routes.push(route);
    }

    pub fn at_snr(&self, snr: T) -> Result<Self> {
        let routes = self
            .routes
            .iter()
            .enumerate()
            .map(|(index, r)| r.at_snr(snr).map_err(|e| route_error(index, e)))
            .collect::<Result<_>>()?;
        Ok(MeshNetwork { routes })
    }
}

fn hop_error(index: usize, e: Error) -> Error {
    Error::Hop {
        index,
        source: Box::new(e),
    }
}

fn route_error(index: usize, e: Error) -> Error {
    Error::Route {
        index,
        source: Box::new(e),
    }
}

/// Per-hop outage evaluator used when composing routes.
pub trait HopEvaluator<T> {
    fn rf(&self, hop: &RfHopParams<T>) -> Result<OutageEstimate<T>>;
    fn fso(&self, hop: &FsoHopParams<T>) -> Result<OutageEstimate<T>>;

    fn hop(&self, hop: &Hop<T>) -> Result<OutageEstimate<T>> {
        match hop {
            Hop::Rf(h) => self.rf(h),
            Hop::Fso(h) => self.fso(h),
        }
    }
}

/// Closed-form RF evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RfMethod<T> {
    LowSnr,
    Piecewise { theta: T },
    Linearized,
    JensenLower,
    JensenUpper,
    SingleShot,
}

impl<T: Scalar> RfMethod<T> {
    pub fn evaluate(&self, h: &RfHopParams<T>) -> Result<OutageEstimate<T>> {
        match *self {
            RfMethod::LowSnr => rf_outage_low_snr(h),
            RfMethod::Piecewise { theta } => rf_outage_piecewise(h, theta),
            RfMethod::Linearized => rf_outage_linearized(h),
            RfMethod::JensenLower => rf_outage_bounds_short(h).map(|(lo, _)| lo),
            RfMethod::JensenUpper => rf_outage_bounds_short(h).map(|(_, hi)| hi),
            RfMethod::SingleShot => rf_outage_single_shot(h),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            RfMethod::LowSnr => Method::Lemma1,
            RfMethod::Piecewise { .. } => Method::Lemma3,
            RfMethod::Linearized => Method::Lemma4,
            RfMethod::JensenLower => Method::BoundJensenLo,
            RfMethod::JensenUpper => Method::BoundJensenHi,
            RfMethod::SingleShot => Method::SingleShot,
        }
    }
}

/// Closed-form FSO evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsoMethod {
    Clt,
    Minkowski,
}

impl FsoMethod {
    pub fn evaluate<T: Scalar>(&self, h: &FsoHopParams<T>) -> Result<OutageEstimate<T>> {
        match self {
            FsoMethod::Clt => fso_outage_clt(h),
            FsoMethod::Minkowski => fso_outage_bound_short(h),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            FsoMethod::Clt => Method::Lemma5,
            FsoMethod::Minkowski => Method::BoundMinkowski,
        }
    }
}

/// Analytical evaluator: one closed form per hop kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analytical<T> {
    pub rf: RfMethod<T>,
    pub fso: FsoMethod,
}

impl<T: Scalar> Analytical<T> {
    /// Long-codeword default: linearized CLT for RF, CLT for FSO.
    pub fn long_codeword() -> Self {
        Analytical {
            rf: RfMethod::Linearized,
            fso: FsoMethod::Clt,
        }
    }

    /// Evaluator reporting `method` on both hop kinds, if one exists.
    pub fn for_method(method: Method, theta: T) -> Option<Self> {
        let (rf, fso) = match method {
            Method::Lemma1 => (RfMethod::LowSnr, FsoMethod::Clt),
            Method::Lemma3 => (RfMethod::Piecewise { theta }, FsoMethod::Clt),
            Method::Lemma4 | Method::Lemma5 => (RfMethod::Linearized, FsoMethod::Clt),
            Method::BoundMinkowski | Method::BoundJensenHi => (RfMethod::JensenUpper, FsoMethod::Minkowski),
            Method::BoundJensenLo => (RfMethod::JensenLower, FsoMethod::Minkowski),
            Method::SingleShot => (RfMethod::SingleShot, FsoMethod::Minkowski),
            Method::MonteCarlo | Method::Composite => return None,
        };
        Some(Analytical { rf, fso })
    }
}

impl<T: Scalar> HopEvaluator<T> for Analytical<T> {
    fn rf(&self, hop: &RfHopParams<T>) -> Result<OutageEstimate<T>> {
        self.rf.evaluate(hop)
    }

    fn fso(&self, hop: &FsoHopParams<T>) -> Result<OutageEstimate<T>> {
        self.fso.evaluate(hop)
    }
}

fn common_method<T>(parts: &[OutageEstimate<T>]) -> Method
where
    T: Scalar,
{
    let first = parts[0].method();
    if parts.iter().all(|p| p.method() == first) {
        first
    } else {
        Method::Composite
    }
}

// Product of probabilities with first-order propagated half-width. Inputs are
// sorted first so the result does not depend on their order.
fn independent_product<T: Scalar>(mut terms: Vec<(T, T)>) -> (T, T) {
    terms.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    });
    let product = terms.iter().fold(T::one(), |acc, t| acc * t.0);
    let mut variance = T::zero();
    for (i, term) in terms.iter().enumerate() {
        if term.1 == T::zero() {
            continue;
        }
        let others = terms
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(T::one(), |acc, (_, t)| acc * t.0);
        variance = variance + (others * term.1).powi(2);
    }
    (product, variance.sqrt())
}

/// Route outage `1 − Π(1 − φ_i)` from per-hop estimates.
pub fn compose_route<T: Scalar>(parts: &[OutageEstimate<T>]) -> Result<OutageEstimate<T>> {
    if parts.is_empty() {
        return Err(Error::invalid("hops", "a route needs at least one hop"));
    }
    let (success, hw) = independent_product(parts.iter().map(|p| (T::one() - p.value(), p.ci_halfwidth())).collect());
    OutageEstimate::new(T::one() - success, common_method(parts), hw)
}

/// Mesh outage `Π φ_x` from per-route estimates.
pub fn compose_mesh<T: Scalar>(parts: &[OutageEstimate<T>]) -> Result<OutageEstimate<T>> {
    if parts.is_empty() {
        return Err(Error::invalid("routes", "a mesh needs at least one route"));
    }
    let (failure, hw) = independent_product(parts.iter().map(|p| (p.value(), p.ci_halfwidth())).collect());
    OutageEstimate::new(failure, common_method(parts), hw)
}

pub fn route_outage<T: Scalar, E: HopEvaluator<T> + ?Sized>(r: &Route<T>, eval: &E) -> Result<OutageEstimate<T>> {
    let parts = r
        .hops
        .iter()
        .enumerate()
        .map(|(index, h)| eval.hop(h).map_err(|e| hop_error(index, e)))
        .collect::<Result<Vec<_>>>()?;
    compose_route(&parts)
}

pub fn mesh_outage<T: Scalar, E: HopEvaluator<T> + ?Sized>(m: &MeshNetwork<T>, eval: &E) -> Result<OutageEstimate<T>> {
    let parts = m
        .routes
        .iter()
        .enumerate()
        .map(|(index, r)| route_outage(r, eval).map_err(|e| route_error(index, e)))
        .collect::<Result<Vec<_>>>()?;
    compose_mesh(&parts)
}

/// Ergodic rate together with the hop (and route) that limits it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitingRate<T> {
    pub rate: T,
    pub route: usize,
    pub hop: usize,
}

/// Ergodic rate of one hop: linearized CLT mean for RF, exact mean for FSO.
pub fn hop_ergodic_rate<T: Scalar>(hop: &Hop<T>) -> Result<T> {
    match hop {
        Hop::Rf(h) => rf_ergodic_rate(h.fading(), h.pa()),
        Hop::Fso(h) => fso_ergodic_rate(h.model(), h.p_tx()),
    }
}

/// Minimum of the hop ergodic rates; ties resolve to the earliest hop.
pub fn route_ergodic_rate<T: Scalar>(r: &Route<T>) -> Result<LimitingRate<T>> {
    let mut best: Option<LimitingRate<T>> = None;
    for (index, h) in r.hops.iter().enumerate() {
        let rate = hop_ergodic_rate(h).map_err(|e| hop_error(index, e))?;
        if best.is_none_or(|b| rate < b.rate) {
            best = Some(LimitingRate {
                rate,
                route: 0,
                hop: index,
            });
        }
    }
    Ok(best.expect("route is non-empty"))
}

/// Maximum over routes of the route ergodic rate; ties resolve to the earliest route.
pub fn mesh_ergodic_rate<T: Scalar>(m: &MeshNetwork<T>) -> Result<LimitingRate<T>> {
    let mut best: Option<LimitingRate<T>> = None;
    for (index, r) in m.routes.iter().enumerate() {
        let cur = route_ergodic_rate(r).map_err(|e| route_error(index, e))?;
        if best.is_none_or(|b| cur.rate > b.rate) {
            best = Some(LimitingRate { route: index, ..cur });
        }
    }
    Ok(best.expect("mesh is non-empty"))
}
