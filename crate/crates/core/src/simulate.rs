//! Monte Carlo ground truth for hop, route and mesh outage.
//!
//! Trials are split into fixed blocks of [`BLOCK_TRIALS`]; block `i` draws from
//! stream `i` of the seed, so counts depend only on `(seed, trials)` and never
//! on the worker count or scheduling.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::analysis::{FsoHopParams, Method, OutageEstimate, RfHopParams};
use crate::channel::{FsoSampler, RicianSumSampler, RngStream};
use crate::error::{Error, Result};
use crate::network::{mesh_outage, route_outage, Analytical, Hop, HopEvaluator, MeshNetwork, Route};

pub const BLOCK_TRIALS: u64 = 65_536;
pub const MIN_TRIALS: u64 = 1_000;
// Blocks run between early-stop checks; fixed so stopping points are reproducible.
const WAVE_BLOCKS: u64 = 64;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    trials: u64,
    seed: u64,
    workers: usize,
    target_ci: Option<f64>,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64, workers: usize) -> Result<Self> {
        if trials < MIN_TRIALS {
            return Err(Error::invalid(
                "trials",
                format!("at least {MIN_TRIALS} trials are required"),
            ));
        }
        if workers == 0 {
            return Err(Error::invalid("workers", "at least one worker is required"));
        }
        Ok(McConfig {
            trials,
            seed,
            workers,
            target_ci: None,
        })
    }

    /// Stop once the relative 95% half-width drops to `rel` (checked every few million trials).
    pub fn with_target_ci(mut self, rel: f64) -> Result<Self> {
        if !(rel > 0.0 && rel.is_finite()) {
            return Err(Error::invalid("target_ci", "relative half-width must be positive"));
        }
        self.target_ci = Some(rel);
        Ok(self)
    }

    pub fn with_trials(self, trials: u64) -> Result<Self> {
        let base = McConfig::new(trials, self.seed, self.workers)?;
        Ok(McConfig {
            target_ci: self.target_ci,
            ..base
        })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn target_ci(&self) -> Option<f64> {
        self.target_ci
    }
}

/// Raw outcome of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McCounts {
    pub failures: u64,
    pub trials: u64,
}

impl McCounts {
    pub fn fraction(&self) -> f64 {
        self.failures as f64 / self.trials as f64
    }

    pub fn wilson_halfwidth(&self) -> f64 {
        wilson_halfwidth(self.failures, self.trials)
    }

    pub fn estimate(&self) -> OutageEstimate<f64> {
        OutageEstimate::new(self.fraction(), Method::MonteCarlo, self.wilson_halfwidth())
            .expect("fraction of a positive trial count")
    }
}

/// Half-width of the 95% Wilson score interval.
pub fn wilson_halfwidth(failures: u64, trials: u64) -> f64 {
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

/// Runs `trial` over the configured blocks and counts `true` outcomes.
pub fn run_trials<F>(mc: &McConfig, trial: F) -> McCounts
where
    F: Fn(&mut RngStream) -> bool + Sync,
{
    let blocks = mc.trials.div_ceil(BLOCK_TRIALS);
    let block_len = |b: u64| BLOCK_TRIALS.min(mc.trials - b * BLOCK_TRIALS);
    let mut failures = 0u64;
    let mut done_trials = 0u64;
    let mut start = 0u64;
    while start < blocks {
        let end = (start + WAVE_BLOCKS).min(blocks);
        let next = AtomicU64::new(start);
        let wave_failures = AtomicU64::new(0);
        let run_worker = || loop {
            let b = next.fetch_add(1, Ordering::Relaxed);
            if b >= end {
                break;
            }
            let mut rng = RngStream::new(mc.seed, b);
            let count = (0..block_len(b)).filter(|_| trial(&mut rng)).count() as u64;
            wave_failures.fetch_add(count, Ordering::Relaxed);
        };
        let workers = mc.workers.min((end - start) as usize);
        if workers <= 1 {
            run_worker();
        } else {
            std::thread::scope(|s| {
                for _ in 0..workers {
                    s.spawn(run_worker);
                }
            });
        }
        failures += wave_failures.into_inner();
        done_trials += (start..end).map(block_len).sum::<u64>();
        start = end;
        if let Some(rel) = mc.target_ci {
            let c = McCounts {
                failures,
                trials: done_trials,
            };
            if failures > 0 && c.wilson_halfwidth() <= rel * c.fraction() {
                break;
            }
        }
    }
    McCounts {
        failures,
        trials: done_trials,
    }
}

/// Per-trial outage test for one hop: `M·C` gains, outage iff the mean
/// accumulated rate does not exceed `R/M`.
#[derive(Debug, Clone)]
pub struct HopTrial {
    gain: GainSampler,
    power: f64,
    draws: usize,
    per_round: f64,
}

#[derive(Debug, Clone)]
enum GainSampler {
    Rf(RicianSumSampler),
    Fso(FsoSampler),
}

impl HopTrial {
    pub fn rf(h: &RfHopParams<f64>) -> Self {
        HopTrial {
            gain: GainSampler::Rf(RicianSumSampler::new(h.fading())),
            power: h.output_power(),
            draws: h.rounds() * h.realizations(),
            per_round: h.rate() / h.rounds() as f64,
        }
    }

    pub fn fso(h: &FsoHopParams<f64>) -> Self {
        HopTrial {
            gain: GainSampler::Fso(FsoSampler::new(h.model())),
            power: h.p_tx(),
            draws: h.rounds() * h.realizations(),
            per_round: h.rate() / h.rounds() as f64,
        }
    }

    pub fn new(hop: &Hop<f64>) -> Self {
        match hop {
            Hop::Rf(h) => Self::rf(h),
            Hop::Fso(h) => Self::fso(h),
        }
    }

    pub fn fails(&self, rng: &mut RngStream) -> bool {
        let n = self.draws as f64;
        let mut acc = 0.0;
        for _ in 0..self.draws {
            let g = match &self.gain {
                GainSampler::Rf(s) => s.sample(rng),
                GainSampler::Fso(s) => s.sample(rng),
            };
            acc += (self.power * g).ln_1p();
            // Terms are nonnegative, so crossing the threshold early settles the trial.
            if acc / n > self.per_round {
                return false;
            }
        }
        true
    }
}

pub fn simulate_rf_hop(h: &RfHopParams<f64>, mc: &McConfig) -> OutageEstimate<f64> {
    let t = HopTrial::rf(h);
    run_trials(mc, |rng| t.fails(rng)).estimate()
}

pub fn simulate_fso_hop(h: &FsoHopParams<f64>, mc: &McConfig) -> OutageEstimate<f64> {
    let t = HopTrial::fso(h);
    run_trials(mc, |rng| t.fails(rng)).estimate()
}

fn route_trials(r: &Route<f64>) -> Vec<HopTrial> {
    r.hops().iter().map(HopTrial::new).collect()
}

/// Joint simulation: a trial fails when any hop fails.
pub fn simulate_route(r: &Route<f64>, mc: &McConfig) -> OutageEstimate<f64> {
    let hops = route_trials(r);
    run_trials(mc, |rng| hops.iter().any(|h| h.fails(rng))).estimate()
}

/// Joint simulation: a trial fails when every route fails.
pub fn simulate_mesh(m: &MeshNetwork<f64>, mc: &McConfig) -> OutageEstimate<f64> {
    let routes: Vec<Vec<HopTrial>> = m.routes().iter().map(route_trials).collect();
    run_trials(mc, |rng| routes.iter().all(|hops| hops.iter().any(|h| h.fails(rng)))).estimate()
}

/// Per-hop Monte Carlo evaluator for composing routes hop by hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarlo(pub McConfig);

impl HopEvaluator<f64> for MonteCarlo {
    fn rf(&self, hop: &RfHopParams<f64>) -> Result<OutageEstimate<f64>> {
        Ok(simulate_rf_hop(hop, &self.0))
    }

    fn fso(&self, hop: &FsoHopParams<f64>) -> Result<OutageEstimate<f64>> {
        Ok(simulate_fso_hop(hop, &self.0))
    }
}

/// Network whose per-hop powers follow a common SNR.
#[derive(Debug, Clone, Copy)]
pub enum Scenario<'a> {
    Route(&'a Route<f64>),
    Mesh(&'a MeshNetwork<f64>),
}

/// How outage is computed during SNR search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrEvaluator {
    Analytical(Analytical<f64>),
    /// Joint route or mesh simulation.
    MonteCarlo(McConfig),
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Outage of `scenario` with every hop set to `snr_db` (see [`Hop::at_snr`]).
pub fn outage_at_snr(scenario: Scenario<'_>, evaluator: &SnrEvaluator, snr_db: f64) -> Result<OutageEstimate<f64>> {
    let snr = db_to_linear(snr_db);
    match (scenario, evaluator) {
        (Scenario::Route(r), SnrEvaluator::Analytical(a)) => route_outage(&r.at_snr(snr)?, a),
        (Scenario::Mesh(m), SnrEvaluator::Analytical(a)) => mesh_outage(&m.at_snr(snr)?, a),
        (Scenario::Route(r), SnrEvaluator::MonteCarlo(mc)) => Ok(simulate_route(&r.at_snr(snr)?, mc)),
        (Scenario::Mesh(m), SnrEvaluator::MonteCarlo(mc)) => Ok(simulate_mesh(&m.at_snr(snr)?, mc)),
    }
}

/// Resolution of the SNR search in dB.
pub const SNR_TOL_DB: f64 = 0.01;
// Narrowest bracket at which an undecidable MC comparison is still accepted.
const MC_AMBIGUITY_DB: f64 = 0.05;

/// SNR in dB at which the outage of `scenario` crosses `target`, found by bisection
/// on `[lo_db, hi_db]`. The outage must be at least `target` at `lo_db` and at most
/// `target` at `hi_db`.
pub fn required_snr(
    target: f64,
    scenario: Scenario<'_>,
    evaluator: &SnrEvaluator,
    (lo_db, hi_db): (f64, f64),
) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid("target_outage", "target must lie in (0, 1)"));
    }
    if !(lo_db.is_finite() && hi_db.is_finite() && lo_db < hi_db) {
        return Err(Error::invalid("bounds_db", "need finite lo < hi"));
    }
    let at = |db: f64| outage_at_snr(scenario, evaluator, db);
    let (o_lo, o_hi) = (at(lo_db)?, at(hi_db)?);
    if o_lo.value() < target || o_hi.value() > target {
        return Err(Error::Bracket {
            lo_db,
            hi_db,
            target,
            outage_lo: o_lo.value(),
            outage_hi: o_hi.value(),
        });
    }
    let (mut lo, mut hi) = (lo_db, hi_db);
    while hi - lo > SNR_TOL_DB {
        let mid = 0.5 * (lo + hi);
        let o = at(mid)?;
        if (o.value() - target).abs() <= o.ci_halfwidth() && hi - lo > MC_AMBIGUITY_DB {
            return Err(Error::Precision {
                snr_db: mid,
                estimate: o.value(),
                halfwidth: o.ci_halfwidth(),
                target,
            });
        }
        if o.value() > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
