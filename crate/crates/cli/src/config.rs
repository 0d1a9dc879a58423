//! Scenario documents: TOML parsing, validation with field paths, and the
//! dB to linear conversion.

use std::collections::HashMap;

use linkplan::{FsoExponential, FsoGammaGamma, FsoHopParams, FsoModel, Method, PaConfig, RfHopParams, RicianFading};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        path: path.into(),
        message: message.into(),
    }
}

// Library parameter errors name the offending field; append it to the path.
fn from_lib(path: &str, e: linkplan::Error) -> ConfigError {
    match e {
        linkplan::Error::InvalidParameter { field: f, detail } => field(format!("{path}.{f}"), detail),
        other => field(path, other.to_string()),
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    rf_hops: Vec<RawRfHop>,
    #[serde(default)]
    fso_hops: Vec<RawFsoHop>,
    routes: Vec<Vec<String>>,
    sweep: RawSweep,
    #[serde(default)]
    evaluators: Vec<String>,
    #[serde(default)]
    mc: RawMc,
    /// Tangent parameter of the piecewise RF evaluator.
    #[serde(default = "default_theta")]
    theta: f64,
    min_antennas: Option<RawMinAntennas>,
}

fn default_theta() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRfHop {
    id: Option<String>,
    #[serde(rename = "K")]
    k: f64,
    omega: f64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "C")]
    c: usize,
    #[serde(rename = "R")]
    r: f64,
    #[serde(default)]
    pa: RawPa,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPa {
    epsilon: Option<f64>,
    theta_pa: Option<f64>,
    p_max_db: Option<f64>,
    p_cons_db: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFsoHop {
    id: Option<String>,
    model: String,
    lambda: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    p_tx_db: Option<f64>,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "C_tilde")]
    c_tilde: usize,
    #[serde(rename = "R")]
    r: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: String,
    grid: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    trials: Option<u64>,
    seed: Option<u64>,
    workers: Option<usize>,
    target_ci: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMinAntennas {
    target_rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    SnrDb,
    Antennas,
    Rounds,
    Routes,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::Antennas => "N",
            SweepVariable::Rounds => "M",
            SweepVariable::Routes => "routes",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RfSpec {
    pub id: String,
    pub fading: RicianFading,
    pub rounds: usize,
    pub realizations: usize,
    pub rate: f64,
    pub epsilon: f64,
    pub theta_pa: f64,
    pub p_max: f64,
    /// Per-antenna consumed power; `None` only when the sweep sets it.
    pub p_cons: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct FsoSpec {
    pub id: String,
    pub model: FsoModel,
    pub rounds: usize,
    pub realizations: usize,
    pub rate: f64,
    pub p_tx: Option<f64>,
    /// RF hop whose total power `N·P_cons` is the default transmit power.
    pub power_from: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopRef {
    Rf(usize),
    Fso(usize),
}

#[derive(Debug, Clone)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub target_ci: Option<f64>,
}

/// A validated scenario in linear units.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub rf: Vec<RfSpec>,
    pub fso: Vec<FsoSpec>,
    pub routes: Vec<Vec<HopRef>>,
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub evaluators: Vec<Method>,
    pub theta: f64,
    pub mc: McSettings,
    pub target_rate: Option<f64>,
}

pub const DEFAULT_TRIALS: u64 = 1_000_000;

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawScenario = toml::from_str(text)?;
        raw.validate()
    }

    pub fn hop_id(&self, hop: HopRef) -> &str {
        match hop {
            HopRef::Rf(i) => &self.rf[i].id,
            HopRef::Fso(i) => &self.fso[i].id,
        }
    }

    /// RF hop with its antenna count, rounds and per-antenna power overridden as given.
    pub fn rf_params(
        &self,
        i: usize,
        antennas: Option<usize>,
        rounds: Option<usize>,
        p_cons: Option<f64>,
    ) -> linkplan::Result<RfHopParams> {
        let s = &self.rf[i];
        let fading = match antennas {
            Some(n) => s.fading.with_antennas(n)?,
            None => s.fading,
        };
        // Unset powers are only reachable under an SNR sweep, which overrides them.
        let p_cons = p_cons.or(s.p_cons).unwrap_or(1.0);
        let pa = PaConfig::new(s.epsilon, s.theta_pa, s.p_max, p_cons)?;
        RfHopParams::new(fading, pa, rounds.unwrap_or(s.rounds), s.realizations, s.rate)
    }

    pub fn fso_params(
        &self,
        i: usize,
        antennas: Option<usize>,
        rounds: Option<usize>,
    ) -> linkplan::Result<FsoHopParams> {
        let s = &self.fso[i];
        let p_tx = match (s.p_tx, s.power_from) {
            (Some(p), _) => p,
            (None, Some(rf)) => {
                let r = &self.rf[rf];
                antennas.unwrap_or(r.fading.antennas()) as f64 * r.p_cons.unwrap_or(1.0)
            }
            (None, None) => 1.0,
        };
        FsoHopParams::new(s.model, p_tx, rounds.unwrap_or(s.rounds), s.realizations, s.rate)
    }
}

impl RawScenario {
    fn validate(self) -> Result<Scenario, ConfigError> {
        let variable = match self.sweep.variable.as_str() {
            "snr_db" => SweepVariable::SnrDb,
            "N" => SweepVariable::Antennas,
            "M" => SweepVariable::Rounds,
            "routes" => SweepVariable::Routes,
            other => {
                return Err(field(
                    "sweep.variable",
                    format!("unknown variable `{other}` (expected snr_db, N, M or routes)"),
                ))
            }
        };
        let grid = self.sweep.grid;
        if grid.is_empty() {
            return Err(field("sweep.grid", "grid must not be empty"));
        }
        for (i, x) in grid.iter().enumerate() {
            if !x.is_finite() {
                return Err(field(format!("sweep.grid[{i}]"), "value must be finite"));
            }
            if variable != SweepVariable::SnrDb && !(*x >= 1.0 && x.fract() == 0.0) {
                return Err(field(
                    format!("sweep.grid[{i}]"),
                    format!("{} values must be positive integers", variable.name()),
                ));
            }
        }
        if grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(field("sweep.grid", "grid must be sorted in increasing order"));
        }
        let power_swept = variable == SweepVariable::SnrDb;

        let mut ids: HashMap<String, HopRef> = HashMap::new();
        let mut rf = Vec::with_capacity(self.rf_hops.len());
        for (i, h) in self.rf_hops.into_iter().enumerate() {
            let path = format!("rf_hops[{i}]");
            let id = h.id.unwrap_or_else(|| format!("rf{i}"));
            if ids.insert(id.clone(), HopRef::Rf(i)).is_some() {
                return Err(field(format!("{path}.id"), format!("duplicate hop id `{id}`")));
            }
            let fading = RicianFading::new(h.k, h.omega, h.n).map_err(|e| from_lib(&path, e))?;
            let pa_path = format!("{path}.pa");
            let db = |name: &str, v: Option<f64>| -> Result<Option<f64>, ConfigError> {
                match v {
                    Some(x) if !x.is_finite() => Err(field(format!("{pa_path}.{name}"), "dB value must be finite")),
                    other => Ok(other.map(db_to_linear)),
                }
            };
            let p_max = db("p_max_db", h.pa.p_max_db)?.unwrap_or(f64::INFINITY);
            let p_cons = db("p_cons_db", h.pa.p_cons_db)?;
            if p_cons.is_none() && !power_swept {
                return Err(field(
                    format!("{pa_path}.p_cons_db"),
                    "required unless sweep.variable = \"snr_db\"",
                ));
            }
            let (epsilon, theta_pa) = (h.pa.epsilon.unwrap_or(1.0), h.pa.theta_pa.unwrap_or(0.0));
            PaConfig::new(epsilon, theta_pa, p_max, p_cons.unwrap_or(f64::MIN_POSITIVE))
                .map_err(|e| from_lib(&pa_path, e))?;
            let spec = RfSpec {
                id,
                fading,
                rounds: h.m,
                realizations: h.c,
                rate: h.r,
                epsilon,
                theta_pa,
                p_max,
                p_cons,
            };
            RfHopParams::new(fading, PaConfig::ideal(1.0).expect("unit power"), h.m, h.c, h.r)
                .map_err(|e| from_lib(&path, e))?;
            rf.push(spec);
        }

        let mut fso = Vec::with_capacity(self.fso_hops.len());
        for (i, h) in self.fso_hops.into_iter().enumerate() {
            let path = format!("fso_hops[{i}]");
            let id = h.id.unwrap_or_else(|| format!("fso{i}"));
            if ids.insert(id.clone(), HopRef::Fso(i)).is_some() {
                return Err(field(format!("{path}.id"), format!("duplicate hop id `{id}`")));
            }
            let model: FsoModel = match h.model.as_str() {
                "exponential" => {
                    let lambda = h
                        .lambda
                        .ok_or_else(|| field(format!("{path}.lambda"), "required for the exponential model"))?;
                    FsoExponential::new(lambda).map_err(|e| from_lib(&path, e))?.into()
                }
                "gamma_gamma" => {
                    let a =
                        h.a.ok_or_else(|| field(format!("{path}.a"), "required for the gamma_gamma model"))?;
                    let b =
                        h.b.ok_or_else(|| field(format!("{path}.b"), "required for the gamma_gamma model"))?;
                    FsoGammaGamma::new(a, b).map_err(|e| from_lib(&path, e))?.into()
                }
                other => {
                    return Err(field(
                        format!("{path}.model"),
                        format!("unknown model `{other}` (expected exponential or gamma_gamma)"),
                    ))
                }
            };
            let p_tx = match h.p_tx_db {
                Some(x) if !x.is_finite() => return Err(field(format!("{path}.p_tx_db"), "dB value must be finite")),
                other => other.map(db_to_linear),
            };
            FsoHopParams::new(model, p_tx.unwrap_or(1.0), h.m, h.c_tilde, h.r).map_err(|e| from_lib(&path, e))?;
            fso.push(FsoSpec {
                id,
                model,
                rounds: h.m,
                realizations: h.c_tilde,
                rate: h.r,
                p_tx,
                power_from: None,
            });
        }

        if self.routes.is_empty() {
            return Err(field("routes", "at least one route is required"));
        }
        let mut routes = Vec::with_capacity(self.routes.len());
        for (i, r) in self.routes.iter().enumerate() {
            if r.is_empty() {
                return Err(field(format!("routes[{i}]"), "a route needs at least one hop"));
            }
            let mut hops = Vec::with_capacity(r.len());
            for (j, name) in r.iter().enumerate() {
                let hop = *ids
                    .get(name)
                    .ok_or_else(|| field(format!("routes[{i}][{j}]"), format!("unknown hop `{name}`")))?;
                if hops.contains(&hop) {
                    return Err(field(
                        format!("routes[{i}][{j}]"),
                        format!("hop `{name}` appears twice in the route"),
                    ));
                }
                hops.push(hop);
            }
            routes.push(hops);
        }
        // Routes are non-overlapping: no hop may be shared between two routes.
        for (i, a) in routes.iter().enumerate() {
            for (j, b) in routes.iter().enumerate().skip(i + 1) {
                if let Some(shared) = a.iter().find(|h| b.contains(h)) {
                    let name = match *shared {
                        HopRef::Rf(k) => &rf[k].id,
                        HopRef::Fso(k) => &fso[k].id,
                    };
                    return Err(field(
                        format!("routes[{j}]"),
                        format!("hop `{name}` is already used by routes[{i}]"),
                    ));
                }
            }
        }
        for (k, spec) in fso.iter_mut().enumerate() {
            if spec.p_tx.is_some() {
                continue;
            }
            spec.power_from = routes.iter().find(|r| r.contains(&HopRef::Fso(k))).and_then(|r| {
                r.iter().find_map(|h| match h {
                    HopRef::Rf(i) => Some(*i),
                    HopRef::Fso(_) => None,
                })
            });
            if spec.power_from.is_none() && !power_swept {
                return Err(field(
                    format!("fso_hops[{k}].p_tx_db"),
                    "required when the hop shares no route with an RF hop and the sweep does not set the SNR",
                ));
            }
        }
        if variable == SweepVariable::Routes {
            // Route counts beyond the configured list reuse routes cyclically.
            if grid.iter().any(|&x| x > 64.0) {
                return Err(field("sweep.grid", "at most 64 routes are supported"));
            }
        }

        let mut evaluators = Vec::with_capacity(self.evaluators.len());
        for (i, tag) in self.evaluators.iter().enumerate() {
            let m: Method = tag
                .parse()
                .map_err(|_| field(format!("evaluators[{i}]"), format!("unknown method tag `{tag}`")))?;
            if m == Method::Composite {
                return Err(field(
                    format!("evaluators[{i}]"),
                    "`composite` is an output tag, not an evaluator",
                ));
            }
            evaluators.push(m);
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(field("theta", "tangent parameter must be positive and finite"));
        }

        let mc = McSettings {
            trials: self.mc.trials.unwrap_or(DEFAULT_TRIALS),
            seed: self.mc.seed.unwrap_or(0),
            workers: self.mc.workers,
            target_ci: self.mc.target_ci,
        };
        if mc.workers == Some(0) {
            return Err(field("mc.workers", "at least one worker is required"));
        }
        if mc.trials < linkplan::simulate::MIN_TRIALS {
            return Err(field(
                "mc.trials",
                format!("at least {} trials are required", linkplan::simulate::MIN_TRIALS),
            ));
        }
        if let Some(t) = mc.target_ci {
            if !(t > 0.0 && t.is_finite()) {
                return Err(field("mc.target_ci", "relative half-width must be positive"));
            }
        }
        let target_rate = self.min_antennas.and_then(|m| m.target_rate);
        if let Some(t) = target_rate {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(field("min_antennas.target_rate", "must be finite and non-negative"));
            }
        }

        Ok(Scenario {
            rf,
            fso,
            routes,
            variable,
            grid,
            evaluators,
            theta: self.theta,
            mc,
            target_rate,
        })
    }
}
