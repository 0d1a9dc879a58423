//! The four subcommands. Each returns a table of CSV records plus counts of
//! per-row errors and failed checks; writing and exit codes live in `main`.

use linkplan::analysis::{fso_ergodic_rate, min_rf_antennas};
use linkplan::network::{mesh_ergodic_rate, mesh_outage, FsoMethod, RfMethod};
use linkplan::simulate::{simulate_fso_hop, simulate_mesh, simulate_rf_hop, McConfig};
use linkplan::{Analytical, Error, Hop, MeshNetwork, Method, OutageEstimate, Route};

use crate::config::{db_to_linear, HopRef, Scenario, SweepVariable};

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub errors: usize,
    pub failed_checks: usize,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: vec![],
            errors: 0,
            failed_checks: 0,
        }
    }
}

// Shortest round-trip text, in exponent form for very small or large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Overrides applied at one sweep grid point.
#[derive(Debug, Clone, Copy, Default)]
struct Point {
    snr: Option<f64>,
    antennas: Option<usize>,
    rounds: Option<usize>,
    routes: Option<usize>,
}

fn point(s: &Scenario, x: f64) -> Point {
    let mut p = Point::default();
    match s.variable {
        SweepVariable::SnrDb => p.snr = Some(db_to_linear(x)),
        SweepVariable::Antennas => p.antennas = Some(x as usize),
        SweepVariable::Rounds => p.rounds = Some(x as usize),
        SweepVariable::Routes => p.routes = Some(x as usize),
    }
    p
}

// At a common SNR the FSO hop transmits `snr` and each of the N RF antennas consumes `snr / N`.
fn hop_at(s: &Scenario, h: HopRef, p: Point) -> linkplan::Result<Hop> {
    match h {
        HopRef::Rf(i) => {
            let n = p.antennas.unwrap_or(s.rf[i].fading.antennas());
            let p_cons = p.snr.map(|snr| snr / n as f64);
            Ok(s.rf_params(i, p.antennas, p.rounds, p_cons)?.into())
        }
        HopRef::Fso(i) => {
            let f = s.fso_params(i, p.antennas, p.rounds)?;
            Ok(match p.snr {
                Some(snr) => f.with_p_tx(snr)?,
                None => f,
            }
            .into())
        }
    }
}

// Route indices used at a grid point; a route count cycles through the configured routes.
fn route_indices(s: &Scenario, p: Point) -> Vec<usize> {
    match p.routes {
        Some(x) => (0..x).map(|i| i % s.routes.len()).collect(),
        None => (0..s.routes.len()).collect(),
    }
}

fn network_at(s: &Scenario, p: Point) -> linkplan::Result<MeshNetwork> {
    let routes = route_indices(s, p)
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            let hops = s.routes[r]
                .iter()
                .enumerate()
                .map(|(hi, &h)| {
                    hop_at(s, h, p).map_err(|e| Error::Hop {
                        index: hi,
                        source: Box::new(e),
                    })
                })
                .collect::<linkplan::Result<Vec<_>>>()
                .map_err(|e| Error::Route {
                    index,
                    source: Box::new(e),
                })?;
            Route::new(hops)
        })
        .collect::<linkplan::Result<Vec<_>>>()?;
    MeshNetwork::new(routes)
}

pub fn mc_config(s: &Scenario) -> linkplan::Result<McConfig> {
    let workers =
        s.mc.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mc = McConfig::new(s.mc.trials, s.mc.seed, workers)?;
    match s.mc.target_ci {
        Some(t) => mc.with_target_ci(t),
        None => Ok(mc),
    }
}

fn outage_with(s: &Scenario, method: Method, net: &MeshNetwork, mc: &McConfig) -> linkplan::Result<OutageEstimate> {
    if method == Method::MonteCarlo {
        return Ok(simulate_mesh(net, mc));
    }
    let eval = Analytical::for_method(method, s.theta).expect("composite rejected at validation");
    mesh_outage(net, &eval)
}

pub fn outage_sweep(s: &Scenario) -> linkplan::Result<Table> {
    let mut t = Table::new(&["sweep_var", "method", "outage", "ci_halfwidth", "error"]);
    if s.evaluators.is_empty() {
        return Err(Error::InvalidParameter {
            field: "evaluators",
            detail: "outage-sweep needs at least one method tag".into(),
        });
    }
    let mc = mc_config(s)?;
    for &x in &s.grid {
        let net = network_at(s, point(s, x));
        for &m in &s.evaluators {
            let result = net
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|n| outage_with(s, m, n, &mc));
            let (value, hw, err) = match result {
                Ok(e) => (num(e.value()), num(e.ci_halfwidth()), String::new()),
                Err(e) => {
                    t.errors += 1;
                    ("NaN".into(), "NaN".into(), e.to_string())
                }
            };
            t.rows.push(vec![num(x), m.tag().into(), value, hw, err]);
        }
    }
    Ok(t)
}

pub fn rate_sweep(s: &Scenario) -> Table {
    let mut t = Table::new(&["sweep_var", "rate_npcu", "limiting_hop", "error"]);
    for &x in &s.grid {
        let p = point(s, x);
        let indices = route_indices(s, p);
        let result = network_at(s, p).and_then(|n| mesh_ergodic_rate(&n));
        t.rows.push(match result {
            Ok(l) => {
                let hop = s.routes[indices[l.route]][l.hop];
                vec![num(x), num(l.rate), s.hop_id(hop).to_string(), String::new()]
            }
            Err(e) => {
                t.errors += 1;
                vec![num(x), "NaN".into(), String::new(), e.to_string()]
            }
        });
    }
    t
}

/// Fewest RF antennas matching a target rate; each antenna consumes the
/// grid SNR and, by default, the target is the slowest FSO hop at that SNR.
pub fn min_antennas(s: &Scenario) -> linkplan::Result<Table> {
    if s.variable != SweepVariable::SnrDb {
        return Err(Error::InvalidParameter {
            field: "sweep.variable",
            detail: "min-antennas sweeps snr_db".into(),
        });
    }
    if s.rf.is_empty() {
        return Err(Error::InvalidParameter {
            field: "rf_hops",
            detail: "min-antennas needs at least one RF hop".into(),
        });
    }
    if s.target_rate.is_none() && s.fso.is_empty() {
        return Err(Error::InvalidParameter {
            field: "min_antennas.target_rate",
            detail: "required when the scenario has no FSO hop".into(),
        });
    }
    let mut t = Table::new(&["snr_db", "rf_hop", "epsilon", "target_rate", "min_antennas", "error"]);
    for &x in &s.grid {
        let snr = db_to_linear(x);
        let target = match s.target_rate {
            Some(r) => Ok(r),
            None => s
                .fso
                .iter()
                .map(|f| fso_ergodic_rate(&f.model, snr))
                .try_fold(f64::INFINITY, |acc, r| r.map(|r| acc.min(r))),
        };
        for (i, spec) in s.rf.iter().enumerate() {
            let result = target.clone().and_then(|target| {
                let h = s.rf_params(i, Some(1), None, Some(snr))?;
                min_rf_antennas(h.fading(), h.pa(), target).map(|n| (target, n))
            });
            t.rows.push(match result {
                Ok((target, n)) => vec![
                    num(x),
                    spec.id.clone(),
                    num(spec.epsilon),
                    num(target),
                    n.to_string(),
                    String::new(),
                ],
                Err(e) => {
                    t.errors += 1;
                    let target = target.as_ref().map_or("NaN".into(), |r| num(*r));
                    vec![
                        num(x),
                        spec.id.clone(),
                        num(spec.epsilon),
                        target,
                        "NaN".into(),
                        e.to_string(),
                    ]
                }
            });
        }
    }
    Ok(t)
}

/// Range of MC outage over which the CLT approximations are held to a factor.
const FACTOR_RANGE: (f64, f64) = (1e-3, 0.5);
const FACTOR: f64 = 1.5;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Check {
    Factor,
    Lower,
    Upper,
    Equal,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Factor => "factor_1.5",
            Check::Lower => "lower_bound",
            Check::Upper => "upper_bound",
            Check::Equal => "equality",
        }
    }
}

// Failures that only mean the method does not apply to this hop.
fn inapplicable(e: &Error) -> bool {
    matches!(
        e,
        Error::Contract(_) | Error::UnsupportedOrder { .. } | Error::ApproximationInvalid(_)
    )
}

/// Every analytical method that applies to each hop, checked against MC.
pub fn validate(s: &Scenario) -> linkplan::Result<Table> {
    let mc = mc_config(s)?;
    let mut t = Table::new(&[
        "sweep_var",
        "hop",
        "method",
        "check",
        "analytical",
        "mc",
        "mc_ci_halfwidth",
        "status",
        "detail",
    ]);
    let hops: Vec<HopRef> = (0..s.rf.len())
        .map(HopRef::Rf)
        .chain((0..s.fso.len()).map(HopRef::Fso))
        .collect();
    for &x in &s.grid {
        let p = point(s, x);
        for &h in &hops {
            let id = s.hop_id(h).to_string();
            let hop = match hop_at(s, h, p) {
                Ok(hop) => hop,
                Err(e) => {
                    t.errors += 1;
                    t.rows.push(vec![
                        num(x),
                        id,
                        String::new(),
                        String::new(),
                        "NaN".into(),
                        "NaN".into(),
                        "NaN".into(),
                        "error".into(),
                        e.to_string(),
                    ]);
                    continue;
                }
            };
            let (sim, checks): (OutageEstimate, Vec<(Method, Check, linkplan::Result<OutageEstimate>)>) = match &hop {
                Hop::Rf(r) => {
                    let single = r.rounds() * r.realizations() == 1;
                    let mut checks = vec![
                        (Method::Lemma1, Check::Factor, RfMethod::LowSnr.evaluate(r)),
                        (
                            Method::Lemma3,
                            Check::Factor,
                            RfMethod::Piecewise { theta: s.theta }.evaluate(r),
                        ),
                        (Method::Lemma4, Check::Factor, RfMethod::Linearized.evaluate(r)),
                    ];
                    if single {
                        checks.push((Method::SingleShot, Check::Factor, RfMethod::SingleShot.evaluate(r)));
                        checks.push((Method::BoundJensenLo, Check::Equal, RfMethod::JensenLower.evaluate(r)));
                    } else {
                        checks.push((Method::BoundJensenLo, Check::Lower, RfMethod::JensenLower.evaluate(r)));
                        checks.push((Method::BoundJensenHi, Check::Upper, RfMethod::JensenUpper.evaluate(r)));
                    }
                    (simulate_rf_hop(r, &mc), checks)
                }
                Hop::Fso(f) => {
                    let bound = if f.rounds() * f.realizations() == 1 {
                        Check::Equal
                    } else {
                        Check::Upper
                    };
                    let checks = vec![
                        (Method::Lemma5, Check::Factor, FsoMethod::Clt.evaluate(f)),
                        (Method::BoundMinkowski, bound, FsoMethod::Minkowski.evaluate(f)),
                    ];
                    (simulate_fso_hop(f, &mc), checks)
                }
            };
            let (v, hw) = (sim.value(), sim.ci_halfwidth());
            let sigma = hw / Z95;
            for (method, check, result) in checks {
                let (analytical, status, detail) = match result {
                    Err(e) if inapplicable(&e) => ("NaN".into(), "skip", e.to_string()),
                    Err(e) => {
                        t.errors += 1;
                        ("NaN".into(), "error", e.to_string())
                    }
                    Ok(a) => {
                        let a = a.value();
                        let (status, detail) = match check {
                            Check::Factor if !(FACTOR_RANGE.0..=FACTOR_RANGE.1).contains(&v) => {
                                ("skip", "MC outage outside [1e-3, 0.5]".to_string())
                            }
                            Check::Factor => {
                                let ratio = if a > 0.0 { (a / v).max(v / a) } else { f64::INFINITY };
                                (
                                    if ratio <= FACTOR { "pass" } else { "fail" },
                                    format!("ratio {ratio:.4}"),
                                )
                            }
                            Check::Lower => (
                                if v >= a - 3.0 * sigma { "pass" } else { "fail" },
                                "MC >= bound - 3 sigma".into(),
                            ),
                            Check::Upper => (
                                if v <= a + 3.0 * sigma { "pass" } else { "fail" },
                                "MC <= bound + 3 sigma".into(),
                            ),
                            Check::Equal => (
                                if (v - a).abs() <= 3.0 * sigma { "pass" } else { "fail" },
                                "|MC - bound| <= 3 sigma".into(),
                            ),
                        };
                        (num(a), status, detail)
                    }
                };
                if status == "fail" {
                    t.failed_checks += 1;
                }
                t.rows.push(vec![
                    num(x),
                    id.clone(),
                    method.tag().into(),
                    check.name().into(),
                    analytical,
                    num(v),
                    num(hw),
                    status.into(),
                    detail,
                ]);
            }
        }
    }
    Ok(t)
}
