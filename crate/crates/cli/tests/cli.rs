use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use linkplan::analysis::rf_ergodic_rate;
use linkplan::{PaConfig, RicianFading};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_linkplan"));
    c.env_remove("LINKPLAN_WORKERS");
    c
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], config: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Data rows as split fields, skipping provenance and header lines.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const SMALL: &str = r#"
evaluators = ["lemma4", "lemma1", "monte_carlo"]
routes = [["rf", "fso"]]

[[rf_hops]]
id = "rf"
K = 0.5
omega = 1.0
N = 4
M = 2
C = 3
R = 1.5

[[fso_hops]]
id = "fso"
model = "exponential"
lambda = 1.0
M = 2
C_tilde = 3
R = 1.5

[sweep]
variable = "snr_db"
grid = [0.0, 5.0, 10.0]

[mc]
trials = 20000
seed = 11
"#;

#[test]
fn outage_sweep_schema_and_row_order() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "s.toml", SMALL);
    let out = run(&["outage-sweep"], &cfg);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "sweep_var,method,outage,ci_halfwidth,error");
    assert!(text.starts_with("# linkplan "));
    assert!(text.contains("# config_sha256 "));
    assert!(text.contains("# seed 11\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 9);
    let order: Vec<(&str, &str)> = r.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
    assert_eq!(order[0], ("0", "lemma4"));
    assert_eq!(order[1], ("0", "lemma1"));
    assert_eq!(order[2], ("0", "monte_carlo"));
    assert_eq!(order[8], ("10", "monte_carlo"));
    for row in &r {
        let v: f64 = row[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
        assert!(row[4].is_empty());
    }
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "s.toml", SMALL);
    let a = run(&["outage-sweep", "--workers", "1"], &cfg);
    let b = run(&["outage-sweep", "--workers", "3"], &cfg);
    let c = bin()
        .env("LINKPLAN_WORKERS", "2")
        .args(["outage-sweep", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success() && c.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn out_flag_writes_file_and_seed_flag_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "s.toml", SMALL);
    let path = dir.path().join("out.csv");
    let out = bin()
        .args(["outage-sweep", "--seed", "99", "--trials", "5000", "--out"])
        .arg(&path)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# seed 99\n"));
    assert!(text.contains("# trials 5000\n"));
}

#[test]
fn worker_env_is_validated() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "s.toml", SMALL);
    let out = bin()
        .env("LINKPLAN_WORKERS", "0")
        .args(["outage-sweep", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--workers"));
}

fn assert_config_error(text: &str, path_fragment: &str) {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "bad.toml", text);
    let out = run(&["outage-sweep"], &cfg);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    let err = stderr(&out);
    assert!(err.contains(path_fragment), "expected `{path_fragment}` in: {err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn empty_grid_is_rejected() {
    assert_config_error(&SMALL.replace("grid = [0.0, 5.0, 10.0]", "grid = []"), "sweep.grid");
}

#[test]
fn unsorted_grid_is_rejected() {
    assert_config_error(
        &SMALL.replace("grid = [0.0, 5.0, 10.0]", "grid = [5.0, 0.0]"),
        "sweep.grid",
    );
}

#[test]
fn negative_omega_names_the_field() {
    assert_config_error(&SMALL.replace("omega = 1.0", "omega = -1.0"), "rf_hops[0].omega");
}

#[test]
fn unknown_hop_reference_names_the_route() {
    assert_config_error(
        &SMALL.replace(r#"routes = [["rf", "fso"]]"#, r#"routes = [["rf", "fs0"]]"#),
        "routes[0][1]",
    );
}

#[test]
fn unknown_method_tag_is_rejected() {
    assert_config_error(&SMALL.replace(r#""lemma1""#, r#""lemma9""#), "evaluators[1]");
}

#[test]
fn shared_hop_between_routes_is_rejected() {
    assert_config_error(
        &SMALL.replace(r#"routes = [["rf", "fso"]]"#, r#"routes = [["rf", "fso"], ["rf"]]"#),
        "routes[1]",
    );
}

#[test]
fn missing_file_fails() {
    let out = bin()
        .args(["rate-sweep", "--config", "/nonexistent/linkplan.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot read"));
}

const RATE: &str = r#"
routes = [["rf", "fso"]]

[[rf_hops]]
id = "rf"
K = 0.01
omega = 1.0
N = 1
M = 1
C = 10
R = 1.0
pa = { epsilon = 0.75, theta_pa = 0.5, p_max_db = 25.0, p_cons_db = 3.0 }

[[fso_hops]]
id = "fso"
model = "gamma_gamma"
a = 4.3939
b = 2.5636
p_tx_db = 3.0
M = 1
C_tilde = 10
R = 1.0

[sweep]
variable = "N"
grid = [1, 10, 100, 1000, 10000]
"#;

#[test]
fn rate_sweep_saturates_at_fso_rate() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "r.toml", RATE);
    let out = run(&["rate-sweep"], &cfg);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "sweep_var,rate_npcu,limiting_hop,error"));
    let r = rows(&text);
    let rates: Vec<f64> = r.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(rates.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(r[0][2], "rf");
    assert_eq!(r[4][2], "fso");
    assert_eq!(rates[3], rates[4]);

    // N = 1 is the single-antenna RF rate.
    let pa = PaConfig::new(0.75, 0.5, 10f64.powf(2.5), 10f64.powf(0.3)).unwrap();
    let single = rf_ergodic_rate(&RicianFading::new(0.01, 1.0, 1).unwrap(), &pa).unwrap();
    assert!((rates[0] - single).abs() <= 1e-12 * single);
}

#[test]
fn rate_nondecreasing_in_snr() {
    let dir = TempDir::new().unwrap();
    let text = RATE
        .replace(r#"variable = "N""#, r#"variable = "snr_db""#)
        .replace(
            "grid = [1, 10, 100, 1000, 10000]",
            "grid = [-5.0, 0.0, 5.0, 10.0, 15.0]",
        )
        .replace("N = 1\n", "N = 50\n");
    let cfg = write_config(&dir, "r.toml", &text);
    let out = run(&["rate-sweep"], &cfg);
    assert!(out.status.success(), "{}", stderr(&out));
    let rates: Vec<f64> = rows(&stdout(&out)).iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(rates.windows(2).all(|w| w[1] >= w[0]), "{rates:?}");
}

const MIN_ANTENNAS: &str = r#"
routes = [["a", "fso"], ["b"], ["c"]]

[[rf_hops]]
id = "a"
K = 0.01
omega = 1.0
N = 1
M = 1
C = 1
R = 1.0
pa = { epsilon = 0.75, theta_pa = 0.5, p_max_db = 25.0 }

[[rf_hops]]
id = "b"
K = 0.01
omega = 1.0
N = 1
M = 1
C = 1
R = 1.0
pa = { epsilon = 0.5, theta_pa = 0.5, p_max_db = 25.0 }

[[rf_hops]]
id = "c"
K = 0.01
omega = 1.0
N = 1
M = 1
C = 1
R = 1.0
pa = { epsilon = 0.25, theta_pa = 0.5, p_max_db = 25.0 }

[[fso_hops]]
id = "fso"
model = "gamma_gamma"
a = 4.3939
b = 2.5636
M = 1
C_tilde = 1
R = 1.0

[sweep]
variable = "snr_db"
grid = [0.0, 3.0, 6.0]
"#;

fn min_antenna_counts(text: &str) -> Vec<Vec<String>> {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "m.toml", text);
    let out = run(&["min-antennas"], &cfg);
    assert!(out.status.success(), "{}", stderr(&out));
    rows(&stdout(&out))
}

#[test]
fn min_antennas_orders_by_efficiency_and_matches_library() {
    let r = min_antenna_counts(MIN_ANTENNAS);
    assert_eq!(r.len(), 9);
    for snr in r.chunks(3) {
        let n: Vec<usize> = snr.iter().map(|r| r[4].parse().unwrap()).collect();
        assert!(n[0] < n[1] && n[1] < n[2], "{n:?}");
    }
    // With a square-law PA, per-antenna output grows faster than the FSO rate,
    // so fewer antennas are needed at higher SNR.
    for hop in 0..3 {
        let n: Vec<usize> = (0..3).map(|s| r[3 * s + hop][4].parse().unwrap()).collect();
        assert!(n.windows(2).all(|w| w[1] <= w[0]), "{n:?}");
    }
    let at3 = &r[3];
    let target: f64 = at3[3].parse().unwrap();
    let pa = PaConfig::new(0.75, 0.5, 10f64.powf(2.5), 10f64.powf(0.3)).unwrap();
    let expect = linkplan::analysis::min_rf_antennas(&RicianFading::new(0.01, 1.0, 1).unwrap(), &pa, target).unwrap();
    assert_eq!(at3[4], expect.to_string());
}

#[test]
fn zero_target_rate_needs_one_antenna() {
    let r = min_antenna_counts(&format!("{MIN_ANTENNAS}\n[min_antennas]\ntarget_rate = 0.0\n"));
    assert!(r.iter().all(|r| r[4] == "1"));
}

const SINGLE_SHOT: &str = r#"
routes = [["rf", "fso"]]

[[rf_hops]]
id = "rf"
K = 1.0
omega = 1.0
N = 2
M = 1
C = 1
R = 1.0

[[fso_hops]]
id = "fso"
model = "gamma_gamma"
a = 4.3939
b = 2.5636
M = 1
C_tilde = 1
R = 1.0

[sweep]
variable = "snr_db"
grid = [0.0, 3.0]

[mc]
trials = 200000
seed = 5
"#;

#[test]
fn validate_bounds_are_exact_for_single_realization() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "v.toml", SINGLE_SHOT);
    let out = run(&["validate"], &cfg);
    let text = stdout(&out);
    let r = rows(&text);
    let bounds: Vec<&Vec<String>> = r
        .iter()
        .filter(|r| r[2] == "bound_jensen_lo" || r[2] == "bound_minkowski")
        .collect();
    assert_eq!(bounds.len(), 4);
    for b in bounds {
        assert_eq!(b[3], "equality");
        assert_eq!(b[7], "pass", "{b:?}");
    }
    assert!(stderr(&out).contains("validate: "));
    // Exit status reflects only the approximations' checks here.
    let failed = r.iter().any(|r| r[7] == "fail");
    assert_eq!(out.status.code(), Some(if failed { 2 } else { 0 }));
}

#[test]
fn validate_rejects_corrupted_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "v.toml", &SINGLE_SHOT.replace("omega = 1.0", "omega = -2.0"));
    let out = run(&["validate"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("rf_hops[0].omega"));
}

#[test]
fn evaluation_errors_are_recorded_per_row() {
    // The Minkowski bound needs a Gamma-Gamma hop; with an exponential hop the row carries the error.
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "e.toml", &SMALL.replace(r#""lemma1""#, r#""bound_minkowski""#));
    let out = run(&["outage-sweep"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    let r = rows(&stdout(&out));
    let bad: Vec<_> = r.iter().filter(|r| r[1] == "bound_minkowski").collect();
    assert_eq!(bad.len(), 3);
    for row in bad {
        assert_eq!(row[2], "NaN");
        assert!(!row[4].is_empty());
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let out = run(&["rate-sweep"], &path);
            assert!(out.status.success(), "{}: {}", path.display(), stderr(&out));
            seen += 1;
        }
    }
    assert!(seen >= 4);
}
