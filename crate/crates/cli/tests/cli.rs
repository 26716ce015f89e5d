use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qclock::estimators::{combined_estimator, mle_numeric};
use qclock::{ClockModel, CountVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn qclock(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclock"))
        .args(args)
        .env_remove("QCLOCK_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qclock(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&all)).unwrap()
}

/// Header and numeric rows of a CSV table.
fn csv_table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn probs_examples() {
    let (header, rows) = csv_table(&stdout(&["probs", "--model", "one-qubit", "--omega", "1", "--chi", "1", "--t", "3.14159"]));
    assert_eq!(header, ["t", "P+", "P-", "sum"]);
    assert!((num(&rows[0][2]) - 1.0).abs() < 1e-10);

    let text = stdout(&["probs", "--model", "two-qubit", "--omega", "0.5", "--Omega", "1", "--t", "0"]);
    assert_eq!(text, "t,P0+,P0-,P1+,P1-,sum\n0,0.5,0,0.5,0,1\n");

    let (header, rows) = csv_table(&stdout(&["probs", "--model", "ghz", "--omega", "1", "--n", "3", "--t", "1.0472"]));
    for (label, value) in header.iter().zip(&rows[0]).skip(1) {
        let minus = label.chars().filter(|&c| c == '-').count();
        let want = match label.as_str() {
            "sum" => 1.0,
            _ if minus % 2 == 1 => 0.25,
            _ => 0.0,
        };
        assert!((num(value) - want).abs() < 1e-10, "{label} {value}");
    }
}

#[test]
fn probs_grid_rows_sum_to_one() {
    let (_, rows) = csv_table(&stdout(&["probs", "--model", "one-qubit", "--omega", "0.7", "--chi", "0.4", "--t-grid", "0:20:41"]));
    assert_eq!(rows.len(), 41);
    for row in rows {
        assert!((num(&row[3]) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn fisher_constants() {
    let cases: [(&[&str], f64); 3] = [
        (&["--model", "one-qubit", "--omega", "2", "--chi", "1"], 4.0),
        (&["--model", "two-qubit", "--omega", "0.5", "--Omega", "1"], 0.625),
        (&["--model", "ghz", "--omega", "1", "--n", "2"], 4.0),
    ];
    for (model, want) in cases {
        let mut args = vec!["fisher", "--t-grid", "0.1:1.4:14", "--probes", "100"];
        args.extend(model);
        let (header, rows) = csv_table(&stdout(&args));
        assert_eq!(header, ["t", "classical_fisher", "analytic", "qfi", "crb", "degenerate"]);
        for row in rows {
            assert!((num(&row[1]) - want).abs() < 1e-9, "{model:?} {row:?}");
            assert!((num(&row[2]) - want).abs() < 1e-12, "{model:?} {row:?}");
            assert!((num(&row[4]) - 1.0 / (100.0 * want).sqrt()).abs() < 1e-11);
            assert_eq!(row[5], "0");
        }
    }
}

#[test]
fn fisher_degeneracy() {
    let grid = stdout(&["fisher", "--model", "one-qubit", "--t-grid", "0:3.14159265359:3"]);
    let (_, rows) = csv_table(&grid);
    assert_eq!(rows[0][5], "1");
    assert_eq!(rows[0][2], "NaN");
    assert_eq!(rows[1][5], "0");

    let single = qclock(&["fisher", "--model", "one-qubit", "--t", "0"]);
    assert_eq!(single.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&single.stderr).contains("singular"));
    let (_, rows) = csv_table(&String::from_utf8(single.stdout).unwrap());
    assert_eq!(rows[0][5], "1");
}

#[test]
fn estimate_examples() {
    let r = json(&["estimate", "--model", "one-qubit", "--omega", "1", "--counts", "4,2"]);
    assert!((r["t_hat"].as_f64().unwrap() - PI / 2.0).abs() < 1e-11);
    assert_eq!(r["valid"], true);

    let pair = ["estimate", "--model", "two-qubit", "--omega", "0.5", "--Omega", "1"];
    for counts in ["5,5,3,2", "7,7,0,1", "1,1,9,9"] {
        let mut args = pair.to_vec();
        args.extend(["--counts", counts]);
        let r = json(&args);
        assert!((r["coarse_t"].as_f64().unwrap() - PI).abs() < 1e-11, "{counts}");
        assert_eq!(r["branch"], "Root1", "{counts}");
        assert_eq!(r["estimator"], "combined");
    }
}

#[test]
fn estimate_matches_library() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let models = [
        (ClockModel::two_qubit(0.5, 1.0).unwrap(), ["--omega", "0.5", "--Omega", "1"]),
        (ClockModel::two_qubit(0.4, 1.3).unwrap(), ["--omega", "0.4", "--Omega", "1.3"]),
    ];
    for (model, flags) in &models {
        for _ in 0..10 {
            let k: Vec<u64> = (0..4).map(|_| rng.random_range(0..40)).collect();
            let counts = CountVector::two_qubit(k[0], k[1], k[2], k[3]);
            let spec = format!("{},{},{},{}", k[0], k[1], k[2], k[3]);
            let mut args = vec!["estimate", "--model", "two-qubit", "--counts", &spec, "--estimator", "numeric"];
            args.extend(flags);
            let r = json(&args);
            let lib = mle_numeric(model, &counts, model.identifiability_window()).unwrap();
            let t_hat = r["t_hat"].as_f64().unwrap();
            assert!((t_hat - lib.t_hat).abs() <= 1e-11 * (1.0 + lib.t_hat), "{spec}: {t_hat} vs {}", lib.t_hat);
            assert_eq!(r["branch"], "Numeric");
        }
    }
    for _ in 0..10 {
        let k: Vec<u64> = (0..4).map(|_| rng.random_range(1..40)).collect();
        let counts = CountVector::two_qubit(k[0], k[1], k[2], k[3]);
        let spec = format!("{},{},{},{}", k[0], k[1], k[2], k[3]);
        let r = json(&["estimate", "--model", "two-qubit", "--omega", "0.5", "--Omega", "1", "--counts", &spec]);
        let lib = combined_estimator(&counts).unwrap();
        assert!((r["t_hat"].as_f64().unwrap() - lib.t_hat).abs() <= 1e-11 * (1.0 + lib.t_hat), "{spec}");
        assert_eq!(r["valid"], lib.valid);
    }
}

#[test]
fn estimate_rejects_bad_input() {
    let bad = [
        &["estimate", "--model", "one-qubit", "--counts", "2,5"][..],
        &["estimate", "--model", "two-qubit", "--omega", "0.5", "--Omega", "1", "--counts", "1,2,3"],
        &["estimate", "--model", "two-qubit", "--omega", "0.4", "--Omega", "1", "--counts", "1,2,3,4", "--estimator", "combined"],
        &["estimate", "--model", "one-qubit", "--chi", "0.5", "--counts", "4,2", "--estimator", "closed-form"],
    ];
    for args in bad {
        assert_eq!(qclock(args).status.code(), Some(2), "{args:?}");
    }
    let empty = qclock(&["estimate", "--model", "two-qubit", "--omega", "0.5", "--Omega", "1", "--counts", "0,0,3,4"]);
    assert_eq!(empty.status.code(), Some(3));
    let r: Value = serde_json::from_slice(&qclock(&[
        "estimate", "--model", "two-qubit", "--omega", "0.5", "--Omega", "1", "--counts", "0,0,3,4", "--format", "json",
    ])
    .stdout)
    .unwrap();
    assert_eq!(r["valid"], false);
}

#[test]
fn recurrence_examples() {
    let cases: [(&[&str], f64); 3] = [
        (&["--model", "one-qubit", "--omega", "1"], 2.0 * PI),
        (&["--model", "two-qubit", "--omega", "0.5", "--Omega", "1"], 4.0 * PI),
        (&["--model", "ghz", "--omega", "1", "--n", "2"], PI),
    ];
    for (model, want) in cases {
        let mut args = vec!["recurrence", "--t-max", "40"];
        args.extend(model);
        let r = json(&args);
        assert!((r["recurrence_time"].as_f64().unwrap() - want).abs() < 1e-4, "{model:?} {r}");
    }
    let never = json(&["recurrence", "--model", "one-qubit", "--omega", "1", "--t-max", "5"]);
    assert!(never["recurrence_time"].is_null());
}

#[test]
fn usage_errors_exit_with_two() {
    let bad = [
        &["probs", "--model", "ghz", "--t", "1"][..],
        &["probs", "--model", "one-qubit", "--Omega", "2", "--t", "1"],
        &["probs", "--model", "one-qubit", "--chi", "1.5", "--t", "1"],
        &["probs", "--model", "one-qubit", "--t-grid", "1:0:5"],
        &["probs", "--model", "one-qubit"],
        &["probs", "--model", "qutrit", "--t", "1"],
        &["compare", "--budget", "7", "--t", "1"],
        &["sweep", "--config", "/nonexistent/sweep.cfg"],
    ];
    for args in bad {
        assert_eq!(qclock(args).status.code(), Some(2), "{args:?}");
    }
}

fn sweep_csv(path: &Path) -> Vec<Vec<String>> {
    let (header, rows) = csv_table(&stdout(&["sweep", "--config", path.to_str().unwrap()]));
    assert_eq!(
        header,
        ["experiment", "method", "t", "mean", "std_error", "bias", "crb", "n_valid", "n_total", "degenerate"]
    );
    rows
}

#[test]
fn fig3_spread_tracks_the_bound() {
    let rows = sweep_csv(&config("fig3.cfg"));
    assert_eq!(rows.len(), 9 * 31);
    for chunk in rows.chunks(31) {
        let name = &chunk[0][0];
        // the middle of the window, away from the arcsine edges
        for row in &chunk[6..=24] {
            let ratio = num(&row[4]) / num(&row[6]);
            let allowed = if name.starts_with("n10_") { 0.85..=1.4 } else { 0.85..=1.3 };
            assert!(allowed.contains(&ratio), "{name} t={} ratio {ratio}", row[2]);
        }
    }
}

#[test]
fn fig7_curves_flatten_onto_the_bound() {
    let rows = sweep_csv(&config("fig7.cfg"));
    let near = |name: &str| {
        rows.iter()
            .filter(|r| r[0] == name)
            .filter(|r| (num(&r[4]) / num(&r[6]) - 1.0).abs() <= 0.15)
            .count()
    };
    let (small, large) = (near("n32"), near("n128"));
    assert!(large > small, "n128 {large} vs n32 {small}");
    assert!(large >= 40, "n128 near the bound at only {large} of 62 times");
}

#[test]
fn fig6_mean_curves() {
    let rows = sweep_csv(&config("fig6.cfg"));
    assert!(rows.iter().filter(|r| r[0] == "n10").all(|r| r[1] == "exact"));
    assert!(rows.iter().filter(|r| r[0] == "n100").all(|r| r[1] == "monte-carlo"));
    assert_eq!(num(&rows[0][3]), 0.0);
}

#[test]
fn single_trial_has_zero_spread() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.cfg");
    std::fs::write(
        &path,
        "[once]\nmodel = \"one-qubit\"\nomega = 1.0\nprobes = 50\ntrials = 1\nseed = 9\nt_grid = \"0.3:2.8:6\"\n",
    )
    .unwrap();
    for row in sweep_csv(&path) {
        assert_eq!(row[4], "0");
        assert_eq!(row[8], "1");
    }
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.cfg");
    std::fs::write(
        &path,
        "[x]\nmodel = \"one-qubit\"\nomega = 1.0\nprobes = 5\ntrials = 2\nseed = 1\nt_grid = \"0.5:1:2\"\nprobs = 3\n",
    )
    .unwrap();
    let out = qclock(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("probs"), "{err}");
}

#[test]
fn replaying_a_manifest_rewrites_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let fig7 = config("fig7.cfg");
    let runs: [(&[&str], &str); 3] = [
        (&["sweep", "--config", fig7.to_str().unwrap()], "fig7.csv"),
        (&["compare", "--budget", "40", "--t-grid", "0.2:3:8", "--trials", "300", "--seed", "5", "--format", "json"], "cmp.json"),
        (&["fisher", "--model", "two-qubit", "--omega", "0.3", "--Omega", "1.1", "--t-grid", "0:9:19"], "fisher.csv"),
    ];
    for (args, file) in runs {
        let first = dir.path().join(file);
        let mut all = args.to_vec();
        all.extend(["--out", first.to_str().unwrap()]);
        stdout(&all);

        let manifest_path = dir.path().join(format!("{file}.manifest.json"));
        let manifest: Value = serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
        assert_eq!(manifest["command"], args[0]);
        assert_eq!(manifest["outputs"][0], first.to_str().unwrap());
        for key in ["config", "seeds", "version", "started", "finished", "format"] {
            assert!(!manifest[key].is_null(), "{key}");
        }

        let second = dir.path().join(format!("replay-{file}"));
        let out = Command::new(env!("CARGO_BIN_EXE_qclock"))
            .args(["replay", manifest_path.to_str().unwrap(), "--out", second.to_str().unwrap()])
            .env("QCLOCK_THREADS", "3")
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap(), "{file}");
    }
}

#[test]
fn thread_count_never_changes_output() {
    let path = config("fig7.cfg");
    let args = ["sweep", "--config", path.to_str().unwrap()];
    let reference = stdout(&args);
    for threads in ["1", "2", "5"] {
        let out = Command::new(env!("CARGO_BIN_EXE_qclock"))
            .args(args)
            .env("QCLOCK_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), reference, "{threads}");
    }
    let bad = Command::new(env!("CARGO_BIN_EXE_qclock"))
        .args(args)
        .env("QCLOCK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn compare_columns() {
    let r = json(&["compare", "--budget", "200", "--t", "1.0", "--trials", "200"]);
    let row = &r[0];
    assert!((row["one_qubit_crb"].as_f64().unwrap() - 1.0 / 50f64.sqrt()).abs() < 1e-11);
    assert!((row["two_qubit_crb"].as_f64().unwrap() - 1.0 / 62.5f64.sqrt()).abs() < 1e-11);
    assert_eq!(row["ghz_in_window"], true);
}
