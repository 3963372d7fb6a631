use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use whichpath::config::{ExperimentConfig, Quantity};
use whichpath::results::{Method, Results};
use whichpath::run_experiment;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_whichpath"))
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .args(["run", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SAMPLED_FRINGES: &str = r#"{
  "experiment": "fringes",
  "paths": 2,
  "theta_grid": { "start": 0.0, "stop": 3.0, "points": 4 },
  "shots": 500,
  "seed": 42
}"#;

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn same_seed_gives_byte_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "c.json", SAMPLED_FRINGES);
    let (a, b, c) = (
        tmp.path().join("a"),
        tmp.path().join("b"),
        tmp.path().join("c"),
    );
    assert!(run(&config, &a, &["--threads", "1"]).status.success());
    assert!(run(&config, &b, &["--threads", "3"]).status.success());
    assert!(run(&config, &c, &["--seed", "43"]).status.success());
    let (a, b, c) = (dir_contents(&a), dir_contents(&b), dir_contents(&c));
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "duality.svg",
            "fringes.svg",
            "raw.csv",
            "results.json",
            "visibility.svg"
        ]
    );
    assert_eq!(a, b);
    assert_ne!(a, c, "a different seed must change the sampled data");
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cases = [
        (
            "unknown.json",
            r#"{"experiment": "fringes", "paths": 2, "thetas": [0.0], "seed": 1, "colour": 3}"#,
            "colour",
        ),
        (
            "paths.json",
            r#"{"experiment": "sweep_theta", "paths": 3, "thetas": [0.0], "seed": 1}"#,
            "paths",
        ),
        (
            "syntax.json",
            "{\n  \"experiment\": \"fringes\",\n  \"paths\": 2,,\n}",
            "line 3",
        ),
        (
            "noise.json",
            r#"{"experiment": "sweep_theta", "paths": 2, "thetas": [0.0], "seed": 1, "noise": {"epsilon": 0.9, "t": 0.7, "gamma": 1.0}}"#,
            "noise",
        ),
        (
            "fit.json",
            r#"{"experiment": "fit", "paths": 2, "thetas": [0.0], "seed": 1}"#,
            "fit section",
        ),
    ];
    for (name, json, needle) in cases {
        let o = run(&write_config(tmp.path(), name, json), &out, &[]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", stderr(&o));
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
    }
    let o = run(&tmp.path().join("missing.json"), &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists(), "nothing is written for rejected configs");
}

#[test]
fn estimate_vp_uses_every_binary_setting() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "vp.json",
        r#"{"experiment": "estimate_vp", "paths": 8, "thetas": [0.3, 1.2], "shots": 200, "seed": 9}"#,
    );
    let out = tmp.path().join("out");
    let o = run(&config, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let results = Results::load(&out.join("results.json")).unwrap();
    assert_eq!(results.records.len(), 2);
    for r in &results.records {
        assert_eq!(r.settings_used, 256);
        assert_eq!(r.quantity, Quantity::PurityVisibility);
        assert!(
            (r.value - r.reference.unwrap()).abs() < 5.0 * r.std_error,
            "{r:?}"
        );
    }
    let raw = fs::read_to_string(out.join("raw.csv")).unwrap();
    assert_eq!(raw.lines().count(), 1 + 2 * 256);
    assert!(out.join("settings.svg").exists());
}

#[test]
fn ideal_fringes_have_full_visibility_at_zero() {
    let config = ExperimentConfig::parse(
        r#"{"experiment": "fringes", "paths": 2, "thetas": [0.0, 1.0, 2.0], "seed": 0}"#,
    )
    .unwrap();
    let outcome = run_experiment(&config).unwrap();
    assert!(
        outcome.results.violations.is_empty(),
        "{:?}",
        outcome.results.violations
    );
    let v: Vec<_> = outcome
        .results
        .records
        .iter()
        .filter(|r| r.quantity == Quantity::FringeVisibility)
        .collect();
    assert_eq!(v.len(), 3);
    assert!((v[0].value - 1.0).abs() < 1e-10);
    for r in &v {
        assert!((r.value - (r.theta / 2.0).cos()).abs() < 1e-10, "{r:?}");
        assert_eq!(r.method, Method::Exact);
    }
}

#[test]
fn ideal_exact_sweep_saturates_duality() {
    let config = ExperimentConfig::parse(
        r#"{"experiment": "sweep_theta", "paths": 8, "theta_grid": {"start": 0.0, "stop": 3.14159, "points": 5}, "seed": 0}"#,
    )
    .unwrap();
    let outcome = run_experiment(&config).unwrap();
    assert!(
        outcome.results.violations.is_empty(),
        "{:?}",
        outcome.results.violations
    );
    for theta in config.thetas() {
        let get = |q| {
            outcome
                .results
                .records
                .iter()
                .find(|r| r.theta == theta && r.quantity == q)
                .unwrap()
                .value
        };
        let (d, v_c, v_p) = (
            get(Quantity::Distinguishability),
            get(Quantity::CoherenceVisibility),
            get(Quantity::PurityVisibility),
        );
        assert!((d * d + v_p * v_p - 1.0).abs() < 1e-10);
        assert!(v_c <= v_p + 1e-10);
    }
}

#[test]
fn noisy_sweep_stays_inside_the_circle() {
    let config = ExperimentConfig::parse(
        r#"{"experiment": "sweep_theta", "paths": 4, "thetas": [0.0, 0.8, 1.6, 2.4], "seed": 0,
            "noise": {"epsilon": 0.05, "t": 0.75, "gamma": 0.9}}"#,
    )
    .unwrap();
    let outcome = run_experiment(&config).unwrap();
    assert!(
        outcome.results.violations.is_empty(),
        "{:?}",
        outcome.results.violations
    );
    for r in &outcome.results.records {
        assert!((r.value - r.reference.unwrap()).abs() < 1e-8, "{r:?}");
    }
}

#[test]
fn fit_recovers_parameters_from_a_data_file() {
    let tmp = tempfile::tempdir().unwrap();
    let truth = whichpath_core::noise::NoiseParams::new(0.03, 0.8, 0.9).unwrap();
    let mut csv = String::from("theta,quantity,value,sigma\n");
    for i in 0..12 {
        let theta = std::f64::consts::PI * i as f64 / 11.0;
        for (label, kind) in [
            (
                "V_C",
                whichpath_core::noise::QuantityKind::CoherenceVisibility,
            ),
            ("D", whichpath_core::noise::QuantityKind::Distinguishability),
        ] {
            let v = whichpath_core::noise::model_value(4, theta, truth, kind).unwrap();
            csv.push_str(&format!("{theta},{label},{v},0.001\n"));
        }
    }
    let data = tmp.path().join("data.csv");
    fs::write(&data, csv).unwrap();
    let config = write_config(
        tmp.path(),
        "fit.json",
        &format!(
            r#"{{"experiment": "fit", "paths": 4, "thetas": [0.0], "seed": 0, "fit": {{"data": {:?}}}}}"#,
            data
        ),
    );
    let out = tmp.path().join("out");
    let o = run(&config, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fit = Results::load(&out.join("results.json"))
        .unwrap()
        .fit
        .unwrap();
    assert!(fit.converged);
    for (est, want) in [(&fit.epsilon, 0.03), (&fit.t, 0.8), (&fit.gamma, 0.9)] {
        assert!((est.value - want).abs() < 1e-3, "{est:?} vs {want}");
    }
    assert!(out.join("fit.svg").exists());

    fs::write(&data, "theta,quantity,value,sigma\n0.1,V_C,oops,0.1\n").unwrap();
    let o = run(&config, &out, &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("data.csv"));
}

#[test]
fn report_flags_broken_duality() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "s.json",
        r#"{"experiment": "sweep_theta", "paths": 4, "thetas": [0.5, 1.5], "seed": 0}"#,
    );
    let out = tmp.path().join("out");
    assert!(run(&config, &out, &[]).status.success());
    let good = out.join("results.json");

    let o = bin().arg("report").arg(&good).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("0 flagged row(s)"), "{text}");

    let mut results = Results::load(&good).unwrap();
    for r in results
        .records
        .iter_mut()
        .filter(|r| r.quantity == Quantity::Distinguishability && r.theta == 1.5)
    {
        r.value += 0.01;
    }
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, results.to_json()).unwrap();
    let o = bin().arg("report").arg(&good).arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(
        text.contains("duality") && text.contains("1 flagged row(s)"),
        "{text}"
    );

    assert_eq!(bin().arg("report").output().unwrap().status.code(), Some(2));
    let o = bin()
        .arg("report")
        .arg(tmp.path().join("none.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    fs::write(
        tmp.path().join("other.json"),
        r#"{"format": "something-else/1"}"#,
    )
    .unwrap();
    let o = bin()
        .arg("report")
        .arg(tmp.path().join("other.json"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn oracle_check_agrees_with_the_sweep() {
    let config = ExperimentConfig::parse(
        r#"{"experiment": "oracle_check", "paths": 4, "thetas": [0.4, 1.3], "oracle_samples": 4000, "seed": 2}"#,
    )
    .unwrap();
    let outcome = run_experiment(&config).unwrap();
    assert!(
        outcome.results.violations.is_empty(),
        "{:?}",
        outcome.results.violations
    );
    let oracle: Vec<_> = outcome
        .results
        .records
        .iter()
        .filter(|r| r.method == Method::Oracle)
        .collect();
    assert_eq!(oracle.len(), 2);
    assert!(oracle.iter().all(|r| r.std_error > 0.0));
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        whichpath::load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 5);
}

fn sweep_results(tmp: &Path, name: &str, json: &str) -> PathBuf {
    let out = tmp.join(name);
    let o = run(&write_config(tmp, &format!("{name}.json"), json), &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    out.join("results.json")
}

#[test]
fn report_residuals_vanish_ideally_and_turn_negative_with_noise() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = r#""theta_grid": {"start": 0.0, "stop": 3.14159, "points": 9}"#;
    let ideal = sweep_results(
        tmp.path(),
        "ideal",
        &format!(r#"{{"experiment": "sweep_theta", "paths": 4, {grid}, "seed": 1}}"#),
    );
    let noisy = sweep_results(
        tmp.path(),
        "noisy",
        &format!(
            r#"{{"experiment": "sweep_theta", "paths": 4, {grid}, "seed": 1, "noise": {{"epsilon": 0.02, "t": 0.72, "gamma": 0.96}}}}"#
        ),
    );
    let report = whichpath::report(&[ideal.clone(), noisy.clone()]).unwrap();
    assert_eq!(report.flags, 0, "{}", report.text);
    assert_eq!(report.rows.len(), 18);
    for row in &report.rows {
        let r = row.residual.unwrap();
        if row.file == ideal {
            assert!(r.abs() < 1e-10, "{row:?}");
        } else {
            assert!(r < 0.0, "{row:?}");
        }
    }
}

#[test]
fn report_rejects_files_without_measurements() {
    let tmp = tempfile::tempdir().unwrap();
    let good = sweep_results(
        tmp.path(),
        "good",
        r#"{"experiment": "sweep_theta", "paths": 2, "thetas": [1.0], "seed": 1}"#,
    );
    let mut empty = Results::load(&good).unwrap();
    empty.records.clear();
    let path = tmp.path().join("empty.json");
    fs::write(&path, empty.to_json()).unwrap();
    let o = bin().arg("report").arg(&good).arg(&path).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty(), "no partial table");
    assert!(stderr(&o).contains("no measured records"));
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn sixteen_path_sampled_sweep_has_opposed_trends() {
    let config = ExperimentConfig::parse(
        r#"{"experiment": "sweep_theta", "paths": 16, "quantities": ["V_C", "D"], "shots": 8000, "seed": 4,
            "theta_grid": {"start": 0.0, "stop": 3.4557519189487724, "points": 22}}"#,
    )
    .unwrap();
    let outcome = run_experiment(&config).unwrap();
    assert!(
        outcome.results.violations.is_empty(),
        "{:?}",
        outcome.results.violations
    );
    let series = |q| -> Vec<(f64, f64)> {
        outcome
            .results
            .records
            .iter()
            .filter(|r| r.quantity == q)
            .map(|r| (r.theta, r.value))
            .collect()
    };
    let (v, d) = (
        series(Quantity::CoherenceVisibility),
        series(Quantity::Distinguishability),
    );
    assert_eq!((v.len(), d.len()), (22, 22));
    assert!(slope(&v) < 0.0 && slope(&d) > 0.0);
}
