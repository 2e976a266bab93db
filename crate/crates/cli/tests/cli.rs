use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn brownflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brownflow"))
        .args(args)
        .env_remove("BROWNFLOW_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = brownflow(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Data rows of a CSV with a config comment and a header.
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# brownflow "));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let data = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    (header, data)
}

fn config_line(csv: &str) -> Value {
    let first = csv.lines().next().unwrap();
    serde_json::from_str(&first[first.find('{').unwrap()..]).unwrap()
}

fn points(csv: &str) -> Vec<(f64, f64)> {
    let (header, data) = rows(csv);
    assert_eq!(header, ["re", "im"]);
    data.into_iter().map(|r| (r[0], r[1])).collect()
}

#[test]
fn same_seed_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gue.csv");
    let run = || {
        ok(&["sample", "gue", "--n", "2000", "--seed", "7", "-o", path.to_str().unwrap()]);
        fs::read(&path).unwrap()
    };
    let first = run();
    assert_eq!(first, run());
    let other = ok(&["sample", "gue", "--n", "300", "--seed", "8"]);
    let stdout_same = ok(&["sample", "gue", "--n", "300", "--seed", "8"]);
    assert_eq!(other, stdout_same);
    assert_ne!(rows(&String::from_utf8(first).unwrap()).1, rows(&other).1);
}

#[test]
fn seed_precedence_flag_env_config_default() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"version": 1, "n": 20, "seed": 5}"#).unwrap();
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_brownflow"));
        cmd.args(["sample", "ginibre", "--config", cfg.to_str().unwrap()]);
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        match env {
            Some(e) => cmd.env("BROWNFLOW_SEED", e),
            None => cmd.env_remove("BROWNFLOW_SEED"),
        };
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        config_line(&String::from_utf8(out.stdout).unwrap())["seed"].as_u64().unwrap()
    };
    assert_eq!(run(Some("9"), Some("11")), 11);
    assert_eq!(run(Some("9"), None), 9);
    assert_eq!(run(None, None), 5);
    let no_cfg = ok(&["sample", "gue", "--n", "5"]);
    assert_eq!(config_line(&no_cfg)["seed"], 42);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("unknown.json");
    fs::write(&unknown, r#"{"version": 1, "size": 3}"#).unwrap();
    let future = dir.path().join("future.json");
    fs::write(&future, r#"{"version": 2}"#).unwrap();
    for path in [&unknown, &future] {
        assert_eq!(code(&brownflow(&["sample", "--config", path.to_str().unwrap()])), 2);
    }
    assert_eq!(code(&brownflow(&["sample", "--config", "/nonexistent/cfg.json"])), 2);
    assert_eq!(code(&brownflow(&["sample", "gue", "--n", "0"])), 2);
    assert_eq!(code(&brownflow(&["density", "multiplicative", "--theta-resolution", "4"])), 2);
    assert_eq!(code(&brownflow(&["compare"])), 2);
    assert_eq!(code(&brownflow(&["run"])), 2);
    assert_eq!(code(&brownflow(&["frobnicate"])), 2);
}

#[test]
fn run_executes_config_command_and_embeds_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("nested/out.csv");
    fs::write(
        &cfg,
        format!(
            r#"{{"version": 1, "command": "sample", "ensemble": "nilpotent-demo", "n": 40, "epsilon": 1e-5, "output": {:?}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    ok(&["run", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    let text = fs::read_to_string(&out).unwrap();
    let c = config_line(&text);
    assert_eq!(c["ensemble"], "nilpotent-demo");
    assert_eq!(c["seed"], 3);
    assert_eq!(c["format"], "csv");
    // Tiny perturbations of the Jordan block spread its eigenvalues near a circle.
    let pts = points(&text);
    assert_eq!(pts.len(), 40);
    let radius = (1e-5f64).powf(1.0 / 40.0);
    assert!(pts.iter().all(|(x, y)| ((x * x + y * y).sqrt() - radius).abs() < 0.3));
}

#[test]
fn ginibre_cloud_fills_unit_disk() {
    let pts = points(&ok(&["sample", "ginibre", "--n", "600", "--seed", "1"]));
    let inside = pts.iter().filter(|(x, y)| x.hypot(*y) <= 1.02).count() as f64 / pts.len() as f64;
    assert!(inside >= 0.97, "{inside}");
}

#[test]
fn gl_cloud_at_small_time_clusters_near_one() {
    let pts = points(&ok(&["sample", "gl-bm", "--n", "300", "--t", "0.1", "--seed", "2"]));
    let near = pts.iter().filter(|(x, y)| (x - 1.0).hypot(*y) <= 0.45).count() as f64 / pts.len() as f64;
    assert!(near >= 0.9, "{near}");
}

#[test]
fn unitary_cloud_on_circle() {
    let pts = points(&ok(&["sample", "unitary-bm", "--n", "100", "--t", "1", "--k", "50"]));
    assert!(pts.iter().all(|(x, y)| (x.hypot(*y) - 1.0).abs() < 1e-10));
}

#[test]
fn circular_density_table() {
    let (header, data) = rows(&ok(&["density", "circular", "--t", "1", "--theta-resolution", "31"]));
    assert_eq!(header, ["r", "density"]);
    for r in &data {
        if r[0] < 1.0 {
            assert!((r[1] - 1.0 / PI).abs() < 1e-15);
        } else if r[0] > 1.0 {
            assert_eq!(r[1], 0.0);
        }
    }
    let v: Value = serde_json::from_str(&ok(&["density", "circular", "--format", "json"])).unwrap();
    assert!((v["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn multiplicative_density_mass_and_evenness() {
    let v: Value =
        serde_json::from_str(&ok(&["density", "multiplicative", "--t", "1", "--theta-resolution", "64", "--format", "json"]))
            .unwrap();
    assert!((v["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(v["columns"], serde_json::json!(["t", "theta", "r_inner", "r_outer", "w_t"]));
    let rows = v["rows"].as_array().unwrap();
    let n = rows.len();
    for i in 0..n {
        let (a, b) = (&rows[i], &rows[n - 1 - i]);
        assert!((a[1].as_f64().unwrap() + b[1].as_f64().unwrap()).abs() < 1e-12);
        let (wa, wb) = (a[4].as_f64().unwrap(), b[4].as_f64().unwrap());
        assert!((wa - wb).abs() <= 1e-10 * wa);
    }
}

#[test]
fn semicircle_compare_passes_and_fails_on_demand() {
    let out = brownflow(&["compare", "semicircle", "--n", "400", "--samples", "3", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["rows"][0][1].as_f64().unwrap() < 0.08);

    let strict = brownflow(&["compare", "semicircle", "--n", "100", "--samples", "1", "--tolerance", "1e-6"]);
    assert_eq!(code(&strict), 1);
    assert!(String::from_utf8_lossy(&strict.stdout).contains("false"));
}

#[test]
fn circular_compare_passes() {
    let out = brownflow(&["compare", "circular", "--n", "500", "--t", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn lifetime_scan_matches_unit_circle_curve() {
    let v: Value = serde_json::from_str(&ok(&[
        "hj", "lifetime-scan", "--theta-resolution", "16", "--format", "json",
    ]))
    .unwrap();
    assert!(v["max_abs_error"].as_f64().unwrap() < 0.01);
    assert_eq!(v["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn multiplicative_trajectory_conserves_psi() {
    let (header, data) = rows(&ok(&["hj", "mult-trajectory", "--re", "-0.5", "--im", "0.8", "--x0", "0.3", "--t", "0.5"]));
    assert_eq!(header, ["t", "a", "b", "x", "p_a", "p_b", "p_x", "h", "psi"]);
    let psi0 = data[0][8];
    let drift = data.iter().map(|r| (r[8] - psi0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-8, "{drift}");
    assert!((data.last().unwrap()[0] - 0.5).abs() < 1e-12);
}

#[test]
fn circular_trajectory_matches_closed_form() {
    let (_, data) = rows(&ok(&["hj", "circ-trajectory", "--re", "0.3", "--im", "0.4", "--x0", "0.5", "--t", "0.6"]));
    let spot = &data[data.len() / 2];
    assert!((spot[1] - spot[3]).abs() < 1e-9);
    assert!((spot[2] - spot[4]).abs() < 1e-9 * spot[4]);
}

#[test]
fn shooting_scan_reports_each_target() {
    let (header, data) = rows(&ok(&["hj", "shoot", "--t", "1", "--theta-resolution", "16"]));
    assert_eq!(header[6], "status");
    assert_eq!(data.len(), 16);
    let good = data.iter().filter(|r| r[5] < 1e-6).count();
    assert!(good >= 14, "{good} of 16 within 1e-6");
}

#[test]
fn preset_pins_parameters_and_accepts_overrides() {
    let text = ok(&["preset", "fig-t01", "--n", "60"]);
    let c = config_line(&text);
    assert_eq!(c["preset"], "fig-t01");
    assert_eq!(c["t"], 0.1);
    assert_eq!(c["n"], 60);
    assert_eq!(c["k"], 10);
    assert_eq!(points(&text).len(), 60);

    let v: Value =
        serde_json::from_str(&ok(&["preset", "fig-wtplots", "--theta-resolution", "32", "--format", "json"])).unwrap();
    let masses = v["total_mass"].as_array().unwrap();
    assert_eq!(masses.len(), 4);
    for m in masses {
        assert!((m["total_mass"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    }
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = Path::new(&blocker).join("out.csv");
    let out = brownflow(&["sample", "gue", "--n", "3", "-o", target.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("out.csv") || String::from_utf8_lossy(&out.stderr).contains("file"));
}
