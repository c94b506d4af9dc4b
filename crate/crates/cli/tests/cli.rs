//! End-to-end tests of the `octwalk` binary: exit-code contract, artifact
//! schemas, worker-count determinism, and the documented numeric anchors.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_octwalk");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("OCTWALK_MAX_N")
        .output()
        .expect("binary should spawn")
}

fn run_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("OCTWALK_MAX_N")
        .env(key, value)
        .output()
        .expect("binary should spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read_json(path: &Path) -> Value {
    let text = fs::read_to_string(path).unwrap_or_else(|_| panic!("missing {path:?}"));
    serde_json::from_str(&text).unwrap_or_else(|_| panic!("bad JSON in {path:?}"))
}

/// Rows of a CSV artifact, with `# key: value` metadata lines split off.
fn read_csv(path: &Path) -> (Vec<(String, String)>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap_or_else(|_| panic!("missing {path:?}"));
    let mut meta = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest.split_once(": ").expect("meta line is key: value");
            meta.push((k.to_string(), v.to_string()));
        } else {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    (meta, rows)
}

#[test]
fn octagon_reports_admissible_module() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "octagon",
        "--a",
        "0.8",
        "--alpha",
        "pi/3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc = read_json(&dir.path().join("octagon.json"));
    let geom = &doc["geometry"];
    let b = geom["b"].as_f64().unwrap();
    assert!((b - 0.9150635094610965).abs() < 1e-12, "b = {b}");
    assert!(geom["vertex_system_residual"].as_f64().unwrap() <= 1e-9);
    assert!(geom["group_relation_deviation"].as_f64().unwrap() <= 1e-8);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("vertex_system_residual"));
    assert!(stdout.contains("group_relation_deviation"));
}

#[test]
fn octagon_self_dual_module_has_b_equal_a() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "octagon",
        "--a",
        "0.840896",
        "--alpha",
        "pi/4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&dir.path().join("octagon.json"));
    let a = doc["geometry"]["a"].as_f64().unwrap();
    let b = doc["geometry"]["b"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-5, "a = {a}, b = {b}");
}

#[test]
fn inadmissible_module_exits_two_and_cites_bound() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "octagon",
        "--a",
        "0.7",
        "--alpha",
        "pi/4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("inadmissible"), "stderr: {err}");
    assert!(
        err.contains("0.70710678"),
        "stderr should cite the bound: {err}"
    );
}

#[test]
fn generation_budget_exits_three_and_env_raises_it() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "spectrum",
        "--a",
        "0.8",
        "--alpha",
        "pi/3",
        "--n",
        "50",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);

    // A stricter env guard rejects a normally fine n ...
    let out = run_with_env(
        &[
            "spectrum",
            "--a",
            "0.8",
            "--alpha",
            "pi/3",
            "--n",
            "5",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        "OCTWALK_MAX_N",
        "4",
    );
    assert_eq!(code(&out), 3);

    // ... and a looser one admits it.
    let out = run_with_env(
        &[
            "spectrum",
            "--a",
            "0.8",
            "--alpha",
            "pi/3",
            "--n",
            "5",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        "OCTWALK_MAX_N",
        "13",
    );
    assert_eq!(code(&out), 0);
}

#[test]
fn spectrum_artifacts_have_expected_shape() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "spectrum",
        "--a",
        "0.8",
        "--alpha",
        "pi/3",
        "--n",
        "3",
        "--bins",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (meta, rows) = read_csv(&dir.path().join("spectrum.csv"));
    assert!(meta.iter().any(|(k, _)| k == "config_hash"));
    assert!(meta.iter().any(|(k, v)| k == "n" && v == "3"));
    assert_eq!(rows[0], vec!["index", "length"]);
    assert_eq!(rows.len() - 1, 392, "8*7^2 walks at n = 3");

    let (_, hist) = read_csv(&dir.path().join("histogram.csv"));
    assert_eq!(hist[0], vec!["bin_left", "bin_right", "count"]);
    let total: u64 = hist[1..].iter().map(|r| r[2].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 392);

    let summary = read_json(&dir.path().join("spectrum_summary.json"));
    assert_eq!(summary["count"].as_u64().unwrap(), 392);
    assert_eq!(summary["n"].as_u64().unwrap(), 3);
    assert!(summary["entropy"].as_f64().unwrap() > 0.0);
    assert!(summary["mean"].as_f64().unwrap() > 0.0);
    assert!(summary["variance"].as_f64().unwrap() > 0.0);
}

#[test]
fn tau_grid_hits_exact_anchors() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "tau",
        "--a",
        "0.8",
        "--alpha",
        "pi/3",
        "--n",
        "4",
        "--qmin",
        "-2",
        "--qmax",
        "2",
        "--dq",
        "0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (_, rows) = read_csv(&dir.path().join("tau.csv"));
    assert_eq!(rows[0], vec!["q", "tau", "alpha", "f", "d_q"]);
    let mut saw_zero = false;
    let mut saw_one = false;
    for row in &rows[1..] {
        let q: f64 = row[0].parse().unwrap();
        let tau: f64 = row[1].parse().unwrap();
        if q.abs() < 1e-12 {
            assert!(tau.abs() - 2.0 < 1e-9, "tau(0) = {tau}");
            assert!((tau - 2.0).abs() < 1e-9);
            saw_zero = true;
        }
        if (q - 1.0).abs() < 1e-12 {
            assert!(tau.abs() < 1e-9, "tau(1) = {tau}");
            saw_one = true;
        }
    }
    assert!(saw_zero && saw_one);
}

#[test]
fn falpha_emits_same_grid_schema() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "falpha",
        "--a",
        "0.8",
        "--alpha",
        "pi/3",
        "--n",
        "3",
        "--qmin",
        "-1",
        "--qmax",
        "1",
        "--dq",
        "0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (_, rows) = read_csv(&dir.path().join("falpha.csv"));
    assert_eq!(rows[0], vec!["q", "tau", "alpha", "f", "d_q"]);
    assert_eq!(rows.len() - 1, 5);
    assert!(dir.path().join("falpha_summary.json").is_file());
}

#[test]
fn markov_reports_cover_the_grid() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "markov",
        "--a",
        "0.8",
        "--alpha",
        "pi/3",
        "--n",
        "10",
        "--qmin",
        "-1",
        "--qmax",
        "1",
        "--dq",
        "0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&dir.path().join("markov.json"));
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 5);
    // At q = 0 the chain counts walks exactly and the window factor is 1.
    let zero = reports
        .iter()
        .find(|r| r["q"].as_f64().unwrap().abs() < 1e-12)
        .expect("grid contains q = 0");
    let ln_v = (8.0 * 7f64.powi(9)).ln();
    assert!((zero["log_z_chain"].as_f64().unwrap() - ln_v).abs() < 1e-9);
    assert_eq!(zero["c_coeff"].as_f64().unwrap(), 1.0);
    assert!(doc["l_max"].as_f64().unwrap() > doc["l_mean"].as_f64().unwrap());
    assert!(doc["l_mean"].as_f64().unwrap() > doc["l_min"].as_f64().unwrap());
}

#[test]
fn compare_normalizes_every_method_at_anchors() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "compare",
        "--a",
        "0.8",
        "--alpha",
        "pi/3",
        "--n",
        "4",
        "--qmin",
        "-1",
        "--qmax",
        "1",
        "--dq",
        "0.25",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (_, rows) = read_csv(&dir.path().join("compare.csv"));
    assert_eq!(rows[0], vec!["q", "tau_exact", "tau_chain", "tau_gaussian"]);
    for row in &rows[1..] {
        let q: f64 = row[0].parse().unwrap();
        let taus: Vec<f64> = row[1..].iter().map(|s| s.parse().unwrap()).collect();
        if q.abs() < 1e-12 {
            for t in &taus {
                assert!((t - 2.0).abs() < 1e-6, "tau(0) = {t}");
            }
        }
        if (q - 1.0).abs() < 1e-12 {
            for t in &taus {
                assert!(t.abs() < 1e-3, "tau(1) = {t}");
            }
        }
    }
    let doc = read_json(&dir.path().join("compare.json"));
    assert!(doc["max_abs_diff"]["chain"].as_f64().unwrap() >= 0.0);
    assert!(doc["max_abs_diff"]["gaussian"].as_f64().unwrap() >= 0.0);
    assert!(doc["max_abs_diff_central"]["gaussian"].as_f64().unwrap() < 0.01);
}

#[test]
fn potential_verifies_and_tabulates_conformal_point() {
    let dir = TempDir::new().unwrap();
    let out = run(&["potential", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, rows) = read_csv(&dir.path().join("potential.csv"));
    assert_eq!(rows[0], vec!["r", "U", "residual"]);
    let mid = rows[1..]
        .iter()
        .find(|r| (r[0].parse::<f64>().unwrap() - 0.5).abs() < 1e-12)
        .expect("grid contains r = 1/2");
    let u: f64 = mid[1].parse().unwrap();
    assert!((u - 64.0 / 9.0).abs() < 1e-9, "U(1/2) = {u}");
    for row in &rows[1..] {
        let res: f64 = row[2].parse().unwrap();
        assert!(res <= 1e-6, "residual {res} at r = {}", row[0]);
    }

    let (_, curve) = read_csv(&dir.path().join("time_curve.csv"));
    assert_eq!(curve[0], vec!["s", "t"]);
    assert_eq!(curve.len() - 1, 601);

    // Shifted profile, checked away from its own singular circle.
    let dir2 = TempDir::new().unwrap();
    let out = run(&[
        "potential",
        "--A",
        "2",
        "--C",
        "0.3",
        "--out",
        dir2.path().to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn data_artifacts_are_identical_across_worker_counts() {
    let mut rendered: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for workers in ["1", "4", "8"] {
        let dir = TempDir::new().unwrap();
        let out = run(&[
            "tau",
            "--a",
            "0.8",
            "--alpha",
            "pi/3",
            "--n",
            "4",
            "--qmin",
            "-2",
            "--qmax",
            "2",
            "--dq",
            "0.5",
            "--workers",
            workers,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        // config.json records the worker count itself, so compare only
        // the data artifacts.
        let mut files: Vec<(String, Vec<u8>)> = ["tau.csv", "tau_summary.json"]
            .iter()
            .map(|name| {
                (
                    name.to_string(),
                    fs::read(dir.path().join(name)).expect("artifact exists"),
                )
            })
            .collect();
        files.sort_by(|x, y| x.0.cmp(&y.0));
        rendered.push(files);
    }
    assert_eq!(rendered[0], rendered[1], "workers = 1 vs 4");
    assert_eq!(rendered[0], rendered[2], "workers = 1 vs 8");
}

#[test]
fn config_file_round_trips_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "tau",
        "--a",
        "0.8",
        "--alpha",
        "pi/3",
        "--n",
        "3",
        "--qmin",
        "-1",
        "--qmax",
        "1",
        "--dq",
        "0.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let config_path = dir.path().join("config.json");
    let first = fs::read(&config_path).unwrap();

    // Re-running from the recorded config reproduces the config byte for
    // byte (parse -> canonicalize is a fixed point) and the data too.
    let dir2 = TempDir::new().unwrap();
    let out = run(&[
        "tau",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        dir2.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let second = fs::read(dir2.path().join("config.json")).unwrap();
    let first_text = String::from_utf8(first).unwrap();
    let second_text = String::from_utf8(second).unwrap();
    // Only the out_dir line may differ between the two canonical forms.
    let differing: Vec<(&str, &str)> = first_text
        .lines()
        .zip(second_text.lines())
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.trim(), b.trim()))
        .collect();
    assert_eq!(differing.len(), 1, "only out_dir differs: {differing:?}");
    assert!(differing[0].0.starts_with("\"out_dir\""));

    assert_eq!(
        fs::read(dir.path().join("tau.csv")).unwrap(),
        fs::read(dir2.path().join("tau.csv")).unwrap(),
        "same config must reproduce identical data"
    );

    // An explicit flag beats the config file.
    let dir3 = TempDir::new().unwrap();
    let out = run(&[
        "tau",
        "--config",
        config_path.to_str().unwrap(),
        "--n",
        "2",
        "--out",
        dir3.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let summary = read_json(&dir3.path().join("tau_summary.json"));
    assert_eq!(summary["n"].as_u64().unwrap(), 2);
}

#[test]
fn config_hash_ignores_workers_and_out_dir() {
    let mut hashes = Vec::new();
    for workers in ["1", "7"] {
        let dir = TempDir::new().unwrap();
        let out = run(&[
            "spectrum",
            "--a",
            "0.8",
            "--alpha",
            "pi/3",
            "--n",
            "2",
            "--workers",
            workers,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        let (meta, _) = read_csv(&dir.path().join("spectrum.csv"));
        let hash = meta
            .iter()
            .find(|(k, _)| k == "config_hash")
            .map(|(_, v)| v.clone())
            .expect("hash present");
        hashes.push(hash);
    }
    assert_eq!(hashes[0], hashes[1]);
}

#[test]
fn json_format_mirrors_csv_tables() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "spectrum",
        "--a",
        "0.8",
        "--alpha",
        "pi/3",
        "--n",
        "2",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(!dir.path().join("spectrum.csv").exists());
    let doc = read_json(&dir.path().join("spectrum.json"));
    assert_eq!(doc["columns"], serde_json::json!(["index", "length"]));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 56);
    assert!(doc["meta"]["config_hash"].is_string());
}

#[test]
fn angle_literals_and_decimals_agree() {
    let dir_lit = TempDir::new().unwrap();
    let dir_dec = TempDir::new().unwrap();
    let decimal = format!("{:.17}", std::f64::consts::PI / 8.0);
    for (alpha, dir) in [("pi/8", &dir_lit), (decimal.as_str(), &dir_dec)] {
        let out = run(&[
            "octagon",
            "--a",
            "0.9",
            "--alpha",
            alpha,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "alpha = {alpha}");
    }
    let lit = read_json(&dir_lit.path().join("octagon.json"));
    let dec = read_json(&dir_dec.path().join("octagon.json"));
    assert_eq!(lit["geometry"]["b"], dec["geometry"]["b"]);
}

#[test]
fn usage_errors_do_not_collide_with_exit_contract() {
    let out = run(&["octagon", "--a", "not-a-number"]);
    assert_eq!(code(&out), 1, "usage errors exit 1, reserving 2 and 3");
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
}
