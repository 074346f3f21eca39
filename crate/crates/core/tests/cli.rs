use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use ttd_precoding::harness::{run, Manifest, OutputFormat, RunOptions, Scenario};
use ttd_precoding::SystemConfig;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn ttdsim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ttdsim")).args(args).output().unwrap()
}

fn records(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn bundled_scenarios_parse() {
    let mut n = 0;
    for entry in fs::read_dir(scenarios_dir()).unwrap() {
        let path = entry.unwrap().path();
        Scenario::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 5);
}

#[test]
fn cli_gain_run_writes_tables_and_manifest() {
    let out = tempfile::tempdir().unwrap();
    let scenario = scenarios_dir().join("gain_cdf.json");
    let res = ttdsim(&[
        "run",
        scenario.to_str().unwrap(),
        "--out-dir",
        out.path().to_str().unwrap(),
        "--seed",
        "3",
        "--threads",
        "2",
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(out.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.seed, 3);
    assert_eq!(manifest.threads, 2);
    assert_eq!(manifest.config.seed, 3);
    assert!(manifest.version.starts_with("v0."));
    assert!(manifest.wall_clock.elapsed_s >= 0.0);
    for f in &manifest.files {
        assert!(out.path().join(f).exists(), "{f}");
    }
    assert!(out.path().join("gain_cdf_proposed_t_max_s=3.4e-10.csv").exists());
    assert!(out.path().join("gain_cdf_benchmark_t_max_s=4e-10.csv").exists());

    let (header, rows) = records(&out.path().join("gain_cdf_summary.csv"));
    assert_eq!(header, ["point", "design", "k", "f_k", "value"]);
    assert_eq!(rows.len(), 2 * 3 * 129);
    let keys: Vec<(String, usize)> = rows.iter().map(|r| (r[0].clone(), r[2].parse().unwrap())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for r in &rows {
        let g: f64 = r[4].parse().unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&g));
    }

    let (header, rows) = records(&out.path().join("gain_cdf_ideal_t_max_s=3.4e-10.csv"));
    assert_eq!(header, ["x", "G"]);
    assert_eq!(rows, vec![vec!["1".to_string(), "1".to_string()]]);
}

#[test]
fn cli_reports_errors_with_nonzero_exit() {
    let res = ttdsim(&["run", "/nonexistent/scenario.json"]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("scenario.json"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"experiment": "rate_cdf", "trials": 0}"#).unwrap();
    let res = ttdsim(&["run", bad.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("trial"));

    let res = ttdsim(&["run", bad.to_str().unwrap(), "--format", "xml"]);
    assert!(!res.status.success());

    // output location occupied by a regular file
    let blocker = dir.path().join("blocked");
    fs::write(&blocker, "").unwrap();
    let ok = scenarios_dir().join("criteria_report.json");
    let res = ttdsim(&["run", ok.to_str().unwrap(), "--out-dir", blocker.join("sub").to_str().unwrap()]);
    assert!(!res.status.success());
}

#[test]
fn json_format_carries_full_results() {
    let out = tempfile::tempdir().unwrap();
    let sc = Scenario::from_json_str(r#"{"experiment": "rate_cdf", "trials": 3}"#).unwrap();
    let opts = RunOptions {
        seed: Some(5),
        out_dir: Some(out.path().to_path_buf()),
        threads: Some(2),
        format: OutputFormat::Json,
    };
    let summary = run(&sc, &opts).unwrap();
    let v: Value = serde_json::from_str(&fs::read_to_string(out.path().join("rate_cdf.json")).unwrap()).unwrap();
    assert_eq!(v["experiment"], "rate_cdf");
    assert_eq!(v["seed"], 5);
    let outcome = &v["points"][0]["outcome"];
    assert_eq!(outcome["kind"], "rate");
    assert_eq!(outcome["trials"], 3);
    let designs = outcome["designs"].as_array().unwrap();
    assert_eq!(
        designs.iter().map(|d| d["design"].as_str().unwrap()).collect::<Vec<_>>(),
        ["ideal", "proposed", "benchmark"]
    );
    for d in designs {
        let pooled = d["pooled"].as_array().unwrap();
        assert_eq!(pooled.len(), 3 * 129);
        assert!(pooled.iter().all(|r| r.as_f64().unwrap() >= 0.0));
    }
    assert_eq!(summary.files.len(), 1);
    assert!(!out.path().join("rate_cdf_summary.csv").exists());
}

#[test]
fn sizing_scenario_end_to_end() {
    let out = tempfile::tempdir().unwrap();
    let sc = Scenario::from_file(scenarios_dir().join("sizing.json")).unwrap();
    run(&sc, &RunOptions { out_dir: Some(out.path().to_path_buf()), ..Default::default() }).unwrap();
    let result: Value = serde_json::from_str(&fs::read_to_string(out.path().join("sizing_result.json")).unwrap()).unwrap();
    assert_eq!(result["m_star"], 60);
    assert_eq!(result["exact_m"], 60);
    let (_, rows) = records(&out.path().join("sizing_m_prev=48.csv"));
    let below = rows.iter().filter(|r| r[1] != "1").count();
    assert!(below > 0);
    let (_, rows) = records(&out.path().join("sizing_summary.csv"));
    let low48 = rows
        .iter()
        .filter(|r| r[1] == "m_prev=48" && r[4].parse::<f64>().unwrap() < 0.9)
        .count();
    assert_eq!(low48, 22);
    assert!(rows.iter().filter(|r| r[1] == "m_star=60").all(|r| r[4].parse::<f64>().unwrap() >= 0.9));
}

#[test]
fn rate_outputs_are_sane() {
    let out = tempfile::tempdir().unwrap();
    let sc = Scenario::from_json_str(r#"{"experiment": "rate_cdf", "trials": 4}"#).unwrap();
    run(&sc, &RunOptions { out_dir: Some(out.path().to_path_buf()), threads: Some(3), ..Default::default() }).unwrap();
    let (header, rows) = records(&out.path().join("rate_cdf_summary.csv"));
    assert_eq!(header, ["point", "design", "k", "f_k", "value"]);
    assert_eq!(rows.len(), 6 * 129);
    assert!(rows.iter().all(|r| r[4].parse::<f64>().unwrap() >= 0.0));
    let (header, rows) = records(&out.path().join("rate_cdf_trials.csv"));
    assert_eq!(header, ["trial", "design", "mean_rate", "mean_lower_bound"]);
    assert_eq!(rows.len(), 12);
    for r in rows {
        assert!(r[3].parse::<f64>().unwrap() <= r[2].parse::<f64>().unwrap());
    }
    let (_, cdf) = records(&out.path().join("rate_cdf_proposed.csv"));
    let g: Vec<f64> = cdf.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(g.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(*g.last().unwrap(), 1.0);
}

#[test]
fn config_json_interface() {
    let cfg = SystemConfig::from_json_str(r#"{"nt": 128, "ps_per_ttd": 8}"#).unwrap();
    assert_eq!(cfg.nt, 128);
    assert_eq!(cfg.ttds_per_rf, 16);
    let back = SystemConfig::from_json_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);
    assert!(SystemConfig::from_json_str(r#"{"antennas": 128}"#).is_err());
    assert!(SystemConfig::from_json_str(r#"{"nt": 100}"#).is_err());
}
