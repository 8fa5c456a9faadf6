use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn unitchart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unitchart"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("UNITCHART_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn fit_peanut_phase1() {
    let p1 = data("peanut_phase1.txt");
    let out = unitchart(&["fit", p1.to_str().unwrap(), "--ad", "asymptotic"]);
    let v = json(&out);
    assert_eq!(v["schema"], "unitchart.report/1");
    assert_eq!(v["manifest"]["command"], "fit");
    assert_eq!(v["manifest"]["timestamp"], 1_700_000_000);
    assert_eq!(v["manifest"]["input_digest"].as_str().unwrap().len(), 64);
    let families = v["result"]["families"].as_array().unwrap();
    assert_eq!(families[0]["fit"]["family"], "simplex");
    let aic = families[0]["fit"]["aic"].as_f64().unwrap();
    assert!((aic + 88.653).abs() < 0.02, "{aic}");
    assert!((v["result"]["runs"]["pvalue"].as_f64().unwrap() - 0.3581).abs() < 5e-4);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0.5\n0.7\n1.0\n").unwrap();
    let out = unitchart(&["fit", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
    assert!(stderr(&out).contains("open interval"));

    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(unitchart(&["fit", empty.to_str().unwrap()]).status.code(), Some(2));

    let missing = dir.path().join("missing.txt");
    assert_eq!(unitchart(&["fit", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(unitchart(&["tables", "99"]).status.code(), Some(2));
    assert_eq!(unitchart(&["tables", "4"]).status.code(), Some(2), "simulated table without --seed");
    let out = unitchart(&["design", "--family", "beta", "--mu", "0.2", "--phi", "290", "--lambda", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = unitchart(&["design", "--family", "beta", "--mu", "0.2", "--sigma", "1", "--lambda", "0.1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2), "wrong dispersion flag for the family");
    let out = unitchart(&["design", "--family", "beta", "--mu", "1.2", "--phi", "9", "--lambda", "0.1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn design_failure_exits_3() {
    let out = unitchart(&[
        "design", "--family", "beta", "--mu", "0.2", "--phi", "290", "--lambda", "0.1", "--seed", "1", "--runs", "200",
        "--xi", "0.001",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("design error"));
}

#[test]
fn design_is_reproducible_and_thread_invariant() {
    let args = ["design", "--family", "unitgamma", "--mu", "0.2", "--tau", "96", "--lambda", "0.1", "--seed", "5", "--runs", "2000"];
    let a = unitchart(&args);
    let b = unitchart(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    let c = unitchart(&threaded);
    let (va, vc) = (json(&a), json(&c));
    assert_eq!(va["result"], vc["result"]);

    let design = &va["result"]["designs"][0];
    let l = design["L"].as_f64().unwrap();
    assert!((l - 2.701).abs() < 0.05, "{l}");
    let arl = design["achieved"]["arl"].as_f64().unwrap();
    assert!((arl - 370.4).abs() < 4.0, "{arl}");
}

#[test]
fn evaluate_shewhart_is_analytic() {
    let out = unitchart(&["evaluate", "--family", "beta", "--mu", "0.2", "--phi", "290", "--chart", "shewhart"]);
    let v = json(&out);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert!((rows[0]["mu1"].as_f64().unwrap() - 0.12).abs() < 1e-12);
    assert!((rows[0]["arl"].as_f64().unwrap() - 1.26).abs() < 0.0126);
    assert!((rows[4]["arl"].as_f64().unwrap() - 370.37).abs() < 0.01);
}

#[test]
fn robustness_diagonal_matches_evaluate() {
    let common = ["--lambda", "0.2", "--seed", "3", "--runs", "1000"];
    let mut rob = vec!["robustness", "--case", "1"];
    rob.extend(common);
    let r = json(&unitchart(&rob));
    let mut ev = vec!["evaluate", "--family", "simplex", "--mu", "0.2", "--sigma", "0.37"];
    ev.extend(common);
    let e = json(&unitchart(&ev));
    let cells = r["result"][0]["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 9);
    let diag = &cells[4];
    assert_eq!(diag["true_model"]["family"], "simplex");
    assert_eq!(diag["limits_model"]["family"], "simplex");
    for (p, row) in diag["profile"].as_array().unwrap().iter().zip(e["result"]["rows"].as_array().unwrap()) {
        assert_eq!(p["mu1"], row["mu1"]);
        assert_eq!(p["summary"]["arl"], row["arl"]);
        assert_eq!(p["summary"]["mrl"], row["mrl"]);
    }
}

#[test]
fn monitor_peanut_signals_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (data("peanut_phase1.txt"), data("peanut_phase2.txt"));
    let plots = dir.path().join("plots");
    let out = unitchart(&[
        "monitor",
        p1.to_str().unwrap(),
        p2.to_str().unwrap(),
        "--seed",
        "1",
        "--plot-dir",
        plots.to_str().unwrap(),
    ]);
    let v = json(&out);
    assert_eq!(v["result"]["model"]["family"], "simplex");
    assert_eq!(v["result"]["phase1_shewhart"]["signaled"], false);
    let charts = v["result"]["charts"].as_array().unwrap();
    let signals: Vec<u64> = charts.iter().map(|c| c["phase2"]["signal_index"].as_u64().unwrap()).collect();
    assert_eq!(signals, [12, 5, 5, 4]);
    for c in charts {
        assert!(c["phase1_signal"].is_null());
        let name = c["name"].as_str().unwrap();
        let svg = std::fs::read_to_string(plots.join(format!("{name}.svg"))).unwrap();
        assert!(svg.starts_with("<svg"));
        let marked = c["plot"]["points"].as_array().unwrap().iter().filter(|p| p["signal"] == true).count();
        assert_eq!(svg.matches("crimson").count(), marked);
        assert!(marked >= 1);
    }
}

#[test]
fn monitor_refuses_out_of_control_phase1_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("p1.txt");
    let mut text = std::fs::read_to_string(data("peanut_phase1.txt")).unwrap();
    text.push_str("0.9999\n");
    std::fs::write(&p1, text).unwrap();
    let p2 = data("peanut_phase2.txt");
    let base = ["monitor", p1.to_str().unwrap(), p2.to_str().unwrap(), "--seed", "1", "--lambda", "0.2", "--runs", "2000"];
    let out = unitchart(&base);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("--force"));

    let mut forced = base.to_vec();
    forced.push("--force");
    let out = unitchart(&forced);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn monitor_constant_phase2_at_center_never_signals() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = data("peanut_phase1.txt");
    let fit = json(&unitchart(&["fit", p1.to_str().unwrap(), "--ad", "asymptotic"]));
    let mu = fit["result"]["families"][0]["fit"]["estimates"][0].as_f64().unwrap();
    let p2 = dir.path().join("p2.txt");
    std::fs::write(&p2, format!("{mu}\n").repeat(30)).unwrap();
    let out = unitchart(&["monitor", p1.to_str().unwrap(), p2.to_str().unwrap(), "--seed", "2", "--runs", "2000"]);
    let v = json(&out);
    for c in v["result"]["charts"].as_array().unwrap() {
        assert!(c["phase2"]["signal_index"].is_null(), "{}", c["name"]);
    }
}

#[test]
fn table3_is_fast_and_complete() {
    let start = std::time::Instant::now();
    let v = json(&unitchart(&["tables", "3"]));
    assert!(start.elapsed().as_secs_f64() < 1.0);
    let rows = v["result"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    let sd = rows[0]["moments"]["std_dev"].as_f64().unwrap();
    assert!((sd - 0.02344842).abs() < 1e-8);
}

#[test]
fn table_format_renders_text() {
    let out = unitchart(&["tables", "3", "--format", "table"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# unitchart tables"));
    assert!(text.contains("0.3654646") || text.contains("0.3654647"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t3.json");
    let out = unitchart(&["tables", "3", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["manifest"]["command"], "tables");
}
