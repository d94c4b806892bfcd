use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rqlkit(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqlkit")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn summary(out: &Path, cmd: &str) -> Value {
    let text = fs::read_to_string(out.join(format!("{cmd}_summary.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn gen_is_deterministic_and_reports_chip_latency() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = rqlkit(d.path(), &["gen", "--chip", "--width", "8"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["netlist.rqln", "gen_summary.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
    let s = summary(a.path(), "gen");
    assert_eq!(s["latency"]["phases"], 6);
    assert_eq!(s["latency"]["picoseconds"].as_f64().unwrap(), 150.0);
    assert_eq!(s["seed"], 1);
}

#[test]
fn generated_netlist_validates_and_round_trips_through_sim() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&rqlkit(d.path(), &["gen", "--chip"])), 0);
    let nl = d.path().join("netlist.rqln");
    let o = rqlkit(d.path(), &["validate", nl.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = rqlkit(d.path(), &["sim", "--netlist", nl.to_str().unwrap(), "--exhaustive", "--check"]);
    assert_eq!(code(&o), 0);
    let s = summary(d.path(), "sim");
    assert_eq!(s["trace"]["check"]["passed"], 65536);
}

#[test]
fn sim_zero_program_has_no_events() {
    let d = tempfile::tempdir().unwrap();
    let o = rqlkit(d.path(), &["sim", "--chip", "--serial", "zeros16", "--check"]);
    assert_eq!(code(&o), 0);
    assert_eq!(summary(d.path(), "sim")["trace"]["total_events"], 0);
    let csv = fs::read_to_string(d.path().join("trace.csv")).unwrap();
    assert!(csv.starts_with("cycle,outputs,events\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn sim_prbs_program_checks() {
    let d = tempfile::tempdir().unwrap();
    let o = rqlkit(d.path(), &["sim", "--chip", "--prbs", "0xACE1", "--cycles", "16", "--check"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let s = summary(d.path(), "sim");
    assert_eq!(s["trace"]["vectors"], 16);
    assert!(s["trace"]["total_events"].as_u64().unwrap() > 0);
}

#[test]
fn timed_check_fails_above_the_timing_limit() {
    let d = tempfile::tempdir().unwrap();
    let args = ["sim", "--chip", "--random", "64", "--timed", "--check", "--clock"];
    assert_eq!(code(&rqlkit(d.path(), &[&args[..], &["10GHz"]].concat())), 0);
    assert_eq!(code(&rqlkit(d.path(), &[&args[..], &["12GHz"]].concat())), 1);
}

#[test]
fn margins_csv_and_check() {
    let d = tempfile::tempdir().unwrap();
    let o = rqlkit(d.path(), &["margins", "--chip", "--check"]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(d.path().join("margins.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("frequency_hz,lower_db,upper_db,width_db"));
    let at10 = lines.find(|l| l.starts_with("10000000000,")).expect("10 GHz row");
    let width: f64 = at10.rsplit(',').next().unwrap().parse().unwrap();
    assert!((width - 4.6).abs() < 1e-3, "{width}");
}

#[test]
fn power_formula_matches_the_chip() {
    let d = tempfile::tempdir().unwrap();
    let o = rqlkit(d.path(), &["power", "--n", "815", "--ic", "162e-6", "--f", "6.21GHz", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let s: Value = serde_json::from_slice(&o.stdout).unwrap();
    let p = s["p_dynamic"].as_f64().unwrap();
    assert!((p / 560e-9 - 1.0).abs() < 0.01, "{p}");
}

#[test]
fn power_budget_line_current() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&rqlkit(d.path(), &["power", "--budget"])), 0);
    let s = summary(d.path(), "power");
    let i = s["budget"]["line_current_rms"].as_f64().unwrap();
    assert!((i / 9e-3 - 1.0).abs() < 0.02, "{i}");
}

#[test]
fn sideband_chain_numbers() {
    let d = tempfile::tempdir().unwrap();
    let o = rqlkit(
        d.path(),
        &[
            "sidebands",
            "--q",
            "-69.3",
            "--p0q",
            "-2.0",
            "--i",
            "-79.3",
            "--p0i",
            "-2.4",
            "--cla-frac",
            "0.42",
            "--f-carrier",
            "6.2GHz",
            "--active",
            "12000",
            "--zero",
            "12000",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = &summary(d.path(), "sidebands")["report"];
    let close = |v: &Value, want: f64, tol: f64| (v.as_f64().unwrap() / want - 1.0).abs() < tol;
    assert!(close(&r["total"], 1.25e-6, 0.02), "{}", r["total"]);
    assert!(close(&r["region_power"], 510e-9, 0.05), "{}", r["region_power"]);
    assert!((r["f_mod"].as_f64().unwrap() - 259e3).abs() < 1e3);
}

#[test]
fn sidebands_from_descriptor() {
    let d = tempfile::tempdir().unwrap();
    let desc = d.path().join("m.toml");
    fs::write(
        &desc,
        "f_carrier = 6.2e9\nactive_len = 12000\nzero_len = 12000\nregion_fraction = 0.42\n\n\
         [lines.Q]\np0_dbm = -2.0\nssb_db = -69.3\n\n[lines.I]\np0_dbm = -2.4\nssb_db = -79.3\n",
    )
    .unwrap();
    let o = rqlkit(d.path(), &["sidebands", "--descriptor", desc.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let total = summary(d.path(), "sidebands")["report"]["total"].as_f64().unwrap();
    assert!((total / 1.25e-6 - 1.0).abs() < 0.02);
}

#[test]
fn clocknet_band_covers_target() {
    let d = tempfile::tempdir().unwrap();
    let o = rqlkit(d.path(), &["clocknet", "--check"]);
    assert_eq!(code(&o), 0);
    let s = summary(d.path(), "clocknet");
    assert!(s["worst_return_loss_db"].as_f64().unwrap() >= 27.0);
    assert!(s["unitarity_error"].as_f64().unwrap() < 1e-10);
    let z = s["design"]["section_impedances"].as_array().unwrap();
    assert_eq!(z.len(), 6);
    let sp = fs::read_to_string(d.path().join("sparams.csv")).unwrap();
    assert_eq!(sp.lines().count(), 1 + 191);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&rqlkit(d.path(), &["gen", "--no-such-flag"])), 2);
    assert_eq!(code(&rqlkit(d.path(), &["gen", "--clock", "ten"])), 2);
    assert_eq!(code(&rqlkit(d.path(), &["sim", "--vectors", "/nonexistent/v.txt"])), 3);
    let bad = d.path().join("bad.rqln");
    fs::write(&bad, "not a netlist\n").unwrap();
    assert_eq!(code(&rqlkit(d.path(), &["validate", bad.to_str().unwrap()])), 3);
    assert_eq!(code(&rqlkit(d.path(), &["clocknet", "--small-reflection", "--check"])), 1);
}

#[test]
fn csv_format_flattens_summaries() {
    let d = tempfile::tempdir().unwrap();
    let o = rqlkit(d.path(), &["power", "--budget", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("budget.line_current_rms,"));
}
