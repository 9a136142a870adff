use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use zlab::zcore::{hardy_z, EvalAccuracy};

fn zlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zlab")).args(args).output().expect("spawn zlab")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find(|l| l.starts_with(key))
        .and_then(|l| l.split('=').nth(1))
        .unwrap_or_else(|| panic!("{key} missing in {text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn z_command() {
    let out = zlab(&["z", "--t", "100"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let z = field(&text, "Z(100)");
    assert!((z - hardy_z(100.0, &EvalAccuracy::default()).unwrap()).abs() < 1e-11);
}

#[test]
fn ladder_command() {
    let out = zlab(&["ladder", "--t", "1000"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(field(&text, "phi1(1000)") < 1000.0);
    assert!(field(&text, "phi1_inverse(1000)") > 1000.0);

    let out = zlab(&["ladder", "--t", "50"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn factorize_sin2() {
    let out = zlab(&["factorize", "--f", "sin2", "--L", "200", "--U", "1", "--k", "2", "--mode", "exact"]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["passed"], true);
    let fac = &r["factorizations"][0];
    assert!(fac["exact"]["residual"].as_f64().unwrap() <= 1e-5);
    assert!(fac["zeta"].is_null());
    assert_eq!(fac["data"]["alpha"].as_array().unwrap().len(), 3);
    assert_eq!(r["constants"]["c0"], 0.0);
    assert!(r["formulas"][0].as_str().unwrap().starts_with("P1[k=2] ~ (1/2 - 1/2*(sin U/U)*cos U)"));
}

#[test]
fn factorize_constant_function() {
    let out = zlab(&["factorize", "--f", "1*sin2+1*cos2", "--L", "500", "--U", "0.7"]);
    assert!(out.status.success());
    let r = json(&out);
    let fac = &r["factorizations"][0];
    assert!((fac["data"]["h_value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(fac["exact"]["residual"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn factorize_cos2_notes_sign() {
    let r = json(&zlab(&["factorize", "--f", "cos2", "--L", "200"]));
    let notes = r["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("(1/2 + 1/2*(sin U/U)*cos U)")));
}

#[test]
fn crossbreed_exit_codes() {
    let out = zlab(&["crossbreed", "--f", "sin2", "--f", "cos2", "--L", "100,1000,10000", "--mode", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["kindred"], true);
    assert_eq!(r["certificate"]["text"], "sin^2(a0^1) * P1[k=1] + cos^2(a0^2) * P2[k=1] ~ 1");
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|row| row["exact"].as_f64().unwrap() <= 1e-5));
    assert_eq!(r["trend"].as_array().unwrap().len(), 3);

    let out = zlab(&["crossbreed", "--f", "sin2", "--L", "200"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["kindred"], false);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(zlab(&["factorize", "--f", "tan2", "--L", "200"]).status.code(), Some(1));
    assert_eq!(zlab(&["factorize", "--f", "sin2", "--L", "20"]).status.code(), Some(1));
    assert_eq!(zlab(&["scan", "--f", "pow(0.5)", "--L", "1000", "--k", "4", "--k0", "3"]).status.code(), Some(1));
    assert_ne!(zlab(&["frobnicate"]).status.code(), Some(0));
}

#[test]
fn scan_power_family() {
    let out = zlab(&[
        "scan", "--f", "pow(0.7)", "--f", "pow(0.4)", "--f", "pow(0.3)", "--L", "1000", "--U", "0.5", "--k0", "3",
        "--mode", "exact",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 27);
    assert!(rows.iter().all(|row| row["exact"].as_f64().unwrap() <= 1e-5));
}

#[test]
fn pi_offset_starts() {
    let r = json(&zlab(&["verify", "--f", "sin2", "--f", "cos2", "--L", "100,300", "--offset", "piL"]));
    for (row, base) in r["rows"].as_array().unwrap().iter().zip([100.0, 300.0]) {
        assert_eq!(row["base"].as_f64().unwrap(), base);
        assert_eq!(row["start"].as_f64().unwrap(), PI * base);
    }
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn config_file_cache_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("ladder.csv");
    let report = dir.path().join("scan.json");
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        format!(
            "family = [\"sin2\", \"cos2\"]\ngrid = [100, 200]\nu = 1.0\norders = [1]\nk0 = 2\nmode = \"both\"\ncache = {:?}\nreport = {:?}\n",
            cache.to_str().unwrap(),
            report.to_str().unwrap()
        ),
    )
    .unwrap();

    let out = zlab(&["scan", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(cache.exists());
    let first = read_json(&report);
    assert_eq!(first["rows"].as_array().unwrap().len(), 8);
    assert_eq!(first["config"]["offset"], Value::Null);
    for suffix in ["exact", "zeta"] {
        let dat = std::fs::read_to_string(dir.path().join(format!("scan_{suffix}.dat"))).unwrap();
        let data_lines: Vec<&str> = dat.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data_lines.len(), 8);
        assert!(data_lines.iter().all(|l| l.split_whitespace().count() == 2));
    }

    // warm cache: identical report
    let out = zlab(&["scan", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(read_json(&report), first);

    // command-line flags override the file
    let out = zlab(&["verify", "--config", config.to_str().unwrap(), "--L", "150", "--report", dir.path().join("v.json").to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(read_json(&dir.path().join("v.json"))["rows"].as_array().unwrap().len(), 1);

    // a cache written with another tolerance is refused
    let out = zlab(&["verify", "--config", config.to_str().unwrap(), "--tol", "1e-7"]);
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(&config, "family = [\"sin2\"]\nbogus = 1\n").unwrap();
    assert_eq!(zlab(&["crossbreed", "--config", config.to_str().unwrap()]).status.code(), Some(1));
}
