use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valdist")).args(args).env("VALDIST_WORKERS", "2").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("valdist-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn airy_certificate_text() {
    let o = run(&["indicator", "--family", "airy", "--certify"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for needle in ["2/pi", "4/pi", "32/3", "8/3", "lemma2         pass", "defects        2, 1"] {
        assert!(s.contains(needle), "missing {needle} in\n{s}");
    }
}

#[test]
fn exp123_certificate_json() {
    let o = run(&["indicator", "--family", "exp123", "--certify", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["T"]["exact"], "2/pi");
    assert_eq!(v["N1"]["exact"], "0");
    let d: Vec<_> = v["defects"].as_array().unwrap().iter().map(|x| x["exact"].as_str().unwrap().to_string()).collect();
    assert_eq!(d, ["2", "1"]);
}

#[test]
fn indicator_file_matches_builtin() {
    let o = run(&["indicator", "--family", &data("airy_indicators.toml"), "--certify", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["admissible_max"]["exact"], "32/3");
    assert_eq!(v["cartan_ratio"]["exact"], "8/3");
}

#[test]
fn unknown_family_fails() {
    let o = run(&["indicator", "--family", ""]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
}

#[test]
fn malformed_curve_leaves_no_output() {
    let d = scratch("bad");
    let out = d.join("report.csv");
    let o = run(&[
        "analyze",
        "--curve",
        &data("malformed_curve.toml"),
        "--planes",
        &data("coordinate_planes.toml"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bessel"));
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["analyze", "--rmin", "1"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn analyze_writes_csv_and_json_deterministically() {
    let d = scratch("det");
    let mut csv = Vec::new();
    for k in 0..2 {
        let c = d.join(format!("r{k}.csv"));
        let j = d.join(format!("r{k}.json"));
        let o = run(&["analyze", "--scenario", "poly-staircase", "--out", c.to_str().unwrap(), j.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        csv.push(std::fs::read_to_string(&c).unwrap());
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 8);
    }
    assert_eq!(csv[0], csv[1]);
    let header = csv[0].lines().next().unwrap();
    assert!(header.starts_with("r,T,"));
    assert_eq!(csv[0].lines().count(), 9);
}

#[test]
fn analyze_curve_file() {
    let o = run(&[
        "analyze",
        "--curve",
        &data("poly_curve.toml"),
        "--planes",
        &data("coordinate_planes.toml"),
        "--r",
        "10,100,1000",
        "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    // T(r) = 5 ln r + O(1) for a degree-5 curve
    let t = |i: usize| rows[i]["t"].as_f64().unwrap();
    let slope = (t(2) - t(1)) / 10f64.ln();
    assert!((slope - 5.0).abs() < 0.01, "slope {slope}");
}

#[test]
fn check_small_passes() {
    let d = scratch("check");
    let out = d.join("check.json");
    let o = run(&["check", "--points", "300", "--instances", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 5);
    assert!(suites.iter().all(|s| s["passed"] == true));
}

#[test]
fn check_reports_dependent_planes() {
    let o = run(&["check", "--points", "100", "--instances", "2", "--planes", &data("dependent_planes.toml")]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("\"a\"") && err.contains("\"c\""), "{err}");
}

#[test]
fn validate_describes_inputs() {
    let o = run(&["validate", "--curve", &data("airy_curve.toml"), "--planes", &data("coordinate_planes.toml")]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("order 1.5"));
    assert!(s.contains("abel"));
    assert!(s.contains("admissible true"));
    let o = run(&["validate", "--planes", &data("dependent_planes.toml")]);
    assert!(stdout(&o).contains("admissible false"));
}
