use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const CYLINDER: &str = r#"
alpha = 1.0
[geometry]
class = "revolution"
profile = "cylinder"
params = { c = 1.0 }
interval = [0.0, 2.0]
[nonlinearity]
name = "cubic"
params = { c1 = -2.0, c3 = 1.0 }
[stationary]
c_min = -2.0
c_max = 2.0
[eigen]
n = 256
"#;

const CATENOID: &str = r#"
[geometry]
class = "revolution"
profile = "catenoid"
params = { c = 1.0 }
interval = [0.0, 1.8]
[nonlinearity]
name = "zero"
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(command: &str, config: &Path, out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_robinstab"))
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_writes_reports_deterministically() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", CYLINDER);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("analyze", &cfg, &a), 0);
    assert_eq!(run("analyze", &cfg, &b), 0);
    for name in ["report.json", "report.txt", "solution_0.csv", "solution_1.csv", "solution_2.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let csv = fs::read_to_string(a.join("solution_0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 3);
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(first.iter().all(|x| x.parse::<f64>().is_ok()));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");

    let bad = write_config(dir.path(), "bad.toml", &CYLINDER.replace("alpha", "alfa"));
    assert_eq!(run("analyze", &bad, &out), 1);
    let missing = dir.path().join("missing.toml");
    assert_eq!(run("analyze", &missing, &out), 1);

    // f ≡ 1 with Neumann conditions has no stationary solution
    let none = CYLINDER
        .replace("alpha = 1.0", "alpha = 0.0")
        .replace("{ c1 = -2.0, c3 = 1.0 }", "{ c0 = 1.0 }");
    let none = write_config(dir.path(), "none.toml", &none);
    assert_eq!(run("analyze", &none, &out), 2);

    let cyl = CATENOID.replace("catenoid", "cylinder");
    let cyl = write_config(dir.path(), "cyl.toml", &cyl);
    assert_eq!(run("construct-pattern", &cyl, &out), 3);

    let cfl = format!("{CYLINDER}[simulate]\nn = 100\ndt = 0.1\nt_final = 1.0\n");
    let cfl = write_config(dir.path(), "cfl.toml", &cfl);
    assert_eq!(run("simulate", &cfl, &out), 1);
}

#[test]
fn pattern_round_trip_through_analyze() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "cat.toml", CATENOID);
    let built = dir.path().join("built");
    assert_eq!(run("construct-pattern", &cfg, &built), 0);
    for name in ["pattern.json", "certificate.json", "profile.csv", "nonlinearity.csv"] {
        assert!(built.join(name).is_file(), "{name}");
    }
    let analyze = CATENOID.replace(
        "name = \"zero\"",
        "name = \"constructed\"\nartifact = \"built/pattern.json\"",
    );
    let analyze = write_config(dir.path(), "analyze.toml", &analyze);
    let out = dir.path().join("analyzed");
    assert_eq!(run("analyze", &analyze, &out), 0);

    let cert = json(&built.join("certificate.json"));
    let report = json(&out.join("report.json"));
    let a = cert["certificate"]["lambda1_extrapolated"]["value"].as_f64().unwrap();
    let b = report[0]["lambda1"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    assert_eq!(report[0]["classification"], "AsymptoticallyStable");
}

#[test]
fn zero_perturbation_stays_put() {
    let dir = TempDir::new().unwrap();
    let text = format!("{CYLINDER}[simulate]\nn = 64\nt_final = 0.5\nperturbation = \"none\"\nsolution = 1\n");
    let cfg = write_config(dir.path(), "sim.toml", &text);
    let out = dir.path().join("out");
    assert_eq!(run("simulate", &cfg, &out), 0);
    let summary = json(&out.join("simulate.json"));
    assert_eq!(summary["c"], 0.0);
    let trend = &summary["fit"]["trend"];
    assert!(trend == "Decay" || trend == "Neutral", "{trend}");
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let norm: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(norm < 1e-12);
    }
}

#[test]
fn eigen_and_report_commands() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", CYLINDER);
    let out = dir.path().join("out");
    assert_eq!(run("eigen", &cfg, &out), 0);
    let summary = json(&out.join("eigen.json"));
    let rows = summary.as_array().unwrap();
    assert_eq!(rows.len(), 3 * 5);
    assert!(out.join("eigen_0_k0.csv").is_file());
    let report = Command::new(env!("CARGO_BIN_EXE_robinstab"))
        .args(["report", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(report.status.success());
    let text = String::from_utf8(report.stdout).unwrap();
    assert!(text.contains("lambda1"));
    assert_eq!(text, fs::read_to_string(out.join("report.txt")).unwrap());
}
