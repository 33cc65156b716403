use std::path::Path;
use std::process::{Command, Output};

use ecoepi_core::io::read_trajectory_csv;

fn ecoepi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecoepi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn preset_text(name: &str) -> String {
    ecoepi_core::presets::preset(name).unwrap().toml().to_string()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn simulate_np_persistence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("np.csv");
    let o = ecoepi(&["simulate", "np-persistence", "--steps", "2000", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let traj = read_trajectory_csv(std::io::BufReader::new(std::fs::File::open(&out).unwrap())).unwrap();
    assert_eq!(traj.len(), 2001);
    let tail_min = traj.states[1501..].iter().map(|s| s.i).fold(f64::INFINITY, f64::min);
    assert!(tail_min > 1e-3);
    let summary = json(&dir.path().join("np.json"));
    assert_eq!(summary["n_steps"], 2000);
}

#[test]
fn simulate_zero_steps_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o = ecoepi(&["simulate", "autonomous-extinction", "--steps", "0", "--out", path(&a)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(text.lines().nth(1).unwrap(), "0,1.5000000000000000e0,1.0000000000000001e-1,2.0000000000000001e-1");

    for p in [&a, &b] {
        assert!(ecoepi(&["simulate", "periodic-persistence", "--steps", "300", "--out", path(p)])
            .status
            .success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn simulate_from_origin_without_recruitment() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("zero.toml");
    let text = preset_text("autonomous-extinction")
        .replace(r#"lambda = { kind = "constant", value = 0.3 }"#, r#"lambda = { kind = "constant", value = 0.0 }"#)
        .replace("S = 1.5\nI = 0.1\nP = 0.2", "S = 0.0\nI = 0.0\nP = 0.0");
    std::fs::write(&scenario, text).unwrap();
    let out = dir.path().join("zero.csv");
    let o = ecoepi(&["simulate", path(&scenario), "--steps", "20", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning") && stderr(&o).contains("H2"));
    let traj = read_trajectory_csv(std::io::BufReader::new(std::fs::File::open(&out).unwrap())).unwrap();
    assert_eq!(traj.len(), 21);
    assert!(traj.states.iter().all(|s| s.s == 0.0 && s.i == 0.0 && s.p == 0.0));
}

#[test]
fn thresholds_autonomous_extinction() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ae.json");
    let o = ecoepi(&["thresholds", "autonomous-extinction", "--lambda-max", "5", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("Extinction"));
    let report = json(&out);
    let r_upper0 = report["lambda_entries"][0]["r_upper"].as_f64().unwrap();
    assert!((r_upper0 - 0.9264).abs() < 1e-4);
    assert_eq!(report["lambda_entries"].as_array().unwrap().len(), 6);
    let csv = std::fs::read_to_string(dir.path().join("ae.csv")).unwrap();
    assert!(csv.starts_with("lambda,r_lower,r_upper\n0,"));
}

#[test]
fn thresholds_periodic_extinction() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pe.json");
    let o = ecoepi(&["thresholds", "periodic-extinction", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let upper = json(&out)["periodic"]["upper"].as_f64().unwrap();
    assert!((upper - 0.4436).abs() < 1e-3);
}

#[test]
fn thresholds_without_transmission() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("b0.toml");
    let text = preset_text("autonomous-persistence").replace(
        r#"beta = { kind = "constant", value = 2.2 }"#,
        r#"beta = { kind = "constant", value = 0.0 }"#,
    );
    std::fs::write(&scenario, text).unwrap();
    let out = dir.path().join("b0.json");
    let o = ecoepi(&["thresholds", path(&scenario), "--lambda-max", "3", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("Extinction"));
    assert_eq!(json(&out)["witnesses"]["extinction"], 0);
}

#[test]
fn thresholds_fail_without_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("slow.toml");
    // aperiodic coefficients, a tiny attractor tolerance and almost no burn-in
    let text = preset_text("autonomous-extinction")
        .replace(
            r#"beta = { kind = "constant", value = 0.17 }"#,
            r#"beta = { kind = "cosine", base = 0.17, amplitude = 0.5, frequency = 1.0 }"#,
        )
        .replace("burn_in = 5000", "burn_in = 1")
        + "\n[run.tolerances]\nattractor = 1e-30\n";
    std::fs::write(&scenario, text).unwrap();
    let o = ecoepi(&["thresholds", path(&scenario), "--out", path(&dir.path().join("x.json"))]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn reproduce_presets() {
    let dir = tempfile::tempdir().unwrap();
    for name in ecoepi_core::presets::preset_names() {
        let out = dir.path().join(name);
        let o = ecoepi(&["reproduce", name, "--out", path(&out)]);
        assert!(o.status.success(), "{name}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).trim_end().ends_with("PASS"), "{}", stdout(&o));
        for j in 1..=3 {
            let csv = std::fs::read_to_string(out.join(format!("trajectory-{j}.csv"))).unwrap();
            assert_eq!(csv.lines().count(), 2002);
        }
        let verdicts = json(&out.join("verdicts.json"));
        assert_eq!(verdicts["verdicts"].as_array().unwrap().len(), 3);
        assert!(out.join("thresholds.json").exists());
    }
    let np = json(&dir.path().join("np-extinction/verdicts.json"));
    assert_eq!(np["attractivity"]["attractive"], true);
    let pp = json(&dir.path().join("periodic-persistence/verdicts.json"));
    for v in pp["verdicts"].as_array().unwrap() {
        assert_eq!(v["persistence"], true);
        assert_eq!(v["tail_period"], 10);
    }
}

#[test]
fn reproduce_unknown_preset() {
    let dir = tempfile::tempdir().unwrap();
    let o = ecoepi(&["reproduce", "no-such-preset", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown preset"));
}

#[test]
fn check_presets() {
    for name in ecoepi_core::presets::preset_names() {
        let o = ecoepi(&["check", name]);
        assert!(o.status.success());
        let table = stdout(&o);
        for id in ["H1", "H2", "H3", "H4", "H8", "H9"] {
            let line = table.lines().find(|l| l.starts_with(id)).unwrap();
            assert!(line.contains(" pass "), "{name}: {line}");
        }
        for id in ["H5", "H6", "H7"] {
            let line = table.lines().find(|l| l.starts_with(id)).unwrap();
            assert!(line.contains("verified-empirically") && line.contains("2000"), "{name}: {line}");
        }
    }
}

#[test]
fn check_zero_mortality() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("mu0.toml");
    let text = preset_text("autonomous-extinction")
        .replace(r#"mu = { kind = "constant", value = 0.1 }"#, r#"mu = { kind = "constant", value = 0.0 }"#);
    std::fs::write(&scenario, text).unwrap();
    let o = ecoepi(&["check", path(&scenario)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    for id in ["H1", "H4"] {
        let line = table.lines().find(|l| l.starts_with(id)).unwrap();
        assert!(line.contains(" fail "), "{line}");
    }
}

#[test]
fn parse_and_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("alpha.toml");
    std::fs::write(&unknown, preset_text("np-extinction").replace("[run]", "[run]\nalpha = 3")).unwrap();
    let o = ecoepi(&["simulate", path(&unknown), "--out", path(&dir.path().join("o.csv"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha") && stderr(&o).contains("line"), "{}", stderr(&o));

    let mu0 = dir.path().join("mu0.toml");
    std::fs::write(
        &mu0,
        preset_text("np-extinction")
            .replace(r#"mu = { kind = "constant", value = 0.1 }"#, r#"mu = { kind = "constant", value = 0.0 }"#),
    )
    .unwrap();
    let o = ecoepi(&["simulate", path(&mu0), "--out", path(&dir.path().join("o.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("H1"), "{}", stderr(&o));

    let o = ecoepi(&["simulate"]);
    assert_eq!(o.status.code(), Some(1));
    let o = ecoepi(&["simulate", "missing.toml", "--out", "x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn preset_dump_round_trips() {
    let o = ecoepi(&["preset", "periodic-persistence"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), preset_text("periodic-persistence"));
}
