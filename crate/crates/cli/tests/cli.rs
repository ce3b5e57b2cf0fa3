use std::process::{Command, Output};

fn evac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evac"))
        .args(args)
        .output()
        .expect("run evac")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or_else(|| panic!("no `{key}` in {out}"))
}

#[test]
fn simulate_f2f_hand_trace() {
    let o = evac(&["simulate", "--model", "f2f", "--alpha", "1.0", "--exit", "0.4", "--orient", "+1"]);
    assert!(o.status.success());
    assert!((value(&stdout(&o), "evac_time") - 3.3177021).abs() < 1e-6);
}

#[test]
fn simulate_wireless_zero_alpha() {
    let o = evac(&["simulate", "--model", "wireless", "--alpha", "0", "--exit", "1.0471976"]);
    assert!(o.status.success());
    assert!((value(&stdout(&o), "evac_time") - 2.0471976).abs() < 1e-6);
}

#[test]
fn simulate_rejects_large_alpha() {
    let o = evac(&["simulate", "--model", "f2f", "--alpha", "4.0", "--exit", "0.4"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside [0, π]"));
}

#[test]
fn simulate_writes_trace() {
    let path = std::env::temp_dir().join(format!("evac-trace-{}.json", std::process::id()));
    let o = evac(&[
        "simulate", "--model", "f2f", "--alpha", "1.0", "--exit", "0.4", "--orient", "-1",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.contains("\"robots\"") && text.contains("\"evac_time\""));
}

#[test]
fn bounds_range() {
    let o = evac(&["bounds", "--alphas", "0:pi:256", "--gap"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 257);
    for r in &rows {
        assert!(r[3] <= r[1] + 1e-12 && r[1] <= r[2] + 1e-12);
    }
}

#[test]
fn bounds_coincide_at_two_thirds_pi() {
    let o = evac(&["bounds", "--alphas", "2pi/3"]);
    let out = stdout(&o);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row[1] - 5.5112992).abs() < 1e-6);
    assert!((row[3] - 5.5112992).abs() < 1e-6);
}

#[test]
fn bounds_rejects_negative_alpha() {
    assert!(!evac(&["bounds", "--alphas", "-1"]).status.success());
}

#[test]
fn lemmas_rejects_coarse_grid() {
    let o = evac(&["lemmas", "--grid", "10"]);
    assert!(!o.status.success());
}

#[test]
fn lemmas_report_errata() {
    let o = evac(&["lemmas", "--grid", "2001"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("printed direction fails at α=1.5708"));
    assert!(out.contains("10 of 10 items pass"));
}

#[test]
fn sweep_f2f_zero_alpha() {
    let o = evac(&["sweep", "--model", "f2f", "--alphas", "0", "--grid", "256"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let max: f64 = out.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((max - 4.1415927).abs() < 1e-6);
}

#[test]
fn sweep_is_deterministic_under_thread_cap() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_evac"))
            .args(["sweep", "--model", "wireless", "--alphas", "0.5,1.5", "--grid", "512", "--refine", "10"])
            .env("EVAC_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("4");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn deploy_needs_even_team() {
    assert!(evac(&["deploy", "--n", "4"]).status.success());
    assert!(!evac(&["deploy", "--n", "3"]).status.success());
}
