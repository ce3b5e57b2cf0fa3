//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line straight
//! to stderr (bypassing the harness capture) and then asserts.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::time::{Duration, Instant};

use evac_core::bounds::{f2f_lb, f2f_ub, lemma_suite, printed_j_slack, ub_gap, wireless_ub};
use evac_core::strategies::{alpha0, Branch};
use evac_core::verify::{
    figure1_table, linspace, oracle_simulate, rendezvous_paths, sweep, write_sweep_csv,
    RendezvousPath, SweepResult,
};
use evac_core::{simulate, Configuration, Model};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const ALPHA0_TOL: f64 = 5e-6;
const LEMMA_GRID: usize = 20001;
const SWEEP_GRID: usize = 8192;
const REFINE: usize = 40;
const UB_TOL: f64 = 1e-9;
const TIGHT_TOL: f64 = 2e-3;
const LB_TOL: f64 = 1e-9;
const GAP_TOL: f64 = 1e-12;
/// Listed curve values carry seven decimals.
const LISTED_TOL: f64 = 1e-6;
const ORACLE_DT: f64 = 1e-4;
const ORACLE_TOL: f64 = 5e-3;
const ORACLE_SEED: u64 = 0x5eed_2016;
const ORACLE_RUNS: usize = 100;

fn alphas() -> [f64; 9] {
    [0.2, 0.6, 1.0, alpha0(), 1.5, 2.0 * PI / 3.0, 2.4, 2.8, PI]
}

fn line(id: u32, ok: bool, what: &str, detail: &str, took: Duration) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "criterion {id} [{verdict}] {what}: {detail} ({:.2?})", took);
}

#[test]
fn criterion_1_alpha0() {
    let t = Instant::now();
    let a = alpha0();
    let took = t.elapsed();
    let ok = (a - 1.22353).abs() <= ALPHA0_TOL && took < Duration::from_millis(1);
    line(1, ok, "alpha0 root", &format!("alpha0 = {a:.9}"), took);
    assert!(ok);
}

#[test]
fn criterion_2_lemma_suite() {
    let t = Instant::now();
    let reports = lemma_suite(LEMMA_GRID).unwrap();
    let printed_fails = printed_j_slack(PI / 2.0) < 0.0;
    let took = t.elapsed();
    let all = reports.len() == 10 && reports.iter().all(|r| r.pass);
    let worst = reports
        .iter()
        .map(|r| format!("{}={:.1e}", r.item, r.min_slack))
        .collect::<Vec<_>>()
        .join(" ");
    let ok = all && printed_fails && took < Duration::from_secs(30);
    line(
        2,
        ok,
        "lemma suite (corrected j)",
        &format!("min slacks {worst}; printed j fails at pi/2: {printed_fails}"),
        took,
    );
    assert!(ok);
}

fn sweeps(model: Model) -> (Vec<SweepResult>, Duration) {
    let t = Instant::now();
    let rows = alphas()
        .iter()
        .map(|&a| sweep(model, a, SWEEP_GRID, REFINE).unwrap())
        .collect();
    (rows, t.elapsed())
}

#[test]
fn criterion_3_wireless_sound_and_tight() {
    let (rows, took) = sweeps(Model::Wireless);
    let mut bad = Vec::new();
    for r in &rows {
        let b = wireless_ub(r.alpha);
        if r.max_time > b + UB_TOL || r.max_time < b - TIGHT_TOL {
            bad.push(format!(
                "alpha={:.4} max={:.7} bound={:.7} at exit={:.7}",
                r.alpha, r.max_time, b, r.argmax_exit_angle
            ));
        }
    }
    let ok = bad.is_empty() && took < Duration::from_secs(60 * rows.len() as u64);
    let detail = if bad.is_empty() {
        format!("{} alphas within [ub - {TIGHT_TOL}, ub + {UB_TOL}]", rows.len())
    } else {
        format!("out of band: {}", bad.join("; "))
    };
    line(3, ok, "wireless sweep vs 1+pi-a+4sin(a/2)", &detail, took);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_4_f2f_sound_and_above_lb() {
    let (rows, took) = sweeps(Model::F2f);
    let mut bad = Vec::new();
    for r in &rows {
        if r.max_time > f2f_ub(r.alpha) + UB_TOL || r.max_time < f2f_lb(r.alpha) - LB_TOL {
            bad.push(format!("alpha={:.4} max={:.7}", r.alpha, r.max_time));
        }
    }
    let ok = bad.is_empty() && took < Duration::from_secs(60 * rows.len() as u64);
    let detail = if bad.is_empty() {
        format!("{} alphas within [lb - {LB_TOL}, ub + {UB_TOL}]", rows.len())
    } else {
        bad.join("; ")
    };
    line(4, ok, "f2f sweep vs upper and lower bounds", &detail, took);
    assert!(ok, "{detail}");
}

#[test]
fn criterion_5_f2f_delivery() {
    let t = Instant::now();
    let mut runs = 0usize;
    let mut failures = Vec::new();
    let mut seen = BTreeSet::new();
    for &a in &alphas() {
        for orientation in [1i8, -1] {
            for k in 0..SWEEP_GRID {
                let e = TAU * k as f64 / SWEEP_GRID as f64;
                runs += 1;
                match simulate(Configuration::new(Model::F2f, a, e, orientation)) {
                    Ok(r) if r.audit.ok() => seen.extend(rendezvous_paths(&r)),
                    Ok(r) => failures.push(format!("a={a} e={e}: {:?}", r.audit)),
                    Err(err) => failures.push(format!("a={a} e={e}: {err}")),
                }
            }
        }
    }
    let want = [
        RendezvousPath::CenterMeet,
        RendezvousPath::CenterTimeout,
        RendezvousPath::ChordMeet,
        RendezvousPath::ChordMiss,
    ];
    let covered = want.iter().all(|p| seen.contains(p));
    let ok = failures.is_empty() && covered;
    line(
        5,
        ok,
        "f2f delivery at the true exit",
        &format!(
            "{runs} runs, {} failures, rendezvous paths seen {:?}",
            failures.len(),
            seen
        ),
        t.elapsed(),
    );
    assert!(ok, "{:?}", failures.iter().take(5).collect::<Vec<_>>());
}

#[test]
fn criterion_6_figure1() {
    let t = Instant::now();
    let rows = figure1_table(&linspace(0.0, PI, 256));
    let ordered = rows
        .iter()
        .all(|r| r[3] <= r[1] + GAP_TOL && r[1] <= r[2] + GAP_TOL);
    let gap = rows
        .iter()
        .map(|r| ((r[2] - r[1]) - (r[0] / 2.0 - (r[0] / 2.0).sin())).abs())
        .fold(0.0, f64::max);
    let listed = [
        (0.0, [4.1415927, 4.1415927, 2.0471976]),
        (2.0 * PI / 3.0, [5.5112992, 5.6924708, 5.5112992]),
        (PI, [5.0, 5.5707963, 4.0471976]),
    ];
    let matches = listed.iter().all(|&(a, v)| {
        (wireless_ub(a) - v[0]).abs() <= LISTED_TOL
            && (f2f_ub(a) - v[1]).abs() <= LISTED_TOL
            && (f2f_lb(a) - v[2]).abs() <= LISTED_TOL
    });
    let gap_fn = rows.iter().all(|r| (r[2] - r[1] - ub_gap(r[0])).abs() <= GAP_TOL);
    let ok = rows.len() == 257 && ordered && gap <= GAP_TOL && gap_fn && matches;
    line(
        6,
        ok,
        "Figure 1 curves",
        &format!("{} rows, ordered={ordered}, max gap residual {gap:.1e}, listed values match={matches}", rows.len()),
        t.elapsed(),
    );
    assert!(ok);
}

#[test]
fn criterion_7_oracle_agreement() {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(ORACLE_SEED);
    let mut worst: f64 = 0.0;
    let mut branches = BTreeSet::new();
    let mut bad = Vec::new();
    for k in 0..ORACLE_RUNS {
        let model = if k % 2 == 0 { Model::Wireless } else { Model::F2f };
        // stratify alpha so every face-to-face subroutine shows up
        let alpha = match k % 6 {
            1 => rng.gen_range(0.0..alpha0()),
            3 => rng.gen_range(alpha0()..2.0 * PI / 3.0),
            5 => rng.gen_range(2.0 * PI / 3.0..PI),
            _ => rng.gen_range(0.0..PI),
        };
        let exit = rng.gen_range(0.0..TAU);
        let orientation = if rng.gen_bool(0.5) { 1 } else { -1 };
        let cfg = Configuration::new(model, alpha, exit, orientation);
        let exact = simulate(cfg).unwrap();
        if model == Model::F2f {
            branches.extend(exact.branches.iter().flatten().copied());
        }
        let approx = oracle_simulate(cfg, ORACLE_DT).unwrap();
        let d = (exact.evac_time - approx).abs();
        worst = worst.max(d);
        if d > ORACLE_TOL {
            bad.push(format!("{model} a={alpha:.6} e={exit:.6} o={orientation}: {} vs {approx}", exact.evac_time));
        }
    }
    let all_branches = [Branch::A1, Branch::A2, Branch::A3]
        .iter()
        .all(|b| branches.contains(b));
    let took = t.elapsed();
    let ok = bad.is_empty() && all_branches && took < Duration::from_secs(300);
    line(
        7,
        ok,
        "oracle cross-validation",
        &format!("{ORACLE_RUNS} configs, max |exact - oracle| = {worst:.2e}, f2f branches {branches:?}"),
        took,
    );
    assert!(ok, "{bad:?}");
}

#[test]
fn criterion_8_determinism() {
    let t = Instant::now();
    let csv = || {
        let row = sweep(Model::Wireless, 1.0, SWEEP_GRID, REFINE).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &[row]).unwrap();
        buf
    };
    let a = csv();
    let b = csv();
    let ok = a == b;
    line(
        8,
        ok,
        "sweep CSV is byte-identical across runs",
        &format!("{} bytes", a.len()),
        t.elapsed(),
    );
    assert!(ok);
}
