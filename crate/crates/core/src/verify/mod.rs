//! Worst-case sweeps over exit placements, bound checks, and cross-checks.

mod oracle;

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{f2f_lb, f2f_ub, wireless_ub};
use crate::engine::trace::sig12;
use crate::engine::{simulate, Configuration, EventKind, Model, SimError, SimResult};
use crate::geometry::EPS;
use crate::strategies::{xbar, Branch};

pub use oracle::oracle_simulate;

/// Slack allowed above the proven bound.
pub const UB_TOL: f64 = 1e-9;
/// How close to the bound the worst case must come to count as tight.
pub const TIGHT_TOL: f64 = 2e-3;
/// Offset used to approach a branch boundary from either side.
const NUDGE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub model: Model,
    pub alpha: f64,
    pub grid_n: usize,
    pub max_time: f64,
    pub argmax_exit_angle: f64,
    pub bound: f64,
    pub ub_ok: bool,
    /// Wireless only.
    pub tight: Option<bool>,
    /// Face-to-face only: max reaches the lower bound.
    pub lb_consistent: Option<bool>,
    pub evaluated: usize,
}

pub fn bound_for(model: Model, alpha: f64) -> f64 {
    match model {
        Model::Wireless => wireless_ub(alpha),
        Model::F2f => f2f_ub(alpha),
    }
}

/// Exit angles at which some protocol branch flips, for orientation `+1`.
pub fn critical_exit_angles(alpha: f64) -> Vec<f64> {
    let xb = xbar(alpha);
    let s = (alpha / 2.0).sin();
    let xs = [
        0.0,
        alpha / 2.0,
        alpha,
        xb,
        alpha - xb,
        PI - alpha,
        PI - alpha / 2.0 - s,
    ];
    let mut out = Vec::new();
    for x in xs {
        // first-find points for both sweep directions and both start points
        for p in [x, -x, PI + x, PI - x] {
            for e in [p, p - alpha] {
                for d in [0.0, NUDGE, -NUDGE] {
                    out.push((e + d).rem_euclid(TAU));
                }
            }
        }
    }
    out
}

fn evaluate(model: Model, alpha: f64, orientation: i8, exit: f64) -> Result<f64, SimError> {
    simulate(Configuration::new(model, alpha, exit, orientation)).map(|r| r.evac_time)
}

/// Larger time wins; ties go to the smaller angle.
fn better(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    match b.1.total_cmp(&a.1) {
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Equal => {
            if b.0 < a.0 {
                b
            } else {
                a
            }
        }
    }
}

fn max_over(model: Model, alpha: f64, orientation: i8, angles: &[f64]) -> Result<(f64, f64), SimError> {
    let vals: Vec<(f64, f64)> = angles
        .par_iter()
        .map(|&e| evaluate(model, alpha, orientation, e).map(|t| (e, t)))
        .collect::<Result<_, _>>()?;
    Ok(vals.into_iter().fold((0.0, f64::NEG_INFINITY), better))
}

/// Golden-section search for a maximum on `[lo, hi]`; returns the best point seen.
fn golden(
    model: Model,
    alpha: f64,
    orientation: i8,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> Result<(f64, f64), SimError> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let f = |e: f64| evaluate(model, alpha, orientation, e.rem_euclid(TAU)).map(|t| (e.rem_euclid(TAU), t));
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = better(fc, fd);
    for _ in 0..iters {
        if fc.1 >= fd.1 {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c)?;
            best = better(best, fc);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d)?;
            best = better(best, fd);
        }
    }
    Ok(best)
}

/// Worst case over exit placements with a fixed orientation.
pub fn sweep_oriented(
    model: Model,
    alpha: f64,
    grid_n: usize,
    refine_iters: usize,
    orientation: i8,
) -> Result<SweepResult, SimError> {
    if grid_n < 2 {
        return Err(SimError::InvalidConfig(format!("grid_n must be at least 2, got {grid_n}")));
    }
    let step = TAU / grid_n as f64;
    let sign = f64::from(orientation);
    let mut angles: Vec<f64> = (0..grid_n).map(|k| step * k as f64).collect();
    angles.extend(critical_exit_angles(alpha).into_iter().map(|e| (sign * e).rem_euclid(TAU)));
    let evaluated = angles.len() + 2 + refine_iters;
    let mut best = max_over(model, alpha, orientation, &angles)?;
    if refine_iters > 0 {
        let r = golden(model, alpha, orientation, best.0 - step, best.0 + step, refine_iters)?;
        best = better(best, r);
    }
    let bound = bound_for(model, alpha);
    let (argmax, max_time) = best;
    Ok(SweepResult {
        model,
        alpha,
        grid_n,
        max_time,
        argmax_exit_angle: argmax,
        bound,
        ub_ok: max_time <= bound + UB_TOL,
        tight: (model == Model::Wireless).then_some(max_time >= bound - TIGHT_TOL),
        lb_consistent: (model == Model::F2f).then(|| max_time >= f2f_lb(alpha) - UB_TOL),
        evaluated,
    })
}

/// Worst case over exit placements (orientation `+1`; the mirror image is
/// covered by [`symmetry_check`]).
pub fn sweep(model: Model, alpha: f64, grid_n: usize, refine_iters: usize) -> Result<SweepResult, SimError> {
    if grid_n < 256 {
        return Err(SimError::InvalidConfig(format!("grid_n must be at least 256, got {grid_n}")));
    }
    sweep_oriented(model, alpha, grid_n, refine_iters, 1)
}

/// Coarse sweeps with both orientations agree on the maximum.
pub fn symmetry_check(model: Model, alpha: f64, grid_n: usize) -> Result<bool, SimError> {
    let plus = sweep_oriented(model, alpha, grid_n, 0, 1)?;
    let minus = sweep_oriented(model, alpha, grid_n, 0, -1)?;
    Ok((plus.max_time - minus.max_time).abs() <= 1e-9)
}

/// Which rendezvous outcome a face-to-face run went through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RendezvousPath {
    CenterMeet,
    CenterTimeout,
    ChordMeet,
    ChordMiss,
}

pub fn rendezvous_paths(r: &SimResult) -> Vec<RendezvousPath> {
    use crate::strategies::{A2_DEADLINE, A3_CHECKPOINT};
    let mut out = Vec::new();
    for (i, branch) in r.branches.iter().enumerate() {
        let pickup = r
            .events_of(i)
            .find(|e| e.kind == EventKind::Pickup)
            .map(|e| e.time);
        let Some(t_pick) = pickup else { continue };
        let meet_after = |pred: &dyn Fn(crate::geometry::Point) -> bool| {
            r.events_of(i).any(|e| {
                e.time >= t_pick - EPS && matches!(e.kind, EventKind::Meet { at, .. } if pred(at))
            })
        };
        let timer = |label: &str| {
            r.events_of(i)
                .find(|e| matches!(&e.kind, EventKind::TimerExpire { label: l } if l == label))
                .map(|e| e.time)
        };
        match branch {
            Some(Branch::A2) => {
                if meet_after(&|p| p.norm() <= EPS) {
                    out.push(RendezvousPath::CenterMeet);
                } else if timer(A2_DEADLINE).is_some() {
                    out.push(RendezvousPath::CenterTimeout);
                }
            }
            Some(Branch::A3) => {
                if meet_after(&|p| p.norm() < 1.0 - EPS) {
                    out.push(RendezvousPath::ChordMeet);
                } else if timer(A3_CHECKPOINT).is_some() {
                    out.push(RendezvousPath::ChordMiss);
                }
            }
            _ => {}
        }
    }
    out
}

/// Closed-form curve values `(α, wireless_ub, f2f_ub, f2f_lb)`.
pub fn figure1_table(alphas: &[f64]) -> Vec<[f64; 4]> {
    alphas
        .iter()
        .map(|&a| [a, wireless_ub(a), f2f_ub(a), f2f_lb(a)])
        .collect()
}

/// `n + 1` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![lo];
    }
    (0..=n)
        .map(|k| if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 })
        .collect()
}

/// Decimal with 12 significant digits.
pub fn fmt12(v: f64) -> String {
    format!("{}", sig12(v))
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepResult]) -> io::Result<()> {
    writeln!(w, "alpha,max_time,bound,argmax_exit_angle,ub_ok,tight")?;
    for r in rows {
        write_sweep_row(&mut w, r)?;
    }
    Ok(())
}

pub fn write_sweep_row<W: Write>(mut w: W, r: &SweepResult) -> io::Result<()> {
    let tight = match r.tight {
        Some(t) => t.to_string(),
        None => "na".to_string(),
    };
    writeln!(
        w,
        "{},{},{},{},{},{}",
        fmt12(r.alpha),
        fmt12(r.max_time),
        fmt12(r.bound),
        fmt12(r.argmax_exit_angle),
        r.ub_ok,
        tight
    )
}

pub fn write_figure1_csv<W: Write>(mut w: W, rows: &[[f64; 4]], with_gap: bool) -> io::Result<()> {
    if with_gap {
        writeln!(w, "alpha,wireless_ub,f2f_ub,f2f_lb,ub_gap")?;
    } else {
        writeln!(w, "alpha,wireless_ub,f2f_ub,f2f_lb")?;
    }
    for r in rows {
        let mut line = r.iter().map(|&v| fmt12(v)).collect::<Vec<_>>().join(",");
        if with_gap {
            line.push(',');
            line.push_str(&fmt12(crate::bounds::ub_gap(r[0])));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}
