//! Closed-form evacuation bounds and a grid checker for the trigonometric
//! inequalities the analysis relies on.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::strategies::{alpha0, xbar};

const TWO_PI_3: f64 = 2.0 * PI / 3.0;

/// Slack below which a lemma item is considered violated.
pub const LEMMA_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("lemma grid must have at least 1000 points, got {0}")]
    GridTooCoarse(usize),
}

fn s2(alpha: f64) -> f64 {
    (alpha / 2.0).sin()
}

/// Wireless upper bound `1 + π − α + 4 sin(α/2)`.
pub fn wireless_ub(alpha: f64) -> f64 {
    1.0 + PI - alpha + 4.0 * s2(alpha)
}

/// Face-to-face upper bound `1 + π − α/2 + 3 sin(α/2)`.
pub fn f2f_ub(alpha: f64) -> f64 {
    1.0 + PI - alpha / 2.0 + 3.0 * s2(alpha)
}

/// Face-to-face lower bound, piecewise at `2π/3`.
pub fn f2f_lb(alpha: f64) -> f64 {
    if alpha <= TWO_PI_3 {
        1.0 + PI / 3.0 + 4.0 * s2(alpha)
    } else {
        1.0 + PI / 3.0 + 2.0 * alpha.sin() + 2.0 * s2(alpha)
    }
}

/// Price of losing wireless communication: `α/2 − sin(α/2)`.
pub fn ub_gap(alpha: f64) -> f64 {
    alpha / 2.0 - s2(alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub item: char,
    /// Points along the α axis (inner grids use a tenth of that).
    pub grid: usize,
    pub min_slack: f64,
    pub argmin_alpha: f64,
    pub pass: bool,
    pub note: Option<String>,
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |k| if k + 1 == n { hi } else { lo + step * k as f64 })
}

fn inner_max(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    grid(lo, hi.max(lo), n).map(f).fold(f64::NEG_INFINITY, f64::max)
}

/// Minimum of `slack(α)` over the grid, with its location.
fn scan(lo: f64, hi: f64, n: usize, slack: impl Fn(f64) -> f64) -> (f64, f64) {
    grid(lo, hi, n)
        .map(|a| (slack(a), a))
        .fold((f64::INFINITY, lo), |best, cur| if cur.0 < best.0 { cur } else { best })
}

fn report(item: char, n: usize, (min_slack, argmin_alpha): (f64, f64), note: Option<String>) -> LemmaReport {
    LemmaReport {
        item,
        grid: n,
        min_slack,
        argmin_alpha,
        pass: min_slack >= -LEMMA_TOL,
        note,
    }
}

/// Slack of item (j) as printed: `sin α ≤ sin(α/2)` on `[0, 2π/3]`.
pub fn printed_j_slack(alpha: f64) -> f64 {
    s2(alpha) - alpha.sin()
}

/// Evaluate every item on a uniform grid of `grid_n` points in α; items with
/// an inner maximum over `x` use `(grid_n − 1)/10 + 1` points per axis.
pub fn lemma_suite(grid_n: usize) -> Result<Vec<LemmaReport>, BoundsError> {
    if grid_n < 1000 {
        return Err(BoundsError::GridTooCoarse(grid_n));
    }
    let n = grid_n;
    let m = (grid_n - 1) / 10 + 1;
    let a0 = alpha0();
    let mut out = Vec::with_capacity(10);

    // the sign flips at the root; the root itself is excluded
    let a = scan(0.0, PI, n, |a| {
        if (a - a0).abs() <= 1e-12 {
            f64::INFINITY
        } else if a < a0 {
            -xbar(a)
        } else {
            xbar(a)
        }
    });
    out.push(report(
        'a',
        n,
        a,
        Some(format!(
            "x̄(π) = π/2 − 1 = {:.7} from the formula; the printed value π − 1 is an erratum (sign unaffected)",
            xbar(PI)
        )),
    ));

    let b = scan(0.0, PI, m, |a| {
        let s = s2(a);
        let worst = inner_max(0.0, 2.0 * PI - a, m, |x| (x + 2.0 * s).min(2.0 * PI - a - x) + 2.0 * s);
        // the inner max sits on the crossing point of the two arguments
        let xs = PI - a / 2.0 - s;
        let peak = (xs + 2.0 * s).min(2.0 * PI - a - xs) + 2.0 * s;
        PI - a / 2.0 + 3.0 * s - worst.max(peak)
    });
    out.push(report('b', m, b, None));

    let c = scan(0.0, TWO_PI_3, n, |a| {
        PI - a / 2.0 + 3.0 * s2(a) - (a.max(xbar(a) + 2.0 * s2(a)) + 2.0)
    });
    out.push(report('c', n, c, None));

    out.push(report('d', n, scan(0.0, PI, n, |a| PI - a - a.sin()), None));
    out.push(report(
        'e',
        n,
        scan(0.0, PI, n, |a| PI - (a - s2(a) + 2.0 * a.sin())),
        None,
    ));
    out.push(report(
        'f',
        n,
        scan(0.0, TWO_PI_3, n, |a| PI - a + 2.0 * s2(a) - (a / 2.0 + 2.0 * a.sin())),
        None,
    ));

    let g = scan(TWO_PI_3, PI, m, |a| {
        s2(a) - inner_max(0.0, PI - a, m, |x| (PI / 2.0 - a / 2.0 - x).sin())
    });
    out.push(report('g', m, g, None));

    let h = scan(0.0, TWO_PI_3, m, |a| {
        let worst = inner_max(0.0, a / 2.0, m, |x| x + 2.0 * (a / 2.0 - x).sin());
        PI - a + 4.0 * s2(a) - (worst + 2.0 * a.sin())
    });
    out.push(report('h', m, h, None));

    let i = scan(TWO_PI_3, PI, m, |a| {
        let worst = inner_max(0.0, PI - a, m, |x| x + 2.0 * (PI / 2.0 - a / 2.0 - x).sin());
        PI - a + 2.0 * s2(a) - worst
    });
    out.push(report('i', m, i, None));

    let j = scan(0.0, PI, n, |a| {
        if a <= TWO_PI_3 {
            a.sin() - s2(a)
        } else {
            s2(a) - a.sin()
        }
    });
    let probe = PI / 2.0;
    out.push(report(
        'j',
        n,
        j,
        Some(format!(
            "printed direction fails at α={probe:.4} (counterexample, slack {:.7}); corrected direction passes",
            printed_j_slack(probe)
        )),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-6
    }

    #[test]
    fn bound_values() {
        assert!(close(wireless_ub(0.0), 4.1415927));
        assert!(close(wireless_ub(PI / 2.0), 5.3992235));
        assert!(close(wireless_ub(PI), 5.0));
        assert!(close(f2f_ub(0.0), 4.1415927));
        assert!(close(f2f_ub(TWO_PI_3), 5.6924708));
        assert!(close(f2f_ub(PI), 5.5707963));
        assert!(close(f2f_ub(2.0), 5.6660062));
        assert!(close(f2f_ub(2.5), 5.7385465));
        assert!(close(f2f_lb(0.0), 2.0471976));
        assert!(close(f2f_lb(TWO_PI_3), 5.5112992));
        assert!(close(f2f_lb(PI), 4.0471976));
        assert!(close(ub_gap(PI), 0.5707963));
        assert_eq!(ub_gap(0.0), 0.0);
    }

    #[test]
    fn lb_branches_agree_at_threshold() {
        let a = TWO_PI_3;
        let left = 1.0 + PI / 3.0 + 4.0 * s2(a);
        let right = 1.0 + PI / 3.0 + 2.0 * a.sin() + 2.0 * s2(a);
        assert!((left - right).abs() < 1e-12);
    }

    #[test]
    fn suite_passes() {
        let reports = lemma_suite(2001).unwrap();
        assert_eq!(reports.len(), 10);
        for r in &reports {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn equality_cases() {
        let a = TWO_PI_3;
        let f = PI - a + 2.0 * s2(a) - (a / 2.0 + 2.0 * a.sin());
        assert!(f.abs() < 1e-12);
        assert!(printed_j_slack(PI / 2.0) < -0.29);
    }

    #[test]
    fn coarse_grid_rejected() {
        assert_eq!(lemma_suite(10), Err(BoundsError::GridTooCoarse(10)));
    }

    proptest! {
        #[test]
        fn ordering_and_gap(alpha in 0.0..=PI) {
            prop_assert!(f2f_lb(alpha) <= wireless_ub(alpha) + 1e-12);
            prop_assert!(wireless_ub(alpha) <= f2f_ub(alpha) + 1e-12);
            prop_assert!((f2f_ub(alpha) - wireless_ub(alpha) - ub_gap(alpha)).abs() <= 1e-12);
            prop_assert!(ub_gap(alpha) >= 0.0);
        }
    }
}
