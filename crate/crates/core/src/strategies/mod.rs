//! The wireless and face-to-face evacuation protocols, plus the threshold
//! machinery they share.

mod f2f;
mod wireless;

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::control::Controller;
use crate::engine::Model;
use crate::geometry::{Angle, Dir};

pub use f2f::{FaceToFace, A2_DEADLINE, A3_CHECKPOINT};
pub use wireless::Wireless;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrategyError {
    #[error("rendezvous offset {y} outside [0, {max}] for alpha={alpha}, x={x}")]
    OffsetOutOfRange { alpha: f64, x: f64, y: f64, max: f64 },
    #[error("robot count must be even and positive, got {0}")]
    BadRobotCount(i64),
}

/// What a robot found at its first interesting point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Found {
    Treasure,
    Exit,
}

/// Subroutine selected by the face-to-face protocol after the first find.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    /// Greedy fetch.
    A1,
    /// Rendezvous at the centre with a deadline.
    A2,
    /// Rendezvous on the chord towards `D`.
    A3,
}

/// Branch threshold `3α/2 − π − sin(α/2) + 2 sin α`. Negative below `alpha0()`.
pub fn xbar(alpha: f64) -> f64 {
    1.5 * alpha - PI - (alpha / 2.0).sin() + 2.0 * alpha.sin()
}

/// Unique root of [`xbar`] in `(0, 2π/3)`.
pub fn alpha0() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| {
        let (mut lo, mut hi) = (0.0_f64, 2.0 * PI / 3.0);
        // xbar(lo) < 0 < xbar(hi); it is strictly increasing on this interval
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = xbar(mid);
            if v.abs() <= 1e-15 || hi - lo <= f64::EPSILON {
                return mid;
            }
            if v < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// Five-way case split of the face-to-face protocol.
pub fn select_branch(alpha: f64, x: f64, found: Found) -> Branch {
    let xb = xbar(alpha);
    let rendezvous = match found {
        Found::Treasure => alpha > x && x >= alpha - xb,
        Found::Exit => x <= xb,
    };
    if !rendezvous {
        return Branch::A1;
    }
    if alpha > 2.0 * PI / 3.0 {
        Branch::A3
    } else if alpha >= alpha0() {
        Branch::A2
    } else {
        Branch::A1
    }
}

/// Protocol time until which the centre-waiting treasure holder waits.
pub fn a2_timer(alpha: f64, x: f64) -> f64 {
    x.max(alpha - x + 2.0 * (alpha / 2.0).sin()) + 1.0
}

/// Distance the treasure holder travels along chord `ID` before deciding.
pub fn a3_offset(alpha: f64, x: f64) -> Result<f64, StrategyError> {
    let y = a3_offset_unchecked(alpha, x);
    let max = 2.0 * alpha.sin();
    if y < -1e-12 || y > max + 1e-12 {
        return Err(StrategyError::OffsetOutOfRange { alpha, x, y, max });
    }
    Ok(y.clamp(0.0, max.max(0.0)))
}

pub fn a3_offset_unchecked(alpha: f64, x: f64) -> f64 {
    alpha / 2.0 - x + (alpha / 2.0).sin() + alpha.sin()
}

/// Start angles for an even team split into independent pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentPlan {
    pub n: usize,
    pub pair_starts: Vec<Angle>,
}

pub fn n_robot_deployment(n: i64) -> Result<DeploymentPlan, StrategyError> {
    if n < 2 || n % 2 != 0 {
        return Err(StrategyError::BadRobotCount(n));
    }
    let pairs = (n / 2) as usize;
    let spacing = 2.0 * TAU / n as f64;
    Ok(DeploymentPlan {
        n: n as usize,
        pair_starts: (0..pairs).map(|k| Angle::new(spacing * k as f64)).collect(),
    })
}

/// Coarse protocol phase of one robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    ToPerimeter,
    Sweep,
    /// Wireless: heading to an unresolved candidate point.
    Probe,
    A1,
    A2,
    A3,
    ConfidentEvac,
    Halted,
}

/// Per-robot protocol bookkeeping. Point labels `B`, `C`, `D` are mirrored per
/// robot: `B` is ahead in the robot's own sweep direction.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotProtocolState {
    pub id: usize,
    pub dir: Dir,
    pub start: Angle,
    pub phase: Phase,
    /// Protocol time of the first own discovery.
    pub x: Option<f64>,
    pub found_at: Option<Angle>,
    pub found: Option<Found>,
    pub branch: Option<Branch>,
}

impl RobotProtocolState {
    pub fn new(id: usize, start: Angle, dir: Dir) -> Self {
        RobotProtocolState {
            id,
            dir,
            start,
            phase: Phase::ToPerimeter,
            x: None,
            found_at: None,
            found: None,
            branch: None,
        }
    }

    /// Point at arc distance `k·α` ahead of the first find in the sweep direction.
    pub fn ahead(&self, alpha: f64, k: f64) -> Option<Angle> {
        self.found_at.map(|i| i.offset(self.dir.sign() * k * alpha))
    }

    pub fn point_b(&self, alpha: f64) -> Option<Angle> {
        self.ahead(alpha, 1.0)
    }

    pub fn point_c(&self, alpha: f64) -> Option<Angle> {
        self.ahead(alpha, -1.0)
    }

    pub fn point_d(&self, alpha: f64) -> Option<Angle> {
        self.ahead(alpha, -2.0)
    }
}

pub fn controller_for(model: Model, alpha: f64) -> Box<dyn Controller> {
    match model {
        Model::Wireless => Box::new(Wireless::new(alpha)),
        Model::F2f => Box::new(FaceToFace::new(alpha)),
    }
}
