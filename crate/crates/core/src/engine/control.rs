//! Interface between the motion engines and the protocol controllers.
//!
//! A controller never sees the hidden configuration: it receives the known
//! arc distance, what each robot observed, and read/write access to the
//! robots' knowledge (for protocol deductions).

use crate::engine::knowledge::KnowledgeState;
use crate::geometry::{Angle, Dir, Point};

/// A motion intent. Engines turn these into timed segments.
#[derive(Debug, Clone, PartialEq)]
pub enum Motion {
    /// Open-ended travel along the perimeter.
    Sweep { dir: Dir },
    /// Straight-line travel. A labelled move reports a timer on arrival.
    GoTo {
        target: Point,
        label: Option<&'static str>,
    },
    /// Stay put until the given absolute time.
    WaitUntil { until: f64, label: &'static str },
    /// Stay put for good.
    Halt,
}

impl Motion {
    pub fn go(target: Point) -> Motion {
        Motion::GoTo {
            target,
            label: None,
        }
    }

    pub fn go_to(angle: Angle) -> Motion {
        Motion::go(angle.point())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    /// A straight-line move finished.
    Reached { robot: usize },
    Timer {
        robot: usize,
        label: &'static str,
    },
    /// Something was at this perimeter point (flags say what was still there).
    Found {
        robot: usize,
        at: Angle,
        exit: bool,
        treasure: bool,
    },
    /// Arrived at a perimeter point holding nothing of interest.
    Empty { robot: usize, at: Angle },
    PickedUp { robot: usize },
    Met,
}

impl Observation {
    pub fn robot(&self) -> Option<usize> {
        match *self {
            Observation::Reached { robot }
            | Observation::Timer { robot, .. }
            | Observation::Found { robot, .. }
            | Observation::Empty { robot, .. }
            | Observation::PickedUp { robot } => Some(robot),
            Observation::Met => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotView {
    pub pos: Point,
    pub holds_treasure: bool,
    /// Straight-line target of the current motion, if any.
    pub heading_to: Option<Point>,
    pub idle: bool,
}

pub struct Context<'a> {
    /// Absolute time (0 at the centre departure).
    pub now: f64,
    pub views: [RobotView; 2],
    pub knowledge: &'a mut [KnowledgeState; 2],
    pub observations: &'a [Observation],
}

impl Context<'_> {
    /// Protocol time: 0 when the robots leave the perimeter start point.
    pub fn protocol_time(&self) -> f64 {
        self.now - 1.0
    }

    pub fn saw(&self, robot: usize, pred: impl Fn(&Observation) -> bool) -> bool {
        self.observations
            .iter()
            .any(|o| o.robot() == Some(robot) && pred(o))
    }

    pub fn met(&self) -> bool {
        self.observations.contains(&Observation::Met)
    }
}

pub trait Controller: Send {
    /// Initial motions, issued at time 0 from the disk centre.
    fn start(&mut self) -> [Motion; 2];

    /// React to the observations of one event instant. `None` keeps the
    /// current motion.
    fn react(&mut self, ctx: &mut Context<'_>) -> [Option<Motion>; 2];

    /// Branch each robot committed to, if any.
    fn branches(&self) -> [Option<crate::strategies::Branch>; 2] {
        [None, None]
    }
}
