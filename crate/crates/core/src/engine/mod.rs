//! Deterministic continuous-time simulation of two robots running one of the
//! evacuation protocols. Every event time is solved in closed form.

pub mod control;
mod exact;
pub mod knowledge;
pub mod trace;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{chord_between, cw_dist, Angle, Dir, Point, EPS};
use crate::strategies::Branch;

pub use exact::{colocation_events, simulate};
pub use knowledge::{KnowledgeState, Location};

/// Absolute-time ceiling. Above every proven bound, so hitting it means a
/// protocol bug.
pub const TIME_LIMIT: f64 = 1.0 + 6.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Wireless,
    F2f,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Wireless => "wireless",
            Model::F2f => "f2f",
        })
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wireless" | "w" => Ok(Model::Wireless),
            "f2f" | "face-to-face" => Ok(Model::F2f),
            other => Err(format!("unknown model `{other}` (expected wireless or f2f)")),
        }
    }
}

/// One placement of the exit and treasure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub alpha: f64,
    pub exit_angle: Angle,
    /// +1 puts the treasure `alpha` ahead of the exit in the positive sense.
    pub orientation: i8,
    pub model: Model,
}

impl Configuration {
    pub fn new(model: Model, alpha: f64, exit_angle: f64, orientation: i8) -> Self {
        Configuration {
            alpha,
            exit_angle: Angle::new(exit_angle),
            orientation,
            model,
        }
    }

    pub fn treasure_angle(&self) -> Angle {
        self.exit_angle.offset(f64::from(self.orientation) * self.alpha)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=PI).contains(&self.alpha) || !self.alpha.is_finite() {
            return Err(SimError::InvalidConfig(format!(
                "alpha {} outside [0, π]",
                self.alpha
            )));
        }
        if self.orientation != 1 && self.orientation != -1 {
            return Err(SimError::InvalidConfig(format!(
                "orientation must be +1 or -1, got {}",
                self.orientation
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SegmentKind {
    PerimeterArc { start: Angle, dir: Dir },
    Chord { from: Point, to: Point },
    Wait { at: Point },
}

/// A timed unit-speed motion primitive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySegment {
    pub start_time: f64,
    pub duration: f64,
    pub kind: SegmentKind,
}

impl TrajectorySegment {
    pub fn end_time(&self) -> f64 {
        self.start_time + self.duration
    }

    pub fn start_point(&self) -> Point {
        match self.kind {
            SegmentKind::PerimeterArc { start, .. } => start.point(),
            SegmentKind::Chord { from, .. } => from,
            SegmentKind::Wait { at } => at,
        }
    }

    pub fn end_point(&self) -> Point {
        self.position(self.duration)
    }

    /// Position `elapsed` after the segment starts (clamped to the segment).
    pub fn position(&self, elapsed: f64) -> Point {
        let e = elapsed.clamp(0.0, self.duration.max(0.0));
        match self.kind {
            SegmentKind::PerimeterArc { start, dir } => start.offset(dir.sign() * e).point(),
            SegmentKind::Chord { from, to } => {
                let len = from.dist(to);
                if len <= 0.0 || e >= len {
                    to
                } else {
                    from.add(to.sub(from).scale(e / len))
                }
            }
            SegmentKind::Wait { at } => at,
        }
    }

    /// Spatial length travelled; zero for waits.
    pub fn length(&self) -> f64 {
        match self.kind {
            SegmentKind::PerimeterArc { .. } => self.duration,
            SegmentKind::Chord { from, to } => from.dist(to),
            SegmentKind::Wait { .. } => 0.0,
        }
    }

    /// Offset after the segment start at which it passes over perimeter point
    /// `point`, if it does. Chord interiors never touch the perimeter.
    pub fn discovery_scan(&self, point: Angle) -> Option<f64> {
        match self.kind {
            SegmentKind::PerimeterArc { start, dir } => {
                let off = dir.travel(start, point);
                let off = if std::f64::consts::TAU - off <= EPS { 0.0 } else { off };
                (off <= self.duration + EPS).then_some(off.min(self.duration))
            }
            SegmentKind::Chord { from, to } => {
                let hit = |p: Point| p.on_circle().is_some_and(|a| a.near(point, EPS));
                if hit(to) {
                    Some(from.dist(to))
                } else if hit(from) {
                    Some(0.0)
                } else {
                    None
                }
            }
            SegmentKind::Wait { at } => at
                .on_circle()
                .is_some_and(|a| a.near(point, EPS))
                .then_some(0.0),
        }
    }
}

/// What a robot saw at a perimeter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sighting {
    Exit,
    Treasure,
    /// Exit and treasure coincide (`alpha = 0`).
    Both,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventKind {
    Depart,
    Discover { point: Angle, what: Sighting },
    Pickup,
    Meet { at: Point, other: usize },
    TimerExpire { label: String },
    Evacuate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub time: f64,
    pub robot: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Audit {
    pub delivered_at_true_exit: bool,
    pub speed_respected: bool,
    pub continuous: bool,
    pub knowledge_sound: bool,
}

impl Audit {
    pub fn ok(&self) -> bool {
        self.delivered_at_true_exit && self.speed_respected && self.continuous && self.knowledge_sound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub config: Configuration,
    /// Absolute time, including the initial unit radius.
    pub evac_time: f64,
    pub events: Vec<SimEvent>,
    pub trajectories: [Vec<TrajectorySegment>; 2],
    pub audit: Audit,
    pub branches: [Option<Branch>; 2],
}

impl SimResult {
    pub fn events_of(&self, robot: usize) -> impl Iterator<Item = &SimEvent> {
        self.events.iter().filter(move |e| e.robot == robot)
    }

    pub fn meetings(&self) -> impl Iterator<Item = (f64, Point)> + '_ {
        self.events.iter().filter_map(|e| match e.kind {
            EventKind::Meet { at, other } if e.robot < other => Some((e.time, at)),
            _ => None,
        })
    }

    pub fn timers(&self) -> impl Iterator<Item = (f64, usize, &str)> + '_ {
        self.events.iter().filter_map(|e| match &e.kind {
            EventKind::TimerExpire { label } => Some((e.time, e.robot, label.as_str())),
            _ => None,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no evacuation by absolute time {time:.6} (limit 1 + 6π)")]
    NonTermination { time: f64 },
    #[error("audit failure: {0}")]
    AuditFailure(String),
}

/// Check segment lengths against durations and endpoint continuity.
pub fn audit_trajectory(segments: &[TrajectorySegment]) -> (bool, bool) {
    let speed = segments.iter().all(|s| match s.kind {
        SegmentKind::Wait { .. } => s.duration >= 0.0,
        _ => (s.length() - s.duration).abs() <= EPS,
    });
    let continuous = segments.windows(2).all(|w| {
        w[0].end_point().dist(w[1].start_point()) <= EPS
            && (w[0].end_time() - w[1].start_time).abs() <= EPS
    });
    (speed, continuous)
}

/// Arc length swept from `a` to `b` by a segment moving in `dir`.
pub fn swept(dir: Dir, a: Angle, b: Angle) -> f64 {
    match dir {
        Dir::Cw => cw_dist(a, b),
        Dir::Ccw => cw_dist(b, a),
    }
}

pub fn chord_time(a: Angle, b: Angle) -> f64 {
    chord_between(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(start: f64, dir: Dir, duration: f64) -> TrajectorySegment {
        TrajectorySegment {
            start_time: 0.0,
            duration,
            kind: SegmentKind::PerimeterArc {
                start: Angle::new(start),
                dir,
            },
        }
    }

    fn chord(a: f64, b: f64) -> TrajectorySegment {
        let (from, to) = (Angle::new(a).point(), Angle::new(b).point());
        TrajectorySegment {
            start_time: 0.0,
            duration: from.dist(to),
            kind: SegmentKind::Chord { from, to },
        }
    }

    #[test]
    fn scan_arc() {
        let t = arc(0.0, Dir::Cw, 1.0).discovery_scan(Angle::new(0.25)).unwrap();
        assert!((t - 0.25).abs() < 1e-15);
        assert!(arc(0.0, Dir::Cw, 1.0).discovery_scan(Angle::new(1.5)).is_none());
        let back = arc(0.0, Dir::Ccw, 1.0).discovery_scan(Angle::new(-0.5)).unwrap();
        assert!((back - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scan_chord_interior_is_blind() {
        assert!(chord(0.0, 1.0).discovery_scan(Angle::new(0.5)).is_none());
        let t = chord(0.0, 1.0).discovery_scan(Angle::new(1.0)).unwrap();
        assert!((t - 2.0 * 0.5f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn scan_wait_on_perimeter() {
        let w = TrajectorySegment {
            start_time: 3.0,
            duration: 1.0,
            kind: SegmentKind::Wait {
                at: Angle::new(2.0).point(),
            },
        };
        assert_eq!(w.discovery_scan(Angle::new(2.0)), Some(0.0));
        assert_eq!(w.discovery_scan(Angle::new(2.1)), None);
    }

    #[test]
    fn config_validation() {
        assert!(Configuration::new(Model::F2f, 4.0, 0.0, 1).validate().is_err());
        assert!(Configuration::new(Model::F2f, 1.0, 0.0, 0).validate().is_err());
        assert!(Configuration::new(Model::F2f, PI, 0.0, -1).validate().is_ok());
    }

    #[test]
    fn treasure_offset_follows_orientation() {
        let c = Configuration::new(Model::Wireless, 1.0, 0.5, -1);
        assert!(c.treasure_angle().near(Angle::new(-0.5), 1e-12));
        let arc = cw_dist(c.treasure_angle(), c.exit_angle);
        assert!((arc - 1.0).abs() < 1e-12);
    }
}
