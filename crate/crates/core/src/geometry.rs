//! Angle arithmetic, arc/chord metrics and unit-speed positions on the closed
//! unit disk.
//!
//! Angles grow in the direction the protocols call "clockwise". Every formula
//! downstream is phrased in arc or chord terms, so Cartesian points only show
//! up when a robot cuts through the interior of the disk.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Angular / temporal co-location tolerance.
pub const EPS: f64 = 1e-9;
/// Snap tolerance for endpoint arithmetic.
pub const SNAP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("arc {0} outside [0, 2π]")]
    ArcOutOfRange(f64),
    #[error("elapsed time {elapsed} exceeds segment length {length}")]
    BeyondSegment { elapsed: f64, length: f64 },
}

/// An angle normalized to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn new(radians: f64) -> Self {
        let mut v = radians.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if v >= TAU {
            v = 0.0;
        }
        Angle(v)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn offset(self, delta: f64) -> Self {
        Angle::new(self.0 + delta)
    }

    pub fn point(self) -> Point {
        Point::new(self.0.cos(), self.0.sin())
    }

    /// Shorter of the two arc distances to `other`, in `[0, π]`.
    pub fn arc_distance(self, other: Angle) -> f64 {
        let d = cw_dist(self, other);
        d.min(TAU - d)
    }

    /// True when the two angles agree up to `tol` around the circle.
    pub fn near(self, other: Angle, tol: f64) -> bool {
        self.arc_distance(other) <= tol
    }
}

impl From<f64> for Angle {
    fn from(v: f64) -> Self {
        Angle::new(v)
    }
}

/// Direction of perimeter travel. `Cw` is the positive (increasing angle) sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    Cw,
    Ccw,
}

impl Dir {
    pub fn sign(self) -> f64 {
        match self {
            Dir::Cw => 1.0,
            Dir::Ccw => -1.0,
        }
    }

    pub fn reversed(self) -> Dir {
        match self {
            Dir::Cw => Dir::Ccw,
            Dir::Ccw => Dir::Cw,
        }
    }

    /// Arc length travelled in this direction to get from `from` to `to`.
    pub fn travel(self, from: Angle, to: Angle) -> f64 {
        match self {
            Dir::Cw => cw_dist(from, to),
            Dir::Ccw => cw_dist(to, from),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Angle of this point when it sits on the unit circle.
    pub fn on_circle(self) -> Option<Angle> {
        if (self.norm() - 1.0).abs() <= EPS {
            Some(Angle::new(self.y.atan2(self.x)))
        } else {
            None
        }
    }
}

/// Travel time from `a` to `b` along the perimeter in the positive direction.
pub fn cw_dist(a: Angle, b: Angle) -> f64 {
    let d = b.0 - a.0;
    if d >= 0.0 {
        d
    } else {
        d + TAU
    }
}

/// Length of the chord subtending an arc of `delta` radians.
pub fn chord_len(delta: f64) -> Result<f64, GeometryError> {
    if !(0.0..=TAU).contains(&delta) {
        return Err(GeometryError::ArcOutOfRange(delta));
    }
    Ok(2.0 * (delta / 2.0).sin())
}

/// Chord length between two points on the circle.
pub fn chord_between(a: Angle, b: Angle) -> f64 {
    2.0 * (cw_dist(a, b) / 2.0).sin()
}

pub fn pos_on_arc(start: Angle, dir: Dir, elapsed: f64) -> Point {
    start.offset(dir.sign() * elapsed).point()
}

/// Unit-speed interpolation from `from` to `to`.
pub fn pos_on_segment(from: Point, to: Point, elapsed: f64) -> Result<Point, GeometryError> {
    let length = from.dist(to);
    if elapsed > length + EPS || elapsed < 0.0 {
        return Err(GeometryError::BeyondSegment { elapsed, length });
    }
    if length - elapsed <= SNAP || elapsed >= length {
        return Ok(to);
    }
    let k = elapsed / length;
    Ok(from.add(to.sub(from).scale(k)))
}

/// Merged, disjoint set of closed circular arcs.
///
/// Each stored arc is `(start, len)` and covers `start .. start + len` in the
/// positive direction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArcIntervalSet {
    arcs: Vec<(f64, f64)>,
}

impl ArcIntervalSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].1 >= TAU
    }

    /// Insert the directed interval running from `a` to `b` in the positive sense.
    pub fn insert(&mut self, a: Angle, b: Angle) {
        self.insert_arc(a, cw_dist(a, b));
    }

    /// Insert the arc starting at `start` of length `len` (clamped to `[0, 2π]`).
    pub fn insert_arc(&mut self, start: Angle, len: f64) {
        let len = len.clamp(0.0, TAU);
        if len >= TAU - EPS {
            self.arcs = vec![(0.0, TAU)];
            return;
        }
        if self.is_full() {
            return;
        }
        self.arcs.push((start.radians(), len));
        self.normalize();
    }

    /// Insert the arc a robot sweeps when travelling `len` from `start` in `dir`.
    pub fn insert_sweep(&mut self, start: Angle, dir: Dir, len: f64) {
        match dir {
            Dir::Cw => self.insert_arc(start, len),
            Dir::Ccw => self.insert_arc(start.offset(-len), len),
        }
    }

    pub fn union(&mut self, other: &ArcIntervalSet) {
        if self.is_full() {
            return;
        }
        if other.is_full() {
            self.arcs = other.arcs.clone();
            return;
        }
        self.arcs.extend_from_slice(&other.arcs);
        self.normalize();
    }

    fn normalize(&mut self) {
        self.arcs
            .sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.arcs.len());
        for &(s, l) in &self.arcs {
            match merged.last_mut() {
                Some(last) if s <= last.0 + last.1 + EPS => {
                    let end = (last.0 + last.1).max(s + l);
                    last.1 = end - last.0;
                }
                _ => merged.push((s, l)),
            }
        }
        // wrap-around: the last arc may reach past 2π into the first one
        while merged.len() > 1 {
            let (ls, ll) = *merged.last().unwrap();
            let (fs, fl) = merged[0];
            if ls + ll + EPS >= fs + TAU {
                let end = (ls + ll).max(fs + fl + TAU);
                merged.remove(0);
                let last = merged.last_mut().unwrap();
                last.0 = ls;
                last.1 = end - ls;
            } else {
                break;
            }
        }
        if merged.iter().any(|&(_, l)| l >= TAU - EPS) {
            merged = vec![(0.0, TAU)];
        }
        self.arcs = merged;
    }

    /// Endpoint-inclusive membership test with tolerance [`EPS`].
    pub fn covers(&self, theta: Angle) -> bool {
        self.arcs.iter().any(|&(s, l)| {
            let start = Angle::new(s);
            let d = cw_dist(start, theta);
            d <= l + EPS || TAU - d <= EPS
        })
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|&(_, l)| l).sum::<f64>().min(TAU)
    }
}

/// Points on the circle at angular offset `±alpha` from `at`, deduplicated.
pub fn flanking(at: Angle, alpha: f64) -> Vec<Angle> {
    let a = at.offset(alpha);
    let b = at.offset(-alpha);
    if a.near(b, EPS) {
        vec![a]
    } else {
        vec![a, b]
    }
}

pub const HALF_PI: f64 = PI / 2.0;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cw_dist_examples() {
        assert_eq!(cw_dist(Angle::new(0.0), Angle::new(HALF_PI)), HALF_PI);
        assert!((cw_dist(Angle::new(HALF_PI), Angle::new(0.0)) - 3.0 * HALF_PI).abs() < 1e-15);
        assert_eq!(cw_dist(Angle::new(1.3), Angle::new(1.3)), 0.0);
    }

    #[test]
    fn chord_examples() {
        assert_eq!(chord_len(0.0).unwrap(), 0.0);
        assert!((chord_len(PI).unwrap() - 2.0).abs() < 1e-15);
        assert!((chord_len(2.0 * PI / 3.0).unwrap() - 1.7320508).abs() < 1e-7);
        assert!(chord_len(-0.1).is_err());
        assert!(chord_len(TAU + 0.1).is_err());
    }

    #[test]
    fn arc_positions() {
        let p = pos_on_arc(Angle::ZERO, Dir::Cw, PI);
        assert!((p.x + 1.0).abs() < 1e-12 && p.y.abs() < 1e-12);
        let q = pos_on_arc(Angle::new(0.7), Dir::Cw, 0.0);
        assert!(q.dist(Angle::new(0.7).point()) < 1e-15);
        let r = pos_on_arc(Angle::ZERO, Dir::Ccw, HALF_PI);
        assert!(r.dist(Angle::new(3.0 * HALF_PI).point()) < 1e-12);
    }

    #[test]
    fn segment_positions() {
        let p = Angle::new(0.2).point();
        let q = Angle::new(2.0).point();
        assert_eq!(pos_on_segment(p, q, 0.0).unwrap(), p);
        assert_eq!(pos_on_segment(p, q, p.dist(q)).unwrap(), q);
        let mid = pos_on_segment(Angle::ZERO.point(), Angle::new(PI).point(), 1.0).unwrap();
        assert!(mid.norm() < 1e-12);
        assert!(pos_on_segment(p, q, p.dist(q) + 1e-6).is_err());
    }

    #[test]
    fn interval_merge_and_cover() {
        let mut s = ArcIntervalSet::new();
        s.insert(Angle::new(0.0), Angle::new(1.0));
        s.insert(Angle::new(0.5), Angle::new(2.0));
        assert_eq!(s.arcs().len(), 1);
        assert!((s.arcs()[0].0).abs() < 1e-15 && (s.arcs()[0].1 - 2.0).abs() < 1e-15);

        let mut t = ArcIntervalSet::new();
        t.insert(Angle::new(0.0), Angle::new(1.0));
        assert!(t.covers(Angle::new(0.5)));
        assert!(t.covers(Angle::new(1.0)));
        assert!(!t.covers(Angle::new(1.0 + 1e-6)));
    }

    #[test]
    fn interval_wraps_around_zero() {
        let mut s = ArcIntervalSet::new();
        s.insert_sweep(Angle::ZERO, Dir::Ccw, 0.5);
        s.insert_sweep(Angle::ZERO, Dir::Cw, 0.25);
        assert_eq!(s.arcs().len(), 1);
        assert!((s.measure() - 0.75).abs() < 1e-12);
        assert!(s.covers(Angle::new(-0.4)));
        assert!(s.covers(Angle::new(0.2)));
        assert!(!s.covers(Angle::new(1.0)));
    }

    #[test]
    fn interval_fills_circle() {
        let mut s = ArcIntervalSet::new();
        s.insert_sweep(Angle::ZERO, Dir::Cw, PI);
        s.insert_sweep(Angle::ZERO, Dir::Ccw, PI);
        assert!(s.is_full());
        assert!((s.measure() - TAU).abs() < 1e-12);
    }

    #[test]
    fn point_degenerate_interval() {
        let mut s = ArcIntervalSet::new();
        s.insert_arc(Angle::new(2.0), 0.0);
        assert!(s.covers(Angle::new(2.0)));
        assert!(!s.covers(Angle::new(2.1)));
    }

    proptest! {
        #[test]
        fn cw_dist_complements(a in 0.0..TAU, b in 0.0..TAU) {
            let (a, b) = (Angle::new(a), Angle::new(b));
            prop_assume!(!a.near(b, 1e-9));
            prop_assert!((cw_dist(a, b) + cw_dist(b, a) - TAU).abs() < 1e-12);
        }

        #[test]
        fn chord_symmetry(d in 0.0..TAU) {
            prop_assert!((chord_len(d).unwrap() - chord_len(TAU - d).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn arc_positions_on_circle(s in 0.0..TAU, t in 0.0..50.0f64, cw in any::<bool>()) {
            let dir = if cw { Dir::Cw } else { Dir::Ccw };
            prop_assert!((pos_on_arc(Angle::new(s), dir, t).norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn angle_normalized(v in -100.0..100.0f64) {
            let a = Angle::new(v).radians();
            prop_assert!((0.0..TAU).contains(&a));
        }

        #[test]
        fn measure_monotone(ops in proptest::collection::vec((0.0..TAU, 0.0..3.0f64), 1..12)) {
            let mut s = ArcIntervalSet::new();
            let mut last = 0.0;
            for (start, len) in ops {
                s.insert_arc(Angle::new(start), len);
                let m = s.measure();
                prop_assert!(m + 1e-9 >= last);
                prop_assert!(m <= TAU + 1e-12);
                last = m;
                let arcs = s.arcs();
                for w in arcs.windows(2) {
                    prop_assert!(w[0].0 + w[0].1 < w[1].0);
                }
            }
        }

        #[test]
        fn covers_what_was_inserted(start in 0.0..TAU, len in 0.0..6.0f64, k in 0.0..1.0f64) {
            let mut s = ArcIntervalSet::new();
            s.insert_arc(Angle::new(start), len);
            prop_assert!(s.covers(Angle::new(start + k * len)));
        }
    }
}
