//! Closed-form event loop.

use std::f64::consts::TAU;

use crate::engine::control::{Context, Controller, Motion, Observation, RobotView};
use crate::engine::knowledge::KnowledgeState;
use crate::engine::{
    audit_trajectory, Audit, Configuration, EventKind, Model, SegmentKind, SimError, SimEvent,
    SimResult, Sighting, TrajectorySegment, TIME_LIMIT,
};
use crate::geometry::{Angle, Dir, Point, EPS, SNAP};
use crate::strategies::controller_for;

/// Rounds of same-instant reactions before the loop insists on time passing.
const MAX_INSTANT_ROUNDS: usize = 16;

/// A motion in progress, anchored at the time it began.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Piece {
    Arc { t0: f64, start: Angle, dir: Dir },
    Line { t0: f64, from: Point, to: Point },
    Still { at: Point },
}

impl Piece {
    pub(crate) fn pos(&self, t: f64) -> Point {
        match *self {
            Piece::Arc { t0, start, dir } => start.offset(dir.sign() * (t - t0)).point(),
            Piece::Line { t0, from, to } => {
                let len = from.dist(to);
                let e = (t - t0).clamp(0.0, len);
                if len <= 0.0 || e >= len {
                    to
                } else {
                    from.add(to.sub(from).scale(e / len))
                }
            }
            Piece::Still { at } => at,
        }
    }

    fn arc_angle(&self, t: f64) -> Option<(Angle, Dir)> {
        match *self {
            Piece::Arc { t0, start, dir } => Some((start.offset(dir.sign() * (t - t0)), dir)),
            _ => None,
        }
    }

    /// Velocity and anchor for straight motion: `pos(t) = base + vel·t`.
    fn linear(&self) -> Option<(Point, Point)> {
        match *self {
            Piece::Line { t0, from, to } => {
                let len = from.dist(to);
                if len <= SNAP {
                    return None;
                }
                let u = to.sub(from).scale(1.0 / len);
                Some((from.sub(u.scale(t0)), u))
            }
            Piece::Still { at } => Some((at, Point::ORIGIN)),
            Piece::Arc { .. } => None,
        }
    }

    fn line_end(&self) -> Option<(f64, Point)> {
        match *self {
            Piece::Line { t0, from, to } => Some((t0 + from.dist(to), to)),
            _ => None,
        }
    }
}

fn on_circle(p: Point) -> Option<Angle> {
    ((p.norm() - 1.0).abs() <= EPS).then(|| Angle::new(p.y.atan2(p.x)))
}

/// Earliest time in `(lo, hi]` at which two pieces coincide.
pub(crate) fn first_meeting(a: Piece, b: Piece, lo: f64, hi: f64) -> Option<f64> {
    let after = lo + EPS;
    let ok = |t: f64| (t > after && t <= hi + EPS).then_some(t);
    match (a, b) {
        (Piece::Still { .. }, Piece::Still { .. }) => None,
        (Piece::Arc { .. }, Piece::Arc { .. }) => {
            let (pa, da) = a.arc_angle(lo).unwrap();
            let (pb, db) = b.arc_angle(lo).unwrap();
            if da == db {
                return None;
            }
            let mut gap = da.travel(pa, pb);
            if gap <= EPS || TAU - gap <= EPS {
                gap += TAU;
            }
            ok(lo + gap / 2.0)
        }
        (Piece::Arc { .. }, other) | (other, Piece::Arc { .. }) => {
            let arc = if matches!(a, Piece::Arc { .. }) { a } else { b };
            match other {
                Piece::Still { at } => {
                    let target = on_circle(at)?;
                    let (here, dir) = arc.arc_angle(lo).unwrap();
                    let mut off = dir.travel(here, target);
                    if off <= EPS || TAU - off <= EPS {
                        off += TAU;
                    }
                    ok(lo + off)
                }
                Piece::Line { t0, from, to } => {
                    // a chord touches the circle only at its endpoints
                    let (t_end, _) = other.line_end().unwrap();
                    [(t0, from), (t_end, to)]
                        .into_iter()
                        .filter(|&(t, p)| on_circle(p).is_some() && ok(t).is_some())
                        .find(|&(t, p)| arc.pos(t).dist(p) <= EPS)
                        .map(|(t, _)| t)
                }
                Piece::Arc { .. } => unreachable!(),
            }
        }
        _ => {
            let (ba, va) = a.linear()?;
            let (bb, vb) = b.linear()?;
            let d = ba.sub(bb);
            let v = va.sub(vb);
            let vv = v.dot(v);
            if vv <= 1e-18 {
                return None;
            }
            let t = -d.dot(v) / vv;
            let miss = d.add(v.scale(t)).norm();
            if miss > EPS {
                return None;
            }
            let t = ok(t)?;
            let here = a.pos(t);
            let transversal = va.norm() > 0.5 && vb.norm() > 0.5 && va.cross(vb).abs() > 1e-6;
            let at_end = |p: Piece| match p {
                Piece::Line { from, to, .. } => here.dist(from) <= EPS || here.dist(to) <= EPS,
                _ => true,
            };
            if transversal && !at_end(a) && !at_end(b) {
                return None;
            }
            Some(t)
        }
    }
}

fn piece_of(seg: &TrajectorySegment) -> Piece {
    match seg.kind {
        SegmentKind::PerimeterArc { start, dir } => Piece::Arc {
            t0: seg.start_time,
            start,
            dir,
        },
        SegmentKind::Chord { from, to } => Piece::Line {
            t0: seg.start_time,
            from,
            to,
        },
        SegmentKind::Wait { at } => Piece::Still { at },
    }
}

/// All co-locations of two timed trajectories (reported from `a`'s side as
/// robot 0 meeting robot 1).
pub fn colocation_events(a: &[TrajectorySegment], b: &[TrajectorySegment]) -> Vec<SimEvent> {
    let mut times: Vec<(f64, Point)> = Vec::new();
    for sa in a {
        for sb in b {
            let lo = sa.start_time.max(sb.start_time);
            let hi = sa.end_time().min(sb.end_time());
            if hi < lo - EPS {
                continue;
            }
            let (pa, pb) = (piece_of(sa), piece_of(sb));
            // a meeting right at the window start
            if pa.pos(lo).dist(pb.pos(lo)) <= EPS
                && !(matches!(pa, Piece::Still { .. }) && matches!(pb, Piece::Still { .. }))
            {
                times.push((lo, pa.pos(lo)));
            }
            let mut from = lo;
            while let Some(t) = first_meeting(pa, pb, from, hi) {
                times.push((t, pa.pos(t)));
                from = t;
            }
        }
    }
    times.sort_by(|x, y| x.0.total_cmp(&y.0));
    times.dedup_by(|x, y| (x.0 - y.0).abs() <= EPS);
    times
        .into_iter()
        .map(|(time, at)| SimEvent {
            time,
            robot: 0,
            kind: EventKind::Meet { at, other: 1 },
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Robot {
    piece: Piece,
    /// Start of the current trajectory segment.
    seg_start: f64,
    /// Timer attached to the current motion (absolute time, label).
    timer: Option<(f64, &'static str)>,
    /// Label reported when the current straight move arrives.
    arrival_label: Option<&'static str>,
    /// Time up to which the current arc has been added to the explored set.
    scanned_to: f64,
    holds: bool,
    halted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cand {
    Arrive,
    Timer,
    Scan(Angle),
    Meet,
}

struct Sim {
    cfg: Configuration,
    exit: Angle,
    treasure: Angle,
    treasure_present: bool,
    now: f64,
    robots: [Robot; 2],
    knowledge: [KnowledgeState; 2],
    trajectories: [Vec<TrajectorySegment>; 2],
    events: Vec<SimEvent>,
    knowledge_sound: bool,
}

impl Sim {
    fn new(cfg: Configuration) -> Self {
        let still = Robot {
            piece: Piece::Still { at: Point::ORIGIN },
            seg_start: 0.0,
            timer: None,
            arrival_label: None,
            scanned_to: 0.0,
            holds: false,
            halted: false,
        };
        let k = match cfg.model {
            Model::Wireless => KnowledgeState::default(),
            Model::F2f => KnowledgeState::isolated(),
        };
        Sim {
            cfg,
            exit: cfg.exit_angle,
            treasure: cfg.treasure_angle(),
            treasure_present: true,
            now: 0.0,
            robots: [still; 2],
            knowledge: [k.clone(), k],
            trajectories: [Vec::new(), Vec::new()],
            events: Vec::new(),
            knowledge_sound: true,
        }
    }

    fn emit(&mut self, robot: usize, kind: EventKind) {
        self.events.push(SimEvent {
            time: self.now,
            robot,
            kind,
        });
    }

    fn pos(&self, i: usize) -> Point {
        self.robots[i].piece.pos(self.now)
    }

    fn close_segment(&mut self, i: usize) {
        let r = self.robots[i];
        let duration = self.now - r.seg_start;
        if duration <= SNAP {
            return;
        }
        let kind = match r.piece {
            Piece::Arc { start, dir, t0 } => SegmentKind::PerimeterArc {
                start: start.offset(dir.sign() * (r.seg_start - t0)),
                dir,
            },
            Piece::Line { .. } => SegmentKind::Chord {
                from: r.piece.pos(r.seg_start),
                to: r.piece.pos(self.now),
            },
            Piece::Still { at } => SegmentKind::Wait { at },
        };
        let duration = match kind {
            SegmentKind::Chord { from, to } => from.dist(to),
            _ => duration,
        };
        self.trajectories[i].push(TrajectorySegment {
            start_time: r.seg_start,
            duration,
            kind,
        });
    }

    fn set_piece(&mut self, i: usize, piece: Piece) {
        self.close_segment(i);
        let r = &mut self.robots[i];
        r.piece = piece;
        r.seg_start = self.now;
        r.scanned_to = self.now;
        r.timer = None;
        r.arrival_label = None;
    }

    /// Record the arc swept since the last update in the robot's knowledge.
    fn sweep_knowledge(&mut self, i: usize) {
        let r = self.robots[i];
        if let Piece::Arc { t0, start, dir } = r.piece {
            let from = start.offset(dir.sign() * (r.scanned_to - t0));
            let len = self.now - r.scanned_to;
            if len > 0.0 {
                for k in self.sharers(i) {
                    self.knowledge[k].observe_sweep(from, dir, len);
                }
            }
            self.robots[i].scanned_to = self.now;
        }
    }

    /// Robots whose knowledge is updated by robot `i`'s observations.
    fn sharers(&self, i: usize) -> Vec<usize> {
        match self.cfg.model {
            Model::Wireless => vec![0, 1],
            Model::F2f => vec![i],
        }
    }

    /// Robot `i` is at perimeter point `at`: look around and pick up.
    fn visit(&mut self, i: usize, at: Angle, obs: &mut Vec<Observation>) {
        let alpha = self.cfg.alpha;
        let exit = self.exit.near(at, EPS);
        let treasure = self.treasure_present && self.treasure.near(at, EPS);
        let what = match (exit, treasure) {
            (true, true) => Sighting::Both,
            (true, false) => Sighting::Exit,
            (false, true) => Sighting::Treasure,
            (false, false) => Sighting::Empty,
        };
        // report the true point so knowledge is exact
        let point = if exit {
            self.exit
        } else if treasure {
            self.treasure
        } else {
            at
        };
        self.emit(i, EventKind::Discover { point, what });
        for k in self.sharers(i) {
            let kn = &mut self.knowledge[k];
            kn.observe_visit(point);
            if exit {
                kn.observe_exit(point, alpha);
            }
            if treasure {
                kn.observe_treasure(point, alpha);
            }
        }
        if exit || treasure {
            obs.push(Observation::Found {
                robot: i,
                at: point,
                exit,
                treasure,
            });
        } else {
            obs.push(Observation::Empty { robot: i, at: point });
        }
        if treasure && !self.robots[1 - i].holds {
            self.treasure_present = false;
            self.robots[i].holds = true;
            self.knowledge[i].pick_up();
            if self.cfg.model == Model::Wireless {
                self.knowledge[1 - i].treasure_taken = true;
            }
            self.emit(i, EventKind::Pickup);
            obs.push(Observation::PickedUp { robot: i });
        }
    }

    fn sync(&mut self) {
        for k in &mut self.knowledge {
            k.refresh();
        }
        if self.cfg.model == Model::Wireless {
            let [a, b] = &mut self.knowledge;
            a.merge(b);
            b.merge(a);
        }
    }

    fn audit_knowledge(&mut self) {
        for k in &self.knowledge {
            if k.exit().is_some_and(|e| !e.near(self.exit, EPS)) {
                self.knowledge_sound = false;
            }
            if k.treasure().is_some_and(|t| !t.near(self.treasure, EPS)) {
                self.knowledge_sound = false;
            }
        }
    }

    /// Candidate perimeter points an arc robot should stop and look at.
    fn scan_points(&self, i: usize) -> Vec<Angle> {
        let mut pts = vec![self.exit];
        if self.treasure_present {
            pts.push(self.treasure);
        }
        for loc in [&self.knowledge[i].exit_loc, &self.knowledge[i].treasure_loc] {
            if let crate::engine::Location::Candidates(c) = loc {
                pts.extend(c.iter().copied());
            }
        }
        pts
    }

    fn candidates(&self) -> Vec<(f64, usize, Cand)> {
        let mut out = Vec::new();
        for i in 0..2 {
            let r = &self.robots[i];
            if let Some((t, _)) = r.piece.line_end() {
                out.push((t.max(self.now), i, Cand::Arrive));
            }
            if let Some((t, _)) = r.timer {
                out.push((t.max(self.now), i, Cand::Timer));
            }
            if let Some((here, dir)) = r.piece.arc_angle(self.now) {
                for p in self.scan_points(i) {
                    let mut off = dir.travel(here, p);
                    if off <= EPS || TAU - off <= EPS {
                        off += TAU;
                    }
                    out.push((self.now + off, i, Cand::Scan(p)));
                }
            }
        }
        if self.cfg.model == Model::F2f {
            let hi = [0, 1]
                .iter()
                .filter_map(|&i| {
                    let r = &self.robots[i];
                    r.piece.line_end().map(|(t, _)| t).or(r.timer.map(|(t, _)| t))
                })
                .fold(TIME_LIMIT, f64::min);
            if let Some(t) = first_meeting(self.robots[0].piece, self.robots[1].piece, self.now, hi) {
                out.push((t, 0, Cand::Meet));
            }
        }
        out
    }

    fn views(&self) -> [RobotView; 2] {
        [0, 1].map(|i| {
            let r = &self.robots[i];
            RobotView {
                pos: self.pos(i),
                holds_treasure: r.holds,
                heading_to: match r.piece {
                    Piece::Line { to, .. } => Some(to),
                    _ => None,
                },
                idle: matches!(r.piece, Piece::Still { .. }),
            }
        })
    }

    fn install(&mut self, i: usize, motion: Motion, obs: &mut Vec<Observation>) {
        let here = self.pos(i);
        self.robots[i].halted = false;
        match motion {
            Motion::Sweep { dir } => {
                let start = on_circle(here).unwrap_or_else(|| Angle::new(here.y.atan2(here.x)));
                self.set_piece(
                    i,
                    Piece::Arc {
                        t0: self.now,
                        start,
                        dir,
                    },
                );
            }
            Motion::GoTo { target, label } => {
                if here.dist(target) <= EPS {
                    self.set_piece(i, Piece::Still { at: target });
                    obs.push(Observation::Reached { robot: i });
                    if let Some(label) = label {
                        self.emit(i, EventKind::TimerExpire { label: label.to_string() });
                        obs.push(Observation::Timer { robot: i, label });
                    }
                } else {
                    self.set_piece(
                        i,
                        Piece::Line {
                            t0: self.now,
                            from: here,
                            to: target,
                        },
                    );
                    self.robots[i].arrival_label = label;
                }
            }
            Motion::WaitUntil { until, label } => {
                self.set_piece(i, Piece::Still { at: here });
                if until <= self.now + EPS {
                    self.emit(i, EventKind::TimerExpire { label: label.to_string() });
                    obs.push(Observation::Timer { robot: i, label });
                } else {
                    self.robots[i].timer = Some((until, label));
                }
            }
            Motion::Halt => {
                self.set_piece(i, Piece::Still { at: here });
                self.robots[i].halted = true;
            }
        }
    }

    /// Holder standing on its known exit leaves the disk.
    fn try_evacuate(&mut self) -> Result<bool, SimError> {
        for i in 0..2 {
            if !self.robots[i].holds {
                continue;
            }
            let Some(exit) = self.knowledge[i].exit() else { continue };
            if self.pos(i).dist(exit.point()) <= EPS {
                self.emit(i, EventKind::Evacuate);
                if self.pos(i).dist(self.exit.point()) > EPS {
                    return Err(SimError::AuditFailure(format!(
                        "robot {i} evacuated at angle {:.9} but the exit is at {:.9}",
                        exit.radians(),
                        self.exit.radians()
                    )));
                }
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn react(&mut self, ctl: &mut dyn Controller, mut obs: Vec<Observation>) -> Result<bool, SimError> {
        for _ in 0..MAX_INSTANT_ROUNDS {
            self.sync();
            self.audit_knowledge();
            if self.try_evacuate()? {
                return Ok(true);
            }
            let views = self.views();
            let motions = {
                let mut ctx = Context {
                    now: self.now,
                    views,
                    knowledge: &mut self.knowledge,
                    observations: &obs,
                };
                ctl.react(&mut ctx)
            };
            // deductions made by the controller
            self.sync();
            self.audit_knowledge();
            if self.try_evacuate()? {
                return Ok(true);
            }
            let mut next = Vec::new();
            for (i, m) in motions.into_iter().enumerate() {
                if let Some(m) = m {
                    self.install(i, m, &mut next);
                }
            }
            if next.is_empty() {
                return Ok(false);
            }
            obs = next;
        }
        Ok(false)
    }

    fn run(mut self) -> Result<SimResult, SimError> {
        let mut ctl = controller_for(self.cfg.model, self.cfg.alpha);
        let starts = ctl.start();
        let mut obs = Vec::new();
        for (i, m) in starts.into_iter().enumerate() {
            self.emit(i, EventKind::Depart);
            self.install(i, m, &mut obs);
        }
        if !obs.is_empty() && self.react(ctl.as_mut(), obs)? {
            return self.finish(ctl.as_ref());
        }

        loop {
            let cands = self.candidates();
            let Some(tmin) = cands.iter().map(|c| c.0).min_by(f64::total_cmp) else {
                return Err(SimError::NonTermination { time: self.now });
            };
            if tmin > TIME_LIMIT {
                return Err(SimError::NonTermination { time: tmin });
            }
            let mut batch: Vec<(usize, Cand)> = cands
                .iter()
                .filter(|c| c.0 <= tmin + EPS)
                .map(|c| (c.1, c.2))
                .collect();
            batch.sort_by_key(|&(i, c)| (i, matches!(c, Cand::Meet)));
            self.now = tmin;
            for i in 0..2 {
                self.sweep_knowledge(i);
            }

            let mut obs = Vec::new();
            // arrivals and timers first, then perimeter looks, robot 0 first
            for &(i, c) in &batch {
                match c {
                    Cand::Arrive => {
                        let to = self.robots[i].piece.line_end().unwrap().1;
                        let label = self.robots[i].arrival_label;
                        self.set_piece(i, Piece::Still { at: to });
                        obs.push(Observation::Reached { robot: i });
                        if let Some(label) = label {
                            self.emit(i, EventKind::TimerExpire { label: label.to_string() });
                            obs.push(Observation::Timer { robot: i, label });
                        }
                    }
                    Cand::Timer => {
                        let (_, label) = self.robots[i].timer.take().unwrap();
                        self.emit(i, EventKind::TimerExpire { label: label.to_string() });
                        obs.push(Observation::Timer { robot: i, label });
                    }
                    _ => {}
                }
            }
            for i in 0..2 {
                let mut looked: Vec<Angle> = Vec::new();
                for &(j, c) in &batch {
                    if j != i {
                        continue;
                    }
                    let at = match c {
                        Cand::Arrive => on_circle(self.pos(i)),
                        Cand::Scan(p) => Some(p),
                        _ => None,
                    };
                    if let Some(at) = at {
                        if !looked.iter().any(|l| l.near(at, EPS)) {
                            looked.push(at);
                            self.visit(i, at, &mut obs);
                        }
                    }
                }
            }
            if batch.iter().any(|&(_, c)| c == Cand::Meet) {
                let at = self.pos(0);
                self.emit(0, EventKind::Meet { at, other: 1 });
                self.emit(1, EventKind::Meet { at, other: 0 });
                let [a, b] = &mut self.knowledge;
                let a_before = a.clone();
                a.merge(b);
                b.merge(&a_before);
                obs.push(Observation::Met);
            }
            if self.react(ctl.as_mut(), obs)? {
                return self.finish(ctl.as_ref());
            }
        }
    }

    fn finish(mut self, ctl: &dyn Controller) -> Result<SimResult, SimError> {
        for i in 0..2 {
            self.sweep_knowledge(i);
            self.close_segment(i);
        }
        let (s0, c0) = audit_trajectory(&self.trajectories[0]);
        let (s1, c1) = audit_trajectory(&self.trajectories[1]);
        let audit = Audit {
            delivered_at_true_exit: true,
            speed_respected: s0 && s1,
            continuous: c0 && c1,
            knowledge_sound: self.knowledge_sound,
        };
        if !audit.ok() {
            return Err(SimError::AuditFailure(format!("{audit:?}")));
        }
        Ok(SimResult {
            config: self.cfg,
            evac_time: self.now,
            events: self.events,
            trajectories: self.trajectories,
            audit,
            branches: ctl.branches(),
        })
    }
}

/// Run both robots from the centre until the treasure leaves through the exit.
pub fn simulate(config: Configuration) -> Result<SimResult, SimError> {
    config.validate()?;
    Sim::new(config).run()
}
