use std::f64::consts::PI;

use crate::engine::control::{Context, Controller, Motion, Observation};
use crate::geometry::{Angle, Dir, Point, EPS};

use super::{Found, Phase, RobotProtocolState};

/// Broadcast protocol. Knowledge is shared, so the controller plans jointly.
#[derive(Debug, Clone)]
pub struct Wireless {
    alpha: f64,
    robots: [RobotProtocolState; 2],
}

impl Wireless {
    pub fn new(alpha: f64) -> Self {
        let robots = if alpha <= 2.0 * PI / 3.0 {
            [
                RobotProtocolState::new(0, Angle::ZERO, Dir::Cw),
                RobotProtocolState::new(1, Angle::ZERO, Dir::Ccw),
            ]
        } else {
            [
                RobotProtocolState::new(0, Angle::ZERO, Dir::Cw),
                RobotProtocolState::new(1, Angle::new(PI), Dir::Cw),
            ]
        };
        Wireless { alpha, robots }
    }

    pub fn robots(&self) -> &[RobotProtocolState; 2] {
        &self.robots
    }

    fn discovered(&self) -> bool {
        self.robots.iter().any(|r| r.x.is_some())
    }

    /// Straight-line plan once both locations are pinned down.
    fn confident(&mut self, ctx: &Context<'_>, out: &mut [Option<Motion>; 2]) {
        let k = &ctx.knowledge[0];
        let Some(exit) = k.exit() else { return };
        let holder = (0..2).find(|&i| ctx.views[i].holds_treasure);
        for i in 0..2 {
            let want = match holder {
                Some(h) if h == i => Some(exit.point()),
                Some(_) => None,
                None => match k.treasure() {
                    Some(t) if !k.treasure_taken => Some(t.point()),
                    _ => None,
                },
            };
            let r = &mut self.robots[i];
            match want {
                Some(target) => {
                    r.phase = Phase::ConfidentEvac;
                    if !heading(ctx, i, target) {
                        out[i] = Some(Motion::go(target));
                    }
                }
                None => {
                    if r.phase != Phase::Halted {
                        r.phase = Phase::Halted;
                        out[i] = Some(Motion::Halt);
                    }
                }
            }
        }
    }
}

fn heading(ctx: &Context<'_>, robot: usize, target: Point) -> bool {
    let v = ctx.views[robot];
    match v.heading_to {
        Some(h) => h.dist(target) <= EPS,
        None => v.idle && v.pos.dist(target) <= EPS,
    }
}

impl Controller for Wireless {
    fn start(&mut self) -> [Motion; 2] {
        [
            Motion::go_to(self.robots[0].start),
            Motion::go_to(self.robots[1].start),
        ]
    }

    fn react(&mut self, ctx: &mut Context<'_>) -> [Option<Motion>; 2] {
        let mut out: [Option<Motion>; 2] = [None, None];
        let t = ctx.protocol_time();

        for i in 0..2 {
            let r = &mut self.robots[i];
            if r.phase == Phase::ToPerimeter && ctx.saw(i, |o| matches!(o, Observation::Reached { .. })) {
                r.phase = Phase::Sweep;
                out[i] = Some(Motion::Sweep { dir: r.dir });
            }
        }

        let finds: Vec<(usize, Angle, bool)> = ctx
            .observations
            .iter()
            .filter_map(|o| match *o {
                Observation::Found {
                    robot,
                    at,
                    exit,
                    treasure,
                } if exit || treasure => Some((robot, at, treasure)),
                _ => None,
            })
            .collect();

        if !self.discovered() && !finds.is_empty() {
            // ties go to robot 0: `finds` is emitted in robot order
            let (finder, at, _) = finds[0];
            for &(robot, at, treasure) in &finds {
                let r = &mut self.robots[robot];
                if r.x.is_none() {
                    r.x = Some(t);
                    r.found_at = Some(at);
                    r.found = Some(if treasure && ctx.views[robot].holds_treasure {
                        Found::Treasure
                    } else {
                        Found::Exit
                    });
                }
            }
            if !ctx.knowledge[0].complete() {
                let f = &self.robots[finder];
                let b = at.offset(f.dir.sign() * self.alpha);
                let c = at.offset(-f.dir.sign() * self.alpha);
                let other = 1 - finder;
                self.robots[finder].phase = Phase::Probe;
                self.robots[other].phase = Phase::Probe;
                out[finder] = Some(Motion::go_to(b));
                out[other] = Some(Motion::go_to(c));
                return out;
            }
        }

        if ctx.knowledge[0].complete() {
            self.confident(ctx, &mut out);
        } else {
            for i in 0..2 {
                let r = &mut self.robots[i];
                if r.phase == Phase::Probe
                    && out[i].is_none()
                    && ctx.saw(i, |o| matches!(o, Observation::Reached { .. }))
                {
                    r.phase = Phase::Halted;
                    out[i] = Some(Motion::Halt);
                }
            }
        }
        out
    }
}
