use crate::engine::control::{Context, Controller, Motion, Observation};
use crate::geometry::{Angle, Dir, Point, EPS};

use super::{a2_timer, a3_offset, a3_offset_unchecked, select_branch, Branch, Found, Phase, RobotProtocolState};

pub const A2_DEADLINE: &str = "a2_deadline";
pub const A3_CHECKPOINT: &str = "a3_checkpoint";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Leg {
    None,
    ToB,
    ToC,
    ToCenter,
    AtCenter,
    ToK,
}

/// Face-to-face protocol. Each robot acts on its own knowledge only.
#[derive(Debug, Clone)]
pub struct FaceToFace {
    alpha: f64,
    robots: [RobotProtocolState; 2],
    legs: [Leg; 2],
}

impl FaceToFace {
    pub fn new(alpha: f64) -> Self {
        FaceToFace {
            alpha,
            robots: [
                RobotProtocolState::new(0, Angle::ZERO, Dir::Cw),
                RobotProtocolState::new(1, Angle::ZERO, Dir::Ccw),
            ],
            legs: [Leg::None; 2],
        }
    }

    pub fn robots(&self) -> &[RobotProtocolState; 2] {
        &self.robots
    }

    fn first_find(&mut self, i: usize, ctx: &Context<'_>, at: Angle, holds: bool) -> Motion {
        let alpha = self.alpha;
        let x = ctx.protocol_time();
        let r = &mut self.robots[i];
        r.x = Some(x);
        r.found_at = Some(at);
        let found = if holds { Found::Treasure } else { Found::Exit };
        r.found = Some(found);
        let branch = select_branch(alpha, x, found);
        r.branch = Some(branch);
        r.phase = match branch {
            Branch::A1 => Phase::A1,
            Branch::A2 => Phase::A2,
            Branch::A3 => Phase::A3,
        };
        let b = r.point_b(alpha).unwrap();
        match (branch, found) {
            (Branch::A2, Found::Treasure) => {
                self.legs[i] = Leg::ToCenter;
                Motion::go(Point::ORIGIN)
            }
            (Branch::A3, Found::Treasure) => {
                let d = r.point_d(alpha).unwrap().point();
                let from = at.point();
                let len = from.dist(d);
                // A negative offset means the partner would already have reached
                // I and taken the treasure had the exit been at C, so stopping
                // at I and deducing B is correct.
                let y = a3_offset(alpha, x).unwrap_or_else(|_| a3_offset_unchecked(alpha, x).clamp(0.0, len));
                let k = if len > 0.0 { from.add(d.sub(from).scale(y / len)) } else { from };
                self.legs[i] = Leg::ToK;
                Motion::GoTo {
                    target: k,
                    label: Some(A3_CHECKPOINT),
                }
            }
            _ => {
                self.legs[i] = Leg::ToB;
                Motion::go_to(b)
            }
        }
    }

    fn halt(&mut self, i: usize) -> Motion {
        self.robots[i].phase = Phase::Halted;
        self.legs[i] = Leg::None;
        Motion::Halt
    }

    /// Deduce the exit at `B` after a missed rendezvous.
    fn deduce_exit_b(&self, i: usize, ctx: &mut Context<'_>) {
        if let Some(b) = self.robots[i].point_b(self.alpha) {
            ctx.knowledge[i].promote_exit(b);
        }
    }

    fn react_robot(&mut self, i: usize, ctx: &mut Context<'_>) -> Option<Motion> {
        let alpha = self.alpha;
        let reached = ctx.saw(i, |o| matches!(o, Observation::Reached { .. }));
        let timer = ctx.saw(i, |o| matches!(o, Observation::Timer { .. }));
        let met = ctx.met();
        let holds = ctx.views[i].holds_treasure;
        let mut out = None;

        if self.robots[i].phase == Phase::ToPerimeter && reached {
            self.robots[i].phase = Phase::Sweep;
            out = Some(Motion::Sweep {
                dir: self.robots[i].dir,
            });
        }

        let find = ctx.observations.iter().find_map(|o| match *o {
            Observation::Found {
                robot,
                at,
                exit,
                treasure,
            } if robot == i && (exit || treasure) => Some((at, treasure)),
            _ => None,
        });

        if self.robots[i].phase == Phase::Sweep {
            if let Some((at, treasure)) = find {
                if treasure && !holds {
                    // lost a simultaneous pickup race to the partner
                    out = Some(self.halt(i));
                } else {
                    out = Some(self.first_find(i, ctx, at, holds));
                }
            }
        } else if !holds {
            let phase = self.robots[i].phase;
            match (phase, self.legs[i]) {
                (Phase::A1 | Phase::A3, Leg::ToB) if reached => {
                    let c = self.robots[i].point_c(alpha).unwrap();
                    self.legs[i] = Leg::ToC;
                    out = Some(Motion::go_to(c));
                }
                (Phase::A2, Leg::ToB) if reached => {
                    self.legs[i] = Leg::ToCenter;
                    out = Some(Motion::go(Point::ORIGIN));
                }
                (Phase::A3, Leg::ToC) if met || reached => out = Some(self.halt(i)),
                (Phase::A1, Leg::ToC) | (Phase::A2, Leg::ToCenter) if reached => {
                    out = Some(self.halt(i))
                }
                _ => {}
            }
        } else {
            let phase = self.robots[i].phase;
            match (phase, self.legs[i]) {
                (Phase::A2, Leg::ToCenter) if reached && ctx.knowledge[i].exit().is_none() => {
                    let x = self.robots[i].x.unwrap_or(0.0);
                    self.legs[i] = Leg::AtCenter;
                    out = Some(Motion::WaitUntil {
                        until: 1.0 + a2_timer(alpha, x),
                        label: A2_DEADLINE,
                    });
                }
                (Phase::A2, Leg::AtCenter) if timer && ctx.knowledge[i].exit().is_none() => {
                    self.deduce_exit_b(i, ctx);
                }
                (Phase::A3, Leg::ToK) if timer && ctx.knowledge[i].exit().is_none() => {
                    self.deduce_exit_b(i, ctx);
                }
                _ => {}
            }
        }

        // a holder who knows the exit goes straight there
        if holds {
            match ctx.knowledge[i].exit() {
                Some(exit) => {
                    let target = exit.point();
                    let v = ctx.views[i];
                    let already = out.is_none()
                        && v.heading_to.is_some_and(|h| h.dist(target) <= EPS);
                    if !already {
                        self.robots[i].phase = Phase::ConfidentEvac;
                        self.legs[i] = Leg::None;
                        out = Some(Motion::go(target));
                    }
                }
                None => {
                    // nowhere left to try
                    if reached && out.is_none() && matches!(self.robots[i].phase, Phase::A1 | Phase::ConfidentEvac) {
                        out = Some(self.halt(i));
                    }
                }
            }
        } else if met
            && ctx.knowledge[i].treasure_taken
            && ctx.knowledge[i].exit().is_some()
            && self.robots[i].phase != Phase::Halted
        {
            // the partner carries the treasure and now knows where to take it
            out = Some(self.halt(i));
        }
        out
    }
}

impl Controller for FaceToFace {
    fn start(&mut self) -> [Motion; 2] {
        [Motion::go_to(Angle::ZERO), Motion::go_to(Angle::ZERO)]
    }

    fn react(&mut self, ctx: &mut Context<'_>) -> [Option<Motion>; 2] {
        [self.react_robot(0, ctx), self.react_robot(1, ctx)]
    }

    fn branches(&self) -> [Option<Branch>; 2] {
        [self.robots[0].branch, self.robots[1].branch]
    }
}
