//! Time-stepped re-run of the protocols. Shares the controllers and the
//! knowledge bookkeeping with the exact engine but none of its event solving:
//! robots advance by `dt` per tick and notice points within `2·dt`.

use std::f64::consts::TAU;

use crate::engine::control::{Context, Motion, Observation, RobotView};
use crate::engine::{Configuration, KnowledgeState, Location, Model, SimError, TIME_LIMIT};
use crate::geometry::{Angle, Dir, Point};
use crate::strategies::controller_for;

#[derive(Debug, Clone, Copy)]
enum Plan {
    Arc { dir: Dir },
    Line { to: Point, label: Option<&'static str> },
    Stay { until: Option<(f64, &'static str)> },
}

#[derive(Debug, Clone)]
struct Bot {
    pos: Point,
    /// Angle while on the circle.
    theta: Angle,
    plan: Plan,
    holds: bool,
    /// Points currently within detection range (for edge triggering).
    near: Vec<Angle>,
}

fn install(bot: &mut Bot, m: Motion, now: f64, obs: &mut Vec<Observation>, i: usize) {
    match m {
        Motion::Sweep { dir } => {
            bot.theta = Angle::new(bot.pos.y.atan2(bot.pos.x));
            bot.plan = Plan::Arc { dir };
        }
        Motion::GoTo { target, label } => bot.plan = Plan::Line { to: target, label },
        Motion::WaitUntil { until, label } => {
            if until <= now {
                obs.push(Observation::Timer { robot: i, label });
                bot.plan = Plan::Stay { until: None };
            } else {
                bot.plan = Plan::Stay {
                    until: Some((until, label)),
                };
            }
        }
        Motion::Halt => bot.plan = Plan::Stay { until: None },
    }
}

/// Approximate evacuation time by fixed-step integration.
pub fn oracle_simulate(config: Configuration, dt: f64) -> Result<f64, SimError> {
    config.validate()?;
    if !(dt > 0.0 && dt <= 1e-3) {
        return Err(SimError::InvalidConfig(format!("dt must be in (0, 1e-3], got {dt}")));
    }
    let alpha = config.alpha;
    let exit = config.exit_angle;
    let treasure = config.treasure_angle();
    let wireless = config.model == Model::Wireless;
    let radius = 2.0 * dt;

    let mut ctl = controller_for(config.model, alpha);
    let base = if wireless {
        KnowledgeState::default()
    } else {
        KnowledgeState::isolated()
    };
    let mut knowledge = [base.clone(), base];
    let fresh = Bot {
        pos: Point::ORIGIN,
        theta: Angle::ZERO,
        plan: Plan::Stay { until: None },
        holds: false,
        near: Vec::new(),
    };
    let mut bots = [fresh.clone(), fresh];
    let mut treasure_present = true;
    let mut together = true;
    let mut t = 0.0;
    let mut obs = Vec::new();
    for (i, m) in ctl.start().into_iter().enumerate() {
        install(&mut bots[i], m, t, &mut obs, i);
    }

    let mut step: u64 = 0;
    loop {
        // react to whatever the last tick produced
        if !obs.is_empty() {
            for k in &mut knowledge {
                k.refresh();
            }
            if wireless {
                let [a, b] = &mut knowledge;
                a.merge(b);
                b.merge(a);
            }
            for i in 0..2 {
                if bots[i].holds {
                    if let Some(e) = knowledge[i].exit() {
                        if bots[i].pos.dist(e.point()) <= radius {
                            if !e.near(exit, 1e-6) {
                                return Err(SimError::AuditFailure(format!(
                                    "oracle: robot {i} evacuated away from the exit"
                                )));
                            }
                            return Ok(t);
                        }
                    }
                }
            }
            let views = [0, 1].map(|i| {
                let b = &bots[i];
                RobotView {
                    pos: b.pos,
                    holds_treasure: b.holds,
                    heading_to: match b.plan {
                        Plan::Line { to, .. } => Some(to),
                        _ => None,
                    },
                    idle: matches!(b.plan, Plan::Stay { .. }),
                }
            });
            let current = std::mem::take(&mut obs);
            let motions = {
                let mut ctx = Context {
                    now: t,
                    views,
                    knowledge: &mut knowledge,
                    observations: &current,
                };
                ctl.react(&mut ctx)
            };
            for k in &mut knowledge {
                k.refresh();
            }
            for (i, m) in motions.into_iter().enumerate() {
                if let Some(m) = m {
                    install(&mut bots[i], m, t, &mut obs, i);
                }
            }
            // a deduction may already put the holder on its exit
            for i in 0..2 {
                if bots[i].holds {
                    if let Some(e) = knowledge[i].exit() {
                        if bots[i].pos.dist(e.point()) <= radius && e.near(exit, 1e-6) {
                            return Ok(t);
                        }
                    }
                }
            }
            if !obs.is_empty() {
                continue;
            }
        }

        step += 1;
        t = step as f64 * dt;
        if t > TIME_LIMIT {
            return Err(SimError::NonTermination { time: t });
        }

        for i in 0..2 {
            let bot = &mut bots[i];
            match bot.plan {
                Plan::Arc { dir } => {
                    let from = bot.theta;
                    bot.theta = bot.theta.offset(dir.sign() * dt);
                    bot.pos = bot.theta.point();
                    let sharers: &[usize] = if wireless { &[0, 1] } else { std::slice::from_ref(&i) };
                    for &k in sharers {
                        knowledge[k].observe_sweep(from, dir, dt);
                    }
                }
                Plan::Line { to, label } => {
                    let gap = bot.pos.dist(to);
                    if gap <= dt {
                        bot.pos = to;
                        bot.plan = Plan::Stay { until: None };
                        obs.push(Observation::Reached { robot: i });
                        if let Some(label) = label {
                            obs.push(Observation::Timer { robot: i, label });
                        }
                        if (to.norm() - 1.0).abs() <= 1e-9 {
                            let at = Angle::new(to.y.atan2(to.x));
                            bot.theta = at;
                            let sharers: &[usize] = if wireless { &[0, 1] } else { std::slice::from_ref(&i) };
                            for &k in sharers {
                                knowledge[k].observe_visit(at);
                            }
                        }
                    } else {
                        bot.pos = bot.pos.add(to.sub(bot.pos).scale(dt / gap));
                    }
                }
                Plan::Stay { until } => {
                    if let Some((u, label)) = until {
                        if t >= u {
                            bot.plan = Plan::Stay { until: None };
                            obs.push(Observation::Timer { robot: i, label });
                        }
                    }
                }
            }
        }

        // proximity detection, robot 0 first
        for i in 0..2 {
            let mut points = vec![exit, treasure];
            for loc in [&knowledge[i].exit_loc, &knowledge[i].treasure_loc] {
                if let Location::Candidates(c) = loc {
                    points.extend(c.iter().copied());
                }
            }
            let pos = bots[i].pos;
            let inside: Vec<Angle> = points
                .into_iter()
                .filter(|p| pos.dist(p.point()) <= radius)
                .collect();
            let fresh: Vec<Angle> = inside
                .iter()
                .copied()
                .filter(|p| !bots[i].near.iter().any(|q| q.near(*p, 1e-12)))
                .collect();
            bots[i].near = inside;
            let mut seen: Vec<Angle> = Vec::new();
            for p in fresh {
                if seen.iter().any(|q| q.near(p, 1e-12)) {
                    continue;
                }
                seen.push(p);
                let is_exit = p.near(exit, 1e-12);
                let is_treasure = treasure_present && p.near(treasure, 1e-12);
                let sharers: Vec<usize> = if wireless { vec![0, 1] } else { vec![i] };
                for &k in &sharers {
                    knowledge[k].observe_visit(p);
                    if is_exit {
                        knowledge[k].observe_exit(p, alpha);
                    }
                    if is_treasure {
                        knowledge[k].observe_treasure(p, alpha);
                    }
                }
                if is_exit || is_treasure {
                    obs.push(Observation::Found {
                        robot: i,
                        at: p,
                        exit: is_exit,
                        treasure: is_treasure,
                    });
                } else {
                    obs.push(Observation::Empty { robot: i, at: p });
                }
                if is_treasure && !bots[1 - i].holds {
                    treasure_present = false;
                    bots[i].holds = true;
                    knowledge[i].pick_up();
                    if wireless {
                        knowledge[1 - i].treasure_taken = true;
                    }
                    obs.push(Observation::PickedUp { robot: i });
                }
            }
        }

        if !wireless {
            let close = bots[0].pos.dist(bots[1].pos) <= radius;
            if close && !together {
                let [a, b] = &mut knowledge;
                let before = a.clone();
                a.merge(b);
                b.merge(&before);
                obs.push(Observation::Met);
            }
            together = close;
        }

        // keep the angle of perimeter walkers in sync with the circle
        for b in &mut bots {
            if matches!(b.plan, Plan::Arc { .. }) {
                b.theta = Angle::new(b.theta.radians().rem_euclid(TAU));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn hand_traces() {
        let w = oracle_simulate(Configuration::new(Model::Wireless, FRAC_PI_2, 0.3 + FRAC_PI_2, -1), 1e-4).unwrap();
        assert!((w - 2.7142).abs() < 5e-3, "{w}");
        let f = oracle_simulate(Configuration::new(Model::F2f, 1.0, 0.4, 1), 1e-4).unwrap();
        assert!((f - 3.3177).abs() < 5e-3, "{f}");
        let z = oracle_simulate(Configuration::new(Model::F2f, 0.0, FRAC_PI_3, 1), 1e-4).unwrap();
        assert!((z - 2.0472).abs() < 5e-3, "{z}");
    }

    #[test]
    fn rejects_coarse_step() {
        assert!(oracle_simulate(Configuration::new(Model::F2f, 1.0, 0.4, 1), 0.01).is_err());
    }
}
