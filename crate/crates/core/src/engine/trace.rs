//! JSON trace export.

use serde_json::{json, Value};

use crate::engine::{EventKind, SegmentKind, SimResult, Sighting};

/// Round to 12 significant digits.
pub fn sig12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn pt(p: crate::geometry::Point) -> Value {
    json!([sig12(p.x), sig12(p.y)])
}

fn event_json(e: &crate::engine::SimEvent) -> Value {
    let mut v = json!({ "t": sig12(e.time), "robot": e.robot });
    let obj = v.as_object_mut().unwrap();
    let (kind, extra) = match &e.kind {
        EventKind::Depart => ("depart", json!({})),
        EventKind::Discover { point, what } => (
            "discover",
            json!({
                "point": sig12(point.radians()),
                "what": match what {
                    Sighting::Exit => "exit",
                    Sighting::Treasure => "treasure",
                    Sighting::Both => "both",
                    Sighting::Empty => "empty",
                },
            }),
        ),
        EventKind::Pickup => ("pickup", json!({})),
        EventKind::Meet { at, other } => ("meet", json!({ "at": pt(*at), "other": other })),
        EventKind::TimerExpire { label } => ("timer", json!({ "label": label })),
        EventKind::Evacuate => ("evacuate", json!({})),
    };
    obj.insert("kind".into(), kind.into());
    if let Value::Object(m) = extra {
        obj.extend(m);
    }
    v
}

/// Map-structured trace document for one run.
pub fn trace_json(r: &SimResult) -> Value {
    let robots: Vec<Value> = (0..2)
        .map(|i| {
            let segments: Vec<Value> = r.trajectories[i]
                .iter()
                .map(|s| {
                    let mut seg = json!({
                        "t0": sig12(s.start_time),
                        "t1": sig12(s.end_time()),
                        "from": pt(s.start_point()),
                        "to": pt(s.end_point()),
                    });
                    let o = seg.as_object_mut().unwrap();
                    match s.kind {
                        SegmentKind::PerimeterArc { start, dir } => {
                            o.insert("kind".into(), "arc".into());
                            o.insert("start_angle".into(), sig12(start.radians()).into());
                            o.insert("dir".into(), (dir.sign() as i32).into());
                        }
                        SegmentKind::Chord { .. } => {
                            o.insert("kind".into(), "chord".into());
                        }
                        SegmentKind::Wait { .. } => {
                            o.insert("kind".into(), "wait".into());
                        }
                    }
                    seg
                })
                .collect();
            let events: Vec<Value> = r.events_of(i).map(event_json).collect();
            json!({ "segments": segments, "events": events })
        })
        .collect();
    json!({
        "config": {
            "model": r.config.model.to_string(),
            "alpha": sig12(r.config.alpha),
            "exit_angle": sig12(r.config.exit_angle.radians()),
            "treasure_angle": sig12(r.config.treasure_angle().radians()),
            "orientation": r.config.orientation,
        },
        "robots": robots,
        "evac_time": sig12(r.evac_time),
    })
}
