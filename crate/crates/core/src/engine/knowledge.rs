use serde::Serialize;

use crate::geometry::{flanking, Angle, ArcIntervalSet, Dir, EPS};

/// What a robot believes about the location of one interesting point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Location {
    Unknown,
    Candidates(Vec<Angle>),
    Known(Angle),
}

impl Location {
    pub fn known(&self) -> Option<Angle> {
        match self {
            Location::Known(a) => Some(*a),
            _ => None,
        }
    }

    fn constrain(&mut self, allowed: &[Angle]) {
        match self {
            Location::Known(_) => {}
            Location::Unknown => *self = Location::Candidates(allowed.to_vec()),
            Location::Candidates(cands) => {
                cands.retain(|c| allowed.iter().any(|a| a.near(*c, EPS)));
            }
        }
    }

    fn merge(&mut self, other: &Location) {
        match (&mut *self, other) {
            (Location::Known(_), _) => {}
            (_, Location::Known(a)) => *self = Location::Known(*a),
            (Location::Unknown, Location::Candidates(c)) => {
                *self = Location::Candidates(c.clone())
            }
            (Location::Candidates(_), Location::Candidates(c)) => self.constrain(c),
            (_, Location::Unknown) => {}
        }
    }
}

/// Per-robot knowledge. In the wireless model both robots hold identical copies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnowledgeState {
    pub explored: ArcIntervalSet,
    pub exit_loc: Location,
    pub treasure_loc: Location,
    pub holds_treasure: bool,
    /// Somebody (possibly this robot) is known to carry the treasure.
    pub treasure_taken: bool,
    /// Whether every pickup is observed by this robot. Without that, an empty
    /// treasure candidate may simply have been emptied by the partner.
    pub pickups_visible: bool,
}

impl Default for KnowledgeState {
    fn default() -> Self {
        KnowledgeState {
            explored: ArcIntervalSet::new(),
            exit_loc: Location::Unknown,
            treasure_loc: Location::Unknown,
            holds_treasure: false,
            treasure_taken: false,
            pickups_visible: true,
        }
    }
}

impl KnowledgeState {
    /// Knowledge of a robot that cannot see the partner's pickups.
    pub fn isolated() -> Self {
        KnowledgeState {
            pickups_visible: false,
            ..Self::default()
        }
    }

    pub fn exit(&self) -> Option<Angle> {
        self.exit_loc.known()
    }

    pub fn treasure(&self) -> Option<Angle> {
        self.treasure_loc.known()
    }

    pub fn complete(&self) -> bool {
        self.exit().is_some() && (self.treasure().is_some() || self.treasure_taken)
    }

    pub fn observe_sweep(&mut self, start: Angle, dir: Dir, len: f64) {
        self.explored.insert_sweep(start, dir, len);
    }

    pub fn observe_visit(&mut self, at: Angle) {
        self.explored.insert_arc(at, 0.0);
    }

    pub fn observe_exit(&mut self, at: Angle, alpha: f64) {
        if self.exit_loc.known().is_none() {
            self.exit_loc = Location::Known(at);
        }
        self.treasure_loc.constrain(&flanking(at, alpha));
    }

    pub fn observe_treasure(&mut self, at: Angle, alpha: f64) {
        if self.treasure_loc.known().is_none() {
            self.treasure_loc = Location::Known(at);
        }
        self.exit_loc.constrain(&flanking(at, alpha));
    }

    pub fn pick_up(&mut self) {
        self.holds_treasure = true;
        self.treasure_taken = true;
    }

    /// Record a deduction made by the protocol (not by observation).
    pub fn promote_exit(&mut self, at: Angle) {
        if self.exit_loc.known().is_none() {
            self.exit_loc = Location::Known(at);
        }
    }

    /// Eliminate candidates already passed over and promote singletons.
    pub fn refresh(&mut self) {
        let explored = &self.explored;
        if let Location::Candidates(c) = &mut self.exit_loc {
            c.retain(|a| !explored.covers(*a));
            match c.len() {
                0 => self.exit_loc = Location::Unknown,
                1 => self.exit_loc = Location::Known(c[0]),
                _ => {}
            }
        }
        if let Location::Candidates(c) = &mut self.treasure_loc {
            if !self.pickups_visible {
                // only "all candidates empty" is a safe conclusion
                if c.iter().all(|a| explored.covers(*a)) {
                    self.treasure_loc = Location::Unknown;
                    self.treasure_taken = true;
                } else if c.len() == 1 {
                    self.treasure_loc = Location::Known(c[0]);
                }
                return;
            }
            c.retain(|a| !explored.covers(*a));
            match c.len() {
                // every place it could have been was seen empty: someone took it
                0 => {
                    self.treasure_loc = Location::Unknown;
                    self.treasure_taken = true;
                }
                1 => self.treasure_loc = Location::Known(c[0]),
                _ => {}
            }
        }
    }

    /// Face-to-face exchange: union of explored arcs, intersection of candidates.
    pub fn merge(&mut self, other: &KnowledgeState) {
        self.explored.union(&other.explored);
        self.exit_loc.merge(&other.exit_loc);
        self.treasure_loc.merge(&other.treasure_loc);
        self.treasure_taken |= other.treasure_taken;
        self.refresh();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discovery_yields_two_candidates() {
        let mut k = KnowledgeState::default();
        k.observe_exit(Angle::new(1.0), 0.5);
        match &k.treasure_loc {
            Location::Candidates(c) => assert_eq!(c.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn explored_candidate_is_eliminated() {
        let mut k = KnowledgeState::default();
        k.observe_sweep(Angle::ZERO, Dir::Cw, 1.0);
        k.observe_exit(Angle::new(1.0), 0.6);
        k.refresh();
        assert!(k.treasure().unwrap().near(Angle::new(1.6), 1e-12));
    }

    #[test]
    fn known_is_never_demoted() {
        let mut k = KnowledgeState::default();
        k.observe_exit(Angle::new(1.0), 0.5);
        k.observe_exit(Angle::new(2.0), 0.5);
        assert_eq!(k.exit(), Some(Angle::new(1.0)));
    }

    #[test]
    fn merge_intersects_candidates() {
        let mut a = KnowledgeState::default();
        a.observe_treasure(Angle::new(1.0), 0.5);
        let mut b = KnowledgeState::default();
        b.observe_visit(Angle::new(0.5));
        a.merge(&b);
        assert!(a.exit().unwrap().near(Angle::new(1.5), 1e-12));
    }

    #[test]
    fn isolated_robot_does_not_promote_treasure() {
        let mut k = KnowledgeState::isolated();
        k.observe_exit(Angle::new(1.0), 0.5);
        k.observe_visit(Angle::new(1.5));
        k.refresh();
        assert!(k.treasure().is_none());
        assert!(!k.treasure_taken);
        k.observe_visit(Angle::new(0.5));
        k.refresh();
        assert!(k.treasure_taken);
    }

    #[test]
    fn zero_distance_pins_both() {
        let mut k = KnowledgeState::default();
        k.observe_exit(Angle::new(0.3), 0.0);
        k.refresh();
        assert!(k.treasure().unwrap().near(Angle::new(0.3), 1e-12));
    }
}
