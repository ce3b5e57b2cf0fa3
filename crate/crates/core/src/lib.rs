//! Two-robot treasure evacuation on the unit disk: geometry, an exact
//! event-driven simulator, the wireless and face-to-face protocols, the
//! closed-form bounds, and sweep-based verification.

pub mod bounds;
pub mod engine;
pub mod geometry;
pub mod strategies;
pub mod verify;

pub use engine::{simulate, Configuration, Model, SimError, SimResult};
pub use geometry::{Angle, Dir, Point};
