//! Circumnavigation of a static target by a constant-speed unicycle that
//! measures only range and range rate.
//!
//! Two turn-rate laws are provided in [`controllers`]: a smooth law that
//! settles on a circle slightly larger than the commanded radius (with an
//! optional precompensation of that radius), and a saturated signum law that
//! settles on the commanded radius itself. [`harness`] runs them on the
//! kinematics of [`dynamics`] and [`monitors`] checks each trajectory against
//! the expected stability properties.

pub mod controllers;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod harness;
pub mod monitors;

pub use controllers::{ControllerParams, GainValidity, Law, RangeObservation};
pub use error::{Error, Result};
pub use geometry::{RelativeGeometry, UavState, Vec2};
pub use harness::{ResolvedScenario, ScenarioConfig};
pub use monitors::{Rotation, RunReport, TraceSample};
