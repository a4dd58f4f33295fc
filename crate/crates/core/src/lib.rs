//! Holistic reactive motion control for mobile manipulators.
//!
//! The crate couples a differential-kinematics model of a mobile manipulator
//! (virtual base joints exposing instantaneous base motion to the Jacobian)
//! with a quadratic-program motion controller, a behaviour-tree task layer,
//! and a kinematic simulator that runs the benchmark experiments.

pub mod bt;
pub mod controller;
pub mod model;
pub mod qp;
pub mod sim;
pub mod spatial;

pub use model::{JmVariant, KinematicModel};
pub use spatial::{Pose3, Twist};
