//! Comfort-aware velocity planning and closed-loop simulation for automated
//! vehicles.
//!
//! An [`OccupantPreferenceMetric`] bounds longitudinal/lateral acceleration
//! and jerk. The crate plans minimum-time velocity profiles and lane-change
//! paths inside those bounds, simulates a bicycle-model vehicle tracking
//! them, and audits the resulting logs.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compliance;
pub mod controller;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod io;
pub mod lane_change;
pub mod opm;
pub mod oracle;
pub mod path;
pub mod profile;
pub mod scenario;
pub mod vehicle;
pub mod velocity;

pub use error::{Error, Result};
pub use exec::Execution;
pub use opm::{preset, validate_opm, DrivingStyle, OccupantPreferenceMetric};
pub use path::{build_path, PathGeometry, Station};
pub use profile::{travel_time, BoundaryConditions, VelocityProfile};
pub use oracle::dp_oracle_plan;
pub use velocity::{plan_velocity, PlannerOptions};
pub use lane_change::{check_feasibility, generate_lane_change_path, LaneChangePlan, LaneChangeRequest};
