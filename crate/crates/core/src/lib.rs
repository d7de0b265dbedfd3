//! Coverage, association and delay analysis for mobile edge computing with
//! LEO satellites and terrestrial cloud servers, with a Monte Carlo
//! simulator to check the analytic results.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod association;
pub mod channel;
pub mod cli;
pub mod coverage;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod numerics;
pub mod params;
pub mod presets;
pub mod queueing;
pub mod report;
pub mod validate;

pub use error::{ConfigError, Error, NumericalError};
pub use params::{ConstellationGeometry, Scenario, SystemParams, TaskSpec};
