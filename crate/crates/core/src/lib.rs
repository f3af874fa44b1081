//! Rotationally symmetric model manifolds, the minimal-graph operator on
//! conformally flat radial metrics, and stability thresholds for minimal
//! cones.

// `!(x > 0.0)` is used on purpose so that NaN fails parameter checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod area_min;
pub mod cli;
pub mod error;
pub mod graph_operator;
pub mod numeric;
pub mod radial_metric;
pub mod stability;

pub use error::{Error, Result};
