//! The minimal-graph operator `𝔏` on conformally flat radial metrics, mean
//! curvature of graphs, and the barrier `Cθr^p`.

mod barrier;
mod crosscheck;
pub mod fields;
mod operator;

pub use barrier::{
    barrier_check, barrier_exponent, check_conformal_hypothesis, threshold_kappa, AltBarrierField, AlternateReport,
    BarrierField, BarrierGrid, BarrierNode, BarrierReport, BarrierSpec, SIGN_TOL,
};
pub use crosscheck::{triple_path_crosscheck, CrosscheckOptions, CrosscheckReport, CrosscheckRow};
pub use fields::{
    CartesianJet, FnField, Polar, PolarJet, PolarMonomialSum, QuadraticField, ScalarField, ScalarFieldPolar,
};
pub use operator::{
    graph_factor, l_conformal, l_conformal_groups, l_fd_oracle, l_polar, l_polar_groups, mean_curvature_graph,
};
