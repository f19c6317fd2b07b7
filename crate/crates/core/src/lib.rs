//! Minimal-sampling performance prediction for configurable software systems.
//!
//! Measuring every configuration of a configurable system is usually
//! impractical, so this crate picks a small, informative subset instead: it
//! recursively bisects the configuration space along an approximated first
//! principal component (FASTMAP-style pole projection), samples the
//! resulting leaf clusters, fits a regression-tree predictor to just those
//! samples, and evaluates the predictor with a seeded, repeatable
//! experiment rig. A binary differential-evolution search can then mine the
//! fitted tree for low-predicted-performance configurations, and a
//! correlation-dimension estimator characterizes how thin the configuration
//! space really is.
//!
//! Modules follow the pipeline:
//!
//! * [`dataset`] - load, validate, shuffle, and split measured tables
//! * [`spectral`] - pole distances, projections, recursive bisection
//! * [`sampling`] - which clustered rows get measured (S1/S2/S3, baselines)
//! * [`cart`] - the regression-tree learner and predictor
//! * [`eval`] - MRE scoring, the experiment rig, A12/bootstrap/Scott-Knott
//! * [`optimize`] - surrogate-guided differential evolution
//! * [`intrinsic`] - correlation-dimension estimation
//! * [`cli`] - the command-line front end wiring it all together
//!
//! Every stochastic operation takes an explicit seed and is deterministic
//! given it; see [`rng`] for the portable generator behind that promise.

pub mod cart;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod intrinsic;
pub mod optimize;
pub mod rng;
pub mod sampling;
pub mod spectral;
mod util;

pub use error::{Error, Result};
