//! Error measurement, reports, builtin targets and the network comparison.

mod error;
mod fnn;
mod grid;
mod report;
mod targets;

pub use error::{
    l2_error, pointwise_errors, rate_fit, sup_error, FnModel, L2Estimate, Model, PointError, MIN_L2_SAMPLES,
};
pub use fnn::{crossover_dimension, fnn_compare, FnnComparison, FnnComparisonSpec, LogResources, RatioKind};
pub use grid::{in_band, GridSpec, Region};
pub use report::ErrorReport;
pub use targets::{builtin_target, BUILTIN_TARGETS};
