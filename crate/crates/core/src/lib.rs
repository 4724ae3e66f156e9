// Negated float comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod circuits;
pub mod error;
pub mod mat2;
pub mod poly;
pub mod qsp;
pub mod sim;
pub use error::{PqcError, Result};
