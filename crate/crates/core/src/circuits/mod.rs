//! Explicit PQC constructions assembled from single-qubit QSP units, tensor
//! products and uniform linear combinations of unitaries.

mod block;
mod localization;
mod taylor;
mod trig;
mod units;

pub use block::{lcu_combine, BlockCircuit};
pub use localization::{build_localization_pqc, round_to_eta, LocalizationPqc};
pub use taylor::{
    build_taylor_coeff_pqc, build_taylor_series_pqc, eval_nested_taylor, NestedEvaluation, NestedTaylorPqc,
    TaylorCoeffTable,
};
pub use trig::{build_trig_monomial_pqc, build_trig_poly_pqc, trig_leaf, MultivariateTrigPolynomial};
pub use units::{
    build_bernstein_pqc, build_bernstein_pqc_with, build_monomial_pqc, build_parity_pair_pqc, build_poly_pqc,
    build_poly_pqc_with, qsp_leaf, synthesize_cached,
};
