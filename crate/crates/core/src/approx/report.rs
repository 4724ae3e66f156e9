use crate::error::Result;
use crate::sim::ResourceCount;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::error::PointError;

/// Outcome of one experiment, serialized as the machine-readable report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub experiment: String,
    pub target: String,
    pub sup_error: f64,
    /// Squared L2 error, when estimated.
    pub l2_error: Option<f64>,
    pub bound: f64,
    pub bound_name: String,
    pub tol_agg: f64,
    pub resources: ResourceCount,
    pub region: String,
    pub seed: Option<u64>,
    /// `sup_error <= bound + tol_agg` and every entry of `checks`.
    pub pass: bool,
    /// Further named pass conditions (L2 bound, trifling mass, ...).
    pub checks: BTreeMap<String, bool>,
    /// Extra numbers worth recording (degrees, timings, fitted rates, ...).
    pub details: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_point: Option<Vec<PointError>>,
}

impl ErrorReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        experiment: impl Into<String>,
        target: impl Into<String>,
        sup_error: f64,
        bound: f64,
        bound_name: impl Into<String>,
        tol_agg: f64,
        resources: ResourceCount,
        region: impl Into<String>,
    ) -> Self {
        let mut r = Self {
            experiment: experiment.into(),
            target: target.into(),
            sup_error,
            l2_error: None,
            bound,
            bound_name: bound_name.into(),
            tol_agg,
            resources,
            region: region.into(),
            seed: None,
            pass: false,
            checks: BTreeMap::new(),
            details: BTreeMap::new(),
            per_point: None,
        };
        r.update_pass();
        r
    }

    fn update_pass(&mut self) {
        self.pass = self.sup_error.is_finite()
            && self.sup_error <= self.bound + self.tol_agg
            && self.checks.values().all(|&ok| ok);
    }

    pub fn with_l2(mut self, l2: f64) -> Self {
        self.l2_error = Some(l2);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_check(mut self, name: impl Into<String>, ok: bool) -> Self {
        self.checks.insert(name.into(), ok);
        self.update_pass();
        self
    }

    pub fn with_detail(mut self, name: impl Into<String>, value: f64) -> Self {
        self.details.insert(name.into(), value);
        self
    }

    pub fn with_per_point(mut self, points: Vec<PointError>) -> Self {
        self.per_point = Some(points);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| crate::error::PqcError::InvalidInput(format!("report serialization failed: {e}")))
    }
}
