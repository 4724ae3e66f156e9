use crate::CliError;
use pqc_core::circuits::MultivariateTrigPolynomial;
use pqc_core::mat2::C64;
use pqc_core::poly::{MultiIndex, MultivariatePolynomial};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Qsp,
    Poly,
    Bernstein,
    Localization,
    Taylor,
    Trig,
    FnnCompare,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Qsp => "qsp",
            Experiment::Poly => "poly",
            Experiment::Bernstein => "bernstein",
            Experiment::Localization => "localization",
            Experiment::Taylor => "taylor",
            Experiment::Trig => "trig",
            Experiment::FnnCompare => "fnn_compare",
        }
    }

    /// Optional parameters the experiment reads; anything else is rejected.
    fn accepts(self) -> &'static [&'static str] {
        match self {
            Experiment::Qsp => &["target", "tol"],
            Experiment::Poly => &["target", "tol", "points_per_axis", "shots", "seed"],
            Experiment::Bernstein => &["target", "d", "n", "eps", "tol", "points_per_axis", "shots", "seed"],
            Experiment::Localization => &["d", "k", "delta", "eps", "points_per_axis"],
            Experiment::Taylor => &[
                "target",
                "d",
                "k",
                "s",
                "beta",
                "delta",
                "eps",
                "points_per_axis",
                "l2_samples",
                "seed",
            ],
            Experiment::Trig => &["target", "points_per_axis", "shots", "seed"],
            Experiment::FnnCompare => &["d", "s", "eps", "lambda0"],
        }
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
            .map_err(|_| CliError::Config(format!("unknown experiment {s:?}")))
    }
}

/// One term `coeff * x^alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub coeff: f64,
    pub alpha: Vec<u32>,
}

/// One term `(re + i im) * e^{i freq . x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub freq: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InlineTarget {
    /// Monomial terms of a polynomial.
    Polynomial(Vec<PolyTerm>),
    /// Univariate polynomial by monomial coefficients, constant term first.
    Coefficients(Vec<f64>),
    Trig(Vec<TrigTerm>),
}

/// A builtin target name or an inline polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Builtin(String),
    Inline(InlineTarget),
}

impl TargetSpec {
    /// Parses a command-line value: inline JSON when it starts with `{`, else a name.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s.trim_start().starts_with('{') {
            serde_json::from_str::<InlineTarget>(s)
                .map(TargetSpec::Inline)
                .map_err(|e| CliError::Config(format!("bad inline target: {e}")))
        } else {
            Ok(TargetSpec::Builtin(s.to_string()))
        }
    }

    pub fn label(&self) -> String {
        match self {
            TargetSpec::Builtin(name) => name.clone(),
            TargetSpec::Inline(t) => serde_json::to_string(t).unwrap_or_else(|_| "inline".into()),
        }
    }

    pub fn polynomial(&self) -> Result<MultivariatePolynomial, CliError> {
        match self {
            TargetSpec::Inline(InlineTarget::Polynomial(terms)) => {
                let d = terms
                    .first()
                    .map(|t| t.alpha.len())
                    .ok_or_else(|| CliError::Config("polynomial has no terms".into()))?;
                Ok(MultivariatePolynomial::from_terms(
                    d,
                    terms.iter().map(|t| (MultiIndex::new(t.alpha.clone()), t.coeff)),
                )?)
            }
            TargetSpec::Inline(InlineTarget::Coefficients(c)) => Ok(MultivariatePolynomial::from_terms(
                1,
                c.iter().enumerate().map(|(k, &v)| (MultiIndex::new(vec![k as u32]), v)),
            )?),
            _ => Err(CliError::Config(
                "this experiment needs an inline polynomial target".into(),
            )),
        }
    }

    pub fn trig(&self) -> Result<MultivariateTrigPolynomial, CliError> {
        match self {
            TargetSpec::Inline(InlineTarget::Trig(terms)) => {
                let d = terms
                    .first()
                    .map(|t| t.freq.len())
                    .ok_or_else(|| CliError::Config("trig target has no terms".into()))?;
                Ok(MultivariateTrigPolynomial::from_terms(
                    d,
                    terms.iter().map(|t| (t.freq.clone(), C64::new(t.re, t.im))),
                )?)
            }
            _ => Err(CliError::Config("this experiment needs an inline trig target".into())),
        }
    }
}

/// One experiment run, read from a JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, alias = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2_samples: Option<usize>,
    /// Include the per-point error table in the report.
    #[serde(default)]
    pub per_point: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            target: None,
            d: None,
            n: None,
            k: None,
            delta: None,
            eps: None,
            s: None,
            beta: None,
            lambda0: None,
            shots: None,
            seed: None,
            tol: None,
            points_per_axis: None,
            l2_samples: None,
            per_point: false,
            output_path: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad config: {e}")))
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut mark = |name, set: bool| {
            if set {
                out.push(name)
            }
        };
        mark("target", self.target.is_some());
        mark("d", self.d.is_some());
        mark("n", self.n.is_some());
        mark("k", self.k.is_some());
        mark("delta", self.delta.is_some());
        mark("eps", self.eps.is_some());
        mark("s", self.s.is_some());
        mark("beta", self.beta.is_some());
        mark("lambda0", self.lambda0.is_some());
        mark("shots", self.shots.is_some());
        mark("seed", self.seed.is_some());
        mark("tol", self.tol.is_some());
        mark("points_per_axis", self.points_per_axis.is_some());
        mark("l2_samples", self.l2_samples.is_some());
        out
    }

    /// Rejects parameters the experiment does not read and shots without a seed.
    pub fn validate(&self) -> Result<(), CliError> {
        let accepted = self.experiment.accepts();
        let extra: Vec<_> = self.present().into_iter().filter(|p| !accepted.contains(p)).collect();
        if !extra.is_empty() {
            return Err(CliError::Config(format!(
                "experiment {} does not use {}",
                self.experiment.name(),
                extra.join(", ")
            )));
        }
        if self.shots.unwrap_or(0) > 0 && self.seed.is_none() {
            return Err(CliError::Config("a seed is required when shots > 0".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::Config(format!("tol = {t} must lie in (0, 1)")));
            }
        }
        if self.points_per_axis.is_some_and(|m| m < 2) {
            return Err(CliError::Config("points_per_axis must be at least 2".into()));
        }
        Ok(())
    }

    pub(crate) fn require<T: Copy>(&self, value: Option<T>, name: &str) -> Result<T, CliError> {
        value.ok_or_else(|| CliError::Config(format!("experiment {} needs {name}", self.experiment.name())))
    }
}
