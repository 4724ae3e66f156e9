//! Asymptotic resource comparison between the nested Taylor PQC and a deep ReLU
//! network reaching the same sup-norm error on `C^s([0, 1]^d)`.
//!
//! Both sides are evaluated from their leading-order scaling laws with all
//! hidden constants set to one, so only ratios and trends are meaningful. Work
//! happens in log space because the counts overflow `f64` for moderate `d`.

use crate::error::{PqcError, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnnComparisonSpec {
    pub d: usize,
    pub s: u32,
    pub eps: f64,
    /// Share of the network budget spent on width: `N = K^(lambda0 d / 2)` and
    /// `M = K^((1 - lambda0) d / 2)`, so that `N M = K^(d / 2)`.
    pub lambda0: f64,
}

impl FnnComparisonSpec {
    pub fn new(d: usize, s: u32, eps: f64, lambda0: f64) -> Result<Self> {
        let spec = Self { d, s, eps, lambda0 };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 || self.s == 0 {
            return Err(PqcError::InvalidInput("d and s must be positive".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(PqcError::InvalidInput(format!("eps = {} must lie in (0, 1)", self.eps)));
        }
        if !(self.lambda0 > 0.0 && self.lambda0 < 1.0) {
            return Err(PqcError::InvalidInput(format!(
                "lambda0 = {} must lie in (0, 1)",
                self.lambda0
            )));
        }
        Ok(())
    }
}

/// Natural logs of width, depth and parameter count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogResources {
    pub ln_width: f64,
    pub ln_depth: f64,
    pub ln_params: f64,
}

impl LogResources {
    /// `ln(width * depth)`.
    pub fn ln_size(&self) -> f64 {
        self.ln_width + self.ln_depth
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnnComparison {
    pub spec: FnnComparisonSpec,
    /// Grid resolution each model needs for error `eps`.
    pub ln_k_pqc: f64,
    pub ln_k_fnn: f64,
    pub pqc: LogResources,
    pub fnn: LogResources,
    /// `(width * depth)_PQC / (width * depth)_FNN`; `+inf` on overflow.
    pub size_ratio: f64,
    /// `params_PQC / params_FNN`.
    pub param_ratio: f64,
    pub ln_size_ratio: f64,
    pub ln_param_ratio: f64,
}

/// `ln(max(log2 y, 1))` given `ln y`; keeps logarithmic factors at least one.
fn ln_log2(ln_y: f64) -> f64 {
    (ln_y / std::f64::consts::LN_2).max(1.0).ln()
}

fn ln_sum(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Resources at real-valued dimension `d`, so the crossover can be located by
/// bisection.
fn compare_at(d: f64, s: f64, eps: f64, lambda0: f64) -> (f64, f64, LogResources, LogResources) {
    let (ln_d, ln_s, ln_inv_eps) = (d.ln(), s.ln(), -eps.ln());
    // PQC error d^(3s/2) K^(-s) = eps.
    let ln_k_p = 1.5 * ln_d + ln_inv_eps / s;
    // FNN error s^d K^(-s) = eps.
    let ln_k_f = d / s * ln_s + ln_inv_eps / s;

    // Width d log K + s log d, depth K^d d^s s^2 log K, params s d^s K^d.
    let pqc = LogResources {
        ln_width: ln_sum(ln_d + ln_log2(ln_k_p), ln_s + ln_log2(ln_d)),
        ln_depth: d * ln_k_p + s * ln_d + 2.0 * ln_s + ln_log2(ln_k_p),
        ln_params: ln_s + s * ln_d + d * ln_k_p,
    };

    // Width s^d d N log N, depth M log M, params s^(2d) d^2 K^(d/2) N.
    let ln_n = lambda0 * d / 2.0 * ln_k_f;
    let ln_m = (1.0 - lambda0) * d / 2.0 * ln_k_f;
    let fnn = LogResources {
        ln_width: d * ln_s + ln_d + ln_n + ln_log2(ln_n),
        ln_depth: ln_m + ln_log2(ln_m),
        ln_params: 2.0 * d * ln_s + 2.0 * ln_d + d / 2.0 * ln_k_f + ln_n,
    };
    (ln_k_p, ln_k_f, pqc, fnn)
}

pub fn fnn_compare(spec: &FnnComparisonSpec) -> Result<FnnComparison> {
    spec.validate()?;
    let (ln_k_pqc, ln_k_fnn, pqc, fnn) = compare_at(spec.d as f64, spec.s as f64, spec.eps, spec.lambda0);
    let ln_size_ratio = pqc.ln_size() - fnn.ln_size();
    let ln_param_ratio = pqc.ln_params - fnn.ln_params;
    Ok(FnnComparison {
        spec: *spec,
        ln_k_pqc,
        ln_k_fnn,
        pqc,
        fnn,
        size_ratio: ln_size_ratio.exp(),
        param_ratio: ln_param_ratio.exp(),
        ln_size_ratio,
        ln_param_ratio,
    })
}

/// Which ratio a crossover search balances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioKind {
    Size,
    Params,
}

/// Real dimension `d*` in `[lo, hi]` at which the chosen ratio equals one, with
/// the log-ratio at `d*`. Fails when the ratio does not cross one in the interval.
pub fn crossover_dimension(s: u32, eps: f64, lambda0: f64, kind: RatioKind, lo: f64, hi: f64) -> Result<(f64, f64)> {
    FnnComparisonSpec::new(1, s, eps, lambda0)?;
    if !(lo >= 1.0 && hi > lo) {
        return Err(PqcError::InvalidInput(format!("invalid search interval [{lo}, {hi}]")));
    }
    let g = |d: f64| {
        let (_, _, p, f) = compare_at(d, s as f64, eps, lambda0);
        match kind {
            RatioKind::Size => p.ln_size() - f.ln_size(),
            RatioKind::Params => p.ln_params - f.ln_params,
        }
    };
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (g(a), g(b));
    if ga.signum() == gb.signum() {
        return Err(PqcError::Verification {
            what: "crossover search".into(),
            detail: format!("log-ratio has the same sign at d = {lo} ({ga:.3}) and d = {hi} ({gb:.3})"),
        });
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if g(m).signum() == ga.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let d = 0.5 * (a + b);
    Ok((d, g(d)))
}
