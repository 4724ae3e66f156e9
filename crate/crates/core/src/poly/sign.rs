use super::{verification_grid, ChebSeries, Parity, ParityPolynomial};
use crate::error::{PqcError, Result};
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc_inv};

/// Degree ceiling for the step-function approximants.
const MAX_DEGREE: usize = 4096;

/// Odd polynomial approximating `sgn(x)` away from a gap of width `delta` around 0.
#[derive(Clone, Debug)]
pub struct SignApproximation {
    pub poly: ParityPolynomial,
    /// Steepness of the `erf(kappa x)` profile that was truncated.
    pub kappa: f64,
    /// `degree / ((1/delta) ln(1/eps))`, the empirically found constant.
    pub degree_constant: f64,
}

impl SignApproximation {
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }
}

/// Builds the smallest verified odd Chebyshev truncation of `(1 - eps/4) erf(kappa x)`
/// with `|P| <= 1` on `[-1, 1]` and `|sgn(x) - P(x)| <= eps` for `|x| >= delta/2`.
pub fn sign_approx_poly(delta: f64, eps: f64) -> Result<SignApproximation> {
    if !(delta > 0.0 && delta <= 2.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(PqcError::InvalidInput(format!(
            "sign approximation needs delta in (0,2], eps in (0,1); got {delta}, {eps}"
        )));
    }
    let kappa = 2.0 * erfc_inv(eps / 4.0) / delta;
    let amp = 1.0 - eps / 4.0;
    let target = |x: f64| amp * erf(kappa * x);
    let full = full_series(&target, kappa, Parity::Odd);
    let accept = |p: &ChebSeries| {
        let grid = verification_grid(p.degree());
        grid.iter().all(|&x| {
            let v = p.eval(x);
            v.abs() <= 1.0 && (x.abs() < delta / 2.0 || (x.signum() - v).abs() <= eps)
        })
    };
    let series = smallest_verified(&full, Parity::Odd, eps / 4.0, accept).ok_or_else(|| PqcError::Verification {
        what: "sign approximation".into(),
        detail: format!("no degree <= {MAX_DEGREE} passed the grid check for delta={delta}, eps={eps}"),
    })?;
    let degree = series.degree();
    let poly = ParityPolynomial::from_chebyshev(series, Parity::Odd)?;
    Ok(SignApproximation {
        poly,
        kappa,
        degree_constant: degree as f64 / ((1.0 / delta) * (1.0 / eps).ln()),
    })
}

/// Cell count `K`, gap width `delta` and accuracy `eps` of the localization map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationSpec {
    k: u32,
    delta: f64,
    eps: f64,
}

impl LocalizationSpec {
    pub fn new(k: u32, delta: f64, eps: f64) -> Result<Self> {
        if k == 0 {
            return Err(PqcError::InvalidInput("K must be positive".into()));
        }
        let kf = k as f64;
        if !(delta > 0.0 && delta < 1.0 / (3.0 * kf)) {
            return Err(PqcError::InvalidInput(format!(
                "delta = {delta} must lie in (0, 1/(3K)) = (0, {})",
                1.0 / (3.0 * kf)
            )));
        }
        if !(eps > 0.0 && eps < 1.0 / kf) {
            return Err(PqcError::InvalidInput(format!(
                "eps = {eps} must lie in (0, 1/K) = (0, {})",
                1.0 / kf
            )));
        }
        Ok(Self { k, delta, eps })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Band `k`: `[k/K, (k+1)/K - delta]`, except the last band which reaches 1.
    pub fn band(&self, k: u32) -> (f64, f64) {
        let kf = self.k as f64;
        let lo = k as f64 / kf;
        let hi = if k + 1 < self.k {
            (k + 1) as f64 / kf - self.delta
        } else {
            1.0
        };
        (lo, hi)
    }

    /// Band containing `x`, or `None` when `x` falls in a gap.
    pub fn band_of(&self, x: f64) -> Option<u32> {
        if !(0.0..=1.0).contains(&x) {
            return None;
        }
        let k = ((x * self.k as f64).floor() as u32).min(self.k - 1);
        // Guard against x sitting just below a cell boundary after rounding.
        [k, k.saturating_sub(1)].into_iter().find(|&c| {
            let (lo, hi) = self.band(c);
            x >= lo && x <= hi
        })
    }

    /// Ideal piecewise-constant map `D(x) = k/K` on band `k`.
    pub fn step_value(&self, x: f64) -> Option<f64> {
        self.band_of(x).map(|k| k as f64 / self.k as f64)
    }
}

/// Even polynomial approximating the localization staircase.
#[derive(Clone, Debug)]
pub struct LocalizationPoly {
    pub spec: LocalizationSpec,
    pub poly: ParityPolynomial,
    pub kappa: f64,
    /// `degree / ((K/delta) ln(K/eps))`.
    pub degree_constant: f64,
}

impl LocalizationPoly {
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.poly.eval(x)
    }
}

/// Even polynomial `P` with `|P| <= 1` on `[-1, 1]` and `P(x) - k/K` in `(0, eps)` on
/// every band. Built from a smoothed staircase (a sum of shifted erf steps,
/// mirrored to make it even), truncated to the smallest verified even degree, then
/// shifted up by `eps/2`.
pub fn localization_poly(spec: &LocalizationSpec) -> Result<LocalizationPoly> {
    let (k, delta, eps) = (spec.k, spec.delta, spec.eps);
    let kf = k as f64;
    // Keep the approximant clear of the band edges by more than any synthesis error.
    let margin = (1e-6 * eps).max(1e-9);
    if k == 1 {
        let poly = ParityPolynomial::from_chebyshev(ChebSeries::new(vec![eps / 2.0]), Parity::Even)?;
        return Ok(LocalizationPoly {
            spec: *spec,
            poly,
            kappa: 0.0,
            degree_constant: 0.0,
        });
    }
    // Each step's tail contributes at most (1/K) erfc(kappa delta / 2) / 2 <= eps / 8.
    let kappa = 2.0 * erfc_inv(kf * eps / 4.0) / delta;
    let centers: Vec<f64> = (1..k).map(|j| j as f64 / kf - delta / 2.0).collect();
    let staircase = |x: f64| {
        centers
            .iter()
            .map(|&c| (1.0 + 0.5 * erf(kappa * (x - c)) - 0.5 * erf(kappa * (x + c))) / kf)
            .sum::<f64>()
    };
    let full = full_series(&staircase, kappa, Parity::Even);

    let band_points = |degree: usize| -> Vec<(f64, f64)> {
        let mut pts: Vec<f64> = verification_grid(degree).into_iter().filter(|&x| x >= 0.0).collect();
        pts.extend((0..=2000).map(|i| i as f64 / 2000.0));
        for b in 0..k {
            let (lo, hi) = spec.band(b);
            pts.push(lo);
            pts.push(hi);
        }
        pts.into_iter()
            .filter_map(|x| spec.step_value(x).map(|d| (x, d)))
            .collect()
    };
    let accept = |p: &ChebSeries| {
        let bounded = verification_grid(p.degree())
            .into_iter()
            .all(|x| (p.eval(x) + eps / 2.0).abs() <= 1.0);
        bounded
            && band_points(p.degree())
                .into_iter()
                .all(|(x, d)| (p.eval(x) - d).abs() <= eps / 2.0 - margin)
    };
    let series = smallest_verified(&full, Parity::Even, eps / 4.0, accept).ok_or_else(|| PqcError::Verification {
        what: "localization polynomial".into(),
        detail: format!("no degree <= {MAX_DEGREE} passed the band check for K={k}, delta={delta}, eps={eps}"),
    })?;
    let degree = series.degree();
    let poly = ParityPolynomial::from_chebyshev(series.add_constant(eps / 2.0), Parity::Even)?;
    Ok(LocalizationPoly {
        spec: *spec,
        poly,
        kappa,
        degree_constant: degree as f64 / ((kf / delta) * (kf / eps).ln()),
    })
}

/// High-resolution Chebyshev expansion of a smooth profile with steepness `kappa`.
fn full_series(f: &dyn Fn(f64) -> f64, kappa: f64, parity: Parity) -> ChebSeries {
    let nmax = (64 + (16.0 * kappa).ceil() as usize).min(MAX_DEGREE);
    ChebSeries::from_fn(f, nmax, 2 * nmax + 64).with_parity(parity)
}

/// Scans parity-compatible truncation degrees upward and returns the first one the
/// acceptance check passes. The scan starts where the coefficient tail drops below
/// `10 * budget`, since no earlier truncation can be accurate enough.
fn smallest_verified(
    full: &ChebSeries,
    parity: Parity,
    budget: f64,
    accept: impl Fn(&ChebSeries) -> bool,
) -> Option<ChebSeries> {
    let c = full.coeffs();
    let mut tail = vec![0.0; c.len() + 1];
    for j in (0..c.len()).rev() {
        tail[j] = tail[j + 1] + c[j].abs();
    }
    let first = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let start = (first..c.len())
        .step_by(2)
        .find(|&n| tail[n + 1] <= 10.0 * budget)
        .unwrap_or(first);
    (start..c.len())
        .step_by(2)
        .map(|n| full.truncate(n))
        .find(|p| accept(p))
}
