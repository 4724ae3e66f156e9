use super::grid::{in_band, GridSpec};
use crate::circuits::{BlockCircuit, NestedTaylorPqc};
use crate::error::{PqcError, Result};
use crate::poly::{BernsteinTable, TargetFunctionSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Anything that maps a point of `[0, 1]^d` to a real prediction.
pub trait Model: Sync {
    fn predict(&self, x: &[f64]) -> Result<f64>;

    fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.predict(x)).collect()
    }
}

impl Model for BlockCircuit {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        self.real_value(x)
    }

    fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        Ok(self.values(xs)?.into_iter().map(|v| v.re).collect())
    }
}

impl Model for NestedTaylorPqc {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval(x)?.value)
    }
}

impl Model for BernsteinTable {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        self.eval(x)
    }
}

impl Model for TargetFunctionSpec {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval(x))
    }
}

/// Wraps a plain closure as a [`Model`].
pub struct FnModel<F>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> Model for FnModel<F> {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok((self.0)(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointError {
    pub x: Vec<f64>,
    pub target: f64,
    pub model: f64,
    pub error: f64,
}

fn check_dims(f: &TargetFunctionSpec, grid: &GridSpec) -> Result<()> {
    if f.dims != grid.dims {
        return Err(PqcError::DimensionMismatch {
            expected: f.dims,
            found: grid.dims,
        });
    }
    Ok(())
}

/// `|f(x) - model(x)|` at every grid point of the region.
pub fn pointwise_errors(f: &TargetFunctionSpec, model: &dyn Model, grid: &GridSpec) -> Result<Vec<PointError>> {
    check_dims(f, grid)?;
    let xs = grid.points();
    let ys = model.predict_many(&xs)?;
    Ok(xs
        .into_iter()
        .zip(ys)
        .map(|(x, m)| {
            let t = f.eval(&x);
            PointError {
                error: (t - m).abs(),
                target: t,
                model: m,
                x,
            }
        })
        .collect())
}

/// Largest pointwise error over the grid; zero for an empty region.
pub fn sup_error(f: &TargetFunctionSpec, model: &dyn Model, grid: &GridSpec) -> Result<f64> {
    let errs = pointwise_errors(f, model, grid)?;
    if let Some(p) = errs.iter().find(|p| !p.error.is_finite()) {
        return Err(PqcError::Verification {
            what: "sup error".into(),
            detail: format!("non-finite error at {:?}", p.x),
        });
    }
    Ok(errs.iter().map(|p| p.error).fold(0.0, f64::max))
}

pub const MIN_L2_SAMPLES: usize = 10_000;

/// Monte-Carlo estimate of the squared L2 error over `[0, 1]^d`, with the mass
/// of the trifling region for the band structure `(K, delta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L2Estimate {
    /// Mean of `(f - model)^2` over uniform samples.
    pub mean_square: f64,
    /// Standard error of `mean_square`.
    pub stderr: f64,
    /// Contribution of samples in the trifling region to `mean_square`.
    pub trifling_contribution: f64,
    /// Fraction of samples that fell in the trifling region.
    pub trifling_mass: f64,
    /// Union bound `d K delta` on the trifling mass.
    pub trifling_bound: f64,
    /// Binomial standard deviation of the mass estimate at the bound.
    pub trifling_sigma: f64,
    pub samples: usize,
    pub seed: u64,
}

impl L2Estimate {
    /// Sampled trifling mass within three standard deviations of `d K delta`.
    pub fn trifling_mass_ok(&self) -> bool {
        self.trifling_mass <= self.trifling_bound + 3.0 * self.trifling_sigma
    }
}

pub fn l2_error(
    f: &TargetFunctionSpec,
    model: &dyn Model,
    k: u32,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<L2Estimate> {
    if samples < MIN_L2_SAMPLES {
        return Err(PqcError::InvalidInput(format!(
            "L2 estimate needs at least {MIN_L2_SAMPLES} samples, got {samples}"
        )));
    }
    let d = f.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let ys = model.predict_many(&xs)?;
    let n = samples as f64;
    let (mut sum, mut sum_sq, mut trifling_sum, mut trifling) = (0.0, 0.0, 0.0, 0usize);
    for (x, m) in xs.iter().zip(ys) {
        let e2 = (f.eval(x) - m).powi(2);
        if !e2.is_finite() {
            return Err(PqcError::Verification {
                what: "L2 error".into(),
                detail: format!("non-finite error at {x:?}"),
            });
        }
        sum += e2;
        sum_sq += e2 * e2;
        if !x.iter().all(|&v| in_band(v, k, delta)) {
            trifling += 1;
            trifling_sum += e2;
        }
    }
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    let bound = d as f64 * k as f64 * delta;
    let p0 = bound.clamp(0.0, 1.0);
    Ok(L2Estimate {
        mean_square: mean,
        stderr: (var / n).sqrt(),
        trifling_contribution: trifling_sum / n,
        trifling_mass: trifling as f64 / n,
        trifling_bound: bound,
        trifling_sigma: (p0 * (1.0 - p0) / n).sqrt(),
        samples,
        seed,
    })
}

/// Least-squares slope of `log error` against `log parameter`.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(PqcError::InvalidInput(format!(
            "rate fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(p, e)) = points
        .iter()
        .find(|&&(p, e)| !(p > 0.0 && e > 0.0 && p.is_finite() && e.is_finite()))
    {
        return Err(PqcError::InvalidInput(format!(
            "rate fit needs positive finite values, got ({p}, {e})"
        )));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(p, e)| (p.ln(), e.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(PqcError::InvalidInput(
            "rate fit needs at least two distinct parameters".into(),
        ));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
