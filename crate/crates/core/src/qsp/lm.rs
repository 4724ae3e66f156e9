//! Damped Gauss-Newton (Levenberg-Marquardt) least squares.

use nalgebra::{DMatrix, DVector};

pub(crate) struct LmOutcome {
    pub x: Vec<f64>,
    pub max_residual: f64,
}

/// Minimizes `sum r_i(x)^2`. `eval(x, true)` must return residuals and Jacobian,
/// `eval(x, false)` only residuals. Stops once `max |r_i| <= target`.
pub(crate) fn levenberg_marquardt<F>(eval: F, x0: Vec<f64>, max_iter: usize, target: f64) -> LmOutcome
where
    F: Fn(&[f64], bool) -> (Vec<f64>, Option<DMatrix<f64>>),
{
    let max_abs = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sq = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let mut x = x0;
    let (mut r, mut jac) = eval(&x, true);
    let mut cost = sq(&r);
    let mut lambda = -1.0;
    for _ in 0..max_iter {
        if max_abs(&r) <= target || !cost.is_finite() {
            break;
        }
        let j = jac.take().expect("Jacobian requested");
        let jt = j.transpose();
        let a = &jt * &j;
        let g = &jt * DVector::from_column_slice(&r);
        let diag: Vec<f64> = (0..a.nrows()).map(|i| a[(i, i)].max(1e-12)).collect();
        if lambda < 0.0 {
            lambda = 1e-3;
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut damped = a.clone();
            for (i, d) in diag.iter().enumerate() {
                damped[(i, i)] += lambda * d;
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    lambda *= 4.0;
                    continue;
                }
            };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let (rt, _) = eval(&trial, false);
            let ct = sq(&rt);
            if ct < cost {
                x = trial;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
        let (rn, jn) = eval(&x, true);
        r = rn;
        jac = jn;
    }
    LmOutcome {
        max_residual: max_abs(&r),
        x,
    }
}
