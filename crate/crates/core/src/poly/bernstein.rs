use super::TargetFunctionSpec;
use crate::error::{PqcError, Result};

/// Largest `n` for which binomials are formed exactly; beyond it they are formed
/// in log space.
const EXACT_BINOMIAL_MAX: u64 = 50;

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    statrs::function::factorial::ln_binomial(n, k)
}

fn exact_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c as f64
}

/// Bernstein basis value `C(n, k) x^k (1 - x)^(n - k)`.
pub fn bernstein_basis(n: u64, k: u64, x: f64) -> f64 {
    debug_assert!(k <= n);
    if n <= EXACT_BINOMIAL_MAX {
        return exact_binomial(n, k) * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32);
    }
    // 0^0 = 1 at the endpoints.
    if x <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if x >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_binomial(n, k) + k as f64 * x.ln() + (n - k) as f64 * (1.0 - x).ln()).exp()
}

/// Values of `f` on the grid `{k/n}^d`, ready for repeated Bernstein evaluation.
#[derive(Clone, Debug)]
pub struct BernsteinTable {
    n: u64,
    dims: usize,
    values: Vec<f64>,
}

impl BernsteinTable {
    pub fn new(f: &TargetFunctionSpec, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(PqcError::InvalidInput("Bernstein degree must be positive".into()));
        }
        let d = f.dims;
        let m = (n + 1) as usize;
        let count = m
            .checked_pow(d as u32)
            .ok_or_else(|| PqcError::InvalidInput("grid too large".into()))?;
        let mut node = vec![0.0; d];
        let mut values = Vec::with_capacity(count);
        for idx in 0..count {
            let mut r = idx;
            for j in (0..d).rev() {
                node[j] = (r % m) as f64 / n as f64;
                r /= m;
            }
            let v = f.eval(&node);
            if !v.is_finite() {
                return Err(PqcError::Domain(format!("f is not finite at node {node:?}")));
            }
            values.push(v);
        }
        Ok(Self { n, dims: d, values })
    }

    pub fn degree(&self) -> u64 {
        self.n
    }

    /// Node values in big-endian order over `(k_1, ..., k_d)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dims {
            return Err(PqcError::DimensionMismatch {
                expected: self.dims,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(PqcError::Domain(format!("point {x:?} outside [0,1]^d")));
        }
        let m = (self.n + 1) as usize;
        let basis: Vec<Vec<f64>> = x
            .iter()
            .map(|&xj| (0..=self.n).map(|k| bernstein_basis(self.n, k, xj)).collect())
            .collect();
        let mut total = 0.0;
        for (idx, &v) in self.values.iter().enumerate() {
            let mut r = idx;
            let mut w = 1.0;
            for j in (0..self.dims).rev() {
                w *= basis[j][r % m];
                r /= m;
            }
            total += v * w;
        }
        Ok(total)
    }
}

/// Multivariate Bernstein polynomial `B_n(f; x)` by direct summation over the grid.
pub fn bernstein_eval(f: &TargetFunctionSpec, n: u64, x: &[f64]) -> Result<f64> {
    BernsteinTable::new(f, n)?.eval(x)
}

/// `eps + 2 Gamma ((1 + l^2 / (4 n eps^2))^d - 1)`.
pub fn lipschitz_bernstein_bound(d: usize, l: f64, gamma: f64, n: u64, eps: f64) -> f64 {
    eps + 2.0 * gamma * ((1.0 + l * l / (4.0 * n as f64 * eps * eps)).powi(d as i32) - 1.0)
}
