use super::{MultiIndex, MultivariatePolynomial};
use crate::error::{PqcError, Result};
use std::fmt;
use std::sync::Arc;

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type DerivativeOracle = Arc<dyn Fn(&MultiIndex, &[f64]) -> f64 + Send + Sync>;

/// Highest total derivative order served by the finite-difference fallback.
pub const FD_MAX_ORDER: u32 = 4;

/// Hölder smoothness `beta = s + r` with `s = ceil(beta) - 1`, `r` in `(0, 1]`, and
/// norm bound `B0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderClass {
    pub beta: f64,
    pub b0: f64,
}

impl HolderClass {
    pub fn new(beta: f64, b0: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) || !(b0 > 0.0 && b0.is_finite()) {
            return Err(PqcError::InvalidInput(format!(
                "invalid Hölder class beta={beta}, B0={b0}"
            )));
        }
        Ok(Self { beta, b0 })
    }

    pub fn s(&self) -> u32 {
        (self.beta.ceil() as u32).saturating_sub(1)
    }

    pub fn r(&self) -> f64 {
        self.beta - self.s() as f64
    }
}

/// A target function on `[0, 1]^d` with optional analytic derivatives and the
/// regularity constants the error bounds need.
#[derive(Clone)]
pub struct TargetFunctionSpec {
    pub name: String,
    pub dims: usize,
    evaluator: Evaluator,
    derivative_oracle: Option<DerivativeOracle>,
    pub holder: Option<HolderClass>,
    pub lipschitz: Option<f64>,
}

impl fmt::Debug for TargetFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunctionSpec")
            .field("name", &self.name)
            .field("dims", &self.dims)
            .field("has_derivative_oracle", &self.derivative_oracle.is_some())
            .field("holder", &self.holder)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl TargetFunctionSpec {
    pub fn new<F>(name: impl Into<String>, dims: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dims,
            evaluator: Arc::new(f),
            derivative_oracle: None,
            holder: None,
            lipschitz: None,
        }
    }

    pub fn with_derivatives<D>(mut self, oracle: D) -> Self
    where
        D: Fn(&MultiIndex, &[f64]) -> f64 + Send + Sync + 'static,
    {
        self.derivative_oracle = Some(Arc::new(oracle));
        self
    }

    pub fn with_holder(mut self, holder: HolderClass) -> Self {
        self.holder = Some(holder);
        self
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }

    pub fn evaluator(&self) -> Evaluator {
        self.evaluator.clone()
    }

    pub fn has_derivative_oracle(&self) -> bool {
        self.derivative_oracle.is_some()
    }

    /// `d^alpha f(x)`, from the oracle when present and otherwise by central finite
    /// differences (total order at most [`FD_MAX_ORDER`]).
    pub fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
        if alpha.dims() != self.dims || x.len() != self.dims {
            return Err(PqcError::DimensionMismatch {
                expected: self.dims,
                found: alpha.dims().min(x.len()),
            });
        }
        if alpha.one_norm() == 0 {
            return Ok(self.eval(x));
        }
        match &self.derivative_oracle {
            Some(d) => Ok(d(alpha, x)),
            None => finite_difference(&*self.evaluator, alpha, x),
        }
    }

    /// Checks `|f| <= 1` on a uniform sample grid.
    pub fn check_bounded(&self, points_per_axis: usize) -> Result<()> {
        let n = points_per_axis.max(2);
        let total = n.pow(self.dims as u32);
        let mut x = vec![0.0; self.dims];
        for mut idx in 0..total {
            for v in x.iter_mut() {
                *v = (idx % n) as f64 / (n - 1) as f64;
                idx /= n;
            }
            let y = self.eval(&x);
            if !(y.abs() <= 1.0 + 1e-12) {
                return Err(PqcError::Domain(format!("|f({x:?})| = {} exceeds 1", y.abs())));
            }
        }
        Ok(())
    }
}

/// Central-difference approximation of `d^alpha f(x)`. The step grows with the
/// order to balance truncation against cancellation; first derivatives use 1e-5.
pub fn finite_difference(f: &(dyn Fn(&[f64]) -> f64 + Send + Sync), alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
    let order = alpha.one_norm();
    if order > FD_MAX_ORDER {
        return Err(PqcError::Unsupported(format!(
            "finite differences of total order {order} need an explicit derivative oracle"
        )));
    }
    if order == 0 {
        return Ok(f(x));
    }
    let h = if order == 1 {
        1e-5
    } else {
        f64::EPSILON.powf(1.0 / (order as f64 + 2.0))
    };
    // Product stencil: per axis j, weights (-1)^i C(k, i) at offsets (k/2 - i) h.
    let mut stencil: Vec<(Vec<f64>, f64)> = vec![(x.to_vec(), 1.0)];
    for (j, &k) in alpha.entries().iter().enumerate() {
        if k == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(stencil.len() * (k as usize + 1));
        for (pt, w) in &stencil {
            let mut binom = 1.0;
            for i in 0..=k {
                let mut p = pt.clone();
                p[j] += (k as f64 / 2.0 - i as f64) * h;
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                next.push((p, w * sign * binom));
                binom = binom * (k - i) as f64 / (i + 1) as f64;
            }
        }
        stencil = next;
    }
    let sum: f64 = stencil.iter().map(|(p, w)| w * f(p)).sum();
    Ok(sum / h.powi(order as i32))
}

/// Truncated Taylor expansion `sum_{|alpha| <= s} (d^alpha f(x0) / alpha!) (x - x0)^alpha`,
/// returned as a polynomial in the shifted variable `x - x0`.
pub fn taylor_expand(f: &TargetFunctionSpec, x0: &[f64], s: u32) -> Result<MultivariatePolynomial> {
    if x0.len() != f.dims {
        return Err(PqcError::DimensionMismatch {
            expected: f.dims,
            found: x0.len(),
        });
    }
    if x0.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(PqcError::Domain(format!("expansion point {x0:?} outside [0,1]^d")));
    }
    let mut out = MultivariatePolynomial::new(f.dims);
    for alpha in MultiIndex::all_up_to(f.dims, s) {
        let xi = f.derivative(&alpha, x0)? / alpha.factorial();
        if xi.abs() > 1.0 + 1e-9 {
            return Err(PqcError::CoefficientBound { value: xi });
        }
        out.add_term(alpha, xi)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halfsine() -> TargetFunctionSpec {
        TargetFunctionSpec::new("halfsine", 1, |x| 0.5 * x[0].sin()).with_derivatives(|a, x| {
            let k = a.entries()[0] % 4;
            0.5 * match k {
                0 => x[0].sin(),
                1 => x[0].cos(),
                2 => -x[0].sin(),
                _ => -x[0].cos(),
            }
        })
    }

    #[test]
    fn first_order_halfsine() {
        let t = taylor_expand(&halfsine(), &[0.0], 1).unwrap();
        assert_eq!(t.coefficient(&MultiIndex(vec![0])), 0.0);
        assert_eq!(t.coefficient(&MultiIndex(vec![1])), 0.5);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn remainder_within_derivative_bound() {
        let f = halfsine();
        let t = taylor_expand(&f, &[0.0], 3).unwrap();
        let x = 0.1f64;
        let err = (f.eval(&[x]) - t.eval(&[x])).abs();
        assert!(err <= x.powi(4));
    }

    #[test]
    fn polynomial_targets_are_reproduced() {
        let f = TargetFunctionSpec::new("poly", 2, |x| 0.2 * x[0] * x[1] - 0.3 * x[1] * x[1] + 0.1);
        let t = taylor_expand(&f, &[0.5, 0.25], 2).unwrap();
        for &(a, b) in &[(0.0, 0.0), (0.3, 0.9), (1.0, 0.5)] {
            let approx = t.eval_shifted(&[a, b], &[0.5, 0.25]);
            assert!((approx - f.eval(&[a, b])).abs() < 1e-7);
        }
    }

    #[test]
    fn normalization_violation_is_reported() {
        let f = TargetFunctionSpec::new("steep", 1, |x| 0.5 * (3.0 * x[0]).sin());
        assert!(matches!(
            taylor_expand(&f, &[0.0], 1),
            Err(PqcError::CoefficientBound { .. })
        ));
    }

    #[test]
    fn finite_difference_order_limit() {
        let f = TargetFunctionSpec::new("exp", 1, |x| x[0].exp());
        assert!(f.derivative(&MultiIndex(vec![5]), &[0.2]).is_err());
        let d2 = f.derivative(&MultiIndex(vec![2]), &[0.2]).unwrap();
        assert!((d2 - 0.2f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn holder_split() {
        let h = HolderClass::new(2.0, 1.0).unwrap();
        assert_eq!(h.s(), 1);
        assert_eq!(h.r(), 1.0);
        let h = HolderClass::new(2.5, 1.0).unwrap();
        assert_eq!(h.s(), 2);
        assert!((h.r() - 0.5).abs() < 1e-15);
    }
}
