//! Classical polynomial and approximation-theory building blocks.

mod bernstein;
mod bounds;
mod chebyshev;
mod multi;
mod sign;
mod taylor;

pub use bernstein::{bernstein_basis, bernstein_eval, lipschitz_bernstein_bound, ln_binomial, BernsteinTable};
pub use bounds::{thm2_simplified, thm_bounds, BoundKind, BoundParams};
pub use chebyshev::{chebyshev_lobatto_grid, chebyshev_nodes, verification_grid, ChebSeries};
pub use multi::{MultiIndex, MultivariatePolynomial};
pub use sign::{localization_poly, sign_approx_poly, LocalizationPoly, LocalizationSpec, SignApproximation};
pub use taylor::{
    finite_difference, taylor_expand, DerivativeOracle, Evaluator, HolderClass, TargetFunctionSpec, FD_MAX_ORDER,
};

use crate::error::{PqcError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Dense univariate polynomial in the monomial basis, `coeffs[k]` multiplying `x^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial, trimming trailing zero coefficients.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(k: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// Returns `q(y) = p(a*y + b)`.
    pub fn compose_affine(&self, a: f64, b: f64) -> Self {
        let inner = Polynomial::new(vec![b, a]);
        self.coeffs.iter().rev().fold(Polynomial::zero(), |acc, &c| {
            acc.mul(&inner).add(&Polynomial::constant(c))
        })
    }

    /// Maximum of `|p|` over the verification grid of `[lo, hi]`.
    pub fn sup_norm_on(&self, lo: f64, hi: f64) -> f64 {
        verification_grid(self.degree())
            .into_iter()
            .map(|t| self.eval(lo + (hi - lo) * (t + 1.0) / 2.0).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 && self.coeffs.len() > 1 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}x")?,
                _ => write!(f, "{c}x^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Parity of a polynomial under `x -> -x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn matches(self, k: usize) -> bool {
        Parity::of_degree(k) == self
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Basis {
    Monomial(Polynomial),
    Chebyshev(ChebSeries),
}

/// A polynomial of definite parity. Low-degree polynomials are usually held in the
/// monomial basis; high-degree approximants are held as Chebyshev series, where
/// evaluation stays stable.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityPolynomial {
    basis: Basis,
    parity: Parity,
}

impl ParityPolynomial {
    /// Checked constructor: opposite-parity coefficients must vanish exactly and
    /// `|p| <= 1` must hold on the verification grid of `[-1, 1]`.
    pub fn new(p: Polynomial, parity: Parity) -> Result<Self> {
        if let Some(k) = (0..=p.degree()).find(|&k| !parity.matches(k) && p.coeff(k) != 0.0) {
            return Err(PqcError::ParityMismatch(format!(
                "coefficient of x^{k} is nonzero in a {parity:?} polynomial"
            )));
        }
        let out = Self {
            basis: Basis::Monomial(p),
            parity,
        };
        out.check_bounded()?;
        Ok(out)
    }

    /// Checked constructor from a Chebyshev series.
    pub fn from_chebyshev(series: ChebSeries, parity: Parity) -> Result<Self> {
        if let Some(k) = (0..series.coeffs().len()).find(|&k| !parity.matches(k) && series.coeffs()[k] != 0.0) {
            return Err(PqcError::ParityMismatch(format!(
                "Chebyshev coefficient T_{k} is nonzero in a {parity:?} series"
            )));
        }
        let out = Self {
            basis: Basis::Chebyshev(series),
            parity,
        };
        out.check_bounded()?;
        Ok(out)
    }

    fn unchecked(p: Polynomial, parity: Parity) -> Self {
        Self {
            basis: Basis::Monomial(p),
            parity,
        }
    }

    fn check_bounded(&self) -> Result<()> {
        let sup = self.sup_norm();
        if sup > 1.0 + 1e-12 {
            return Err(PqcError::Domain(format!("sup |p| = {sup} exceeds 1 on [-1, 1]")));
        }
        Ok(())
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn degree(&self) -> usize {
        match &self.basis {
            Basis::Monomial(p) => p.degree(),
            Basis::Chebyshev(c) => c.degree(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.basis {
            Basis::Monomial(p) => p.is_zero(),
            Basis::Chebyshev(c) => c.coeffs().iter().all(|&v| v == 0.0),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.basis {
            Basis::Monomial(p) => p.eval(x),
            Basis::Chebyshev(c) => c.eval(x),
        }
    }

    /// Monomial coefficients, if the polynomial is stored in that basis.
    pub fn as_monomial(&self) -> Option<&Polynomial> {
        match &self.basis {
            Basis::Monomial(p) => Some(p),
            Basis::Chebyshev(_) => None,
        }
    }

    /// Chebyshev coefficients (converted when stored in the monomial basis).
    pub fn chebyshev(&self) -> ChebSeries {
        match &self.basis {
            Basis::Monomial(p) => ChebSeries::from_monomial(p),
            Basis::Chebyshev(c) => c.clone(),
        }
    }

    /// Monomial coefficients (converted when stored as a Chebyshev series; only
    /// well conditioned for modest degrees).
    pub fn to_polynomial(&self) -> Polynomial {
        match &self.basis {
            Basis::Monomial(p) => p.clone(),
            Basis::Chebyshev(c) => c.to_monomial(),
        }
    }

    /// Maximum of `|p|` over the verification grid of `[-1, 1]`.
    pub fn sup_norm(&self) -> f64 {
        verification_grid(self.degree())
            .into_iter()
            .map(|x| self.eval(x).abs())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        let basis = match &self.basis {
            Basis::Monomial(p) => Basis::Monomial(p.scale(s)),
            Basis::Chebyshev(c) => Basis::Chebyshev(c.scale(s)),
        };
        Self {
            basis,
            parity: self.parity,
        }
    }
}

/// Splits `p` into its even and odd parts. The halves are not required to be bounded
/// by one; the bound is enforced where a half is turned into a circuit.
pub fn parity_split(p: &Polynomial) -> (ParityPolynomial, ParityPolynomial) {
    let pick = |parity: Parity| {
        Polynomial::new(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, &c)| if parity.matches(k) { c } else { 0.0 })
                .collect(),
        )
    };
    (
        ParityPolynomial::unchecked(pick(Parity::Even), Parity::Even),
        ParityPolynomial::unchecked(pick(Parity::Odd), Parity::Odd),
    )
}
