use crate::error::{PqcError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Multi-index `alpha = (alpha_1, ..., alpha_d)` of nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zeros(d: usize) -> Self {
        Self(vec![0; d])
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn one_norm(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `alpha! = prod_j alpha_j!`.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&a| (1..=a).map(f64::from).product::<f64>())
            .product()
    }

    /// `x^alpha`.
    pub fn pow(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&a, &v)| v.powi(a as i32)).product()
    }

    /// All multi-indices of length `d` with `|alpha|_1 <= s`, ordered by total degree
    /// and then lexicographically.
    pub fn all_up_to(d: usize, s: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for total in 0..=s {
            let mut cur = vec![0u32; d];
            compositions(d, total, 0, &mut cur, &mut out);
        }
        out
    }

    /// Every index in `{0, ..., k-1}^d`, first coordinate most significant.
    pub fn grid(d: usize, k: u32) -> Vec<MultiIndex> {
        let count = (k as usize).pow(d as u32);
        (0..count)
            .map(|mut n| {
                let mut e = vec![0u32; d];
                for j in (0..d).rev() {
                    e[j] = (n % k as usize) as u32;
                    n /= k as usize;
                }
                MultiIndex(e)
            })
            .collect()
    }
}

fn compositions(d: usize, remaining: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if d == 0 {
        if remaining == 0 {
            out.push(MultiIndex(vec![]));
        }
        return;
    }
    if pos == d - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in (0..=remaining).rev() {
        cur[pos] = v;
        compositions(d, remaining - v, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Sparse multivariate polynomial `sum_alpha c_alpha x^alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultivariatePolynomial {
    dims: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl MultivariatePolynomial {
    pub fn new(dims: usize) -> Self {
        Self {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, f64)>>(dims: usize, terms: I) -> Result<Self> {
        let mut p = Self::new(dims);
        for (alpha, c) in terms {
            p.add_term(alpha, c)?;
        }
        Ok(p)
    }

    /// Adds `c * x^alpha`, merging with an existing term; zero results are dropped.
    pub fn add_term(&mut self, alpha: MultiIndex, c: f64) -> Result<()> {
        if alpha.dims() != self.dims {
            return Err(PqcError::DimensionMismatch {
                expected: self.dims,
                found: alpha.dims(),
            });
        }
        if !c.is_finite() {
            return Err(PqcError::InvalidInput(format!("non-finite coefficient for {alpha}")));
        }
        let v = self.terms.get(&alpha).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.terms.remove(&alpha);
        } else {
            self.terms.insert(alpha, v);
        }
        Ok(())
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.terms
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> f64 {
        self.terms.get(alpha).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::one_norm).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(a, c)| c * a.pow(x)).sum()
    }

    /// Evaluates the polynomial in shifted variables, `sum c_alpha (x - x0)^alpha`.
    pub fn eval_shifted(&self, x: &[f64], x0: &[f64]) -> f64 {
        let shifted: Vec<f64> = x.iter().zip(x0).map(|(a, b)| a - b).collect();
        self.eval(&shifted)
    }
}
