use super::block::{lcu_combine, with_extra_rescale, BlockCircuit};
use crate::error::{PqcError, Result};
use crate::mat2::C64;
use crate::qsp::{trig_qsp_synthesize, TrigPoly, TrigQspParams, DEFAULT_TOL};
use crate::sim::{Angle, Circuit, Encoding};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// `t(x) = sum_n c_n e^{i n . x}` over integer frequency vectors `n`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MultivariateTrigPolynomial {
    dims: usize,
    terms: BTreeMap<Vec<i32>, C64>,
}

impl MultivariateTrigPolynomial {
    pub fn new(dims: usize) -> Self {
        Self {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<i32>, C64)>>(dims: usize, terms: I) -> Result<Self> {
        let mut t = Self::new(dims);
        for (n, c) in terms {
            t.add_term(n, c)?;
        }
        Ok(t)
    }

    /// Adds `c e^{i n . x}`, merging with an existing frequency; zero results are dropped.
    pub fn add_term(&mut self, n: Vec<i32>, c: C64) -> Result<()> {
        if n.len() != self.dims {
            return Err(PqcError::DimensionMismatch {
                expected: self.dims,
                found: n.len(),
            });
        }
        let e = self.terms.entry(n.clone()).or_insert(C64::new(0.0, 0.0));
        *e += c;
        if e.norm() == 0.0 {
            self.terms.remove(&n);
        }
        Ok(())
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i32>, C64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|n|_1` among the terms.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|n| n.iter().map(|v| v.unsigned_abs()).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        self.terms
            .iter()
            .map(|(n, &c)| {
                let phase: f64 = n.iter().zip(x).map(|(&k, &v)| k as f64 * v).sum();
                c * C64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// Maximum of `|t|` on a uniform grid of `[0, 2 pi)^d`.
    pub fn sup_norm_grid(&self, points_per_axis: usize) -> f64 {
        let m = points_per_axis.max(1);
        let total = m.pow(self.dims as u32);
        (0..total)
            .map(|mut i| {
                let mut x = vec![0.0; self.dims];
                for j in (0..self.dims).rev() {
                    x[j] = 2.0 * PI * (i % m) as f64 / m as f64;
                    i /= m;
                }
                self.eval(&x).norm()
            })
            .fold(0.0, f64::max)
    }
}

type TrigKey = (Vec<(i32, u64, u64)>, u64);

fn trig_cache() -> &'static Mutex<HashMap<TrigKey, Arc<TrigQspParams>>> {
    static CACHE: OnceLock<Mutex<HashMap<TrigKey, Arc<TrigQspParams>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn synthesize_trig_cached(t: &TrigPoly, tol: f64) -> Result<Arc<TrigQspParams>> {
    let key = (
        t.coeffs
            .iter()
            .map(|(&k, c)| (k, c.re.to_bits(), c.im.to_bits()))
            .collect(),
        tol.to_bits(),
    );
    if let Some(p) = trig_cache().lock().unwrap().get(&key) {
        return Ok(p.clone());
    }
    let p = Arc::new(trig_qsp_synthesize(t, tol)?);
    trig_cache().lock().unwrap().insert(key, p.clone());
    Ok(p)
}

/// Single-qubit trigonometric QSP leaf reading `x[coord]` through `R_Z(x)`,
/// prepared in `|0>`.
pub fn trig_leaf(params: &TrigQspParams, coord: usize, tol: f64, label: impl Into<String>) -> Result<BlockCircuit> {
    let mut c = Circuit::new(1, label);
    let enc = Angle::encoded(Encoding::Linear {
        coord,
        scale: 1.0,
        offset: 0.0,
    });
    // Matrix order R_Z(w) R_Y(t_0) R_Z(p_0) prod [R_Z(x) R_Y(t_j) R_Z(p_j)],
    // applied right to left.
    let layers = params.layers();
    for j in (0..=layers).rev() {
        c.rz(0, Angle::Trainable(params.phis[j]))?;
        c.ry(0, Angle::Trainable(params.thetas[j]))?;
        if j > 0 {
            c.rz(0, enc)?;
        }
    }
    c.rz(0, Angle::Trainable(params.omega))?;
    BlockCircuit::from_gates_with_tol(c, Circuit::new(1, "prep"), 1.0, false, tol)
}

/// Trigonometric monomial PQC: block value `c e^{i n . x}` from `d` parallel
/// trigonometric QSP units, the coefficient folded into the first.
pub fn build_trig_monomial_pqc(c: C64, n: &[i32]) -> Result<BlockCircuit> {
    trig_monomial_with(c, n, DEFAULT_TOL)
}

fn trig_monomial_with(c: C64, n: &[i32], tol: f64) -> Result<BlockCircuit> {
    if n.is_empty() {
        return Err(PqcError::InvalidInput("frequency vector must be nonempty".into()));
    }
    if c.norm() > 1.0 + 1e-12 {
        return Err(PqcError::Domain(format!("coefficient modulus {} exceeds 1", c.norm())));
    }
    let parts = n
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let cj = if j == 0 {
                c / c.norm().max(1.0)
            } else {
                C64::new(1.0, 0.0)
            };
            let params = synthesize_trig_cached(&TrigPoly::new([(k, cj)]), tol)?;
            trig_leaf(&params, j, tol, format!("e^(i {k} x{j})"))
        })
        .collect::<Result<Vec<_>>>()?;
    BlockCircuit::tensor(parts, format!("trig monomial {c} n={n:?}"))
}

/// Trigonometric polynomial PQC: an LCU over trigonometric monomial units. When a
/// coefficient exceeds 1 in modulus, all are divided by the largest and the factor
/// joins the rescale.
pub fn build_trig_poly_pqc(t: &MultivariateTrigPolynomial) -> Result<BlockCircuit> {
    let d = t.dims();
    if d == 0 {
        return Err(PqcError::InvalidInput(
            "trigonometric polynomial needs at least one dimension".into(),
        ));
    }
    let terms: Vec<(Vec<i32>, C64)> = if t.is_empty() {
        vec![(vec![0; d], C64::new(0.0, 0.0))]
    } else {
        t.terms().iter().map(|(n, &c)| (n.clone(), c)).collect()
    };
    let m = terms.iter().map(|(_, c)| c.norm()).fold(1.0, f64::max);
    let units = terms
        .par_iter()
        .map(|(n, c)| trig_monomial_with(c / m, n, DEFAULT_TOL))
        .collect::<Result<Vec<_>>>()?;
    let lcu = lcu_combine(units, format!("trig poly d={d} s={}", t.degree()))?;
    if m > 1.0 {
        with_extra_rescale(lcu, m)
    } else {
        Ok(lcu)
    }
}
