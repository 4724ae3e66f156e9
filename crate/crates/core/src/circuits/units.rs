use super::block::{lcu_combine, with_extra_rescale, BlockCircuit};
use crate::error::{PqcError, Result};
use crate::poly::{
    bernstein_basis, BernsteinTable, ChebSeries, MultiIndex, MultivariatePolynomial, Parity, ParityPolynomial,
    Polynomial, TargetFunctionSpec,
};
use crate::qsp::{qsp_synthesize, QspAngleSequence, DEFAULT_TOL};
use crate::sim::{Angle, Circuit, Encoding};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type CacheKey = (u8, Vec<u64>, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<QspAngleSequence>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<QspAngleSequence>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// [`qsp_synthesize`] memoized on the exact Chebyshev coefficients, parity and
/// tolerance of the target.
pub fn synthesize_cached(p: &ParityPolynomial, tol: f64) -> Result<Arc<QspAngleSequence>> {
    let parity = match p.parity() {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let key = (
        parity,
        p.chebyshev().coeffs().iter().map(|c| c.to_bits()).collect(),
        tol.to_bits(),
    );
    if let Some(a) = cache().lock().unwrap().get(&key) {
        return Ok(a.clone());
    }
    let a = Arc::new(qsp_synthesize(p, tol)?);
    cache().lock().unwrap().insert(key, a.clone());
    Ok(a)
}

/// Single-qubit QSP leaf `R_Z(theta_0) prod S(u) R_Z(theta_j)` with the signal
/// `u = scale * x[coord] + offset`, prepared in `|+>`; `tol` is the accuracy the
/// angles were synthesized to.
pub fn qsp_leaf(
    angles: &QspAngleSequence,
    coord: usize,
    scale: f64,
    offset: f64,
    tol: f64,
    label: impl Into<String>,
) -> Result<BlockCircuit> {
    let mut c = Circuit::new(1, label);
    let enc = Angle::encoded(Encoding::Arccos { coord, scale, offset });
    // Gates run right to left through the matrix product.
    let last = angles.angles.len() - 1;
    c.rz(0, Angle::Trainable(angles.angles[last]))?;
    for &t in angles.angles[..last].iter().rev() {
        c.rx(0, enc)?;
        c.rz(0, Angle::Trainable(t))?;
    }
    let mut prep = Circuit::new(1, "prep");
    prep.h(0)?;
    BlockCircuit::from_gates_with_tol(c, prep, 1.0, true, tol)
}

fn check_coefficient(c: f64) -> Result<()> {
    if !(c.abs() <= 1.0 + 1e-12) {
        return Err(PqcError::Domain(format!("coefficient {c} exceeds 1 in magnitude")));
    }
    Ok(())
}

/// `c (x - shift)^alpha` as `d` parallel single-qubit QSP units, the coefficient
/// folded into the first unit.
pub(crate) fn shifted_monomial(c: f64, alpha: &MultiIndex, shift: &[f64], tol: f64) -> Result<BlockCircuit> {
    check_coefficient(c)?;
    let d = alpha.dims();
    if d == 0 {
        return Err(PqcError::InvalidInput("monomial needs at least one dimension".into()));
    }
    if shift.len() != d {
        return Err(PqcError::DimensionMismatch {
            expected: d,
            found: shift.len(),
        });
    }
    let mut parts = Vec::with_capacity(d);
    for (j, &k) in alpha.entries().iter().enumerate() {
        let cj = if j == 0 { c.clamp(-1.0, 1.0) } else { 1.0 };
        let p = ParityPolynomial::new(Polynomial::monomial(k as usize, cj), Parity::of_degree(k as usize))?;
        let angles = synthesize_cached(&p, tol)?;
        parts.push(qsp_leaf(&angles, j, 1.0, -shift[j], tol, format!("x{j}^{k}"))?);
    }
    BlockCircuit::tensor(parts, format!("monomial {c} x^{alpha}"))
}

/// Monomial PQC: block value `c x^alpha` on `d` qubits prepared in `|+>^d`.
pub fn build_monomial_pqc(c: f64, alpha: &MultiIndex) -> Result<BlockCircuit> {
    shifted_monomial(c, alpha, &vec![0.0; alpha.dims()], DEFAULT_TOL)
}

/// Width-2 unit for a mixed-parity univariate polynomial in `y = 2 x_coord - 1`:
/// the even and odd halves of `q` each get a QSP unit and a one-ancilla LCU
/// averages them, so the block value is `q(y) / 2`.
pub(crate) fn parity_pair_from_series(q: &ChebSeries, coord: usize, tol: f64, label: String) -> Result<BlockCircuit> {
    let mut halves = Vec::with_capacity(2);
    for parity in [Parity::Even, Parity::Odd] {
        let half = ParityPolynomial::from_chebyshev(q.with_parity(parity), parity)?;
        let angles = synthesize_cached(&half, tol)?;
        halves.push(qsp_leaf(&angles, coord, 2.0, -1.0, tol, format!("{label} {parity:?}"))?);
    }
    lcu_combine(halves, label)
}

/// Parity-pair PQC for a univariate polynomial bounded by 1 on `[0, 1]`;
/// rescale 2, width 2.
pub fn build_parity_pair_pqc(p: &Polynomial) -> Result<BlockCircuit> {
    let sup = p.sup_norm_on(0.0, 1.0);
    if sup > 1.0 + 1e-12 {
        return Err(PqcError::Domain(format!("sup |p| on [0, 1] is {sup}, above 1")));
    }
    let q = ChebSeries::from_monomial(&p.compose_affine(0.5, 0.5));
    parity_pair_from_series(&q, 0, DEFAULT_TOL, format!("pair {p}"))
}

/// Multivariate polynomial PQC: an LCU over monomial units. When some
/// coefficient exceeds 1 in magnitude, all are divided by the largest and the
/// factor joins the rescale.
pub fn build_poly_pqc(p: &MultivariatePolynomial) -> Result<BlockCircuit> {
    build_poly_pqc_with(p, DEFAULT_TOL)
}

pub fn build_poly_pqc_with(p: &MultivariatePolynomial, tol: f64) -> Result<BlockCircuit> {
    let d = p.dims();
    let terms: Vec<(MultiIndex, f64)> = if p.is_empty() {
        vec![(MultiIndex::zeros(d), 0.0)]
    } else {
        p.terms().iter().map(|(a, &c)| (a.clone(), c)).collect()
    };
    let m = terms.iter().map(|(_, c)| c.abs()).fold(1.0, f64::max);
    let units = terms
        .par_iter()
        .map(|(a, c)| shifted_monomial(c / m, a, &vec![0.0; d], tol))
        .collect::<Result<Vec<_>>>()?;
    let lcu = lcu_combine(units, format!("poly d={d} s={}", p.total_degree()))?;
    if m > 1.0 {
        with_extra_rescale(lcu, m)
    } else {
        Ok(lcu)
    }
}

/// Bernstein PQC: one term per grid node `k`, each a tensor of per-coordinate
/// parity-pair units for `C(n, k_j) x_j^k_j (1 - x_j)^(n - k_j)`, with `f(k/n)`
/// folded into the first coordinate.
pub fn build_bernstein_pqc(f: &TargetFunctionSpec, n: u64) -> Result<BlockCircuit> {
    build_bernstein_pqc_with(f, n, DEFAULT_TOL)
}

pub fn build_bernstein_pqc_with(f: &TargetFunctionSpec, n: u64, tol: f64) -> Result<BlockCircuit> {
    let table = BernsteinTable::new(f, n)?;
    let d = f.dims;
    let nodes = MultiIndex::grid(d, n as u32 + 1);
    for (k, &v) in nodes.iter().zip(table.values()) {
        if v.abs() > 1.0 + 1e-12 {
            return Err(PqcError::Domain(format!("|f({k}/n)| = {} exceeds 1", v.abs())));
        }
    }
    let factor = |k: u64, w: f64| {
        ChebSeries::from_fn(
            move |y: f64| w * bernstein_basis(n, k, (0.5 * (1.0 + y)).clamp(0.0, 1.0)),
            n as usize,
            2 * (n as usize + 1),
        )
    };
    // Shared factors for coordinates after the first.
    let plain: Vec<Vec<BlockCircuit>> = (1..d)
        .map(|j| {
            (0..=n)
                .into_par_iter()
                .map(|k| parity_pair_from_series(&factor(k, 1.0), j, tol, format!("b{n},{k}(x{j})")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    // First-coordinate factors carry f(k/n); equal (k_0, f) pairs share one unit.
    let mut keys: Vec<(u64, u64)> = nodes
        .iter()
        .zip(table.values())
        .map(|(k, &v)| (k.entries()[0] as u64, v.clamp(-1.0, 1.0).to_bits()))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let first: HashMap<(u64, u64), BlockCircuit> = keys
        .par_iter()
        .map(|&(k0, vb)| {
            let u = parity_pair_from_series(&factor(k0, f64::from_bits(vb)), 0, tol, format!("f b{n},{k0}(x0)"))?;
            Ok(((k0, vb), u))
        })
        .collect::<Result<_>>()?;
    let terms = nodes
        .iter()
        .zip(table.values())
        .map(|(k, &v)| {
            let k0 = k.entries()[0] as u64;
            let mut parts = vec![first[&(k0, v.clamp(-1.0, 1.0).to_bits())].clone()];
            for j in 1..d {
                parts.push(plain[j - 1][k.entries()[j] as usize].clone());
            }
            BlockCircuit::tensor(parts, format!("term {k}"))
        })
        .collect::<Result<Vec<_>>>()?;
    lcu_combine(terms, format!("bernstein {} n={n}", f.name))
}
