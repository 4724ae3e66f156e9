use super::chain::{self, Axis, Factor};
use super::{lm, MAX_ITERATIONS, MAX_STARTS};
use crate::error::{PqcError, Result};
use crate::mat2::{self, Mat2, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Parameters of `U(x) = R_Z(omega) R_Y(theta_0) R_Z(phi_0) prod_{j=1}^L S(x) R_Y(theta_j) R_Z(phi_j)`
/// with `S(x) = R_Z(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigQspParams {
    pub omega: f64,
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
}

impl TrigQspParams {
    pub fn new(omega: f64, thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() || thetas.len() != phis.len() {
            return Err(PqcError::InvalidInput(format!(
                "theta/phi lengths must agree and be positive ({} vs {})",
                thetas.len(),
                phis.len()
            )));
        }
        Ok(Self { omega, thetas, phis })
    }

    pub fn identity(layers: usize) -> Self {
        Self {
            omega: 0.0,
            thetas: vec![0.0; layers + 1],
            phis: vec![0.0; layers + 1],
        }
    }

    pub fn layers(&self) -> usize {
        self.thetas.len() - 1
    }

    pub fn param_count(&self) -> usize {
        1 + 2 * self.thetas.len()
    }

    fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.omega];
        v.extend(&self.thetas);
        v.extend(&self.phis);
        v
    }

    fn from_vec(v: &[f64], layers: usize) -> Self {
        Self {
            omega: v[0],
            thetas: v[1..layers + 2].to_vec(),
            phis: v[layers + 2..2 * layers + 3].to_vec(),
        }
    }
}

/// Laurent trigonometric polynomial `sum_k c_k e^{i k x}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub coeffs: BTreeMap<i32, C64>,
}

impl TrigPoly {
    pub fn new<I: IntoIterator<Item = (i32, C64)>>(terms: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| c.norm() != 0.0);
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.coeffs
            .iter()
            .map(|(&k, &c)| c * C64::from_polar(1.0, k as f64 * x))
            .sum()
    }

    /// Maximum of `|t|` on a uniform grid of `[0, 2 pi)`.
    pub fn sup_norm(&self) -> f64 {
        let m = 64 * (self.degree() + 1);
        (0..m)
            .map(|i| self.eval(2.0 * PI * i as f64 / m as f64).norm())
            .fold(0.0, f64::max)
    }
}

fn factors(layers: usize, x: f64) -> Vec<Factor> {
    let s = mat2::rz(x);
    let mut f = vec![Factor::Rot {
        axis: Axis::Z,
        param: 0,
        offset: 0.0,
    }];
    for j in 0..=layers {
        if j > 0 {
            f.push(Factor::Fixed(s));
        }
        f.push(Factor::Rot {
            axis: Axis::Y,
            param: 1 + j,
            offset: 0.0,
        });
        f.push(Factor::Rot {
            axis: Axis::Z,
            param: layers + 2 + j,
            offset: 0.0,
        });
    }
    f
}

/// Explicit matrix product of the trigonometric QSP sequence.
pub fn trig_qsp_unitary(params: &TrigQspParams, x: f64) -> Mat2 {
    chain::product(&factors(params.layers(), x), &params.to_vec())
}

/// Block value `<0| U(x) |0>`.
pub fn trig_qsp_block(params: &TrigQspParams, x: f64) -> C64 {
    chain::element_and_grad(
        &factors(params.layers(), x),
        &params.to_vec(),
        mat2::zero_ket(),
        mat2::zero_ket(),
        None,
    )
}

fn residual_on(params: &TrigQspParams, t: &TrigPoly, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&x| (trig_qsp_block(params, x) - t.eval(x)).norm())
        .fold(0.0, f64::max)
}

/// Uniform grid of `4(2L+1)` points in `[0, 2 pi)`.
pub fn trig_grid(degree: usize) -> Vec<f64> {
    let m = 4 * (2 * degree + 1);
    (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect()
}

/// Finds parameters with `<0|U(x)|0> = t(x)`. A degree-`L` target uses `2L` signal
/// layers, since each `R_Z(x)` contributes `e^{+-ix/2}`. The real and imaginary
/// residuals on a uniform grid are minimized jointly from a zero start and then
/// from random restarts.
pub fn trig_qsp_synthesize(t: &TrigPoly, tol: f64) -> Result<TrigQspParams> {
    if !(tol > 0.0) {
        return Err(PqcError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let sup = t.sup_norm();
    if sup > 1.0 + super::BOUNDARY_SLACK {
        return Err(PqcError::Domain(format!("sup |t| = {sup} exceeds 1")));
    }
    let degree = t.degree();
    let layers = 2 * degree;
    let grid = trig_grid(degree);
    let targets: Vec<C64> = grid.iter().map(|&x| t.eval(x)).collect();
    let chains: Vec<Vec<Factor>> = grid.iter().map(|&x| factors(layers, x)).collect();
    let np = 1 + 2 * (layers + 1);
    let n = grid.len();
    let residuals = |v: &[f64], want_jac: bool| {
        let mut r = Vec::with_capacity(2 * n);
        let mut jac = want_jac.then(|| nalgebra::DMatrix::zeros(2 * n, np));
        let mut g = vec![C64::new(0.0, 0.0); np];
        for (i, chain) in chains.iter().enumerate() {
            g.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
            let val = chain::element_and_grad(
                chain,
                v,
                mat2::zero_ket(),
                mat2::zero_ket(),
                jac.as_ref().map(|_| g.as_mut_slice()),
            );
            let d = val - targets[i];
            r.push(d.re);
            r.push(d.im);
            if let Some(j) = jac.as_mut() {
                for (c, gv) in g.iter().enumerate() {
                    j[(2 * i, c)] = gv.re;
                    j[(2 * i + 1, c)] = gv.im;
                }
            }
        }
        (r, jac)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x7219_0000 + degree as u64);
    let mut best = f64::INFINITY;
    for start in 0..MAX_STARTS {
        let x0: Vec<f64> = if start == 0 {
            vec![0.0; np]
        } else {
            (0..np).map(|_| rng.gen_range(-PI..PI)).collect()
        };
        let out = lm::levenberg_marquardt(residuals, x0, MAX_ITERATIONS, tol * 1e-3);
        // A fit that misses the nodes cannot pass the finer grid.
        if out.max_residual > tol {
            best = best.min(out.max_residual);
            continue;
        }
        let params = TrigQspParams::from_vec(&out.x, layers);
        let res = residual_on(&params, t, &grid);
        if res <= tol {
            return Ok(params);
        }
        best = best.min(res);
    }
    Err(PqcError::NotConverged {
        what: format!("trigonometric QSP of degree {degree}"),
        best_residual: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_examples() {
        let id = trig_qsp_unitary(&TrigQspParams::identity(0), 0.7);
        assert!(mat2::distance(&id, &mat2::identity()) < 1e-15);
        let u = trig_qsp_unitary(&TrigQspParams::identity(1), PI / 2.0);
        assert!(mat2::distance(&u, &mat2::rz(PI / 2.0)) < 1e-15);
    }

    #[test]
    fn synthesis_examples() {
        let one = TrigPoly::new([(0, C64::new(1.0, 0.0))]);
        let p = trig_qsp_synthesize(&one, 1e-12).unwrap();
        assert_eq!(residual_on(&p, &one, &trig_grid(0)), 0.0);

        let e = TrigPoly::new([(1, C64::new(0.9, 0.0))]);
        let p = trig_qsp_synthesize(&e, 1e-8).unwrap();
        assert_eq!(p.layers(), 2);
        assert!(residual_on(&p, &e, &trig_grid(3)) <= 1e-8);

        let c = TrigPoly::new([(1, C64::new(0.45, 0.0)), (-1, C64::new(0.45, 0.0))]);
        let p = trig_qsp_synthesize(&c, 1e-8).unwrap();
        assert!(residual_on(&p, &c, &trig_grid(5)) <= 1e-8);
    }

    #[test]
    fn rejects_unbounded() {
        let t = TrigPoly::new([(0, C64::new(0.8, 0.0)), (2, C64::new(0.5, 0.0))]);
        assert!(trig_qsp_synthesize(&t, 1e-8).is_err());
    }
}
