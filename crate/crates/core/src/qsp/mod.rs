//! Quantum signal processing: X-basis QSP for real parity polynomials and Z-basis
//! trigonometric QSP for Laurent polynomials in `e^{ix}`.

mod chain;
pub mod completion;
mod lm;
mod trig;

pub use trig::{trig_grid, trig_qsp_block, trig_qsp_synthesize, trig_qsp_unitary, TrigPoly, TrigQspParams};

use crate::error::{PqcError, Result};
use crate::mat2::{self, Mat2, C64};
use crate::poly::{chebyshev_lobatto_grid, ParityPolynomial};
use chain::{Axis, Factor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Default synthesis tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Number of optimizer starts (seeded start plus random restarts).
pub const MAX_STARTS: usize = 32;
/// Iteration budget of a single optimizer start.
pub const MAX_ITERATIONS: usize = 200;
/// Targets may touch the boundary `|p| = 1` up to this slack.
pub const BOUNDARY_SLACK: f64 = 1e-12;

/// Angles `theta_0 .. theta_L` of `U(x) = R_Z(theta_0) prod_j S(x) R_Z(theta_j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QspAngleSequence {
    pub angles: Vec<f64>,
}

impl QspAngleSequence {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(PqcError::InvalidInput(
                "an angle sequence needs at least theta_0".into(),
            ));
        }
        Ok(Self { angles })
    }

    pub fn layers(&self) -> usize {
        self.angles.len() - 1
    }
}

/// Signal operator `S(x) = e^{i arccos(x) X}`.
pub fn signal_x(x: f64) -> Mat2 {
    let s = (1.0 - x * x).max(0.0).sqrt();
    [
        [C64::new(x, 0.0), C64::new(0.0, s)],
        [C64::new(0.0, s), C64::new(x, 0.0)],
    ]
}

fn check_unit_interval(x: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(PqcError::Domain(format!("QSP signal x = {x} outside [-1, 1]")));
    }
    Ok(())
}

/// Explicit matrix product `R_Z(theta_0) prod_{j=1}^L S(x) R_Z(theta_j)`.
pub fn qsp_unitary(a: &QspAngleSequence, x: f64) -> Result<Mat2> {
    check_unit_interval(x)?;
    let s = signal_x(x);
    let mut u = mat2::rz(a.angles[0]);
    for &t in &a.angles[1..] {
        u = mat2::mul(&mat2::mul(&u, &s), &mat2::rz(t));
    }
    Ok(u)
}

/// Block value `<+| U(x) |+>`.
pub fn qsp_block(a: &QspAngleSequence, x: f64) -> Result<C64> {
    check_unit_interval(x)?;
    let s = signal_x(x);
    let mut v = mat2::plus();
    for &t in a.angles[1..].iter().rev() {
        v = mat2::apply(&s, mat2::apply(&mat2::rz(t), v));
    }
    v = mat2::apply(&mat2::rz(a.angles[0]), v);
    let p = mat2::plus();
    Ok(p[0] * v[0] + p[1] * v[1])
}

/// Verification grid for an `L`-layer sequence: `4(L+1)` Lobatto points on `[-1, 1]`.
pub fn qsp_grid(layers: usize) -> Vec<f64> {
    chebyshev_lobatto_grid(4 * (layers + 1))
}

/// Largest deviation of the block value from `p` on `grid`, counting both the real
/// error and the imaginary part.
pub fn qsp_residual(a: &QspAngleSequence, p: &dyn Fn(f64) -> f64, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&x| {
            let b = qsp_block(a, x).expect("grid inside [-1, 1]");
            (b.re - p(x)).abs().max(b.im.abs())
        })
        .fold(0.0, f64::max)
}

/// Finds angles with `<+|U(x)|+> = p(x)` on `[-1, 1]`.
///
/// The angles are taken palindromic and then shifted by `(+pi/2, 0, ..., 0, -pi/2)`,
/// which makes the block value real with the parity of `L`; the remaining
/// `floor(L/2) + 1` free angles are fitted by damped Gauss-Newton on positive
/// Chebyshev nodes.
pub fn qsp_synthesize(p: &ParityPolynomial, tol: f64) -> Result<QspAngleSequence> {
    if !(tol > 0.0) {
        return Err(PqcError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let sup = p.sup_norm();
    if sup > 1.0 + BOUNDARY_SLACK {
        return Err(PqcError::Domain(format!("sup |p| = {sup} exceeds 1")));
    }
    if p.is_zero() {
        return QspAngleSequence::new(vec![PI]);
    }
    let layers = p.degree();
    if !p.parity().matches(layers) {
        return Err(PqcError::ParityMismatch(format!(
            "degree {layers} polynomial declared {:?}",
            p.parity()
        )));
    }
    if layers == 0 {
        let c = p.eval(0.0).clamp(-1.0, 1.0);
        return QspAngleSequence::new(vec![2.0 * c.acos()]);
    }
    let eval = |x: f64| p.eval(x);
    synthesize_layers(&eval, layers, tol)
}

fn palindromic_factors(layers: usize, x: f64) -> Vec<Factor> {
    let s = signal_x(x);
    let mut f = Vec::with_capacity(2 * layers + 1);
    for j in 0..=layers {
        if j > 0 {
            f.push(Factor::Fixed(s));
        }
        let offset = if j == 0 {
            FRAC_PI_2
        } else if j == layers {
            -FRAC_PI_2
        } else {
            0.0
        };
        f.push(Factor::Rot {
            axis: Axis::Z,
            param: j.min(layers - j),
            offset,
        });
    }
    f
}

fn expand_palindromic(reduced: &[f64], layers: usize) -> Vec<f64> {
    let mut angles: Vec<f64> = (0..=layers).map(|j| reduced[j.min(layers - j)]).collect();
    angles[0] += FRAC_PI_2;
    angles[layers] -= FRAC_PI_2;
    angles
}

fn synthesize_layers(p: &dyn Fn(f64) -> f64, layers: usize, tol: f64) -> Result<QspAngleSequence> {
    let m = layers / 2 + 1;
    let n = 2 * m;
    let nodes: Vec<f64> = (1..=n)
        .map(|k| ((2 * k - 1) as f64 * PI / (4 * n) as f64).cos())
        .collect();
    let targets: Vec<f64> = nodes.iter().map(|&x| p(x)).collect();
    let chains: Vec<Vec<Factor>> = nodes.iter().map(|&x| palindromic_factors(layers, x)).collect();
    let plus = mat2::plus();
    let residuals = |red: &[f64], want_jac: bool| {
        let mut r = Vec::with_capacity(n);
        let mut jac = want_jac.then(|| nalgebra::DMatrix::zeros(n, m));
        let mut g = vec![C64::new(0.0, 0.0); m];
        for (i, chain) in chains.iter().enumerate() {
            g.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            let v = chain::element_and_grad(chain, red, plus, plus, jac.as_ref().map(|_| g.as_mut_slice()));
            r.push(v.re - targets[i]);
            if let Some(j) = jac.as_mut() {
                for (c, gv) in g.iter().enumerate() {
                    j[(i, c)] = gv.re;
                }
            }
        }
        (r, jac)
    };

    let grid = qsp_grid(layers);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5159_0000 + layers as u64);
    let mut best = f64::INFINITY;
    for start in 0..MAX_STARTS {
        let mut x0 = vec![0.0; m];
        x0[0] = -FRAC_PI_2;
        if start > 0 {
            let spread = if start < MAX_STARTS / 2 { 0.3 } else { PI };
            for v in x0.iter_mut() {
                *v += rng.gen_range(-spread..spread);
            }
        }
        let out = lm::levenberg_marquardt(residuals, x0, MAX_ITERATIONS, tol * 1e-3);
        // A fit that misses the nodes cannot pass the finer grid.
        if out.max_residual > tol {
            best = best.min(out.max_residual);
            continue;
        }
        let seq = QspAngleSequence::new(expand_palindromic(&out.x, layers))?;
        let res = qsp_residual(&seq, p, &grid);
        if res <= tol {
            return Ok(seq);
        }
        best = best.min(res);
    }
    Err(PqcError::NotConverged {
        what: format!("QSP synthesis with {layers} layers"),
        best_residual: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Parity, Polynomial};

    #[test]
    fn unitary_examples() {
        let u = qsp_unitary(&QspAngleSequence::new(vec![0.0]).unwrap(), 0.4).unwrap();
        assert!(mat2::distance(&u, &mat2::identity()) < 1e-15);
        let u = qsp_unitary(&QspAngleSequence::new(vec![0.0, 0.0]).unwrap(), 0.3).unwrap();
        let s = 0.91f64.sqrt();
        let want = [
            [C64::new(0.3, 0.0), C64::new(0.0, s)],
            [C64::new(0.0, s), C64::new(0.3, 0.0)],
        ];
        assert!(mat2::distance(&u, &want) < 1e-15);
        assert!(qsp_unitary(&QspAngleSequence::new(vec![0.0]).unwrap(), 1.5).is_err());
    }

    #[test]
    fn synthesis_examples() {
        let one = ParityPolynomial::new(Polynomial::constant(1.0), Parity::Even).unwrap();
        let a = qsp_synthesize(&one, 1e-12).unwrap();
        assert_eq!(a.angles, vec![0.0]);

        let x = ParityPolynomial::new(Polynomial::new(vec![0.0, 1.0]), Parity::Odd).unwrap();
        let a = qsp_synthesize(&x, 1e-10).unwrap();
        assert!(qsp_residual(&a, &|t| t, &qsp_grid(1)) <= 1e-10);

        let p = Polynomial::new(vec![-0.9, 0.0, 1.8]);
        let t2 = ParityPolynomial::new(p.clone(), Parity::Even).unwrap();
        let a = qsp_synthesize(&t2, 1e-9).unwrap();
        assert_eq!(a.layers(), 2);
        assert!(qsp_residual(&a, &|t| p.eval(t), &qsp_grid(2)) <= 1e-9);
    }

    #[test]
    fn zero_and_boundary_targets() {
        let z = ParityPolynomial::new(Polynomial::zero(), Parity::Odd).unwrap();
        let a = qsp_synthesize(&z, 1e-12).unwrap();
        assert!(qsp_block(&a, 0.3).unwrap().norm() < 1e-15);
        let x6 = ParityPolynomial::new(Polynomial::monomial(6, 1.0), Parity::Even).unwrap();
        let a = qsp_synthesize(&x6, 1e-9).unwrap();
        assert!(qsp_residual(&a, &|t| t.powi(6), &chebyshev_lobatto_grid(57)) <= 1e-9);
    }

    #[test]
    fn rejects_bad_targets() {
        let big = ParityPolynomial::new(Polynomial::new(vec![0.0, 0.5]), Parity::Odd)
            .unwrap()
            .scale(3.0);
        assert!(matches!(qsp_synthesize(&big, 1e-8), Err(PqcError::Domain(_))));
    }
}
