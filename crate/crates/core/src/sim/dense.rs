//! Dense reference matrices for small circuits, built from Kronecker products
//! independently of the statevector kernels. Intended as a test oracle.

use super::circuit::Circuit;
use super::gate::Gate;
use crate::error::{PqcError, Result};
use crate::mat2::C64;
use nalgebra::DMatrix;

/// Widest circuit the dense oracle accepts.
pub const DENSE_MAX_WIDTH: usize = 10;

fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

fn single(m: [[C64; 2]; 2]) -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

/// Full `2^w x 2^w` matrix of a gate: `sum over control patterns` of projector
/// products, with the operation on the target only for the all-ones pattern.
pub fn gate_matrix(g: &Gate, width: usize, x: Option<&[f64]>) -> Result<DMatrix<C64>> {
    if width > DENSE_MAX_WIDTH {
        return Err(PqcError::WidthLimit {
            width,
            limit: DENSE_MAX_WIDTH,
        });
    }
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let id = single([[one, zero], [zero, one]]);
    let p1 = single([[zero, zero], [zero, one]]);
    let u = single(g.op.matrix(x)?);
    // Active branch: controls projected on |1>, target gets U.
    let mut active = DMatrix::from_element(1, 1, one);
    for q in 0..width {
        let f = if q == g.target {
            &u
        } else if g.controls.contains(&q) {
            &p1
        } else {
            &id
        };
        active = kron(&active, f);
    }
    // Idle branch: identity minus the controls-all-one projector.
    let mut proj = DMatrix::from_element(1, 1, one);
    for q in 0..width {
        proj = kron(&proj, if g.controls.contains(&q) { &p1 } else { &id });
    }
    let dim = 1usize << width;
    Ok(active + (DMatrix::identity(dim, dim) - proj))
}

/// Product of all gate matrices (later gates on the left).
pub fn circuit_matrix(c: &Circuit, x: Option<&[f64]>) -> Result<DMatrix<C64>> {
    let dim = 1usize << c.width;
    let mut m = DMatrix::<C64>::identity(dim, dim);
    for g in &c.gates {
        m = gate_matrix(g, c.width, x)? * m;
    }
    Ok(m)
}

/// `min over phases |A - e^{i phi} B|_max`, with the phase fitted from the overlap.
pub fn distance_up_to_phase(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}
