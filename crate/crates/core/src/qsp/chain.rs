//! Value and parameter gradient of a matrix element `<u| M_1 M_2 ... M_n |v>`
//! where some factors are Pauli rotations with shared parameters.

use crate::mat2::{self, Mat2, C64};

#[derive(Clone, Copy, Debug)]
pub(crate) enum Axis {
    Y,
    Z,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Factor {
    Fixed(Mat2),
    /// `R_axis(params[param] + offset)`.
    Rot {
        axis: Axis,
        param: usize,
        offset: f64,
    },
}

impl Factor {
    fn matrix(&self, params: &[f64]) -> Mat2 {
        match *self {
            Factor::Fixed(m) => m,
            Factor::Rot {
                axis: Axis::Y,
                param,
                offset,
            } => mat2::ry(params[param] + offset),
            Factor::Rot {
                axis: Axis::Z,
                param,
                offset,
            } => mat2::rz(params[param] + offset),
        }
    }
}

/// Returns `<u| prod M_k |v>` and, when `grad` is given, accumulates its derivative
/// with respect to every parameter (derivatives of shared parameters add up).
pub(crate) fn element_and_grad(
    factors: &[Factor],
    params: &[f64],
    u: [C64; 2],
    v: [C64; 2],
    grad: Option<&mut [C64]>,
) -> C64 {
    let mats: Vec<Mat2> = factors.iter().map(|f| f.matrix(params)).collect();
    let n = mats.len();
    // suffix[k] = M_k ... M_n |v>
    let mut suffix = vec![v; n + 1];
    for k in (0..n).rev() {
        suffix[k] = mat2::apply(&mats[k], suffix[k + 1]);
    }
    let mut row = [u[0].conj(), u[1].conj()];
    let value = row[0] * suffix[0][0] + row[1] * suffix[0][1];
    if let Some(grad) = grad {
        let half_i = C64::new(0.0, -0.5);
        for (k, f) in factors.iter().enumerate() {
            if let Factor::Rot { axis, param, .. } = *f {
                // dR/dtheta = (-i/2) G R, and R suffix[k+1] = suffix[k].
                let s = suffix[k];
                let gs = match axis {
                    Axis::Y => [-mat2::I * s[1], mat2::I * s[0]],
                    Axis::Z => [s[0], -s[1]],
                };
                grad[param] += half_i * (row[0] * gs[0] + row[1] * gs[1]);
            }
            row = mat2::apply_left(row, &mats[k]);
        }
    }
    value
}

/// Full product `M_1 ... M_n`.
pub(crate) fn product(factors: &[Factor], params: &[f64]) -> Mat2 {
    factors
        .iter()
        .fold(mat2::identity(), |acc, f| mat2::mul(&acc, &f.matrix(params)))
}
