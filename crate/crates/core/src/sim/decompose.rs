//! Lowering of multi-controlled single-qubit gates to CNOT plus single-qubit
//! rotations without ancillas.
//!
//! One control uses the textbook two-CNOT forms (or the A-X-B-X-C form for
//! non-rotations). `m >= 2` controls split off the last control with a square
//! root `V` of the target operation; the multi-controlled NOTs this needs borrow
//! the target qubit as a dirty ancilla and are built from Toffoli ladders, which
//! keeps the gate count quadratic in `m`.

use super::circuit::Circuit;
use super::gate::{Angle, Gate, Op};
use crate::error::Result;
use crate::mat2::{self, Mat2, C64};
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug)]
enum Target {
    Op(Op),
    Mat(Mat2),
}

impl Target {
    fn matrix(&self) -> Result<Mat2> {
        match self {
            Target::Op(op) => op.matrix(None),
            Target::Mat(m) => Ok(*m),
        }
    }

    fn sqrt(&self) -> Result<Target> {
        Ok(match self {
            Target::Op(op @ (Op::Rx(a) | Op::Ry(a) | Op::Rz(a))) => Target::Op(op.with_angle(a.scaled(0.5))),
            _ => Target::Mat(sqrt_unitary(&self.matrix()?)),
        })
    }

    fn inverse(&self) -> Result<Target> {
        Ok(match self {
            Target::Op(op @ (Op::Rx(a) | Op::Ry(a) | Op::Rz(a))) => Target::Op(op.with_angle(a.scaled(-1.0))),
            _ => Target::Mat(mat2::dagger(&self.matrix()?)),
        })
    }
}

/// Principal square root of a 2x2 unitary: `(W + sqrt(det W) I) / sqrt(tr W + 2 sqrt(det W))`.
fn sqrt_unitary(w: &Mat2) -> Mat2 {
    let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
    for sign in [1.0, -1.0] {
        let s = det.sqrt() * sign;
        let denom = (w[0][0] + w[1][1] + 2.0 * s).sqrt();
        if denom.norm() > 1e-8 {
            let mut v = *w;
            v[0][0] += s;
            v[1][1] += s;
            return mat2::scale(&v, C64::new(1.0, 0.0) / denom);
        }
    }
    unreachable!("one branch of the square root is always regular")
}

/// `W = e^{i alpha} R_Z(beta) R_Y(gamma) R_Z(delta)`.
fn zyz(w: &Mat2) -> (f64, f64, f64, f64) {
    let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
    let v = mat2::scale(w, C64::from_polar(1.0, -det.arg() / 2.0));
    let gamma = 2.0 * v[1][0].norm().atan2(v[0][0].norm());
    let sum = if v[0][0].norm() > 1e-12 {
        -2.0 * v[0][0].arg()
    } else {
        2.0 * v[1][1].arg()
    };
    let diff = if v[1][0].norm() > 1e-12 {
        2.0 * v[1][0].arg()
    } else {
        0.0
    };
    let (beta, delta) = ((sum + diff) / 2.0, (sum - diff) / 2.0);
    let r = mat2::mul(&mat2::mul(&mat2::rz(beta), &mat2::ry(gamma)), &mat2::rz(delta));
    let overlap: C64 = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| w[i][j] * r[i][j].conj())
        .sum();
    (overlap.arg(), beta, gamma, delta)
}

fn rz(q: usize, a: f64) -> Gate {
    Gate::single(Op::Rz(Angle::Fixed(a)), q)
}

fn ry(q: usize, a: f64) -> Gate {
    Gate::single(Op::Ry(Angle::Fixed(a)), q)
}

fn emit_single(w: Target, t: usize, out: &mut Vec<Gate>) -> Result<()> {
    match w {
        Target::Op(op) => out.push(Gate::single(op, t)),
        Target::Mat(m) => {
            let (_, beta, gamma, delta) = zyz(&m);
            out.push(rz(t, delta));
            out.push(ry(t, gamma));
            out.push(rz(t, beta));
        }
    }
    Ok(())
}

fn controlled_once(w: Target, c: usize, t: usize, out: &mut Vec<Gate>) -> Result<()> {
    match w {
        Target::Op(Op::X) => out.push(Gate::cnot(c, t)),
        Target::Op(op @ (Op::Ry(a) | Op::Rz(a))) => {
            out.push(Gate::single(op.with_angle(a.scaled(0.5)), t));
            out.push(Gate::cnot(c, t));
            out.push(Gate::single(op.with_angle(a.scaled(-0.5)), t));
            out.push(Gate::cnot(c, t));
        }
        Target::Op(Op::Rx(a)) => {
            // R_Z(-pi/2) R_Y(a) R_Z(pi/2) = R_X(a)
            out.push(rz(t, FRAC_PI_2));
            controlled_once(Target::Op(Op::Ry(a)), c, t, out)?;
            out.push(rz(t, -FRAC_PI_2));
        }
        other => {
            let (alpha, beta, gamma, delta) = zyz(&other.matrix()?);
            out.push(rz(t, (delta - beta) / 2.0));
            out.push(Gate::cnot(c, t));
            out.push(rz(t, -(delta + beta) / 2.0));
            out.push(ry(t, -gamma / 2.0));
            out.push(Gate::cnot(c, t));
            out.push(ry(t, gamma / 2.0));
            out.push(rz(t, beta));
            out.push(rz(c, alpha));
        }
    }
    Ok(())
}

fn toffoli(a: usize, b: usize, t: usize, out: &mut Vec<Gate>) {
    let tg = |q| rz(q, std::f64::consts::FRAC_PI_4);
    let tdg = |q| rz(q, -std::f64::consts::FRAC_PI_4);
    out.push(Gate::single(Op::H, t));
    out.push(Gate::cnot(b, t));
    out.push(tdg(t));
    out.push(Gate::cnot(a, t));
    out.push(tg(t));
    out.push(Gate::cnot(b, t));
    out.push(tdg(t));
    out.push(Gate::cnot(a, t));
    out.push(tg(b));
    out.push(tg(t));
    out.push(Gate::single(Op::H, t));
    out.push(Gate::cnot(a, b));
    out.push(tg(a));
    out.push(tdg(b));
    out.push(Gate::cnot(a, b));
}

/// Multi-controlled NOT with `k - 2` dirty ancillas (Toffoli ladder).
fn mcx_ladder(c: &[usize], t: usize, anc: &[usize], out: &mut Vec<Gate>) {
    let k = c.len();
    debug_assert!(k >= 3 && anc.len() >= k - 2);
    let descend = |out: &mut Vec<Gate>| {
        for i in (1..=k - 3).rev() {
            toffoli(c[i + 1], anc[i - 1], anc[i], out);
        }
    };
    let ascend = |out: &mut Vec<Gate>| {
        for i in 1..=k - 3 {
            toffoli(c[i + 1], anc[i - 1], anc[i], out);
        }
    };
    for _ in 0..2 {
        toffoli(c[k - 1], anc[k - 3], t, out);
        descend(out);
        toffoli(c[0], c[1], anc[0], out);
        ascend(out);
    }
}

fn mcx(c: &[usize], t: usize, dirty: &[usize], out: &mut Vec<Gate>) {
    let k = c.len();
    match k {
        0 => out.push(Gate::single(Op::X, t)),
        1 => out.push(Gate::cnot(c[0], t)),
        2 => toffoli(c[0], c[1], t, out),
        _ if dirty.len() >= k - 2 => mcx_ladder(c, t, dirty, out),
        _ => {
            let a = dirty[0];
            let (first, second) = c.split_at(k.div_ceil(2));
            let mut second_a: Vec<usize> = second.to_vec();
            second_a.push(a);
            let mut free_first: Vec<usize> = second.to_vec();
            free_first.push(t);
            for _ in 0..2 {
                mcx(first, a, &free_first, out);
                mcx(&second_a, t, first, out);
            }
        }
    }
}

fn controlled(w: Target, c: &[usize], t: usize, out: &mut Vec<Gate>) -> Result<()> {
    match c.len() {
        0 => emit_single(w, t, out),
        1 => controlled_once(w, c[0], t, out),
        m => {
            let v = w.sqrt()?;
            let last = c[m - 1];
            let rest = &c[..m - 1];
            controlled_once(v, last, t, out)?;
            mcx(rest, last, &[t], out);
            controlled_once(v.inverse()?, last, t, out)?;
            mcx(rest, last, &[t], out);
            controlled(v, rest, t, out)
        }
    }
}

/// Expands a controlled gate into CNOTs and uncontrolled single-qubit gates. The
/// result equals the original unitary up to a global phase.
pub fn decompose_mcu(g: &Gate) -> Result<Vec<Gate>> {
    if g.controls.is_empty() || (g.controls.len() == 1 && g.op == Op::X) {
        return Ok(vec![g.clone()]);
    }
    let mut out = Vec::new();
    controlled(Target::Op(g.op), &g.controls, g.target, &mut out)?;
    Ok(out)
}

/// Lowers every controlled gate of `c`.
pub fn lower_circuit(c: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(c.width, format!("{} (lowered)", c.label));
    for g in &c.gates {
        out.gates.extend(decompose_mcu(g)?);
    }
    Ok(out)
}
