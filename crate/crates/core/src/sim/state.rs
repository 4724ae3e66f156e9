use super::circuit::Circuit;
use super::gate::{Gate, Op};
use crate::error::{PqcError, Result};
use crate::mat2::{Mat2, C64};

/// Maximum simulated width.
pub const MAX_WIDTH: usize = 24;

/// Dense state over `2^width` basis states; qubit 0 is the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    width: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(width: usize) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(PqcError::WidthLimit {
                width,
                limit: MAX_WIDTH,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << width];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { width, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(width: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(width)?;
        if index >= s.amps.len() {
            return Err(PqcError::InvalidInput(format!("basis index {index} out of range")));
        }
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(PqcError::InvalidInput(format!(
                "amplitude count {n} is not a power of two"
            )));
        }
        let width = n.trailing_zeros() as usize;
        if width > MAX_WIDTH {
            return Err(PqcError::WidthLimit {
                width,
                limit: MAX_WIDTH,
            });
        }
        let s = Self { width, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(PqcError::InvalidInput(format!("state norm {norm} differs from 1")));
        }
        Ok(s)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Probability that qubit `q` reads 0.
    pub fn prob_zero(&self, q: usize) -> f64 {
        let bit = 1usize << (self.width - 1 - q);
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Applies one gate, binding encoded angles with `x` if given.
    pub fn apply(&mut self, gate: &Gate, x: Option<&[f64]>) -> Result<()> {
        let t = gate.target;
        if gate.qubits().any(|q| q >= self.width) {
            return Err(PqcError::InvalidInput(format!(
                "gate {gate:?} outside width {}",
                self.width
            )));
        }
        let tbit = 1usize << (self.width - 1 - t);
        let cmask = gate
            .controls
            .iter()
            .fold(0usize, |m, &c| m | (1usize << (self.width - 1 - c)));
        match gate.op {
            Op::X => self.for_pairs(tbit, cmask, std::mem::swap),
            Op::Z => self.for_pairs(tbit, cmask, |_, b| *b = -*b),
            Op::Rz(angle) => {
                let th = angle.value(x)?;
                let (e0, e1) = (C64::from_polar(1.0, -th / 2.0), C64::from_polar(1.0, th / 2.0));
                self.for_pairs(tbit, cmask, |a, b| {
                    *a *= e0;
                    *b *= e1;
                })
            }
            op => {
                let m: Mat2 = op.matrix(x)?;
                self.for_pairs(tbit, cmask, |a, b| {
                    let (va, vb) = (*a, *b);
                    *a = m[0][0] * va + m[0][1] * vb;
                    *b = m[1][0] * va + m[1][1] * vb;
                })
            }
        }
        Ok(())
    }

    /// Visits every amplitude pair differing only in the target bit, restricted to
    /// indices where all control bits are set.
    fn for_pairs(&mut self, tbit: usize, cmask: usize, mut f: impl FnMut(&mut C64, &mut C64)) {
        let n = self.amps.len();
        let mut base = 0;
        while base < n {
            for i in base..base + tbit {
                if i & cmask == cmask {
                    let (lo, hi) = self.amps.split_at_mut(i + tbit);
                    f(&mut lo[i], &mut hi[0]);
                }
            }
            base += 2 * tbit;
        }
    }
}

/// Applies the circuit to `init`. Encoded angles must already be bound.
pub fn run(c: &Circuit, init: &Statevector) -> Result<Statevector> {
    run_with_input(c, init, None)
}

/// Applies the circuit to `init`, substituting `x` into encoded angles.
pub fn run_with_input(c: &Circuit, init: &Statevector, x: Option<&[f64]>) -> Result<Statevector> {
    if init.width != c.width {
        return Err(PqcError::DimensionMismatch {
            expected: 1 << c.width,
            found: init.amps.len(),
        });
    }
    let mut s = init.clone();
    for g in &c.gates {
        s.apply(g, x)?;
    }
    Ok(s)
}

/// `<Z>` on qubit 0.
pub fn expectation_z0(s: &Statevector) -> f64 {
    let half = s.amps.len() / 2;
    let (a, b) = s.amps.split_at(half);
    a.iter().map(|v| v.norm_sqr()).sum::<f64>() - b.iter().map(|v| v.norm_sqr()).sum::<f64>()
}
