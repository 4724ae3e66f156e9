use crate::error::{PqcError, Result};
use crate::mat2::{self, Mat2};
use serde::{Deserialize, Serialize};

/// How a data coordinate enters a rotation angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Encoding {
    /// `-2 arccos(scale * x[coord] + offset)`, so that `R_X` of it equals
    /// `e^{i arccos(u) X}` with `u = scale * x + offset`.
    Arccos { coord: usize, scale: f64, offset: f64 },
    /// `scale * x[coord] + offset`.
    Linear { coord: usize, scale: f64, offset: f64 },
}

impl Encoding {
    pub fn coord(&self) -> usize {
        match *self {
            Encoding::Arccos { coord, .. } | Encoding::Linear { coord, .. } => coord,
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        let coord = self.coord();
        let v = *x.get(coord).ok_or(PqcError::DimensionMismatch {
            expected: coord + 1,
            found: x.len(),
        })?;
        match *self {
            Encoding::Arccos { scale, offset, .. } => {
                let u = scale * v + offset;
                if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&u) {
                    return Err(PqcError::Domain(format!("encoded signal {u} outside [-1, 1]")));
                }
                Ok(-2.0 * u.clamp(-1.0, 1.0).acos())
            }
            Encoding::Linear { scale, offset, .. } => Ok(scale * v + offset),
        }
    }
}

/// Rotation angle: a constant, a trainable parameter, or a function of the input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Angle {
    Fixed(f64),
    Trainable(f64),
    Encoded { encoding: Encoding, factor: f64 },
}

impl Angle {
    pub fn encoded(encoding: Encoding) -> Self {
        Angle::Encoded { encoding, factor: 1.0 }
    }

    pub fn is_trainable(&self) -> bool {
        matches!(self, Angle::Trainable(_))
    }

    pub fn is_bound(&self) -> bool {
        !matches!(self, Angle::Encoded { .. })
    }

    /// Numeric value; encoded angles need `x`.
    pub fn value(&self, x: Option<&[f64]>) -> Result<f64> {
        match *self {
            Angle::Fixed(v) | Angle::Trainable(v) => Ok(v),
            Angle::Encoded { encoding, factor } => match x {
                Some(x) => Ok(factor * encoding.value(x)?),
                None => Err(PqcError::InvalidInput(
                    "encoded angle evaluated without an input point".into(),
                )),
            },
        }
    }

    /// The same angle multiplied by `s`, keeping its kind.
    pub fn scaled(&self, s: f64) -> Self {
        match *self {
            Angle::Fixed(v) => Angle::Fixed(v * s),
            Angle::Trainable(v) => Angle::Trainable(v * s),
            Angle::Encoded { encoding, factor } => Angle::Encoded {
                encoding,
                factor: factor * s,
            },
        }
    }

    pub fn bind(&self, x: &[f64]) -> Result<Self> {
        Ok(match self {
            Angle::Encoded { .. } => Angle::Fixed(self.value(Some(x))?),
            other => *other,
        })
    }
}

/// Single-qubit operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Op {
    H,
    X,
    Z,
    Rx(Angle),
    Ry(Angle),
    Rz(Angle),
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::H => "H",
            Op::X => "X",
            Op::Z => "Z",
            Op::Rx(_) => "RX",
            Op::Ry(_) => "RY",
            Op::Rz(_) => "RZ",
        }
    }

    pub fn angle(&self) -> Option<&Angle> {
        match self {
            Op::Rx(a) | Op::Ry(a) | Op::Rz(a) => Some(a),
            _ => None,
        }
    }

    pub fn with_angle(&self, a: Angle) -> Self {
        match self {
            Op::Rx(_) => Op::Rx(a),
            Op::Ry(_) => Op::Ry(a),
            Op::Rz(_) => Op::Rz(a),
            other => *other,
        }
    }

    pub fn matrix(&self, x: Option<&[f64]>) -> Result<Mat2> {
        Ok(match self {
            Op::H => mat2::hadamard(),
            Op::X => mat2::pauli_x(),
            Op::Z => mat2::pauli_z(),
            Op::Rx(a) => mat2::rx(a.value(x)?),
            Op::Ry(a) => mat2::ry(a.value(x)?),
            Op::Rz(a) => mat2::rz(a.value(x)?),
        })
    }
}

/// Gate kind as exposed in listings: CNOT is an `X` with one control, MCU any
/// other controlled operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Z,
    Rx,
    Ry,
    Rz,
    Cnot,
    Mcu,
}

/// A single-qubit operation on `target`, applied when every control is `|1>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub op: Op,
    pub target: usize,
    pub controls: Vec<usize>,
}

impl Gate {
    pub fn single(op: Op, target: usize) -> Self {
        Self {
            op,
            target,
            controls: Vec::new(),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            op: Op::X,
            target,
            controls: vec![control],
        }
    }

    pub fn controlled(op: Op, controls: Vec<usize>, target: usize) -> Self {
        Self { op, target, controls }
    }

    pub fn kind(&self) -> GateKind {
        match (self.controls.len(), &self.op) {
            (0, Op::H) => GateKind::H,
            (0, Op::X) => GateKind::X,
            (0, Op::Z) => GateKind::Z,
            (0, Op::Rx(_)) => GateKind::Rx,
            (0, Op::Ry(_)) => GateKind::Ry,
            (0, Op::Rz(_)) => GateKind::Rz,
            (1, Op::X) => GateKind::Cnot,
            _ => GateKind::Mcu,
        }
    }

    pub fn is_trainable(&self) -> bool {
        self.op.angle().is_some_and(Angle::is_trainable)
    }

    /// All qubits the gate touches.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.target).chain(self.controls.iter().copied())
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        if self.qubits().any(|q| q >= width) {
            return Err(PqcError::InvalidInput(format!(
                "gate {self:?} addresses a qubit >= width {width}"
            )));
        }
        if self.controls.contains(&self.target) {
            return Err(PqcError::InvalidInput(format!(
                "gate {self:?} uses its target as a control"
            )));
        }
        let mut c = self.controls.clone();
        c.sort_unstable();
        c.dedup();
        if c.len() != self.controls.len() {
            return Err(PqcError::InvalidInput(format!("gate {self:?} repeats a control")));
        }
        Ok(())
    }

    pub fn shifted(&self, offset: usize) -> Self {
        Self {
            op: self.op,
            target: self.target + offset,
            controls: self.controls.iter().map(|c| c + offset).collect(),
        }
    }

    pub fn with_extra_control(&self, control: usize) -> Self {
        let mut controls = vec![control];
        controls.extend(&self.controls);
        Self {
            op: self.op,
            target: self.target,
            controls,
        }
    }

    pub fn bind(&self, x: &[f64]) -> Result<Self> {
        let op = match self.op.angle() {
            Some(a) => self.op.with_angle(a.bind(x)?),
            None => self.op,
        };
        Ok(Self {
            op,
            target: self.target,
            controls: self.controls.clone(),
        })
    }
}
