use super::gate::{Angle, Encoding, Gate, GateKind, Op};
use crate::error::{PqcError, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Ordered gate list on `width` qubits. Qubit 0 is the most significant bit of
/// basis-state indices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub width: usize,
    pub gates: Vec<Gate>,
    pub label: String,
}

impl Circuit {
    pub fn new(width: usize, label: impl Into<String>) -> Self {
        Self {
            width,
            gates: Vec::new(),
            label: label.into(),
        }
    }

    /// Appends a gate after checking its indices.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn h(&mut self, q: usize) -> Result<()> {
        self.push(Gate::single(Op::H, q))
    }

    pub fn x(&mut self, q: usize) -> Result<()> {
        self.push(Gate::single(Op::X, q))
    }

    pub fn z(&mut self, q: usize) -> Result<()> {
        self.push(Gate::single(Op::Z, q))
    }

    pub fn rx(&mut self, q: usize, a: Angle) -> Result<()> {
        self.push(Gate::single(Op::Rx(a), q))
    }

    pub fn ry(&mut self, q: usize, a: Angle) -> Result<()> {
        self.push(Gate::single(Op::Ry(a), q))
    }

    pub fn rz(&mut self, q: usize, a: Angle) -> Result<()> {
        self.push(Gate::single(Op::Rz(a), q))
    }

    pub fn cnot(&mut self, c: usize, t: usize) -> Result<()> {
        self.push(Gate::cnot(c, t))
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.validate(self.width))
    }

    /// Appends every gate of `other`, moved up by `offset` qubits.
    pub fn append_shifted(&mut self, other: &Circuit, offset: usize) -> Result<()> {
        if other.width + offset > self.width {
            return Err(PqcError::DimensionMismatch {
                expected: self.width,
                found: other.width + offset,
            });
        }
        self.gates.extend(other.gates.iter().map(|g| g.shifted(offset)));
        Ok(())
    }

    /// Substitutes the input point into every encoded angle.
    pub fn bind(&self, x: &[f64]) -> Result<Circuit> {
        Ok(Circuit {
            width: self.width,
            gates: self.gates.iter().map(|g| g.bind(x)).collect::<Result<_>>()?,
            label: self.label.clone(),
        })
    }

    pub fn is_bound(&self) -> bool {
        self.gates.iter().all(|g| g.op.angle().is_none_or(Angle::is_bound))
    }

    /// Highest input coordinate referenced by an encoded angle, plus one.
    pub fn input_dims(&self) -> usize {
        self.gates
            .iter()
            .filter_map(|g| match g.op.angle() {
                Some(Angle::Encoded { encoding, .. }) => Some(encoding.coord() + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn trainable_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_trainable()).count()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }

    /// Line-oriented listing: a header with width and label, then one gate per
    /// line as `KIND target [controls] [angle]`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# pqc circuit v1");
        let _ = writeln!(s, "width {}", self.width);
        let _ = writeln!(s, "label {}", self.label);
        for g in &self.gates {
            let _ = writeln!(s, "{}", gate_line(g));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut width = None;
        let mut label = String::new();
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: &str| PqcError::Parse {
                line: line_no,
                message: m.to_string(),
            };
            if let Some(rest) = line.strip_prefix("width ") {
                width = Some(rest.trim().parse::<usize>().map_err(|e| err(&e.to_string()))?);
                continue;
            }
            if line == "label" {
                continue;
            }
            if let Some(rest) = raw.trim_start().strip_prefix("label ") {
                label = rest.to_string();
                continue;
            }
            gates.push(parse_gate(line).map_err(|m| err(&m))?);
        }
        let width = width.ok_or(PqcError::Parse {
            line: 0,
            message: "missing width header".into(),
        })?;
        let c = Circuit { width, gates, label };
        c.validate()?;
        Ok(c)
    }
}

fn angle_token(a: &Angle) -> String {
    match a {
        Angle::Fixed(v) => format!("f:{v:?}"),
        Angle::Trainable(v) => format!("p:{v:?}"),
        Angle::Encoded { encoding, factor } => match encoding {
            Encoding::Arccos { coord, scale, offset } => format!("acos:{coord}:{scale:?}:{offset:?}:{factor:?}"),
            Encoding::Linear { coord, scale, offset } => format!("lin:{coord}:{scale:?}:{offset:?}:{factor:?}"),
        },
    }
}

pub(crate) fn gate_line(g: &Gate) -> String {
    let kind = match g.kind() {
        GateKind::Cnot => "CNOT".to_string(),
        GateKind::Mcu => format!("MCU:{}", g.op.name()),
        _ => g.op.name().to_string(),
    };
    let mut s = format!("{kind} {}", g.target);
    if !g.controls.is_empty() {
        let c: Vec<String> = g.controls.iter().map(|c| c.to_string()).collect();
        let _ = write!(s, " [{}]", c.join(","));
    }
    if let Some(a) = g.op.angle() {
        let _ = write!(s, " {}", angle_token(a));
    }
    s
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"))
}

fn parse_angle(tok: &str) -> std::result::Result<Angle, String> {
    let parts: Vec<&str> = tok.split(':').collect();
    match parts.as_slice() {
        ["f", v] => Ok(Angle::Fixed(parse_f64(v)?)),
        ["p", v] => Ok(Angle::Trainable(parse_f64(v)?)),
        [kind @ ("acos" | "lin"), coord, scale, offset, factor] => {
            let coord = coord.parse::<usize>().map_err(|e| e.to_string())?;
            let (scale, offset) = (parse_f64(scale)?, parse_f64(offset)?);
            let encoding = if *kind == "acos" {
                Encoding::Arccos { coord, scale, offset }
            } else {
                Encoding::Linear { coord, scale, offset }
            };
            Ok(Angle::Encoded {
                encoding,
                factor: parse_f64(factor)?,
            })
        }
        _ => Err(format!("bad angle token {tok:?}")),
    }
}

fn parse_gate(line: &str) -> std::result::Result<Gate, String> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 2 {
        return Err(format!("expected `KIND target ...`, got {line:?}"));
    }
    let target = toks[1].parse::<usize>().map_err(|e| format!("bad target: {e}"))?;
    let mut rest = &toks[2..];
    let mut controls = Vec::new();
    if let Some(first) = rest.first() {
        if let Some(inner) = first.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            controls = inner
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|e| format!("bad control: {e}")))
                .collect::<std::result::Result<_, _>>()?;
            rest = &rest[1..];
        }
    }
    let angle = rest.first().map(|t| parse_angle(t)).transpose()?;
    if rest.len() > 1 {
        return Err(format!("trailing tokens in {line:?}"));
    }
    let (name, is_mcu) = match toks[0].strip_prefix("MCU:") {
        Some(n) => (n, true),
        None => (toks[0], false),
    };
    let need_angle = |a: Option<Angle>| a.ok_or_else(|| format!("{name} needs an angle"));
    let op = match name {
        "H" => Op::H,
        "X" | "CNOT" => Op::X,
        "Z" => Op::Z,
        "RX" => Op::Rx(need_angle(angle)?),
        "RY" => Op::Ry(need_angle(angle)?),
        "RZ" => Op::Rz(need_angle(angle)?),
        other => return Err(format!("unknown gate kind {other:?}")),
    };
    if name == "CNOT" && controls.len() != 1 {
        return Err("CNOT needs exactly one control".into());
    }
    if !is_mcu && name != "CNOT" && !controls.is_empty() {
        return Err(format!("{name} does not take controls; use MCU:{name}"));
    }
    Ok(Gate { op, target, controls })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = Circuit::new(4, "demo circuit");
        c.h(0).unwrap();
        c.rx(
            1,
            Angle::encoded(Encoding::Arccos {
                coord: 0,
                scale: 2.0,
                offset: -1.0,
            }),
        )
        .unwrap();
        c.rz(2, Angle::Trainable(0.125)).unwrap();
        c.ry(3, Angle::Fixed(-1.0 / 3.0)).unwrap();
        c.cnot(0, 3).unwrap();
        c.push(Gate::controlled(Op::Ry(Angle::Fixed(0.7)), vec![0, 1, 2], 3))
            .unwrap();
        c.push(Gate::controlled(Op::Z, vec![1, 2], 0)).unwrap();
        let back = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_indices() {
        let mut c = Circuit::new(2, "");
        assert!(c.cnot(0, 2).is_err());
        assert!(c.cnot(1, 1).is_err());
        assert!(Circuit::from_text("width 1\nH 3\n").is_err());
        assert!(Circuit::from_text("H 0\n").is_err());
    }
}
