use crate::error::{PqcError, Result};
use crate::mat2::C64;
use crate::sim::{
    expectation_z0, gate_line, hadamard_test_circuit, resource_count, run_with_input, sample_state, Angle, Circuit,
    Gate, Op, Part, ResourceCount, ResourceTally, ShotEstimate, Statevector, MAX_WIDTH,
};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::sync::Arc;

/// How a [`BlockCircuit`] is assembled from its parts.
#[derive(Clone, Debug)]
enum Body {
    /// An explicit gate list; `coords` are the input coordinates it reads and
    /// `tol` bounds the deviation of its block value from the intended one.
    Gates {
        circuit: Circuit,
        coords: Vec<usize>,
        tol: f64,
    },
    /// Parts on disjoint registers, concatenated in order.
    Tensor(Vec<BlockCircuit>),
    /// Uniform LCU: an ancilla register of `log2(padded)` qubits selects unit `j`;
    /// indices past the last unit select `pad`.
    Lcu {
        units: Vec<BlockCircuit>,
        padded: usize,
        pad: Option<Gate>,
    },
}

#[derive(Debug)]
struct Node {
    label: String,
    width: usize,
    prep: Circuit,
    rescale: f64,
    real: bool,
    body: Body,
}

/// A unitary `U` together with the state preparation `|psi>` that defines its
/// block value `<psi|U|psi>`, and the classical factor that turns the block value
/// into the represented function value.
///
/// Cloning is cheap: the assembly tree is shared.
#[derive(Clone, Debug)]
pub struct BlockCircuit {
    node: Arc<Node>,
}

type Memo = HashMap<(usize, Vec<u64>), C64>;

impl BlockCircuit {
    /// An exact leaf from an explicit gate list.
    pub fn from_gates(circuit: Circuit, prep: Circuit, rescale: f64, real: bool) -> Result<Self> {
        Self::from_gates_with_tol(circuit, prep, rescale, real, 0.0)
    }

    /// A leaf whose block value is only accurate to `tol`, such as a synthesized
    /// QSP sequence.
    pub fn from_gates_with_tol(circuit: Circuit, prep: Circuit, rescale: f64, real: bool, tol: f64) -> Result<Self> {
        if circuit.width != prep.width {
            return Err(PqcError::DimensionMismatch {
                expected: circuit.width,
                found: prep.width,
            });
        }
        circuit.validate()?;
        prep.validate()?;
        if !prep.is_bound() {
            return Err(PqcError::InvalidInput(
                "state preparation must not depend on the input".into(),
            ));
        }
        check_rescale(rescale)?;
        let mut coords: Vec<usize> = circuit
            .gates
            .iter()
            .filter_map(|g| match g.op.angle() {
                Some(Angle::Encoded { encoding, .. }) => Some(encoding.coord()),
                _ => None,
            })
            .collect();
        coords.sort_unstable();
        coords.dedup();
        Ok(Self {
            node: Arc::new(Node {
                label: circuit.label.clone(),
                width: circuit.width,
                prep,
                rescale,
                real,
                body: Body::Gates { circuit, coords, tol },
            }),
        })
    }

    /// Parts placed on consecutive registers. The block value is the product of
    /// the parts' block values and the rescale the product of their rescales.
    pub fn tensor(parts: Vec<BlockCircuit>, label: impl Into<String>) -> Result<Self> {
        if parts.is_empty() {
            return Err(PqcError::InvalidInput("tensor product of zero parts".into()));
        }
        if parts.len() == 1 {
            return Ok(parts.into_iter().next().unwrap());
        }
        let width: usize = parts.iter().map(|p| p.width()).sum();
        let mut prep = Circuit::new(width, "prep");
        let mut offset = 0;
        for p in &parts {
            prep.append_shifted(p.prep(), offset)?;
            offset += p.width();
        }
        let rescale = parts.iter().map(|p| p.rescale()).product();
        let real = parts.iter().all(|p| p.block_value_is_real());
        Ok(Self {
            node: Arc::new(Node {
                label: label.into(),
                width,
                prep,
                rescale,
                real,
                body: Body::Tensor(parts),
            }),
        })
    }

    pub fn label(&self) -> &str {
        &self.node.label
    }

    /// Work width, including any LCU ancillas but not the Hadamard-test ancilla.
    pub fn width(&self) -> usize {
        self.node.width
    }

    pub fn prep(&self) -> &Circuit {
        &self.node.prep
    }

    pub fn rescale(&self) -> f64 {
        self.node.rescale
    }

    pub fn block_value_is_real(&self) -> bool {
        self.node.real
    }

    /// `(terms, padded terms)` for an LCU node, `None` otherwise.
    pub fn lcu_terms(&self) -> Option<(usize, usize)> {
        match &self.node.body {
            Body::Lcu { units, padded, .. } => Some((units.len(), *padded)),
            _ => None,
        }
    }

    /// Direct sub-blocks (LCU units or tensor factors).
    pub fn children(&self) -> &[BlockCircuit] {
        match &self.node.body {
            Body::Gates { .. } => &[],
            Body::Tensor(parts) => parts,
            Body::Lcu { units, .. } => units,
        }
    }

    /// Bound on `|value - intended value|` implied by the leaf tolerances: errors
    /// add across tensor factors (all block values have modulus at most 1), average
    /// across LCU units, and are multiplied by the rescale at readout.
    pub fn tol_agg(&self) -> f64 {
        self.block_tol() * self.rescale()
    }

    fn block_tol(&self) -> f64 {
        match &self.node.body {
            Body::Gates { tol, .. } => *tol,
            Body::Tensor(parts) => parts.iter().map(|p| p.block_tol()).sum(),
            Body::Lcu { units, padded, .. } => units.iter().map(|u| u.block_tol()).sum::<f64>() / *padded as f64,
        }
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.node) as usize
    }

    /// Streams the gates of `U` with every qubit index shifted by `offset` and
    /// `controls` added to every gate.
    pub fn for_each_gate(
        &self,
        offset: usize,
        controls: &[usize],
        f: &mut dyn FnMut(Gate) -> Result<()>,
    ) -> Result<()> {
        let mut ctl = controls.to_vec();
        emit(self, offset, &mut ctl, f)
    }

    /// The full gate list of `U` on `width()` qubits.
    pub fn circuit(&self) -> Result<Circuit> {
        let mut c = Circuit::new(self.width(), self.label());
        self.for_each_gate(0, &[], &mut |g| {
            c.gates.push(g);
            Ok(())
        })?;
        Ok(c)
    }

    /// Native resource tally of `U`; a multi-controlled gate counts once.
    pub fn resources(&self) -> Result<ResourceCount> {
        let mut t = ResourceTally::new(self.width());
        self.for_each_gate(0, &[], &mut |g| {
            if g.is_trainable() {
                t.add_trainable(1);
            }
            t.add(&g);
            Ok(())
        })?;
        Ok(t.finish())
    }

    /// Resource tally after lowering every multi-controlled gate.
    pub fn resources_lowered(&self) -> Result<ResourceCount> {
        resource_count(&self.circuit()?, true)
    }

    /// Serialized gate list of `U`, in the format of [`Circuit::to_text`].
    pub fn to_text(&self) -> Result<String> {
        let mut s = String::new();
        let _ = writeln!(s, "# pqc circuit v1");
        let _ = writeln!(s, "width {}", self.width());
        let _ = writeln!(s, "label {}", self.label());
        self.for_each_gate(0, &[], &mut |g| {
            let _ = writeln!(s, "{}", gate_line(&g));
            Ok(())
        })?;
        Ok(s)
    }

    /// Hadamard-test circuit on `width() + 1` qubits reading `part` of the block value.
    pub fn hadamard_circuit(&self, part: Part) -> Result<Circuit> {
        hadamard_test_circuit(&self.circuit()?, self.prep(), part)
    }

    /// Exact block value by composition: leaves are simulated on their own
    /// registers, tensor nodes multiply and LCU nodes average.
    pub fn block_value(&self, x: &[f64]) -> Result<C64> {
        self.block_value_memo(x, &mut Memo::new())
    }

    /// Exact block value from full statevector simulations of the Hadamard test.
    pub fn block_value_statevector(&self, x: &[f64]) -> Result<C64> {
        let re = self.hadamard_expectation(x, Part::Real)?;
        let im = if self.block_value_is_real() {
            0.0
        } else {
            self.hadamard_expectation(x, Part::Imaginary)?
        };
        Ok(C64::new(re, im))
    }

    /// `<Z_0>` after the Hadamard test of `part`, simulated gate by gate.
    pub fn hadamard_expectation(&self, x: &[f64], part: Part) -> Result<f64> {
        Ok(expectation_z0(&self.hadamard_state(x, part)?))
    }

    fn hadamard_state(&self, x: &[f64], part: Part) -> Result<Statevector> {
        let w = self.width() + 1;
        if w > MAX_WIDTH {
            return Err(PqcError::WidthLimit {
                width: w,
                limit: MAX_WIDTH,
            });
        }
        let mut s = Statevector::zero(w)?;
        for g in &self.prep().gates {
            s.apply(&g.shifted(1), None)?;
        }
        s.apply(&Gate::single(Op::H, 0), None)?;
        if part == Part::Imaginary {
            s.apply(&Gate::single(Op::Rz(Angle::Fixed(-FRAC_PI_2)), 0), None)?;
        }
        self.for_each_gate(1, &[0], &mut |g| s.apply(&g, Some(x)))?;
        s.apply(&Gate::single(Op::H, 0), None)?;
        Ok(s)
    }

    /// Shot-sampled Hadamard test of `part` at `x`; deterministic for a seed.
    pub fn sample(&self, x: &[f64], part: Part, shots: u64, seed: u64) -> Result<ShotEstimate> {
        sample_state(&self.hadamard_state(x, part)?, shots, seed)
    }

    /// Represented value `rescale * block value`.
    pub fn value(&self, x: &[f64]) -> Result<C64> {
        Ok(self.block_value(x)? * self.rescale())
    }

    /// Real part of [`value`](Self::value).
    pub fn real_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value(x)?.re)
    }

    /// Represented values at many points. Leaf results are shared between points
    /// that agree on the coordinates a leaf reads.
    pub fn values(&self, xs: &[Vec<f64>]) -> Result<Vec<C64>> {
        let chunk = (xs.len() / (4 * rayon::current_num_threads())).max(16);
        let parts: Vec<Result<Vec<C64>>> = xs
            .par_chunks(chunk)
            .map(|pts| {
                let mut memo = Memo::new();
                pts.iter()
                    .map(|x| Ok(self.block_value_memo(x, &mut memo)? * self.rescale()))
                    .collect()
            })
            .collect();
        let mut out = Vec::with_capacity(xs.len());
        for p in parts {
            out.extend(p?);
        }
        Ok(out)
    }

    fn block_value_memo(&self, x: &[f64], memo: &mut Memo) -> Result<C64> {
        match &self.node.body {
            Body::Gates { circuit, coords, .. } => {
                let bits = coords
                    .iter()
                    .map(|&c| x.get(c).copied().unwrap_or(f64::NAN).to_bits())
                    .collect();
                let key = (self.key(), bits);
                if let Some(v) = memo.get(&key) {
                    return Ok(*v);
                }
                let psi = prep_state(self)?;
                let phi = run_with_input(circuit, &psi, Some(x))?;
                let v = psi.inner(&phi);
                memo.insert(key, v);
                Ok(v)
            }
            Body::Tensor(parts) => {
                let mut v = C64::new(1.0, 0.0);
                for p in parts {
                    v *= p.block_value_memo(x, memo)?;
                }
                Ok(v)
            }
            Body::Lcu { units, padded, pad } => {
                let mut sum = C64::new(0.0, 0.0);
                for u in units {
                    sum += u.block_value_memo(x, memo)?;
                }
                if let Some(g) = pad {
                    let key = (self.key(), Vec::new());
                    let pv = match memo.get(&key) {
                        Some(v) => *v,
                        None => {
                            let v = pad_value(&units[0], g)?;
                            memo.insert(key, v);
                            v
                        }
                    };
                    sum += pv * (*padded - units.len()) as f64;
                }
                Ok(sum / *padded as f64)
            }
        }
    }
}

/// Same circuit and preparation with the rescale multiplied by `m >= 1`.
pub(crate) fn with_extra_rescale(b: BlockCircuit, m: f64) -> Result<BlockCircuit> {
    let n = &b.node;
    let rescale = n.rescale * m;
    check_rescale(rescale)?;
    Ok(BlockCircuit {
        node: Arc::new(Node {
            label: n.label.clone(),
            width: n.width,
            prep: n.prep.clone(),
            rescale,
            real: n.real,
            body: n.body.clone(),
        }),
    })
}

fn check_rescale(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 1.0) {
        return Err(PqcError::InvalidInput(format!(
            "rescale factor {r} must be finite and at least 1"
        )));
    }
    Ok(())
}

fn emit(
    b: &BlockCircuit,
    offset: usize,
    controls: &mut Vec<usize>,
    f: &mut dyn FnMut(Gate) -> Result<()>,
) -> Result<()> {
    match &b.node.body {
        Body::Gates { circuit, .. } => {
            for g in &circuit.gates {
                let mut c = controls.clone();
                c.extend(g.controls.iter().map(|q| q + offset));
                f(Gate {
                    op: g.op,
                    target: g.target + offset,
                    controls: c,
                })?;
            }
            Ok(())
        }
        Body::Tensor(parts) => {
            let mut o = offset;
            for p in parts {
                emit(p, o, controls, f)?;
                o += p.width();
            }
            Ok(())
        }
        Body::Lcu { units, padded, pad } => {
            let a = padded.trailing_zeros() as usize;
            let base = controls.len();
            controls.extend(offset..offset + a);
            // Ancilla bit i (most significant first) is flipped while the selected
            // index has a 0 there, so all-ones controls pick out that index. The
            // flips need no outer controls: they cancel whenever the body is idle.
            let mask = padded - 1;
            let mut flipped = 0usize;
            let mut retarget = |want: usize, f: &mut dyn FnMut(Gate) -> Result<()>| -> Result<()> {
                let diff = want ^ flipped;
                for i in 0..a {
                    if diff >> (a - 1 - i) & 1 == 1 {
                        f(Gate::single(Op::X, offset + i))?;
                    }
                }
                flipped = want;
                Ok(())
            };
            for (j, u) in units.iter().enumerate() {
                retarget(!j & mask, f)?;
                emit(u, offset + a, controls, f)?;
            }
            if let Some(g) = pad {
                for j in units.len()..*padded {
                    retarget(!j & mask, f)?;
                    let mut c = controls.clone();
                    c.extend(g.controls.iter().map(|q| q + offset + a));
                    f(Gate {
                        op: g.op,
                        target: g.target + offset + a,
                        controls: c,
                    })?;
                }
            }
            retarget(0, f)?;
            controls.truncate(base);
            Ok(())
        }
    }
}

fn prep_state(unit: &BlockCircuit) -> Result<Statevector> {
    run_with_input(unit.prep(), &Statevector::zero(unit.width())?, None)
}

fn pad_value(unit: &BlockCircuit, pad: &Gate) -> Result<C64> {
    let psi = prep_state(unit)?;
    let mut phi = psi.clone();
    phi.apply(pad, None)?;
    Ok(psi.inner(&phi))
}

/// A single-qubit Pauli on the unit register whose expectation in the unit's
/// prepared state vanishes.
fn find_pad(unit: &BlockCircuit) -> Result<Gate> {
    let psi = prep_state(unit)?;
    for q in 0..unit.width() {
        for op in [Op::Z, Op::X] {
            let g = Gate::single(op, q);
            let mut phi = psi.clone();
            phi.apply(&g, None)?;
            if psi.inner(&phi).norm() < 1e-12 {
                return Ok(g);
            }
        }
    }
    Err(PqcError::Unsupported(format!(
        "no single-qubit Z or X pad has zero expectation in the prepared state of {}",
        unit.label()
    )))
}

/// Uniform linear combination of `units`. The term count is padded to a power of
/// two with gates of zero block value; the block value is the mean over the padded
/// count and the rescale is the padded count times the common unit rescale.
pub fn lcu_combine(units: Vec<BlockCircuit>, label: impl Into<String>) -> Result<BlockCircuit> {
    let first = units
        .first()
        .ok_or_else(|| PqcError::InvalidInput("LCU of zero units".into()))?;
    let (w, r) = (first.width(), first.rescale());
    for u in &units[1..] {
        if u.width() != w {
            return Err(PqcError::DimensionMismatch {
                expected: w,
                found: u.width(),
            });
        }
        if u.prep().gates != first.prep().gates {
            return Err(PqcError::InvalidInput(format!(
                "unit {} has a different state preparation than {}",
                u.label(),
                first.label()
            )));
        }
        if (u.rescale() - r).abs() > 1e-12 * r {
            return Err(PqcError::InvalidInput(format!(
                "mixed rescale factors {} and {r} in one LCU",
                u.rescale()
            )));
        }
    }
    let padded = units.len().next_power_of_two();
    if padded == 1 {
        return Ok(units.into_iter().next().unwrap());
    }
    let a = padded.trailing_zeros() as usize;
    let pad = if padded > units.len() {
        Some(find_pad(first)?)
    } else {
        None
    };
    let width = w + a;
    let mut prep = Circuit::new(width, "prep");
    for q in 0..a {
        prep.h(q)?;
    }
    prep.append_shifted(first.prep(), a)?;
    let real = units.iter().all(|u| u.block_value_is_real());
    let rescale = r * padded as f64;
    Ok(BlockCircuit {
        node: Arc::new(Node {
            label: label.into(),
            width,
            prep,
            rescale,
            real,
            body: Body::Lcu { units, padded, pad },
        }),
    })
}
