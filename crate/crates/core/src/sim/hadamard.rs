use super::circuit::Circuit;
use super::gate::Angle;
use super::state::{expectation_z0, run_with_input, Statevector};
use crate::error::{PqcError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Which part of the block value a Hadamard test reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    Real,
    Imaginary,
}

/// Hadamard-test circuit on `w + 1` qubits: a fresh ancilla becomes qubit 0, the
/// work register is prepared by `prep`, and every gate of `u` gains the ancilla as
/// an extra control. `<Z_0>` afterwards equals `Re <psi|U|psi>` (or `Im` when an
/// `R_Z(-pi/2)` phase follows the first Hadamard).
pub fn hadamard_test_circuit(u: &Circuit, prep: &Circuit, part: Part) -> Result<Circuit> {
    if u.width != prep.width {
        return Err(PqcError::DimensionMismatch {
            expected: u.width,
            found: prep.width,
        });
    }
    let mut c = Circuit::new(u.width + 1, format!("hadamard-test({})", u.label));
    c.append_shifted(prep, 1)?;
    c.h(0)?;
    if part == Part::Imaginary {
        c.rz(0, Angle::Fixed(-FRAC_PI_2))?;
    }
    c.gates
        .extend(u.gates.iter().map(|g| g.shifted(1).with_extra_control(0)));
    c.h(0)?;
    Ok(c)
}

/// Exact Hadamard-test readout for circuits whose angles are bound.
pub fn hadamard_test(u: &Circuit, prep: &Circuit, part: Part) -> Result<f64> {
    hadamard_test_at(u, prep, part, None)
}

/// Exact Hadamard-test readout, substituting `x` into encoded angles.
pub fn hadamard_test_at(u: &Circuit, prep: &Circuit, part: Part, x: Option<&[f64]>) -> Result<f64> {
    let c = hadamard_test_circuit(u, prep, part)?;
    let s = run_with_input(&c, &Statevector::zero(c.width)?, x)?;
    Ok(expectation_z0(&s))
}

/// Monte-Carlo estimate of `<Z_0>` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub shots: u64,
}

/// Samples qubit-0 outcomes of `c` run from `|0...0>`; deterministic for a seed.
pub fn sample_shots(c: &Circuit, shots: u64, seed: u64) -> Result<ShotEstimate> {
    let s = run_with_input(c, &Statevector::zero(c.width)?, None)?;
    sample_state(&s, shots, seed)
}

/// Shot sampling from an already simulated state.
pub fn sample_state(s: &Statevector, shots: u64, seed: u64) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(PqcError::InvalidInput("shots must be at least 1".into()));
    }
    let p0 = s.prob_zero(0).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zeros = (0..shots).filter(|_| rng.gen::<f64>() < p0).count() as f64;
    let n = shots as f64;
    let mean = (2.0 * zeros - n) / n;
    // Outcomes are +-1, so the sample variance has a closed form.
    let var = if shots > 1 {
        (n / (n - 1.0)) * (1.0 - mean * mean)
    } else {
        0.0
    };
    Ok(ShotEstimate {
        estimate: mean,
        stderr: (var.max(0.0) / n).sqrt(),
        shots,
    })
}
