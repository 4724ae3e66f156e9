//! Exact statevector simulation, Hadamard-test readout, shot sampling,
//! multi-controlled gate lowering and resource accounting.

mod circuit;
mod decompose;
pub mod dense;
mod gate;
mod hadamard;
mod resources;
mod state;

pub(crate) use circuit::gate_line;
pub use circuit::Circuit;
pub use decompose::{decompose_mcu, lower_circuit};
pub use gate::{Angle, Encoding, Gate, GateKind, Op};
pub use hadamard::{
    hadamard_test, hadamard_test_at, hadamard_test_circuit, sample_shots, sample_state, Part, ShotEstimate,
};
pub use resources::{resource_count, ResourceCount, ResourceTally};
pub use state::{expectation_z0, run, run_with_input, Statevector, MAX_WIDTH};
