//! State-vector simulation: gates, circuits, execution and measurement.

mod circuit;
mod gate;
mod measure;
mod state;

pub use circuit::{adjoint, apply_gate, run, run_from_zero, Circuit, Marker};
pub use gate::{unitarity_deviation, Control, Gate, GateOp, MatrixGate, PhaseRotation, Polarity, Realization, C64};
pub use measure::{marginal_probabilities, sample, sample_probabilities};
pub use state::{max_qubits, StateVector, DEFAULT_MAX_QUBITS, MAX_QUBITS_ENV};
pub(crate) use state::check_qubit_limit;
