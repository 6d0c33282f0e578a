//! Amplitude estimation: the E1 encoder, the Grover operator, the phase
//! estimation circuit and the classical read-out.

mod encoder;
mod estimation;
mod grover;
mod mc;

pub use encoder::{encode_expectation, EncodingMode, ExpectationEncoder, DEFAULT_C_APPROX};
pub use estimation::{
    ae_circuit, ae_outcomes, ae_state, estimate, expected_value_from_mu, map_outcome, mu_from_outcome, run_ae,
    run_ae_sampled, AeResult,
};
pub use grover::{grover_operator, reflection_zero, v_operator};
pub use mc::{mc_baseline, McEstimate};
