//! Quantum amplitude estimation for insurance payoffs on a state-vector
//! simulator.
//!
//! Qubit 0 is the least significant bit of every basis index. Global phase is
//! never observable: state comparisons use the fidelity `|⟨ψ|φ⟩|²`.

pub mod ae;
pub mod distributions;
pub mod error;
pub mod insurance;
pub mod qft;
pub mod sim;
pub mod transpile;

pub use error::{Error, Result};

/// The guide's snippets, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/simulator.md")]
    mod simulator {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/qft.md")]
    mod qft {}
    #[doc = include_str!("../../../book/src/amplitude-estimation.md")]
    mod amplitude_estimation {}
    #[doc = include_str!("../../../book/src/insurance.md")]
    mod insurance {}
    #[doc = include_str!("../../../book/src/transpile.md")]
    mod transpile {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
