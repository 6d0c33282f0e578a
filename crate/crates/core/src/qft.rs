//! Quantum Fourier transform and its inverse.
//!
//! `qft |l⟩ = 2^{-m/2} Σ_k e^{2πi·lk/2^m} |k⟩`. Qubit `m − 1` carries the most
//! significant binary digit `x_1` of `x = 0.x_1 x_2 … x_m`.

pub use crate::sim::PhaseRotation;
use crate::error::{Error, Result};
use crate::sim::{Circuit, GateOp};

fn check(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("QFT needs at least one qubit".into()));
    }
    crate::sim::check_qubit_limit(m)
}

/// Forward transform: per digit a Hadamard then controlled `R_j` from every
/// less significant digit, followed by the order reversal.
pub fn qft_circuit(m: usize) -> Result<Circuit> {
    check(m)?;
    let mut c = Circuit::new(m);
    for a in (0..m).rev() {
        c.push(GateOp::h(a))?;
        for b in (0..a).rev() {
            c.push(GateOp::cphase(b, a, PhaseRotation::new((a - b + 1) as u32)))?;
        }
    }
    for i in 0..m / 2 {
        c.push(GateOp::swap(i, m - 1 - i))?;
    }
    Ok(c)
}

/// Inverse transform: reverse the qubit order, then for each digit from the
/// least significant upward apply controlled `R_j^{-1}` from the digits already
/// processed followed by a Hadamard.
pub fn iqft_circuit(m: usize) -> Result<Circuit> {
    check(m)?;
    let mut c = Circuit::new(m);
    for i in (0..m / 2).rev() {
        c.push(GateOp::swap(i, m - 1 - i))?;
    }
    for a in 0..m {
        for b in 0..a {
            c.push(GateOp::cphase(b, a, PhaseRotation::inverse((a - b + 1) as u32)))?;
        }
        c.push(GateOp::h(a))?;
    }
    Ok(c)
}
