use std::f64::consts::FRAC_PI_2;

use crate::distributions::{loader_circuit, DiscreteDistribution, LoaderBackend};
use crate::error::{Error, Result};
use crate::sim::{Circuit, Control, GateOp};

pub const DEFAULT_C_APPROX: f64 = 0.25;

/// How grid index `k` becomes the ancilla rotation angle `ϑ̂_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EncodingMode {
    /// `ϑ̂_k/2 = (k/2^r − 1/2)·c + π/4`, so `sin²(ϑ̂_k/2) ≈ 1/2 + (k/2^r − 1/2)·c`.
    Linear { c_approx: f64 },
    /// `ϑ̂_k = 2·arcsin √(k/(2^r − 1))`, so the ancilla probability is the
    /// normalized grid value exactly.
    Exact,
}

impl EncodingMode {
    pub fn linear() -> Self {
        EncodingMode::Linear { c_approx: DEFAULT_C_APPROX }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EncodingMode::Linear { .. } => "linear",
            EncodingMode::Exact => "exact",
        }
    }

    pub fn c_approx(&self) -> Option<f64> {
        match self {
            EncodingMode::Linear { c_approx } => Some(*c_approx),
            EncodingMode::Exact => None,
        }
    }

    /// `ϑ̂_k` for grid index `k` of a resolution-`r` register.
    pub fn angle(&self, k: usize, r: usize) -> f64 {
        let n = (1u64 << r) as f64;
        match *self {
            EncodingMode::Linear { c_approx } => 2.0 * ((k as f64 / n - 0.5) * c_approx) + FRAC_PI_2,
            EncodingMode::Exact => 2.0 * (k as f64 / (n - 1.0)).sqrt().min(1.0).asin(),
        }
    }
}

/// The operator `F = E1·(A ⊗ I)` on `r + 1` qubits; qubit `r` is the ancilla.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationEncoder {
    circuit: Circuit,
    dist: DiscreteDistribution,
    mode: EncodingMode,
}

impl ExpectationEncoder {
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn dist(&self) -> &DiscreteDistribution {
        &self.dist
    }

    pub fn mode(&self) -> EncodingMode {
        self.mode
    }

    pub fn resolution(&self) -> usize {
        self.dist.resolution()
    }

    pub fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    pub fn ancilla(&self) -> usize {
        self.dist.resolution()
    }

    /// Encoder whose ancilla-one probability is exactly `p`: a one-qubit
    /// distribution `(1 − p, p)` on the unit grid in exact mode.
    pub fn for_probability(p: f64, backend: LoaderBackend) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
        }
        let dist = DiscreteDistribution::on_unit_grid(1, vec![1.0 - p, p])?;
        let loader = loader_circuit(&dist, backend)?;
        encode_expectation(&loader, &dist, EncodingMode::Exact)
    }
}

/// Append the E1 rotations for `dist` after `loader`.
pub fn encode_expectation(
    loader: &Circuit,
    dist: &DiscreteDistribution,
    mode: EncodingMode,
) -> Result<ExpectationEncoder> {
    let r = dist.resolution();
    if loader.num_qubits() != r {
        return Err(Error::DimensionMismatch { expected: r, actual: loader.num_qubits() });
    }
    if let EncodingMode::Linear { c_approx } = mode {
        if !(c_approx > 0.0 && c_approx <= 0.5) {
            return Err(Error::InvalidArgument(format!("c_approx {c_approx} outside (0, 0.5]")));
        }
    }
    crate::sim::check_qubit_limit(r + 1)?;
    let mut c = Circuit::new(r + 1);
    let qubits: Vec<usize> = (0..r).collect();
    c.append_mapped(loader, &qubits, &[])?;
    match mode {
        EncodingMode::Linear { c_approx } => {
            c.push(GateOp::ry(r, FRAC_PI_2 - c_approx))?;
            let n = (1u64 << r) as f64;
            for i in 0..r {
                let angle = 2.0 * c_approx * (1u64 << i) as f64 / n;
                c.push(GateOp::ry(r, angle).with_controls([Control::one(i)]))?;
            }
        }
        EncodingMode::Exact => {
            let angles = (0..1usize << r).map(|k| mode.angle(k, r)).collect();
            c.push(GateOp::multiplexed_ry(r, &qubits, angles))?;
        }
    }
    Ok(ExpectationEncoder { circuit: c, dist: dist.clone(), mode })
}
