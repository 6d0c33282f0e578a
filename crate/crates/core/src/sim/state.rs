//! Dense state vectors.
//!
//! Qubit 0 is the least significant bit of the basis index: the amplitude of
//! `|q_{n-1} … q_1 q_0⟩` lives at index `Σ q_j 2^j`.

use super::gate::{Gate, GateOp, Polarity, C64};
use crate::error::{Error, Result};

/// Default ceiling on the number of simulated qubits (2^26 amplitudes, 1 GiB).
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Environment variable that overrides [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "QINSURE_MAX_QUBITS";

/// Current qubit limit, honouring the environment override.
pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

pub(crate) fn check_qubit_limit(requested: usize) -> Result<()> {
    let limit = max_qubits();
    if requested > limit {
        return Err(Error::QubitLimitExceeded { requested, limit });
    }
    Ok(())
}

const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_limit(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, size: dim });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Wrap explicit amplitudes. The length must be a power of two and the
    /// vector must be normalized to within 1e-9; it is not renormalized.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude vector length {} is not a power of two",
                amps.len()
            )));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        check_qubit_limit(num_qubits)?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, actual: other.num_qubits });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`; insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Append `extra` qubits in `|0⟩` above the existing ones.
    pub fn extended(&self, extra: usize) -> Result<StateVector> {
        let n = self.num_qubits + extra;
        check_qubit_limit(n)?;
        let mut amps = self.amps.clone();
        amps.resize(1 << n, C64::new(0.0, 0.0));
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        let (cmask, cval) = control_mask(op);
        match &op.gate {
            Gate::GlobalPhase(phi) => {
                let f = C64::from_polar(1.0, *phi);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & cmask == cval {
                        *a *= f;
                    }
                }
            }
            Gate::Swap => {
                let (a, b) = (1usize << op.targets[0], 1usize << op.targets[1]);
                for i in 0..self.amps.len() {
                    if i & a != 0 && i & b == 0 && i & cmask == cval {
                        self.amps.swap(i, i ^ a ^ b);
                    }
                }
            }
            Gate::MultiplexedRy(angles) => {
                let t = op.targets[0];
                let selects = &op.targets[1..];
                let mats: Vec<_> = angles.iter().map(|&th| super::gate::ry_matrix(th)).collect();
                self.for_each_pair(t, cmask, cval, |i, amps| {
                    let sel = selects
                        .iter()
                        .enumerate()
                        .fold(0usize, |acc, (j, &q)| acc | (((i >> q) & 1) << j));
                    apply_pair(amps, i, i | (1 << t), &mats[sel]);
                });
            }
            Gate::Matrix(m) => self.apply_matrix(m, &op.targets, cmask, cval),
            g => {
                let m = g.matrix_2x2().expect("single-qubit gate");
                let t = op.targets[0];
                self.for_each_pair(t, cmask, cval, |i, amps| apply_pair(amps, i, i | (1 << t), &m));
            }
        }
        Ok(())
    }

    /// Visit every index with target bit clear and the control pattern met.
    fn for_each_pair(&mut self, t: usize, cmask: usize, cval: usize, mut f: impl FnMut(usize, &mut [C64])) {
        let low = (1usize << t) - 1;
        let half = self.amps.len() >> 1;
        for x in 0..half {
            let i = ((x & !low) << 1) | (x & low);
            if i & cmask == cval {
                f(i, &mut self.amps);
            }
        }
    }

    fn apply_matrix(&mut self, m: &super::gate::MatrixGate, targets: &[usize], cmask: usize, cval: usize) {
        let k = targets.len();
        let sub = 1usize << k;
        let tmask: usize = targets.iter().map(|&t| 1usize << t).sum();
        let offsets: Vec<usize> = (0..sub)
            .map(|l| targets.iter().enumerate().map(|(j, &t)| ((l >> j) & 1) << t).sum())
            .collect();
        let mut buf = vec![C64::new(0.0, 0.0); sub];
        for base in 0..self.amps.len() {
            if base & tmask != 0 || base & cmask != cval {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                buf[l] = self.amps[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (col, v) in buf.iter().enumerate() {
                    acc += m.entry(row, col) * v;
                }
                self.amps[base | off] = acc;
            }
        }
    }
}

fn control_mask(op: &GateOp) -> (usize, usize) {
    op.controls.iter().fold((0, 0), |(mask, val), c| {
        let bit = 1usize << c.qubit;
        match c.polarity {
            Polarity::One => (mask | bit, val | bit),
            Polarity::Zero => (mask | bit, val),
        }
    })
}

#[inline]
fn apply_pair(amps: &mut [C64], i0: usize, i1: usize, m: &[[C64; 2]; 2]) {
    let (a, b) = (amps[i0], amps[i1]);
    amps[i0] = m[0][0] * a + m[0][1] * b;
    amps[i1] = m[1][0] * a + m[1][1] * b;
}
