//! Discrete distributions on a `2^r`-point grid and the circuits that load
//! them into amplitudes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate, GateOp, MatrixGate};

const SUM_TOL: f64 = 1e-12;
const MARGINAL_TOL: f64 = 1e-10;
/// Probabilities below this are treated as exactly zero when loading.
pub const CLAMP: f64 = 1e-15;
/// Largest register the dense matrix backend will build.
pub const MATRIX_BACKEND_MAX_QUBITS: usize = 10;

/// Probability vector over grid points `z_k = z_min + (z_max − z_min)·k/(2^r − 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct DiscreteDistribution {
    r: usize,
    probabilities: Vec<f64>,
    z_min: f64,
    z_max: f64,
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    r: usize,
    z_min: f64,
    z_max: f64,
    probabilities: Vec<f64>,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        DiscreteDistribution::new(raw.r, raw.probabilities, raw.z_min, raw.z_max)
    }
}

impl From<DiscreteDistribution> for RawDistribution {
    fn from(d: DiscreteDistribution) -> Self {
        RawDistribution { r: d.r, z_min: d.z_min, z_max: d.z_max, probabilities: d.probabilities }
    }
}

impl DiscreteDistribution {
    pub fn new(r: usize, probabilities: Vec<f64>, z_min: f64, z_max: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidDistribution("resolution must be at least 1".into()));
        }
        if r >= usize::BITS as usize || probabilities.len() != 1usize << r {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities for resolution {r}",
                probabilities.len()
            )));
        }
        validate_probabilities(&probabilities)?;
        if !(z_min.is_finite() && z_max.is_finite()) || z_min > z_max {
            return Err(Error::InvalidDistribution(format!("bad grid [{z_min}, {z_max}]")));
        }
        Ok(DiscreteDistribution { r, probabilities, z_min, z_max })
    }

    /// Grid on `[0, 1]`.
    pub fn on_unit_grid(r: usize, probabilities: Vec<f64>) -> Result<Self> {
        Self::new(r, probabilities, 0.0, 1.0)
    }

    /// Replace the grid bounds.
    pub fn with_grid(self, z_min: f64, z_max: f64) -> Result<Self> {
        Self::new(self.r, self.probabilities, z_min, z_max)
    }

    pub fn resolution(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, k: usize) -> f64 {
        self.probabilities[k]
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    /// Spacing between neighbouring grid points.
    pub fn step(&self) -> f64 {
        (self.z_max - self.z_min) / ((1u64 << self.r) - 1) as f64
    }

    pub fn grid_value(&self, k: usize) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::IndexOutOfRange { index: k, size: self.len() });
        }
        Ok(self.z_min + self.step() * k as f64)
    }

    pub fn grid_values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.z_min + self.step() * k as f64).collect()
    }

    /// `Σ a_k z_k`.
    pub fn expected_value(&self) -> f64 {
        self.grid_values().iter().zip(&self.probabilities).map(|(z, a)| z * a).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.expected_value();
        self.grid_values().iter().zip(&self.probabilities).map(|(z, a)| a * (z - mean).powi(2)).sum()
    }

    /// Target amplitudes `√a_k`, with tiny probabilities clamped to zero.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.probabilities.iter().map(|&a| if a < CLAMP { 0.0 } else { a.sqrt() }).collect()
    }
}

/// Free-function form of [`DiscreteDistribution::grid_value`].
pub fn grid_value(k: usize, dist: &DiscreteDistribution) -> Result<f64> {
    dist.grid_value(k)
}

fn validate_probabilities(p: &[f64]) -> Result<()> {
    if let Some((k, a)) = p.iter().enumerate().find(|(_, a)| !a.is_finite() || **a < 0.0) {
        return Err(Error::InvalidDistribution(format!("probability a_{k} = {a} is negative")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
    }
    Ok(())
}

/// Uniform law on `k = 1 … 2^r − 1` with `a_0 = 0`, on the unit grid.
pub fn uniform_excluding_zero(r: usize) -> Result<DiscreteDistribution> {
    if r == 0 {
        return Err(Error::InvalidDistribution("resolution must be at least 1".into()));
    }
    let n = 1usize << r;
    let w = 1.0 / (n - 1) as f64;
    let mut p = vec![w; n];
    p[0] = 0.0;
    DiscreteDistribution::on_unit_grid(r, p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoaderBackend {
    /// Dense unitary gate whose first column is `√a`; realized by the tree.
    Matrix,
    /// Binary tree of multiplexed RY rotations.
    #[default]
    RyTree,
}

/// Circuit on `r` qubits mapping `|0⟩` to `Σ √a_k |k⟩`.
pub fn loader_circuit(dist: &DiscreteDistribution, backend: LoaderBackend) -> Result<Circuit> {
    amplitude_loader(dist.resolution(), &dist.amplitudes(), backend)
}

fn amplitude_loader(r: usize, amps: &[f64], backend: LoaderBackend) -> Result<Circuit> {
    let tree = ry_tree(r, amps)?;
    match backend {
        LoaderBackend::RyTree => Ok(tree),
        LoaderBackend::Matrix => {
            if r > MATRIX_BACKEND_MAX_QUBITS {
                return Err(Error::InvalidArgument(format!(
                    "matrix loader limited to {MATRIX_BACKEND_MAX_QUBITS} qubits, got {r}"
                )));
            }
            let gate = MatrixGate::new(r, tree.unitary()?)?.with_realization("ry-tree", tree)?;
            let targets = (0..r).collect();
            Circuit::from_ops(r, [GateOp::new(Gate::Matrix(Arc::new(gate)), targets)])
        }
    }
}

/// Grover–Rudolph style tree: the most significant qubit is rotated first,
/// each lower qubit by a multiplexed RY selected by all higher qubits.
fn ry_tree(r: usize, amps: &[f64]) -> Result<Circuit> {
    let mut c = Circuit::new(r);
    let probs: Vec<f64> = amps.iter().map(|a| a * a).collect();
    for level in 0..r {
        let t = r - 1 - level;
        let prefixes = 1usize << level;
        let block = 1usize << t;
        let mut angles = Vec::with_capacity(prefixes);
        for prefix in 0..prefixes {
            let start = prefix << (t + 1);
            let m0: f64 = probs[start..start + block].iter().sum();
            let m1: f64 = probs[start + block..start + 2 * block].iter().sum();
            angles.push(if m0 + m1 == 0.0 { 0.0 } else { 2.0 * m1.sqrt().atan2(m0.sqrt()) });
        }
        if angles.iter().all(|&a| a == 0.0) {
            continue;
        }
        let selects: Vec<usize> = (t + 1..r).collect();
        if selects.is_empty() {
            c.push(GateOp::ry(t, angles[0]))?;
        } else {
            c.push(GateOp::multiplexed_ry(t, &selects, angles))?;
        }
    }
    Ok(c)
}

/// Stochastic process `Z_{t_1} … Z_{t_n}` on a common grid resolution.
/// Step `i` occupies qubits `i·r̂ … (i+1)·r̂ − 1`; trajectory index
/// `Σ k_i 2^{i r̂}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessDistribution {
    steps: Vec<DiscreteDistribution>,
    joint: Option<Vec<f64>>,
}

impl ProcessDistribution {
    pub fn independent(steps: Vec<DiscreteDistribution>) -> Result<Self> {
        Self::new(steps, None)
    }

    pub fn iid(n: usize, dist: DiscreteDistribution) -> Result<Self> {
        Self::independent(vec![dist; n])
    }

    /// Joint trajectory probabilities must marginalize to the per-step laws.
    pub fn new(steps: Vec<DiscreteDistribution>, joint: Option<Vec<f64>>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidDistribution("process needs at least one step".into()));
        }
        let r = steps[0].resolution();
        if let Some(bad) = steps.iter().find(|s| s.resolution() != r) {
            return Err(Error::InvalidDistribution(format!(
                "resolution mismatch: {} vs {r}",
                bad.resolution()
            )));
        }
        let proc = ProcessDistribution { steps, joint: None };
        if let Some(joint) = joint {
            let total = proc.num_qubits();
            if total >= usize::BITS as usize || joint.len() != 1usize << total {
                return Err(Error::InvalidDistribution(format!(
                    "joint law has {} entries, expected 2^{total}",
                    joint.len()
                )));
            }
            validate_probabilities(&joint)?;
            for (i, step) in proc.steps.iter().enumerate() {
                let m = marginal_of(&joint, r, i);
                let worst = m.iter().zip(step.probabilities()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if worst > MARGINAL_TOL {
                    return Err(Error::InvalidDistribution(format!(
                        "joint law does not marginalize to step {i} (deviation {worst:e})"
                    )));
                }
            }
            return Ok(ProcessDistribution { joint: Some(joint), ..proc });
        }
        Ok(proc)
    }

    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn resolution(&self) -> usize {
        self.steps[0].resolution()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_steps() * self.resolution()
    }

    pub fn steps(&self) -> &[DiscreteDistribution] {
        &self.steps
    }

    pub fn step(&self, i: usize) -> &DiscreteDistribution {
        &self.steps[i]
    }

    pub fn joint(&self) -> Option<&[f64]> {
        self.joint.as_deref()
    }

    /// Grid indices `(k_1, …, k_n)` of a trajectory index.
    pub fn decode(&self, trajectory: usize) -> Vec<usize> {
        let r = self.resolution();
        let mask = (1usize << r) - 1;
        (0..self.num_steps()).map(|i| (trajectory >> (i * r)) & mask).collect()
    }

    pub fn trajectory_probability(&self, trajectory: usize) -> f64 {
        match &self.joint {
            Some(j) => j[trajectory],
            None => self.decode(trajectory).iter().zip(&self.steps).map(|(&k, s)| s.probability(k)).product(),
        }
    }

    pub fn num_trajectories(&self) -> usize {
        1 << self.num_qubits()
    }
}

fn marginal_of(joint: &[f64], r: usize, step: usize) -> Vec<f64> {
    let mask = (1usize << r) - 1;
    let mut m = vec![0.0; 1 << r];
    for (idx, p) in joint.iter().enumerate() {
        m[(idx >> (step * r)) & mask] += p;
    }
    m
}

/// Loader for the whole process on `n·r̂` qubits.
pub fn process_loader(proc: &ProcessDistribution, backend: LoaderBackend) -> Result<Circuit> {
    let r = proc.resolution();
    let total = proc.num_qubits();
    crate::sim::check_qubit_limit(total)?;
    match proc.joint() {
        Some(joint) => {
            let amps: Vec<f64> = joint.iter().map(|&a| if a < CLAMP { 0.0 } else { a.sqrt() }).collect();
            amplitude_loader(total, &amps, backend)
        }
        None => {
            let mut c = Circuit::new(total);
            for (i, step) in proc.steps().iter().enumerate() {
                let block: Vec<usize> = (i * r..(i + 1) * r).collect();
                c.append_mapped(&loader_circuit(step, backend)?, &block, &[])?;
            }
            Ok(c)
        }
    }
}
