use serde::Serialize;

use super::adder::{append_weighted_sum, sum_register_size};
use crate::distributions::{process_loader, LoaderBackend, ProcessDistribution};
use crate::error::{Error, Result};
use crate::sim::{marginal_probabilities, Circuit, StateVector};

/// Whole-life payoff circuit: process loader followed by a weighted adder
/// into a result register.
#[derive(Clone, Debug, PartialEq)]
pub struct WholeLifeCircuit {
    pub circuit: Circuit,
    /// Result register qubits, least significant first.
    pub sum_qubits: Vec<usize>,
    /// Real weights `w_{t_i}` as supplied.
    pub weights: Vec<f64>,
    /// `round(w_{t_i}·scale)`.
    pub int_weights: Vec<u64>,
    pub scale: u64,
    z_min: f64,
    step: f64,
}

/// Whole-life present values and the quantization bound between them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WholeLifeReport {
    pub quantum_pv: f64,
    pub classical_pv: f64,
    pub quantization_bound: f64,
    /// Law of the integer result register `S = Σ_i W_i k_i`.
    pub sum_distribution: Vec<f64>,
    pub int_weights: Vec<u64>,
    pub scale: u64,
}

pub(crate) fn common_grid(proc: &ProcessDistribution) -> Result<(f64, f64)> {
    let first = proc.step(0);
    let (lo, hi) = (first.z_min(), first.z_max());
    if proc.steps().iter().any(|s| s.z_min() != lo || s.z_max() != hi) {
        return Err(Error::InvalidDistribution("all steps must share one grid".into()));
    }
    Ok((lo, hi))
}

/// Build the whole-life circuit. Step `i`'s digit `j` carries the integer
/// weight `round(w_{t_i}·scale)·2^j`.
pub fn whole_life_circuit(proc: &ProcessDistribution, weights: &[f64], scale: u64) -> Result<WholeLifeCircuit> {
    if scale == 0 {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    if weights.len() != proc.num_steps() {
        return Err(Error::DimensionMismatch { expected: proc.num_steps(), actual: weights.len() });
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidArgument(format!("weight {w} is negative")));
    }
    let (z_min, z_max) = common_grid(proc)?;
    let r = proc.resolution();
    let int_weights: Vec<u64> = weights.iter().map(|w| (w * scale as f64).round() as u64).collect();
    let digit_weights: Vec<u64> =
        int_weights.iter().flat_map(|&w| (0..r).map(move |j| w << j)).collect();
    let max_sum = int_weights.iter().map(|w| w * ((1u64 << r) - 1)).sum();
    let s = sum_register_size(max_sum);
    let n_state = proc.num_qubits();
    crate::sim::check_qubit_limit(n_state + s)?;
    let mut circuit = Circuit::new(n_state + s);
    circuit.append(&process_loader(proc, LoaderBackend::RyTree)?)?;
    circuit.mark("load");
    let state: Vec<usize> = (0..n_state).collect();
    let sum_qubits: Vec<usize> = (n_state..n_state + s).collect();
    append_weighted_sum(&mut circuit, &state, &digit_weights, &sum_qubits)?;
    circuit.mark("sum");
    let step = (z_max - z_min) / ((1u64 << r) - 1) as f64;
    Ok(WholeLifeCircuit { circuit, sum_qubits, weights: weights.to_vec(), int_weights, scale, z_min, step })
}

impl WholeLifeCircuit {
    /// `z_min·Σw + Δ·E[S]/scale`, the PV read off the result register.
    pub fn pv_from_sum_law(&self, law: &[f64]) -> f64 {
        let mean_sum: f64 = law.iter().enumerate().map(|(s, p)| s as f64 * p).sum();
        self.z_min * self.weights.iter().sum::<f64>() + self.step * mean_sum / self.scale as f64
    }

    /// `(z_max − z_min)·Σ_i |w_i − W_i/scale|`.
    pub fn quantization_bound(&self) -> f64 {
        let span = self.step * ((1u64 << self.resolution()) - 1) as f64;
        span * self
            .weights
            .iter()
            .zip(&self.int_weights)
            .map(|(w, &wi)| (w - wi as f64 / self.scale as f64).abs())
            .sum::<f64>()
    }

    fn resolution(&self) -> usize {
        (self.circuit.num_qubits() - self.sum_qubits.len()) / self.weights.len()
    }

    pub fn report(&self, proc: &ProcessDistribution) -> Result<WholeLifeReport> {
        let state = crate::sim::run_from_zero(&self.circuit)?;
        self.report_from_state(&state, proc)
    }

    pub fn report_from_state(&self, state: &StateVector, proc: &ProcessDistribution) -> Result<WholeLifeReport> {
        let law = marginal_probabilities(state, &self.sum_qubits)?;
        Ok(WholeLifeReport {
            quantum_pv: self.pv_from_sum_law(&law),
            classical_pv: classical_whole_life_pv(proc, &self.weights),
            quantization_bound: self.quantization_bound(),
            sum_distribution: law,
            int_weights: self.int_weights.clone(),
            scale: self.scale,
        })
    }
}

/// `Σ_i w_{t_i}·E[Z_{t_i}]`.
pub fn classical_whole_life_pv(proc: &ProcessDistribution, weights: &[f64]) -> f64 {
    proc.steps().iter().zip(weights).map(|(d, w)| w * d.expected_value()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{uniform_excluding_zero, DiscreteDistribution};

    #[test]
    fn single_step_unit_weight_mirrors_register() {
        let d = DiscreteDistribution::on_unit_grid(2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let proc = ProcessDistribution::iid(1, d.clone()).unwrap();
        let wl = whole_life_circuit(&proc, &[1.0], 1).unwrap();
        let rep = wl.report(&proc).unwrap();
        for (a, b) in rep.sum_distribution.iter().zip(d.probabilities()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((rep.quantum_pv - d.expected_value()).abs() < 1e-12);
    }

    #[test]
    fn zero_scale_rejected() {
        let proc = ProcessDistribution::iid(1, uniform_excluding_zero(1).unwrap()).unwrap();
        assert!(whole_life_circuit(&proc, &[1.0], 0).is_err());
    }

    #[test]
    fn zero_mortality_gives_zero_pv() {
        let proc = ProcessDistribution::iid(2, uniform_excluding_zero(2).unwrap()).unwrap();
        let rep = whole_life_circuit(&proc, &[0.0, 0.0], 100).unwrap().report(&proc).unwrap();
        assert_eq!(rep.quantum_pv, 0.0);
    }
}
