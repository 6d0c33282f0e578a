use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::encoder::{EncodingMode, ExpectationEncoder};
use super::grover::grover_operator;
use crate::distributions::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::qft::iqft_circuit;
use crate::sim::{marginal_probabilities, run_from_zero, sample, Circuit, Control, GateOp, StateVector};

const SUM_TOL: f64 = 1e-9;
const TIE_TOL: f64 = 1e-12;

/// Amplitude-estimation circuit on `m + r + 1` qubits.
///
/// Qubits `0..m` form the query register (qubit `i` has weight `2^i`), the
/// encoder lives on `m..m + r + 1`. Markers: `"load"`, `"hadamard"`,
/// `"amplify"`, `"iqft"`.
pub fn ae_circuit(encoder: &ExpectationEncoder, m: usize) -> Result<Circuit> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one query qubit".into()));
    }
    let width = m + encoder.num_qubits();
    crate::sim::check_qubit_limit(width)?;
    let map: Vec<usize> = (m..width).collect();
    let q = grover_operator(encoder)?;
    let mut c = Circuit::new(width);
    c.append_mapped(encoder.circuit(), &map, &[])?;
    c.mark("load");
    for i in 0..m {
        c.push(GateOp::h(i))?;
    }
    c.mark("hadamard");
    for i in 0..m {
        for _ in 0..1u64 << i {
            c.append_mapped(&q, &map, &[Control::one(i)])?;
        }
    }
    c.mark("amplify");
    let query: Vec<usize> = (0..m).collect();
    c.append_mapped(&iqft_circuit(m)?, &query, &[])?;
    c.mark("iqft");
    Ok(c)
}

/// Point estimate and full outcome law of one AE run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AeResult {
    pub m: usize,
    /// Probability of each query outcome `l`.
    pub outcomes: BTreeMap<usize, f64>,
    pub l_hat: usize,
    pub x_hat: f64,
    pub mu_hat: f64,
    pub expected_value: f64,
    pub mode: String,
    pub c_approx: Option<f64>,
}

/// Most probable outcome; near-ties go to the smaller `l`.
pub fn map_outcome(outcomes: &[f64]) -> usize {
    let max = outcomes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    outcomes.iter().position(|&p| p >= max - TIE_TOL).unwrap_or(0)
}

/// `μ̂ = sin²(π·l/2^m)`.
pub fn mu_from_outcome(l: usize, m: usize) -> f64 {
    (PI * l as f64 / (1u64 << m) as f64).sin().powi(2)
}

/// Map an estimated ancilla probability back to `E[Z]`.
pub fn expected_value_from_mu(mu: f64, mode: EncodingMode, dist: &DiscreteDistribution) -> f64 {
    let span = dist.z_max() - dist.z_min();
    match mode {
        EncodingMode::Exact => dist.z_min() + span * mu,
        EncodingMode::Linear { c_approx } => {
            let n = (1u64 << dist.resolution()) as f64;
            let half_theta = PI * ((mu - 0.5) / c_approx + 0.5);
            dist.z_min() + span / (n - 1.0) * half_theta * n / PI
        }
    }
}

/// Turn an outcome law over `l ∈ 0..2^m` into an [`AeResult`].
pub fn estimate(outcomes: &[f64], mode: EncodingMode, dist: &DiscreteDistribution) -> Result<AeResult> {
    if outcomes.len() < 2 || !outcomes.len().is_power_of_two() {
        return Err(Error::InvalidArgument(format!("outcome law of length {} is not 2^m, m ≥ 1", outcomes.len())));
    }
    let sum: f64 = outcomes.iter().sum();
    if outcomes.iter().any(|p| *p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidArgument(format!("outcome law sums to {sum}")));
    }
    let m = outcomes.len().trailing_zeros() as usize;
    let l_hat = map_outcome(outcomes);
    let mu_hat = mu_from_outcome(l_hat, m);
    Ok(AeResult {
        m,
        outcomes: outcomes.iter().copied().enumerate().collect(),
        l_hat,
        x_hat: l_hat as f64 / outcomes.len() as f64,
        mu_hat,
        expected_value: expected_value_from_mu(mu_hat, mode, dist),
        mode: mode.name().to_string(),
        c_approx: mode.c_approx(),
    })
}

/// Final state of the AE circuit.
pub fn ae_state(encoder: &ExpectationEncoder, m: usize) -> Result<StateVector> {
    run_from_zero(&ae_circuit(encoder, m)?)
}

/// Exact outcome law of the query register.
pub fn ae_outcomes(encoder: &ExpectationEncoder, m: usize) -> Result<Vec<f64>> {
    let query: Vec<usize> = (0..m).collect();
    marginal_probabilities(&ae_state(encoder, m)?, &query)
}

/// Run AE analytically and estimate.
pub fn run_ae(encoder: &ExpectationEncoder, m: usize) -> Result<AeResult> {
    estimate(&ae_outcomes(encoder, m)?, encoder.mode(), encoder.dist())
}

/// Run AE with `shots` seeded measurements; the outcome law is the
/// empirical frequency.
pub fn run_ae_sampled(encoder: &ExpectationEncoder, m: usize, shots: u64, seed: u64) -> Result<AeResult> {
    let query: Vec<usize> = (0..m).collect();
    let counts = sample(&ae_state(encoder, m)?, &query, shots, seed)?;
    let mut law = vec![0.0; 1 << m];
    for (l, c) in counts {
        law[l] = c as f64 / shots as f64;
    }
    estimate(&law, encoder.mode(), encoder.dist())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::LoaderBackend;

    #[test]
    fn zero_outcome_gives_z_min() {
        let d = DiscreteDistribution::new(2, vec![0.25; 4], 0.9, 1.1).unwrap();
        let mut law = vec![0.0; 8];
        law[0] = 1.0;
        let r = estimate(&law, EncodingMode::Exact, &d).unwrap();
        assert_eq!((r.l_hat, r.mu_hat, r.expected_value), (0, 0.0, 0.9));
    }

    #[test]
    fn half_outcome_gives_one() {
        let d = DiscreteDistribution::on_unit_grid(1, vec![0.5, 0.5]).unwrap();
        let mut law = vec![0.0; 8];
        law[4] = 1.0;
        assert!((estimate(&law, EncodingMode::Exact, &d).unwrap().mu_hat - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ties_go_to_smaller_outcome() {
        assert_eq!(map_outcome(&[0.0, 0.5, 0.0, 0.5]), 1);
    }

    #[test]
    fn empty_law_is_rejected() {
        let d = DiscreteDistribution::on_unit_grid(1, vec![0.5, 0.5]).unwrap();
        assert!(estimate(&[], EncodingMode::Exact, &d).is_err());
    }

    #[test]
    fn zero_probability_reads_zero() {
        let enc = ExpectationEncoder::for_probability(0.0, LoaderBackend::RyTree).unwrap();
        let law = ae_outcomes(&enc, 1).unwrap();
        assert!((law[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_chain_inverts_linearization() {
        let d = DiscreteDistribution::new(2, vec![0.1, 0.2, 0.3, 0.4], 0.0, 3.0).unwrap();
        let mode = EncodingMode::Linear { c_approx: 0.25 };
        let mean_k: f64 = (0..4).map(|k| k as f64 * d.probability(k)).sum();
        let p_lin = 0.5 + 0.25 * (mean_k / 4.0 - 0.5);
        assert!((expected_value_from_mu(p_lin, mode, &d) - d.expected_value()).abs() < 1e-12);
    }
}
