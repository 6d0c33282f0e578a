use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::state::StateVector;
use crate::error::{Error, Result};

/// Probability of each outcome on `qubits`; bit `j` of the outcome index is
/// the value of `qubits[j]`. Returns a vector of length `2^qubits.len()`.
pub fn marginal_probabilities(state: &StateVector, qubits: &[usize]) -> Result<Vec<f64>> {
    if qubits.is_empty() {
        return Err(Error::InvalidArgument("empty qubit subset".into()));
    }
    let n = state.num_qubits();
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, num_qubits: n });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::OverlappingQubits(q));
        }
    }
    let mut probs = vec![0.0; 1 << qubits.len()];
    for (idx, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let outcome = qubits.iter().enumerate().fold(0usize, |acc, (j, &q)| acc | (((idx >> q) & 1) << j));
        probs[outcome] += p;
    }
    Ok(probs)
}

/// Draw `shots` measurements of `qubits`, reproducibly for a given `seed`.
pub fn sample(state: &StateVector, qubits: &[usize], shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
    let probs = marginal_probabilities(state, qubits)?;
    sample_probabilities(&probs, shots, seed)
}

/// Multinomial draw from an explicit probability vector.
pub fn sample_probabilities(probs: &[f64], shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let dist = WeightedIndex::new(probs).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(dist.sample(&mut rng)).or_insert(0) += 1;
    }
    Ok(counts)
}
