use serde::Serialize;

use crate::distributions::DiscreteDistribution;
use crate::error::Result;
use crate::sim::sample_probabilities;

/// Classical Monte Carlo estimate of `E[Z]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√shots`.
    pub std_error: f64,
    pub shots: u64,
}

/// Sample mean of `shots` seeded draws from the grid law.
pub fn mc_baseline(dist: &DiscreteDistribution, shots: u64, seed: u64) -> Result<McEstimate> {
    let counts = sample_probabilities(dist.probabilities(), shots, seed)?;
    let z = dist.grid_values();
    let n = shots as f64;
    let mean = counts.iter().map(|(&k, &c)| z[k] * c as f64).sum::<f64>() / n;
    let var = if shots > 1 {
        counts.iter().map(|(&k, &c)| c as f64 * (z[k] - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate { mean, std_error: (var / n).sqrt(), shots })
}
