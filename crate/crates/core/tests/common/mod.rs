//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's own closed forms.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use qinsure::sim::StateVector;
use rand::Rng;

pub fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
    let mut amps: Vec<C> = (0..1usize << n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(amps).unwrap()
}

pub fn random_probabilities(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0)).collect();
    let s: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / s).collect();
    // absorb rounding so the sum is 1 to machine precision
    let drift: f64 = 1.0 - p.iter().sum::<f64>();
    p[0] += drift;
    p
}

/// Normalized DFT matrix with entries `ω^{lk}/√M`, row `k`, column `l`.
pub fn dft(m: usize) -> Vec<Vec<C>> {
    let n = 1usize << m;
    (0..n)
        .map(|k| (0..n).map(|l| C::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * (l * k) as f64 / n as f64)).collect())
        .collect()
}

/// `Σ a_k sin²(ϑ̂_k/2)` for the linear encoding, computed from the half-angle
/// form `(k/2^r − 1/2)c + π/4`.
pub fn linear_encoder_p(probs: &[f64], c: f64) -> f64 {
    let n = probs.len() as f64;
    probs.iter().enumerate().map(|(k, a)| a * ((k as f64 / n - 0.5) * c + PI / 4.0).sin().powi(2)).sum()
}

/// `Σ a_k k/(2^r − 1)` for the exact encoding.
pub fn exact_encoder_p(probs: &[f64]) -> f64 {
    let top = (probs.len() - 1) as f64;
    probs.iter().enumerate().map(|(k, a)| a * k as f64 / top).sum()
}

/// Mass on outcomes within one grid step of `x` or `1 − x`,
/// `x = arcsin(√p)/π`.
pub fn flanking_mass(law: &[f64], p: f64) -> f64 {
    let m = law.len() as f64;
    let x = p.sqrt().asin() / PI;
    law.iter()
        .enumerate()
        .filter(|(l, _)| {
            let y = *l as f64 / m;
            (y - x).abs() < 1.0 / m || (y - (1.0 - x)).abs() < 1.0 / m
        })
        .map(|(_, p)| p)
        .sum()
}

/// Least-squares slope of `ys` on `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Brute-force stopped-process law: every trajectory, every lapse pattern.
pub struct Enumeration {
    pub tau: Vec<f64>,
    pub value: Vec<f64>,
    pub pv: f64,
    /// `P(τ = t_i | trajectory)` per trajectory `(k_1, …, k_n)`.
    pub conditional: Vec<(Vec<usize>, Vec<f64>)>,
}

pub fn enumerate_lapse(step_probs: &[Vec<f64>], rates: &[Vec<f64>], grid: &[f64]) -> Enumeration {
    let n = step_probs.len();
    let size = step_probs[0].len();
    let mut tau = vec![0.0; n];
    let mut value = vec![0.0; size];
    let mut conditional = Vec::new();
    let total = size.pow(n as u32);
    for t in 0..total {
        let ks: Vec<usize> = (0..n).map(|i| (t / size.pow(i as u32)) % size).collect();
        let w: f64 = ks.iter().enumerate().map(|(i, &k)| step_probs[i][k]).product();
        // sum over all 2^n lapse patterns, keep the first lapse
        let mut cond = vec![0.0; n];
        for pattern in 0..1usize << n {
            let mut pr = 1.0;
            for i in 0..n {
                let p = rates[i][ks[i]];
                pr *= if pattern >> i & 1 == 1 { p } else { 1.0 - p };
            }
            if pattern != 0 {
                cond[pattern.trailing_zeros() as usize] += pr;
            }
        }
        for i in 0..n {
            tau[i] += w * cond[i];
            value[ks[i]] += w * cond[i];
        }
        if w > 0.0 {
            conditional.push((ks, cond));
        }
    }
    let pv = value.iter().zip(grid).skip(1).map(|(p, z)| p * z).sum();
    Enumeration { tau, value, pv, conditional }
}
