use std::collections::BTreeMap;

use serde::Serialize;

use super::whole_life::common_grid;
use crate::distributions::{process_loader, LoaderBackend, ProcessDistribution};
use crate::error::{Error, Result};
use crate::sim::{marginal_probabilities, sample, Circuit, Control, GateOp, StateVector};

/// Per-step lapse probabilities `p_{t_i}(k)` indexed by grid index `k`.
/// The last step must lapse with certainty.
#[derive(Clone, Debug, PartialEq)]
pub struct LapseModel {
    rates: Vec<Vec<f64>>,
}

impl LapseModel {
    pub fn new(rates: Vec<Vec<f64>>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::InvalidArgument("lapse model needs at least one step".into()));
        }
        let len = rates[0].len();
        for (i, step) in rates.iter().enumerate() {
            if step.len() != len || !len.is_power_of_two() {
                return Err(Error::InvalidArgument(format!("lapse step {} has {} rates", i + 1, step.len())));
            }
            if let Some(p) = step.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(Error::InvalidArgument(format!("lapse rate {p} outside [0, 1] at step {}", i + 1)));
            }
        }
        if rates.last().unwrap().iter().any(|&p| p != 1.0) {
            return Err(Error::InvalidArgument("terminal lapse rate must be 1 for every state".into()));
        }
        Ok(LapseModel { rates })
    }

    /// Same rates at every step except the terminal one, which is forced to 1.
    pub fn time_independent(rates: Vec<f64>, steps: usize) -> Result<Self> {
        let mut all = vec![rates.clone(); steps.saturating_sub(1)];
        all.push(vec![1.0; rates.len()]);
        Self::new(all)
    }

    pub fn num_steps(&self) -> usize {
        self.rates.len()
    }

    pub fn rates(&self, step: usize) -> &[f64] {
        &self.rates[step]
    }

    pub fn resolution(&self) -> usize {
        self.rates[0].len().trailing_zeros() as usize
    }
}

fn laf_angle(p: f64) -> f64 {
    2.0 * p.sqrt().min(1.0).asin()
}

/// `|k⟩|0⟩ ↦ |k⟩(√(1 − p(k))|0⟩ + √p(k)|1⟩)` on `r̂ + 1` qubits; the
/// ancilla is qubit `r̂`.
pub fn lapse_laf(p: &[f64], r_hat: usize) -> Result<Circuit> {
    if p.len() != 1 << r_hat {
        return Err(Error::DimensionMismatch { expected: 1 << r_hat, actual: p.len() });
    }
    if let Some(x) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidArgument(format!("lapse rate {x} outside [0, 1]")));
    }
    let mut c = Circuit::new(r_hat + 1);
    let selects: Vec<usize> = (0..r_hat).collect();
    c.push(GateOp::multiplexed_ry(r_hat, &selects, p.iter().map(|&x| laf_angle(x)).collect()))?;
    Ok(c)
}

/// Register layout of the dynamic-lapse circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LapseLayout {
    pub steps: usize,
    pub resolution: usize,
}

impl LapseLayout {
    pub fn distribution(&self, step: usize) -> Vec<usize> {
        (step * self.resolution..(step + 1) * self.resolution).collect()
    }

    pub fn lapse_qubit(&self, step: usize) -> usize {
        self.steps * self.resolution + step
    }

    pub fn lapse_register(&self) -> Vec<usize> {
        (0..self.steps).map(|i| self.lapse_qubit(i)).collect()
    }

    pub fn result_register(&self) -> Vec<usize> {
        let base = self.steps * (self.resolution + 1);
        (base..base + self.resolution).collect()
    }

    pub fn work(&self, step: usize) -> Vec<usize> {
        let base = self.steps * (self.resolution + 1) + self.resolution + step * self.resolution;
        (base..base + self.resolution).collect()
    }

    pub fn width(&self) -> usize {
        2 * self.steps * self.resolution + self.steps + self.resolution
    }
}

/// Dynamic-lapse circuit and its layout. Markers: `1` after loading,
/// `2.i` after the lapse decision at step `i`, `3.i` after transmitting
/// step `i` into the result register.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicLapseCircuit {
    pub circuit: Circuit,
    pub layout: LapseLayout,
    grid: (f64, f64),
}

/// Build the stopped-process circuit.
///
/// Step `2.i` copies the grid index of step `i` into a work block when no
/// earlier lapse happened (NOTs controlled on the digit and on-zero on the
/// earlier lapse qubits), rotates the lapse qubit by the LAF selected by the
/// block, then uncomputes the copy. Because `a_0 = 0`, a zero block means
/// "already lapsed" and gets angle 0.
pub fn dynamic_lapse_circuit(proc: &ProcessDistribution, lapse: &LapseModel) -> Result<DynamicLapseCircuit> {
    let n = proc.num_steps();
    let r = proc.resolution();
    if lapse.num_steps() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: lapse.num_steps() });
    }
    if lapse.resolution() != r {
        return Err(Error::DimensionMismatch { expected: r, actual: lapse.resolution() });
    }
    if let Some(i) = proc.steps().iter().position(|s| s.probability(0) != 0.0) {
        return Err(Error::InvalidDistribution(format!("step {} gives grid index 0 positive probability", i + 1)));
    }
    let grid = common_grid(proc)?;
    let layout = LapseLayout { steps: n, resolution: r };
    crate::sim::check_qubit_limit(layout.width())?;
    let mut c = Circuit::new(layout.width());

    c.append(&process_loader(proc, LoaderBackend::RyTree)?)?;
    c.mark("1");

    for i in 0..n {
        let dist = layout.distribution(i);
        let work = layout.work(i);
        let guard: Vec<Control> = (0..i).map(|j| Control::zero(layout.lapse_qubit(j))).collect();
        let copy: Vec<GateOp> = dist
            .iter()
            .zip(&work)
            .map(|(&d, &w)| GateOp::x(w).with_controls(std::iter::once(Control::one(d)).chain(guard.iter().copied())))
            .collect();
        for op in &copy {
            c.push(op.clone())?;
        }
        let mut angles: Vec<f64> = lapse.rates(i).iter().map(|&p| laf_angle(p)).collect();
        angles[0] = 0.0;
        c.push(GateOp::multiplexed_ry(layout.lapse_qubit(i), &work, angles))?;
        for op in copy.into_iter().rev() {
            c.push(op)?;
        }
        c.mark(format!("2.{}", i + 1));
    }

    let result = layout.result_register();
    for i in 0..n {
        for (&d, &u) in layout.distribution(i).iter().zip(&result) {
            c.push(GateOp::ccnot(d, layout.lapse_qubit(i), u))?;
        }
        c.mark(format!("3.{}", i + 1));
    }
    Ok(DynamicLapseCircuit { circuit: c, layout, grid })
}

/// Register laws at one marker.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkerLaws {
    pub marker: String,
    /// Law of the lapse register; bit `i` is the lapse qubit of step `i + 1`.
    pub lapse: Vec<f64>,
    /// Law of the result register (grid index of the stopped value).
    pub result: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PayoffReport {
    pub markers: Vec<MarkerLaws>,
    /// Grid value for each result-register index.
    pub grid: Vec<f64>,
    pub pv: f64,
}

impl PayoffReport {
    pub fn final_result(&self) -> &[f64] {
        &self.markers.last().expect("at least one marker").result
    }

    pub fn final_lapse(&self) -> &[f64] {
        &self.markers.last().expect("at least one marker").lapse
    }

    pub fn at(&self, marker: &str) -> Option<&MarkerLaws> {
        self.markers.iter().find(|m| m.marker == marker)
    }
}

impl DynamicLapseCircuit {
    pub fn grid_values(&self) -> Vec<f64> {
        let (lo, hi) = self.grid;
        let n = 1usize << self.layout.resolution;
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    /// `Σ_{k ≥ 1} P(result = k)·z_k`; index 0 means "no payment".
    pub fn pv_from_result_law(&self, law: &[f64]) -> f64 {
        self.grid_values().iter().zip(law).skip(1).map(|(z, p)| z * p).sum()
    }

    /// Exact register laws at every marker, in circuit order.
    pub fn report(&self) -> Result<PayoffReport> {
        let mut state = StateVector::zero(self.circuit.num_qubits())?;
        let mut done = 0;
        let mut markers = Vec::new();
        for m in self.circuit.markers() {
            for op in &self.circuit.ops()[done..m.position] {
                state.apply(op)?;
            }
            done = m.position;
            markers.push(MarkerLaws {
                marker: m.name.clone(),
                lapse: marginal_probabilities(&state, &self.layout.lapse_register())?,
                result: marginal_probabilities(&state, &self.layout.result_register())?,
            });
        }
        let pv = self.pv_from_result_law(&markers.last().expect("markers").result);
        Ok(PayoffReport { markers, grid: self.grid_values(), pv })
    }

    /// Shot-sampled result law and PV of the final state.
    pub fn sampled_result(&self, shots: u64, seed: u64) -> Result<(BTreeMap<usize, u64>, f64)> {
        let state = crate::sim::run_from_zero(&self.circuit)?;
        let counts = sample(&state, &self.layout.result_register(), shots, seed)?;
        let z = self.grid_values();
        let pv = counts.iter().filter(|(&k, _)| k > 0).map(|(&k, &c)| z[k] * c as f64).sum::<f64>() / shots as f64;
        Ok((counts, pv))
    }
}

/// Classical laws of the stopping time and the stopped value by enumerating
/// every trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StoppedLaw {
    /// `P(τ = t_i)`, `i = 1 … n`.
    pub stopping_time: Vec<f64>,
    /// `P(Z_τ = z_k)` by grid index.
    pub stopped_value: Vec<f64>,
    pub pv: f64,
}

pub fn stopped_law(proc: &ProcessDistribution, lapse: &LapseModel) -> Result<StoppedLaw> {
    let n = proc.num_steps();
    if lapse.num_steps() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: lapse.num_steps() });
    }
    let (lo, hi) = common_grid(proc)?;
    let size = 1usize << proc.resolution();
    let mut tau = vec![0.0; n];
    let mut value = vec![0.0; size];
    for t in 0..proc.num_trajectories() {
        let w = proc.trajectory_probability(t);
        if w == 0.0 {
            continue;
        }
        let ks = proc.decode(t);
        let mut alive = 1.0;
        for (i, &k) in ks.iter().enumerate() {
            let p = lapse.rates(i)[k];
            tau[i] += w * alive * p;
            value[k] += w * alive * p;
            alive *= 1.0 - p;
        }
    }
    let pv = value.iter().enumerate().skip(1).map(|(k, p)| p * (lo + (hi - lo) * k as f64 / (size - 1) as f64)).sum();
    Ok(StoppedLaw { stopping_time: tau, stopped_value: value, pv })
}
