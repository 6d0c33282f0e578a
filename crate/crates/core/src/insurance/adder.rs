use crate::error::{Error, Result};
use crate::sim::{Circuit, Control, GateOp};

/// Qubits needed to hold `total`: `⌊log₂ total⌋ + 1`, or 1 when `total = 0`.
pub fn sum_register_size(total: u64) -> usize {
    if total == 0 {
        1
    } else {
        (u64::BITS - total.leading_zeros()) as usize
    }
}

/// Append `sum += Σ_j weights[j]·state[j]` to `c`.
///
/// Each set bit `b` of a weight becomes an increment by `2^b` controlled by
/// the state qubit: a ripple of multi-controlled NOTs from the top of the
/// sum register down to bit `b`, each conditioned on all lower sum bits
/// from `b` upward being one.
pub fn append_weighted_sum(c: &mut Circuit, state: &[usize], weights: &[u64], sum: &[usize]) -> Result<()> {
    if state.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: state.len(), actual: weights.len() });
    }
    let total = weights.iter().try_fold(0u64, |acc, &w| acc.checked_add(w));
    let s = sum.len();
    match total {
        Some(t) if s >= 64 || t >> s == 0 => {}
        _ => return Err(Error::RegisterOverflow { size: s, max_sum: total.unwrap_or(u64::MAX) }),
    }
    for (&q, &w) in state.iter().zip(weights) {
        for b in (0..64).filter(|b| w >> b & 1 == 1) {
            for t in (b..s).rev() {
                let controls = std::iter::once(q).chain(sum[b..t].iter().copied()).map(Control::one);
                c.push(GateOp::x(sum[t]).with_controls(controls))?;
            }
        }
    }
    Ok(())
}

/// `|k⟩_r|0⟩_s ↦ |k⟩_r|Σ w_j k_j⟩_s` with the minimal sum register; qubits
/// `0..r` are the inputs, `r..r+s` the sum.
pub fn weighted_adder_circuit(weights: &[u64], state_qubits: usize) -> Result<Circuit> {
    let total = weights.iter().try_fold(0u64, |acc, &w| acc.checked_add(w)).ok_or(Error::RegisterOverflow {
        size: 64,
        max_sum: u64::MAX,
    })?;
    weighted_adder_with_size(weights, state_qubits, sum_register_size(total))
}

/// As [`weighted_adder_circuit`] with an explicit sum register size.
pub fn weighted_adder_with_size(weights: &[u64], state_qubits: usize, sum_qubits: usize) -> Result<Circuit> {
    if weights.len() != state_qubits {
        return Err(Error::DimensionMismatch { expected: state_qubits, actual: weights.len() });
    }
    crate::sim::check_qubit_limit(state_qubits + sum_qubits)?;
    let mut c = Circuit::new(state_qubits + sum_qubits);
    let state: Vec<usize> = (0..state_qubits).collect();
    let sum: Vec<usize> = (state_qubits..state_qubits + sum_qubits).collect();
    append_weighted_sum(&mut c, &state, weights, &sum)?;
    Ok(c)
}
