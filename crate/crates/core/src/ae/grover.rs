use std::f64::consts::PI;

use super::encoder::ExpectationEncoder;
use crate::error::{Error, Result};
use crate::sim::{Circuit, Control, Gate, GateOp};

/// `V = I − 2·I⊗|1⟩⟨1|`: a Pauli-Z on the ancilla (qubit `r`) of an
/// `r + 1` qubit register.
pub fn v_operator(r: usize) -> Circuit {
    let mut c = Circuit::new(r + 1);
    c.push(GateOp::single(Gate::Z, r)).expect("ancilla in range");
    c
}

/// `I − 2|0⟩⟨0|` on `n` qubits as an X-conjugated multi-controlled Z.
pub fn reflection_zero(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidArgument("reflection needs at least one qubit".into()));
    }
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(GateOp::x(q))?;
    }
    c.push(GateOp::single(Gate::Z, n - 1).with_controls((0..n - 1).map(Control::one)))?;
    for q in 0..n {
        c.push(GateOp::x(q))?;
    }
    Ok(c)
}

/// `Q = −F·Z·F†·V`, in time order `V, F†, Z, F` followed by a global `−1`.
///
/// On the plane spanned by `F|0⟩` and its reflection, `Q` rotates by
/// `θ = 2·arcsin √p` and has eigenvalues `e^{±iθ}`. The sign is kept as an
/// explicit phase gate so that controlled powers of `Q` kick back the right
/// phase.
pub fn grover_operator(encoder: &ExpectationEncoder) -> Result<Circuit> {
    let f = encoder.circuit();
    let n = f.num_qubits();
    let mut q = v_operator(n - 1);
    q.append(&f.adjoint())?;
    q.append(&reflection_zero(n)?)?;
    q.append(f)?;
    q.push(GateOp::new(Gate::GlobalPhase(PI), vec![]))?;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::LoaderBackend;
    use crate::sim::{marginal_probabilities, run, run_from_zero, StateVector};

    #[test]
    fn reflection_flips_only_zero() {
        let c = reflection_zero(3).unwrap();
        for k in 0..8 {
            let out = run(&c, &StateVector::basis(3, k).unwrap()).unwrap();
            let want = if k == 0 { -1.0 } else { 1.0 };
            assert!((out.amplitude(k).re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_probability_is_fully_amplified_once() {
        let enc = ExpectationEncoder::for_probability(0.25, LoaderBackend::RyTree).unwrap();
        let mut c = enc.circuit().clone();
        c.append(&grover_operator(&enc).unwrap()).unwrap();
        let s = run_from_zero(&c).unwrap();
        assert!((marginal_probabilities(&s, &[1]).unwrap()[1] - 1.0).abs() < 1e-12);
    }
}
