use super::gate::{Control, GateOp, C64};
use super::state::{check_qubit_limit, StateVector};
use crate::error::{Error, Result};

/// A named position in a circuit: the number of ops preceding it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marker {
    pub name: String,
    pub position: usize,
}

/// Ordered list of gate applications on a fixed number of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
    markers: Vec<Marker>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, ops: Vec::new(), markers: Vec::new() }
    }

    /// Build from ops, validating each.
    pub fn from_ops(num_qubits: usize, ops: impl IntoIterator<Item = GateOp>) -> Result<Self> {
        let mut c = Circuit::new(num_qubits);
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn markers(&self) -> &[Marker] {
        &self.markers
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.validate(self.num_qubits)?;
        self.ops.push(op);
        Ok(self)
    }

    /// Record a marker at the current end of the circuit.
    pub fn mark(&mut self, name: impl Into<String>) -> &mut Self {
        self.markers.push(Marker { name: name.into(), position: self.ops.len() });
        self
    }

    pub fn marker_position(&self, name: &str) -> Result<usize> {
        self.markers
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.position)
            .ok_or_else(|| Error::UnknownMarker(name.to_string()))
    }

    /// Ops up to the named marker, keeping the markers inside the prefix.
    pub fn prefix(&self, marker: &str) -> Result<Circuit> {
        let pos = self.marker_position(marker)?;
        Ok(Circuit {
            num_qubits: self.num_qubits,
            ops: self.ops[..pos].to_vec(),
            markers: self.markers.iter().filter(|m| m.position <= pos).cloned().collect(),
        })
    }

    /// Append `other` with its qubit `j` placed on `map[j]`, adding `controls`
    /// to every op. Markers of `other` are not carried over.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize], controls: &[Control]) -> Result<&mut Self> {
        if map.len() != other.num_qubits {
            return Err(Error::DimensionMismatch { expected: other.num_qubits, actual: map.len() });
        }
        for op in &other.ops {
            let mut mapped = GateOp {
                gate: op.gate.clone(),
                targets: op.targets.iter().map(|&q| map[q]).collect(),
                controls: op.controls.iter().map(|c| Control { qubit: map[c.qubit], ..*c }).collect(),
            };
            mapped.controls.extend_from_slice(controls);
            self.push(mapped)?;
        }
        Ok(self)
    }

    /// Append a circuit on the same qubits, including its markers.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, actual: other.num_qubits });
        }
        let offset = self.ops.len();
        self.ops.extend(other.ops.iter().cloned());
        self.markers
            .extend(other.markers.iter().map(|m| Marker { name: m.name.clone(), position: m.position + offset }));
        Ok(self)
    }

    /// Reversed circuit with every gate inverted. Marker positions are mirrored.
    pub fn adjoint(&self) -> Circuit {
        let len = self.ops.len();
        Circuit {
            num_qubits: self.num_qubits,
            ops: self.ops.iter().rev().map(GateOp::inverse).collect(),
            markers: self
                .markers
                .iter()
                .rev()
                .map(|m| Marker { name: m.name.clone(), position: len - m.position })
                .collect(),
        }
    }

    /// Dense unitary, row-major, built column by column from basis states.
    /// Intended for small circuits.
    pub fn unitary(&self) -> Result<Vec<C64>> {
        check_qubit_limit(self.num_qubits)?;
        let dim = 1usize << self.num_qubits;
        let mut u = vec![C64::new(0.0, 0.0); dim * dim];
        for col in 0..dim {
            let out = run(self, &StateVector::basis(self.num_qubits, col)?)?;
            for (row, a) in out.amplitudes().iter().enumerate() {
                u[row * dim + col] = *a;
            }
        }
        Ok(u)
    }
}

/// Apply `op` to a copy of `state`.
pub fn apply_gate(state: &StateVector, op: &GateOp) -> Result<StateVector> {
    let mut s = state.clone();
    s.apply(op)?;
    Ok(s)
}

/// Execute `circuit` on `initial`.
pub fn run(circuit: &Circuit, initial: &StateVector) -> Result<StateVector> {
    if circuit.num_qubits() != initial.num_qubits() {
        return Err(Error::DimensionMismatch { expected: circuit.num_qubits(), actual: initial.num_qubits() });
    }
    let mut s = initial.clone();
    for op in circuit.ops() {
        s.apply(op)?;
    }
    Ok(s)
}

/// Execute `circuit` on `|0…0⟩`.
pub fn run_from_zero(circuit: &Circuit) -> Result<StateVector> {
    run(circuit, &StateVector::zero(circuit.num_qubits())?)
}

pub fn adjoint(circuit: &Circuit) -> Circuit {
    circuit.adjoint()
}
