use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::sim::{Circuit, Gate, GateOp};

/// A native instruction of the target device.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisOp {
    Cnot { control: usize, target: usize },
    Id(usize),
    Rz(usize, f64),
    Sx(usize),
    X(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Cnot,
    Id,
    Rz,
    Sx,
    X,
}

impl BasisKind {
    pub const ALL: [BasisKind; 5] = [BasisKind::Cnot, BasisKind::Id, BasisKind::Rz, BasisKind::Sx, BasisKind::X];
}

impl BasisOp {
    pub fn kind(&self) -> BasisKind {
        match self {
            BasisOp::Cnot { .. } => BasisKind::Cnot,
            BasisOp::Id(_) => BasisKind::Id,
            BasisOp::Rz(..) => BasisKind::Rz,
            BasisOp::Sx(_) => BasisKind::Sx,
            BasisOp::X(_) => BasisKind::X,
        }
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            BasisOp::Cnot { control, target } => (control, Some(target)),
            BasisOp::Id(q) | BasisOp::Rz(q, _) | BasisOp::Sx(q) | BasisOp::X(q) => (q, None),
        };
        std::iter::once(a).chain(b)
    }

    /// The equivalent simulator op. `Id` has none.
    pub fn to_gate_op(&self) -> Option<GateOp> {
        Some(match *self {
            BasisOp::Cnot { control, target } => GateOp::cnot(control, target),
            BasisOp::Id(_) => return None,
            BasisOp::Rz(q, t) => GateOp::single(Gate::Rz(t), q),
            BasisOp::Sx(q) => GateOp::single(Gate::SX, q),
            BasisOp::X(q) => GateOp::x(q),
        })
    }
}

impl fmt::Display for BasisOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisOp::Cnot { control, target } => write!(f, "cx {control},{target}"),
            BasisOp::Id(q) => write!(f, "id {q}"),
            BasisOp::Rz(q, t) => write!(f, "rz({t:.6}) {q}"),
            BasisOp::Sx(q) => write!(f, "sx {q}"),
            BasisOp::X(q) => write!(f, "x {q}"),
        }
    }
}

/// Lowered program. Qubits `0..circuit_qubits` mirror the source circuit;
/// the `ancillas` above them start and end in `|0⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisProgram {
    pub circuit_qubits: usize,
    pub ancillas: usize,
    pub ops: Vec<BasisOp>,
    /// `(marker name, number of basis ops emitted before it)`.
    pub markers: Vec<(String, usize)>,
}

impl BasisProgram {
    pub fn num_qubits(&self) -> usize {
        self.circuit_qubits + self.ancillas
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Simulator circuit over all qubits including ancillas.
    pub fn to_circuit(&self) -> Result<Circuit> {
        Circuit::from_ops(self.num_qubits(), self.ops.iter().filter_map(BasisOp::to_gate_op))
    }
}
