//! Gate kinds and gate applications (`GateOp`).
//!
//! A [`GateOp`] is a [`Gate`] placed on target qubits, optionally guarded by
//! controls. Controls come in two polarities: the usual control-on-one and the
//! negated control-on-zero. A control-on-zero is equivalent to conjugating the
//! control qubit with `X` before and after the positively controlled gate.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::circuit::Circuit;
use crate::error::{Error, Result};

pub type C64 = Complex64;

const UNITARY_TOL: f64 = 1e-10;

/// Phase rotation `R_j`, acting as identity on `|0⟩` and multiplying `|1⟩` by
/// `exp(sign · 2πi / 2^j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseRotation {
    pub j: u32,
    pub inverse: bool,
}

impl PhaseRotation {
    pub fn new(j: u32) -> Self {
        assert!(j >= 1, "phase rotation index starts at 1");
        PhaseRotation { j, inverse: false }
    }

    pub fn inverse(j: u32) -> Self {
        PhaseRotation { inverse: true, ..Self::new(j) }
    }

    pub fn angle(&self) -> f64 {
        let a = 2.0 * PI / (1u64 << self.j) as f64;
        if self.inverse {
            -a
        } else {
            a
        }
    }

    pub fn gate(&self) -> Gate {
        Gate::Phase(self.angle())
    }
}

/// A circuit realization attached to an opaque matrix gate. The transpiler
/// lowers the realization; the simulator uses the dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub id: String,
    pub circuit: Arc<Circuit>,
}

/// Dense unitary on `num_qubits` local qubits, row-major. Local qubit `j`
/// corresponds to bit `j` of the row/column index.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGate {
    num_qubits: usize,
    data: Vec<C64>,
    realization: Option<Realization>,
}

impl MatrixGate {
    pub fn new(num_qubits: usize, data: Vec<C64>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if data.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "matrix of {} entries does not act on {num_qubits} qubits",
                data.len()
            )));
        }
        let deviation = unitarity_deviation(dim, &data);
        if deviation > UNITARY_TOL {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(MatrixGate { num_qubits, data, realization: None })
    }

    /// Attach a circuit that implements this matrix (up to global phase).
    pub fn with_realization(mut self, id: impl Into<String>, circuit: Circuit) -> Result<Self> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: circuit.num_qubits(),
            });
        }
        self.realization = Some(Realization { id: id.into(), circuit: Arc::new(circuit) });
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn realization(&self) -> Option<&Realization> {
        self.realization.as_ref()
    }

    pub fn adjoint(&self) -> MatrixGate {
        let dim = self.dim();
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[c * dim + r] = self.data[r * dim + c].conj();
            }
        }
        let realization = self.realization.as_ref().map(|r| Realization {
            id: adjoint_id(&r.id),
            circuit: Arc::new(r.circuit.adjoint()),
        });
        MatrixGate { num_qubits: self.num_qubits, data, realization }
    }
}

fn adjoint_id(id: &str) -> String {
    match id.strip_suffix('†') {
        Some(base) => base.to_string(),
        None => format!("{id}†"),
    }
}

/// `max |(U†U − I)_{ij}|` for a row-major `dim × dim` matrix.
pub fn unitarity_deviation(dim: usize, data: &[C64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim {
                acc += data[k * dim + i].conj() * data[k * dim + j];
            }
            if i == j {
                acc -= 1.0;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    SX,
    SXdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    /// `diag(1, e^{iφ})`.
    Phase(f64),
    /// Scalar `e^{iφ}` on the subspace selected by the controls. Without
    /// controls it is an unobservable global phase.
    GlobalPhase(f64),
    Swap,
    /// Uniformly controlled RY. `targets[0]` is rotated; `targets[1..]` are the
    /// select qubits (least significant first) choosing the angle.
    MultiplexedRy(Arc<[f64]>),
    Matrix(Arc<MatrixGate>),
}

impl Gate {
    /// Number of target qubits this gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            Gate::GlobalPhase(_) => 0,
            Gate::Swap => 2,
            Gate::MultiplexedRy(angles) => 1 + angles.len().trailing_zeros() as usize,
            Gate::Matrix(m) => m.num_qubits(),
            _ => 1,
        }
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::S => Gate::Sdg,
            Gate::Sdg => Gate::S,
            Gate::SX => Gate::SXdg,
            Gate::SXdg => Gate::SX,
            Gate::Rx(t) => Gate::Rx(-t),
            Gate::Ry(t) => Gate::Ry(-t),
            Gate::Rz(t) => Gate::Rz(-t),
            Gate::Phase(t) => Gate::Phase(-t),
            Gate::GlobalPhase(t) => Gate::GlobalPhase(-t),
            Gate::MultiplexedRy(a) => Gate::MultiplexedRy(a.iter().map(|t| -t).collect()),
            Gate::Matrix(m) => Gate::Matrix(Arc::new(m.adjoint())),
            g => g.clone(),
        }
    }

    /// 2×2 matrix `[[u00, u01], [u10, u11]]` of single-target gates.
    pub fn matrix_2x2(&self) -> Option<[[C64; 2]; 2]> {
        let c = |re: f64, im: f64| C64::new(re, im);
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let m = match *self {
            Gate::X => [[z, one], [one, z]],
            Gate::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
            Gate::Z => [[one, z], [z, -one]],
            Gate::H => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::S => [[one, z], [z, c(0.0, 1.0)]],
            Gate::Sdg => [[one, z], [z, c(0.0, -1.0)]],
            Gate::SX => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
            Gate::SXdg => [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]],
            Gate::Rx(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Gate::Ry(t) => ry_matrix(t),
            Gate::Rz(t) => [[C64::from_polar(1.0, -t / 2.0), z], [z, C64::from_polar(1.0, t / 2.0)]],
            Gate::Phase(t) => [[one, z], [z, C64::from_polar(1.0, t)]],
            _ => return None,
        };
        Some(m)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X => "x",
            Gate::Y => "y",
            Gate::Z => "z",
            Gate::H => "h",
            Gate::S => "s",
            Gate::Sdg => "sdg",
            Gate::SX => "sx",
            Gate::SXdg => "sxdg",
            Gate::Rx(_) => "rx",
            Gate::Ry(_) => "ry",
            Gate::Rz(_) => "rz",
            Gate::Phase(_) => "p",
            Gate::GlobalPhase(_) => "gphase",
            Gate::Swap => "swap",
            Gate::MultiplexedRy(_) => "ucry",
            Gate::Matrix(_) => "unitary",
        }
    }
}

pub(crate) fn ry_matrix(theta: f64) -> [[C64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    One,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn one(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::One }
    }

    pub fn zero(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Zero }
    }
}

/// A gate applied to specific qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub gate: Gate,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl GateOp {
    pub fn new(gate: Gate, targets: Vec<usize>) -> Self {
        GateOp { gate, targets, controls: Vec::new() }
    }

    pub fn with_controls(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    pub fn single(gate: Gate, q: usize) -> Self {
        Self::new(gate, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::single(Gate::X, q)
    }

    pub fn h(q: usize) -> Self {
        Self::single(Gate::H, q)
    }

    pub fn ry(q: usize, theta: f64) -> Self {
        Self::single(Gate::Ry(theta), q)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::x(target).with_controls([Control::one(control)])
    }

    pub fn ccnot(c0: usize, c1: usize, target: usize) -> Self {
        Self::x(target).with_controls([Control::one(c0), Control::one(c1)])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(Gate::Swap, vec![a, b])
    }

    /// Controlled phase `R_j^{±1}`.
    pub fn cphase(control: usize, target: usize, rotation: PhaseRotation) -> Self {
        Self::single(rotation.gate(), target).with_controls([Control::one(control)])
    }

    /// Uniformly controlled RY on `target`; `angles[k]` is used when the
    /// select qubits read `k` (select qubit `j` is bit `j`).
    pub fn multiplexed_ry(target: usize, selects: &[usize], angles: Vec<f64>) -> Self {
        assert_eq!(angles.len(), 1 << selects.len(), "need one angle per select pattern");
        let mut targets = Vec::with_capacity(1 + selects.len());
        targets.push(target);
        targets.extend_from_slice(selects);
        Self::new(Gate::MultiplexedRy(angles.into()), targets)
    }

    pub fn inverse(&self) -> GateOp {
        GateOp { gate: self.gate.inverse(), targets: self.targets.clone(), controls: self.controls.clone() }
    }

    /// Every qubit the op touches, targets first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().copied().chain(self.controls.iter().map(|c| c.qubit))
    }

    /// Check indices, arity and target/control disjointness.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.targets.len() != self.gate.arity() {
            return Err(Error::InvalidArgument(format!(
                "gate `{}` expects {} targets, got {}",
                self.gate.name(),
                self.gate.arity(),
                self.targets.len()
            )));
        }
        if let Gate::MultiplexedRy(a) = &self.gate {
            if !a.len().is_power_of_two() {
                return Err(Error::InvalidArgument("multiplexed RY needs 2^k angles".into()));
            }
        }
        let mut seen = 0u128;
        let mut seen_big = std::collections::HashSet::new();
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange { index: q, num_qubits });
            }
            let dup = if q < 128 {
                let bit = 1u128 << q;
                let d = seen & bit != 0;
                seen |= bit;
                d
            } else {
                !seen_big.insert(q)
            };
            if dup {
                return Err(Error::OverlappingQubits(q));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.controls {
            match c.polarity {
                Polarity::One => write!(f, "c")?,
                Polarity::Zero => write!(f, "o")?,
            }
        }
        write!(f, "{}", self.gate.name())?;
        match &self.gate {
            Gate::Rx(t) | Gate::Ry(t) | Gate::Rz(t) | Gate::Phase(t) | Gate::GlobalPhase(t) => {
                write!(f, "({t:.6})")?
            }
            _ => {}
        }
        let qs: Vec<String> = self.qubits().map(|q| q.to_string()).collect();
        write!(f, " {}", qs.join(","))
    }
}
