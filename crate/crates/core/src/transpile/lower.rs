//! Lowering of circuit ops to `{CNOT, ID, RZ, SX, X}`.
//!
//! Global phase is dropped. Controls on zero are X-conjugated. Gates with
//! several controls first AND their controls into a clean ancilla; the
//! ancillas are appended above the circuit's qubits and reused.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::basis::{BasisOp, BasisProgram};
use crate::error::{Error, Result};
use crate::sim::{Circuit, Control, Gate, GateOp, Polarity, C64};

/// Angles below this are dropped from multiplexor expansions.
const ZERO_ANGLE: f64 = 1e-14;

/// Lower `circuit` to the basis gate set.
pub fn transpile(circuit: &Circuit) -> Result<BasisProgram> {
    let mut l = Lowerer::new(circuit.num_qubits());
    let mut boundaries = Vec::with_capacity(circuit.len() + 1);
    boundaries.push(0);
    for op in circuit.ops() {
        l.op(op)?;
        boundaries.push(l.ops.len());
    }
    let markers = circuit.markers().iter().map(|m| (m.name.clone(), boundaries[m.position])).collect();
    Ok(BasisProgram { circuit_qubits: circuit.num_qubits(), ancillas: l.high_water, ops: l.ops, markers })
}

struct Lowerer {
    base: usize,
    free: Vec<usize>,
    high_water: usize,
    ops: Vec<BasisOp>,
}

impl Lowerer {
    fn new(base: usize) -> Self {
        Lowerer { base, free: Vec::new(), high_water: 0, ops: Vec::new() }
    }

    fn alloc(&mut self, k: usize) -> Vec<usize> {
        (0..k)
            .map(|_| {
                self.free.pop().unwrap_or_else(|| {
                    self.high_water += 1;
                    self.base + self.high_water - 1
                })
            })
            .collect()
    }

    fn release(&mut self, qs: Vec<usize>) {
        self.free.extend(qs.into_iter().rev());
    }

    fn emit(&mut self, op: BasisOp) {
        self.ops.push(op);
    }

    fn cx(&mut self, control: usize, target: usize) {
        self.emit(BasisOp::Cnot { control, target });
    }

    fn rz(&mut self, q: usize, theta: f64) {
        self.emit(BasisOp::Rz(q, theta));
    }

    fn sx(&mut self, q: usize) {
        self.emit(BasisOp::Sx(q));
    }

    fn x(&mut self, q: usize) {
        self.emit(BasisOp::X(q));
    }

    fn h(&mut self, q: usize) {
        self.rz(q, FRAC_PI_2);
        self.sx(q);
        self.rz(q, FRAC_PI_2);
    }

    /// `RY(θ)` as `SX, RZ(θ + π), SX, RZ(π)` in time order.
    fn ry(&mut self, q: usize, theta: f64) {
        self.sx(q);
        self.rz(q, theta + PI);
        self.sx(q);
        self.rz(q, PI);
    }

    fn rx(&mut self, q: usize, theta: f64) {
        self.rz(q, FRAC_PI_2);
        self.sx(q);
        self.rz(q, theta + PI);
        self.sx(q);
        self.rz(q, FRAC_PI_2);
    }

    fn op(&mut self, op: &GateOp) -> Result<()> {
        let negated: Vec<usize> =
            op.controls.iter().filter(|c| c.polarity == Polarity::Zero).map(|c| c.qubit).collect();
        for &q in &negated {
            self.x(q);
        }
        let controls: Vec<usize> = op.controls.iter().map(|c| c.qubit).collect();
        self.controlled(&op.gate, &op.targets, &controls)?;
        for &q in &negated {
            self.x(q);
        }
        Ok(())
    }

    fn controlled(&mut self, gate: &Gate, targets: &[usize], controls: &[usize]) -> Result<()> {
        match (gate, controls.len()) {
            (Gate::GlobalPhase(_), 0) => Ok(()),
            (Gate::GlobalPhase(phi), _) => {
                let (last, rest) = controls.split_last().expect("nonempty");
                self.controlled(&Gate::Phase(*phi), &[*last], rest)
            }
            (Gate::Swap, _) => {
                let (a, b) = (targets[0], targets[1]);
                self.cx(b, a);
                let mut c = controls.to_vec();
                c.push(a);
                self.mcx(&c, b);
                self.cx(b, a);
                Ok(())
            }
            (Gate::MultiplexedRy(angles), _) => {
                let mut selects = targets[1..].to_vec();
                let k = selects.len();
                selects.extend_from_slice(controls);
                let active = ((1usize << controls.len()) - 1) << k;
                let full: Vec<f64> = (0..1usize << selects.len())
                    .map(|s| if s & active == active { angles[s & ((1 << k) - 1)] } else { 0.0 })
                    .collect();
                self.multiplexed_ry(targets[0], &selects, &full);
                Ok(())
            }
            (Gate::Matrix(m), _) => {
                let real = m.realization().ok_or(Error::MissingRealization)?;
                let extra: Vec<Control> = controls.iter().map(|&q| Control::one(q)).collect();
                for inner in real.circuit.ops() {
                    let mapped = GateOp {
                        gate: inner.gate.clone(),
                        targets: inner.targets.iter().map(|&q| targets[q]).collect(),
                        controls: inner
                            .controls
                            .iter()
                            .map(|c| Control { qubit: targets[c.qubit], ..*c })
                            .chain(extra.iter().copied())
                            .collect(),
                    };
                    self.op(&mapped)?;
                }
                Ok(())
            }
            (Gate::X, _) => {
                self.mcx(controls, targets[0]);
                Ok(())
            }
            (g, 0) => {
                self.single(g, targets[0]);
                Ok(())
            }
            (g, 1) => {
                self.single_controlled(g, controls[0], targets[0]);
                Ok(())
            }
            (g, _) => {
                let anc = self.alloc(1);
                self.mcx(controls, anc[0]);
                self.single_controlled(g, anc[0], targets[0]);
                self.mcx(controls, anc[0]);
                self.release(anc);
                Ok(())
            }
        }
    }

    fn single(&mut self, g: &Gate, q: usize) {
        match *g {
            Gate::X => self.x(q),
            Gate::Y => {
                self.rz(q, PI);
                self.x(q);
            }
            Gate::Z => self.rz(q, PI),
            Gate::H => self.h(q),
            Gate::S => self.rz(q, FRAC_PI_2),
            Gate::Sdg => self.rz(q, -FRAC_PI_2),
            Gate::SX => self.sx(q),
            Gate::SXdg => {
                self.rz(q, PI);
                self.sx(q);
                self.rz(q, PI);
            }
            Gate::Rx(t) => self.rx(q, t),
            Gate::Ry(t) => self.ry(q, t),
            Gate::Rz(t) | Gate::Phase(t) => self.rz(q, t),
            _ => unreachable!("multi-qubit gate {g:?} routed to single-qubit lowering"),
        }
    }

    fn crz(&mut self, c: usize, t: usize, theta: f64) {
        self.rz(t, theta / 2.0);
        self.cx(c, t);
        self.rz(t, -theta / 2.0);
        self.cx(c, t);
    }

    fn single_controlled(&mut self, g: &Gate, c: usize, t: usize) {
        match *g {
            Gate::X => self.cx(c, t),
            Gate::Z => self.cphase(c, t, PI),
            Gate::S => self.cphase(c, t, FRAC_PI_2),
            Gate::Sdg => self.cphase(c, t, -FRAC_PI_2),
            Gate::Phase(phi) => self.cphase(c, t, phi),
            Gate::Rz(theta) => self.crz(c, t, theta),
            Gate::Ry(theta) => {
                self.ry(t, theta / 2.0);
                self.cx(c, t);
                self.ry(t, -theta / 2.0);
                self.cx(c, t);
            }
            ref other => {
                let m = other.matrix_2x2().expect("single-qubit gate");
                self.controlled_unitary(c, t, m);
            }
        }
    }

    /// `diag(1, 1, 1, e^{iφ})` = `RZ(φ/2)` on the control times `CRZ(φ)`.
    fn cphase(&mut self, c: usize, t: usize, phi: f64) {
        self.rz(c, phi / 2.0);
        self.crz(c, t, phi);
    }

    /// ABC construction from the ZYZ angles of `u`.
    fn controlled_unitary(&mut self, c: usize, t: usize, u: [[C64; 2]; 2]) {
        let (alpha, beta, gamma, delta) = zyz(u);
        // C
        self.rz(t, (delta - beta) / 2.0);
        self.cx(c, t);
        // B
        self.rz(t, -(delta + beta) / 2.0);
        self.ry(t, -gamma / 2.0);
        self.cx(c, t);
        // A
        self.ry(t, gamma / 2.0);
        self.rz(t, beta);
        self.rz(c, alpha);
    }

    /// Toffoli as 6 CNOTs, 2 H and 7 T/T†.
    fn ccx(&mut self, a: usize, b: usize, t: usize) {
        let (tg, tdg) = (FRAC_PI_4, -FRAC_PI_4);
        self.h(t);
        self.cx(b, t);
        self.rz(t, tdg);
        self.cx(a, t);
        self.rz(t, tg);
        self.cx(b, t);
        self.rz(t, tdg);
        self.cx(a, t);
        self.rz(b, tg);
        self.rz(t, tg);
        self.h(t);
        self.cx(a, b);
        self.rz(a, tg);
        self.rz(b, tdg);
        self.cx(a, b);
    }

    /// Multi-controlled X; three or more controls use a V-chain of
    /// Toffolis over `k − 2` clean ancillas.
    fn mcx(&mut self, controls: &[usize], t: usize) {
        match controls.len() {
            0 => self.x(t),
            1 => self.cx(controls[0], t),
            2 => self.ccx(controls[0], controls[1], t),
            k => {
                let anc = self.alloc(k - 2);
                let mut chain = vec![(controls[0], controls[1], anc[0])];
                for i in 2..k - 1 {
                    chain.push((controls[i], anc[i - 2], anc[i - 1]));
                }
                for &(a, b, c) in &chain {
                    self.ccx(a, b, c);
                }
                self.ccx(controls[k - 1], anc[k - 3], t);
                for &(a, b, c) in chain.iter().rev() {
                    self.ccx(a, b, c);
                }
                self.release(anc);
            }
        }
    }

    /// Gray-code expansion: `2^k` RY rotations interleaved with `2^k` CNOTs.
    fn multiplexed_ry(&mut self, t: usize, selects: &[usize], angles: &[f64]) {
        let k = selects.len();
        if k == 0 {
            if angles[0].abs() > ZERO_ANGLE {
                self.ry(t, angles[0]);
            }
            return;
        }
        let n = 1usize << k;
        let gray = |i: usize| i ^ (i >> 1);
        for i in 0..n {
            let g = gray(i);
            let beta: f64 = angles
                .iter()
                .enumerate()
                .map(|(s, a)| if (s & g).count_ones() % 2 == 0 { *a } else { -*a })
                .sum::<f64>()
                / n as f64;
            if beta.abs() > ZERO_ANGLE {
                self.ry(t, beta);
            }
            let changed = (g ^ gray((i + 1) % n)).trailing_zeros() as usize;
            self.cx(selects[changed], t);
        }
    }
}

/// `u = e^{iα}·RZ(β)·RY(γ)·RZ(δ)`.
fn zyz(u: [[C64; 2]; 2]) -> (f64, f64, f64, f64) {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let alpha = det.arg() / 2.0;
    let phase = C64::from_polar(1.0, -alpha);
    let a = u[0][0] * phase;
    let b = u[1][0] * phase;
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let arg_a = if a.norm() > 1e-12 { a.arg() } else { 0.0 };
    let arg_b = if b.norm() > 1e-12 { b.arg() } else { 0.0 };
    (alpha, arg_b - arg_a, gamma, -arg_a - arg_b)
}
