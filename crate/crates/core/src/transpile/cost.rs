use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::basis::{BasisKind, BasisOp, BasisProgram};
use super::lower::transpile;
use crate::error::{Error, Result};
use crate::sim::Circuit;

/// Per-kind cost weights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostTable {
    pub cnot: u64,
    pub id: u64,
    pub rz: u64,
    pub sx: u64,
    pub x: u64,
}

impl Default for CostTable {
    fn default() -> Self {
        CostTable { cnot: 5, id: 1, rz: 1, sx: 1, x: 1 }
    }
}

impl CostTable {
    pub fn weight(&self, kind: BasisKind) -> u64 {
        match kind {
            BasisKind::Cnot => self.cnot,
            BasisKind::Id => self.id,
            BasisKind::Rz => self.rz,
            BasisKind::Sx => self.sx,
            BasisKind::X => self.x,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub cnot: u64,
    pub rz: u64,
    pub sx: u64,
    pub x: u64,
    pub id: u64,
}

impl GateCounts {
    pub fn of(ops: &[BasisOp]) -> Self {
        let mut c = GateCounts::default();
        for op in ops {
            c.add(op.kind());
        }
        c
    }

    fn add(&mut self, kind: BasisKind) {
        match kind {
            BasisKind::Cnot => self.cnot += 1,
            BasisKind::Id => self.id += 1,
            BasisKind::Rz => self.rz += 1,
            BasisKind::Sx => self.sx += 1,
            BasisKind::X => self.x += 1,
        }
    }

    pub fn get(&self, kind: BasisKind) -> u64 {
        match kind {
            BasisKind::Cnot => self.cnot,
            BasisKind::Id => self.id,
            BasisKind::Rz => self.rz,
            BasisKind::Sx => self.sx,
            BasisKind::X => self.x,
        }
    }

    pub fn single_qubit(&self) -> u64 {
        self.rz + self.sx + self.x + self.id
    }

    pub fn cost(&self, table: &CostTable) -> u64 {
        BasisKind::ALL.iter().map(|&k| self.get(k) * table.weight(k)).sum()
    }
}

/// Length of the longest qubit-dependency chain under ASAP layering.
pub fn depth(ops: &[BasisOp]) -> u64 {
    let mut layer: BTreeMap<usize, u64> = BTreeMap::new();
    let mut deepest = 0;
    for op in ops {
        let l = 1 + op.qubits().map(|q| layer.get(&q).copied().unwrap_or(0)).max().unwrap_or(0);
        for q in op.qubits() {
            layer.insert(q, l);
        }
        deepest = deepest.max(l);
    }
    deepest
}

pub fn cost(ops: &[BasisOp], table: &CostTable) -> u64 {
    GateCounts::of(ops).cost(table)
}

/// Counts, depth and cost of the program prefix ending at a marker.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostRow {
    pub step: String,
    #[serde(flatten)]
    pub counts: GateCounts,
    pub depth: u64,
    pub cost: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    /// Source circuit width.
    pub width: usize,
    /// Extra ancillas introduced by lowering.
    pub ancillas: usize,
    pub counts: GateCounts,
    pub depth: u64,
    pub cost: u64,
    pub rows: Vec<CostRow>,
}

impl CostReport {
    pub fn row(&self, step: &str) -> Option<&CostRow> {
        self.rows.iter().find(|r| r.step == step)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,cnot,rz,sx,x,id,depth,cost\n");
        for r in &self.rows {
            let c = &r.counts;
            writeln!(out, "{},{},{},{},{},{},{},{}", r.step, c.cnot, c.rz, c.sx, c.x, c.id, r.depth, r.cost)
                .expect("writing to a String");
        }
        out
    }
}

fn row(step: &str, ops: &[BasisOp], table: &CostTable) -> CostRow {
    let counts = GateCounts::of(ops);
    CostRow { step: step.to_string(), counts, depth: depth(ops), cost: counts.cost(table) }
}

/// Report for a lowered program with one cumulative row per marker.
pub fn program_report(program: &BasisProgram, width: usize, table: &CostTable) -> CostReport {
    let counts = GateCounts::of(&program.ops);
    CostReport {
        width,
        ancillas: program.ancillas,
        counts,
        depth: depth(&program.ops),
        cost: counts.cost(table),
        rows: program.markers.iter().map(|(name, end)| row(name, &program.ops[..*end], table)).collect(),
    }
}

/// Lower once and tabulate every marker prefix of `circuit`.
pub fn cumulative_report(circuit: &Circuit, table: &CostTable) -> Result<CostReport> {
    let positions: Vec<usize> = circuit.markers().iter().map(|m| m.position).collect();
    if positions.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("markers are not in circuit order".into()));
    }
    let program = transpile(circuit)?;
    Ok(program_report(&program, circuit.num_qubits(), table))
}
