//! Lowering to the basis `{CNOT, ID, RZ, SX, X}` with depth and cost
//! accounting.

mod basis;
mod cost;
mod lower;

pub use basis::{BasisKind, BasisOp, BasisProgram};
pub use cost::{cost, cumulative_report, depth, program_report, CostReport, CostRow, CostTable, GateCounts};
pub use lower::transpile;
