//! Insurance payoff circuits: whole-life weighted sums and dynamic lapse.

mod adder;
mod lapse;
mod mortality;
mod scenario;
mod whole_life;

pub use adder::{append_weighted_sum, sum_register_size, weighted_adder_circuit, weighted_adder_with_size};
pub use lapse::{
    dynamic_lapse_circuit, lapse_laf, stopped_law, DynamicLapseCircuit, LapseLayout, LapseModel, MarkerLaws,
    PayoffReport, StoppedLaw,
};
pub use mortality::{mortality_weights, MortalityTable};
pub use scenario::{DistributionSpec, Grid, Scenario, DEFAULT_SCALE};
pub use whole_life::{classical_whole_life_pv, whole_life_circuit, WholeLifeCircuit, WholeLifeReport};

/// Exact register laws at every marker of a dynamic-lapse circuit.
pub fn payoff_report(circuit: &DynamicLapseCircuit) -> crate::Result<PayoffReport> {
    circuit.report()
}
