//! Ansatz circuits, gate decompositions and circuit statistics.

pub mod circuit;
pub mod ehv;
pub mod gate;
pub mod givens;

pub use circuit::{apply_spin_echo, Circuit, CircuitStats};
pub use ehv::{Ansatz, MeasGroup, MeasurementCircuit, Readout};
pub use gate::{decompose, gate_unitary, Gate, GateKind, Unitary};
pub use givens::build_initial_prep;

/// Largest statistics over a set of circuits (the worst measurement circuit).
pub fn max_stats<'a>(circuits: impl IntoIterator<Item = &'a Circuit>) -> CircuitStats {
    circuits
        .into_iter()
        .map(Circuit::stats)
        .fold(CircuitStats::default(), |a, b| CircuitStats {
            total_depth: a.total_depth.max(b.total_depth),
            two_qubit_depth: a.two_qubit_depth.max(b.two_qubit_depth),
            two_qubit_count: a.two_qubit_count.max(b.two_qubit_count),
        })
}
