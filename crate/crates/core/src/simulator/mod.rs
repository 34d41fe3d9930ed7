//! Statevector simulation, sampling and noise.

pub mod estimate;
pub mod noise;
pub mod rng;
pub mod sampling;
pub mod state;

pub use estimate::{estimate_energy, measurement_batches, EnergyMeasurement, EstimateOptions, GroupResult};
pub use noise::{run_noisy, NoiseModel};
pub use sampling::{sample, ShotBatch};
pub use state::{dense_unitary, phase_distance, StateVector};

use crate::circuits::Circuit;
use crate::error::Result;

/// Final state of a circuit applied to |0...0>.
pub fn simulate(c: &Circuit) -> Result<StateVector> {
    let mut s = StateVector::zero(c.n_qubits)?;
    s.apply_circuit(c)?;
    Ok(s)
}
