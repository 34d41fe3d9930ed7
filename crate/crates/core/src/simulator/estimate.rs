//! Energy estimation from measurement circuits.

use super::noise::{apply_native, lower_with_bias, measure_state, run_noisy, NoiseModel};
use super::rng::derive;
use super::sampling::ShotBatch;
use super::state::StateVector;
use crate::circuits::{apply_spin_echo, Circuit, MeasGroup, MeasurementCircuit};
use crate::error::{Error, Result};
use crate::exec;
use crate::mitigation::{postselect, postselected_variance};
use crate::model::{JwLayout, SectorSpec};
use crate::observables::{ObservableEstimate, Stage};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EstimateOptions {
    /// Interleave X layers around alternate two-qubit layers.
    pub spin_echo: bool,
    /// Skip occupation postselection (keeps every shot).
    pub no_postselect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    pub group: MeasGroup,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub kept: usize,
    pub shots: usize,
    pub retention: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMeasurement {
    pub energy: ObservableEstimate,
    pub groups: Vec<GroupResult>,
    /// Postselected shots of the onsite (diagonal) circuit.
    pub onsite_batch: ShotBatch,
    /// Shots taken for the onsite circuit before postselection.
    pub onsite_shots: usize,
}

fn sub_circuit(c: &Circuit, from: usize, to: usize) -> Circuit {
    Circuit {
        n_qubits: c.n_qubits,
        moments: c.moments[from..to].to_vec(),
    }
}

/// Raw (pre-postselection) batches for each measurement circuit.
///
/// Group `k` uses seed `derive(seed, k)`. Without depolarizing noise or spin
/// echo the shared ansatz prefix is simulated once; without any noise the
/// composite gates are simulated directly (same unitary up to global phase).
pub fn measurement_batches(
    circuits: &[MeasurementCircuit],
    noise: &NoiseModel,
    shots: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<Vec<ShotBatch>> {
    if circuits.is_empty() {
        return Ok(Vec::new());
    }
    if shots == 0 {
        return Err(Error::Config("shots per group must be at least 1".into()));
    }
    let n = circuits[0].circuit.n_qubits;
    if noise.depolarizing_2q == 0.0 && !opts.spin_echo {
        let prefix = circuits.iter().map(|m| m.shared_prefix).min().unwrap_or(0);
        let exact = noise.is_zero();
        let base = &circuits[0].circuit;
        let mut state = StateVector::zero(n)?;
        let head = sub_circuit(base, 0, prefix);
        if exact {
            state.apply_circuit(&head)?;
        } else {
            apply_native(&mut state, &lower_with_bias(&head, noise), noise)?;
        }
        return exec::try_map_range(circuits.len(), |k| {
            let mc = &circuits[k].circuit;
            let tail = sub_circuit(mc, prefix, mc.moments.len());
            let mut s = state.clone();
            if exact {
                s.apply_circuit(&tail)?;
            } else {
                apply_native(&mut s, &lower_with_bias(&tail, noise), noise)?;
            }
            Ok(measure_state(&s, noise, shots, derive(seed, k as u64)))
        });
    }
    exec::try_map_range(circuits.len(), |k| {
        let mut native = lower_with_bias(&circuits[k].circuit, noise);
        if opts.spin_echo {
            native = apply_spin_echo(&native)?;
        }
        run_noisy(&native, noise, shots, derive(seed, k as u64))
    })
}

/// Energy estimate: sum of per-group postselected means, with standard error
/// from the postselected-variance formula.
pub fn estimate_energy(
    circuits: &[MeasurementCircuit],
    sector: &SectorSpec,
    layout: &JwLayout,
    noise: &NoiseModel,
    shots: usize,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<EnergyMeasurement> {
    let batches = measurement_batches(circuits, noise, shots, seed, opts)?;
    let mut groups = Vec::with_capacity(circuits.len());
    let mut onsite = None;
    let (mut e, mut var) = (0.0, 0.0);
    for (mc, batch) in circuits.iter().zip(batches) {
        let (kept, retention) = if opts.no_postselect {
            (batch.clone(), 1.0)
        } else {
            postselect(&batch, sector, layout).map_err(|err| match err {
                Error::EmptyPostselection { .. } => Error::EmptyPostselection {
                    context: format!("group {:?}", mc.group),
                },
                other => other,
            })?
        };
        let vals: Vec<f64> = kept.bits.iter().map(|&b| mc.readout.energy(b)).collect();
        let m = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / m;
        let variance = if vals.len() > 1 {
            vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        let gvar = postselected_variance(variance, shots, retention)?;
        e += mean;
        var += gvar;
        groups.push(GroupResult {
            group: mc.group,
            mean,
            variance,
            stderr: gvar.sqrt(),
            kept: vals.len(),
            shots,
            retention,
        });
        if mc.group == MeasGroup::Onsite {
            onsite = Some(kept);
        }
    }
    let onsite_batch = onsite.ok_or_else(|| Error::Config("no onsite measurement circuit".into()))?;
    let mut energy = ObservableEstimate::energy(e, var.sqrt());
    if !opts.no_postselect {
        energy.stages.push(Stage::Postselected);
    }
    Ok(EnergyMeasurement {
        energy,
        groups,
        onsite_batch,
        onsite_shots: shots,
    })
}
