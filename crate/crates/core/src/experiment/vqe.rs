//! VQE part (optimisation with ±θ paired evaluations) and state-preparation
//! part (repeated high-shot measurements with the mitigation stack).

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::circuits::{max_stats, Ansatz, CircuitStats};
use crate::exec;
use crate::mitigation::symmetry::{average_stats, ph_transform_observable, reflection_average_stats};
use crate::mitigation::{
    choose_flo_points, mitigate_energy, particle_hole_stage, ph_average, select_run, tflo_observable,
    FloMeasurement, MitigationFlags, PairedEstimate, RawEnergyData,
};
use crate::observables::{observable_set, DiagonalStats, Flag, ObservableEstimate, Stage};
use crate::optim::{NoisyObjective, OptimResult};
use crate::reference::{flo_reference, AnsatzEvaluator};
use crate::simulator::rng::derive;
use crate::simulator::{estimate_energy, EnergyMeasurement, EstimateOptions, GroupResult, NoiseModel};
use crate::{Result, SectorSpec};

use super::config::ShotBudget;

/// Energy at θ and −θ plus the onsite statistics of both runs.
pub struct PairedMeasurement {
    pub estimate: PairedEstimate,
    pub plus: EnergyMeasurement,
    pub minus: EnergyMeasurement,
}

impl PairedMeasurement {
    pub fn stats(&self, ansatz: &Ansatz) -> Result<(DiagonalStats, DiagonalStats)> {
        let s = |m: &EnergyMeasurement| DiagonalStats::from_batch(&m.onsite_batch, &ansatz.layout, m.onsite_shots);
        Ok((s(&self.plus)?, s(&self.minus)?))
    }
}

/// Measure the energy at `theta` and `-theta` with `shots` per circuit.
/// Adds the number of shots taken to `tally`.
pub fn measure_paired(
    ansatz: &Ansatz,
    theta: &[f64],
    noise: &NoiseModel,
    shots: usize,
    seed: u64,
    opts: &EstimateOptions,
    tally: &AtomicU64,
) -> Result<PairedMeasurement> {
    let neg: Vec<f64> = theta.iter().map(|t| -t).collect();
    let run = |p: &[f64], k: u64| -> Result<EnergyMeasurement> {
        let circuits = ansatz.measurement_circuits(p)?;
        tally.fetch_add((shots * circuits.len()) as u64, Ordering::Relaxed);
        estimate_energy(&circuits, &ansatz.sector, &ansatz.layout, noise, shots, derive(seed, k), opts)
    };
    let plus = run(theta, 0)?;
    let minus = run(&neg, 1)?;
    Ok(PairedMeasurement {
        estimate: PairedEstimate { plus: plus.energy.clone(), minus: minus.energy.clone() },
        plus,
        minus,
    })
}

/// Objective of the VQE part: time-reversal averaged, postselected energy.
pub struct VqeObjective {
    pub ansatz: Ansatz,
    pub noise: NoiseModel,
    pub shots: usize,
    pub opts: EstimateOptions,
    evaluator: AnsatzEvaluator,
    tally: AtomicU64,
}

impl VqeObjective {
    pub fn new(ansatz: Ansatz, noise: NoiseModel, shots: usize, opts: EstimateOptions) -> Self {
        let evaluator = AnsatzEvaluator::new(ansatz.clone());
        Self { ansatz, noise, shots, opts, evaluator, tally: AtomicU64::new(0) }
    }

    /// Shots taken so far, summed over all measurement circuits.
    pub fn shots_used(&self) -> u64 {
        self.tally.load(Ordering::Relaxed)
    }
}

impl NoisyObjective for VqeObjective {
    fn dim(&self) -> usize {
        self.ansatz.n_params()
    }

    fn evaluate(&self, theta: &[f64], seed: u64) -> Result<(f64, f64)> {
        let m = measure_paired(&self.ansatz, theta, &self.noise, self.shots, seed, &self.opts, &self.tally)?;
        let e = m.estimate.symmetrized(true);
        Ok((e.value, e.stderr))
    }

    fn cost(&self) -> usize {
        2
    }

    fn exact(&self, theta: &[f64]) -> Option<f64> {
        self.evaluator.energy(theta).ok()
    }
}

/// Settings of the state-preparation part.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePrepConfig {
    pub noise: NoiseModel,
    pub shots: ShotBudget,
    pub repetitions: usize,
    pub flags: MitigationFlags,
    pub tflo_points: usize,
    pub resamples: usize,
    pub opts: EstimateOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionSummary {
    /// Postselected energy at θ, the run-selection criterion.
    pub ps_energy: f64,
    pub ps_stderr: f64,
    pub retention: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePrepResult {
    pub params: Vec<f64>,
    /// Noiseless energy of the ansatz state at `params`.
    pub exact_energy: f64,
    pub repetitions: Vec<RepetitionSummary>,
    pub selected: usize,
    /// Raw inputs of the energy pipeline for the selected repetition.
    pub raw: RawEnergyData,
    pub groups: Vec<GroupResult>,
    /// Energy after each stage, in pipeline order.
    pub energy: Vec<ObservableEstimate>,
    /// For each reported observable, its value after each stage.
    pub observables: Vec<Vec<ObservableEstimate>>,
    pub flo_spread_collapse: bool,
    pub shots: u64,
}

impl StatePrepResult {
    pub fn final_energy(&self) -> &ObservableEstimate {
        self.energy.last().expect("at least the PS stage")
    }

    pub fn stage_energy(&self, stage: Stage) -> Option<&ObservableEstimate> {
        self.energy.iter().find(|e| e.last_stage() == stage)
    }
}

struct Repetition {
    target: PairedMeasurement,
    closest: Option<PairedMeasurement>,
    training: Vec<PairedMeasurement>,
}

fn symmetrized_stats(
    m: &PairedMeasurement,
    ansatz: &Ansatz,
    flags: &MitigationFlags,
) -> Result<DiagonalStats> {
    let (p, n) = m.stats(ansatz)?;
    let mut s = if flags.time_reversal { average_stats(&p, &n) } else { p };
    if flags.reflection {
        s = reflection_average_stats(&s, &ansatz.lattice);
    }
    Ok(s)
}

/// Parameters with every onsite angle set to zero.
pub fn closest_flo(ansatz: &Ansatz, params: &[f64]) -> Vec<f64> {
    let mut p = params.to_vec();
    for i in ansatz.onsite_indices() {
        p[i] = 0.0;
    }
    p
}

/// Closed-form shot count of one state-preparation run.
pub fn state_prep_budget(cfg: &StatePrepConfig, groups: usize) -> u64 {
    let mut per_sign = cfg.shots.final_state;
    if cfg.flags.tflo {
        per_sign += cfg.shots.tflo_closest + cfg.tflo_points * cfg.shots.tflo_training;
    }
    (cfg.repetitions * 2 * groups * per_sign) as u64
}

/// Repeated measurement of the state at `params` (and of the FLO training
/// circuits), run selection and the energy/observable mitigation stages up
/// to Coh.
pub fn state_prep(ansatz: &Ansatz, params: &[f64], cfg: &StatePrepConfig, seed: u64) -> Result<StatePrepResult> {
    cfg.flags.validate()?;
    let tally = AtomicU64::new(0);
    let evaluator = AnsatzEvaluator::new(ansatz.clone());
    let exact_energy = evaluator.energy(params)?;
    let closest_params = closest_flo(ansatz, params);

    let mut selection = None;
    let mut exact_sets: Vec<Vec<ObservableEstimate>> = Vec::new();
    let mut closest_exact = None;
    if cfg.flags.tflo {
        let sel = choose_flo_points(
            ansatz.lattice.params_per_layer(),
            ansatz.layers,
            cfg.tflo_points,
            derive(seed, 1),
            |p| evaluator.energy(p),
        )?;
        exact_sets = exec::try_map_slice(&sel.params, |p| {
            flo_reference(ansatz, p).map(|(_, s)| observable_set(&s, &ansatz.layout))
        })?;
        let (e, s) = flo_reference(ansatz, &closest_params)?;
        closest_exact = Some((e, observable_set(&s, &ansatz.layout)));
        selection = Some(sel);
    }

    let mut reps = Vec::with_capacity(cfg.repetitions);
    for r in 0..cfg.repetitions {
        let rs = derive(seed, 100 + r as u64);
        let target = measure_paired(ansatz, params, &cfg.noise, cfg.shots.final_state, derive(rs, 0), &cfg.opts, &tally)?;
        let (closest, training) = match &selection {
            Some(sel) => {
                let c = measure_paired(
                    ansatz,
                    &closest_params,
                    &cfg.noise,
                    cfg.shots.tflo_closest,
                    derive(rs, 1),
                    &cfg.opts,
                    &tally,
                )?;
                let t = exec::try_map_range(sel.params.len(), |k| {
                    measure_paired(
                        ansatz,
                        &sel.params[k],
                        &cfg.noise,
                        cfg.shots.tflo_training,
                        derive(rs, 2 + k as u64),
                        &cfg.opts,
                        &tally,
                    )
                })?;
                (Some(c), t)
            }
            None => (None, Vec::new()),
        };
        reps.push(Repetition { target, closest, training });
    }
    let summaries: Vec<RepetitionSummary> = reps
        .iter()
        .map(|r| RepetitionSummary {
            ps_energy: r.target.plus.energy.value,
            ps_stderr: r.target.plus.energy.stderr,
            retention: r.target.plus.groups.iter().map(|g| g.retention).collect(),
        })
        .collect();
    let selected = select_run(&summaries.iter().map(|s| s.ps_energy).collect::<Vec<_>>());
    let rep = &reps[selected];

    let flo = |params: &[f64], exact: f64, m: &PairedMeasurement| FloMeasurement {
        params: params.to_vec(),
        exact,
        measured: m.estimate.clone(),
    };
    let raw = RawEnergyData {
        target: rep.target.estimate.clone(),
        closest: rep
            .closest
            .as_ref()
            .zip(closest_exact.as_ref())
            .map(|(m, (e, _))| flo(&closest_params, *e, m)),
        training: selection
            .as_ref()
            .map(|sel| {
                rep.training
                    .iter()
                    .enumerate()
                    .map(|(k, m)| flo(&sel.params[k], sel.exact[k], m))
                    .collect()
            })
            .unwrap_or_default(),
    };
    let mut energy = mitigate_energy(&raw, &cfg.flags, cfg.resamples, derive(seed, 2))?;
    let collapse = selection.as_ref().is_some_and(|s| s.spread_collapse);
    if collapse {
        for e in energy.iter_mut() {
            e.flags.push(Flag::SpreadCollapse);
        }
    }

    // Observables, stage by stage.
    let (plus_stats, _) = rep.target.stats(ansatz)?;
    let ps = observable_set(&plus_stats, &ansatz.layout);
    let mut observables: Vec<Vec<ObservableEstimate>> = ps.into_iter().map(|o| vec![o]).collect();
    let sym = observable_set(&symmetrized_stats(&rep.target, ansatz, &cfg.flags)?, &ansatz.layout)
        .into_iter()
        .map(|o| o.staged(Stage::Symmetrized, o.value, o.stderr));
    if cfg.flags.time_reversal || cfg.flags.reflection {
        for (list, o) in observables.iter_mut().zip(sym) {
            list.push(o);
        }
    }
    if let (Some(closest), Some((_, closest_ex))) = (&rep.closest, &closest_exact) {
        let noisy_sets = exec::try_map_slice(&rep.training, |m| {
            symmetrized_stats(m, ansatz, &cfg.flags).map(|s| observable_set(&s, &ansatz.layout))
        })?;
        let closest_noisy = observable_set(&symmetrized_stats(closest, ansatz, &cfg.flags)?, &ansatz.layout);
        let mc_seed = derive(seed, 3);
        let staged = exec::map_range(observables.len(), |k| {
            let target = observables[k].last().expect("PS stage").clone();
            let exact: Vec<f64> = exact_sets.iter().map(|s| s[k].value).collect();
            let noisy: Vec<(f64, f64)> = noisy_sets.iter().map(|s| (s[k].value, s[k].stderr)).collect();
            let cl = (closest_ex[k].value, (closest_noisy[k].value, closest_noisy[k].stderr));
            let finite = exact.iter().chain(noisy.iter().map(|n| &n.0)).chain([&cl.0, &cl.1 .0, &target.value]).all(|v| v.is_finite());
            if !finite {
                let t = target.staged(Stage::Tflo, target.value, target.stderr).with_flag(Flag::TfloPassThrough);
                let c = t.staged(Stage::Coherent, target.value, target.stderr);
                return (t, c);
            }
            let (t, c, _) = tflo_observable(&exact, &noisy, cl, &target, cfg.resamples, derive(mc_seed, k as u64));
            (t, c)
        });
        for (list, (t, c)) in observables.iter_mut().zip(staged) {
            list.push(t);
            if cfg.flags.coherent_correction {
                list.push(c);
            }
        }
    }

    Ok(StatePrepResult {
        params: params.to_vec(),
        exact_energy,
        repetitions: summaries,
        selected,
        raw,
        groups: rep.target.plus.groups.clone(),
        energy,
        observables,
        flo_spread_collapse: collapse,
        shots: tally.load(Ordering::Relaxed),
    })
}

/// One occupation sector of a VQE or measurement run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorRun {
    pub n_occ: usize,
    pub sector: SectorSpec,
    pub ground_energy: f64,
    pub circuit_stats: CircuitStats,
    pub optimizer: Option<OptimResult>,
    pub vqe_shots: u64,
    pub state_prep: StatePrepResult,
}

/// Maximal native-circuit statistics over the measurement circuits.
pub fn measurement_stats(ansatz: &Ansatz, params: &[f64], spin_echo: bool) -> Result<CircuitStats> {
    let mut natives = Vec::new();
    for m in ansatz.measurement_circuits(params)? {
        let mut n = m.circuit.to_native();
        if spin_echo {
            n = crate::circuits::apply_spin_echo(&n)?;
        }
        natives.push(n);
    }
    Ok(max_stats(natives.iter()))
}

/// Append the PHS stage to every run whose particle-hole partner
/// (total occupation 2L − N) is present; the half-filled sector pairs with
/// itself.
pub fn apply_particle_hole(runs: &mut [SectorRun], lattice: &crate::LatticeSpec) {
    let l = lattice.n_sites();
    let finals: Vec<(usize, ObservableEstimate, Vec<ObservableEstimate>)> = runs
        .iter()
        .map(|r| {
            let obs = r.state_prep.observables.iter().map(|o| o.last().expect("stage").clone()).collect();
            (r.n_occ, r.state_prep.final_energy().clone(), obs)
        })
        .collect();
    for run in runs.iter_mut() {
        let n = run.n_occ;
        if n > 2 * l {
            continue;
        }
        let partner_n = 2 * l - n;
        let Some((_, pe, pobs)) = finals.iter().find(|f| f.0 == partner_n) else {
            continue;
        };
        let own = run.state_prep.final_energy().clone();
        let partner = (partner_n != n).then_some((pe, partner_n));
        run.state_prep.energy.push(particle_hole_stage(&own, partner, lattice));
        let spin_flip = n % 2 == 1;
        for (list, p) in run.state_prep.observables.iter_mut().zip(pobs) {
            let cur = list.last().expect("stage").clone();
            let next = if partner_n == n {
                cur.staged(Stage::ParticleHole, cur.value, cur.stderr)
            } else {
                ph_average(&cur, &ph_transform_observable(p, spin_flip))
            };
            list.push(next);
        }
    }
}
