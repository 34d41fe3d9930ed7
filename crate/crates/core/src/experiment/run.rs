//! Top-level runs driven by an [`ExperimentConfig`].

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuits::Ansatz;
use crate::observables::{chemical_potentials, ChemicalPotentials, Stage};
use crate::optim::harness::compare;
use crate::optim::{self, OptimResult};
use crate::reference::{exact_ground, optimal_slater, simulate_vqe_optimum};
use crate::simulator::rng::derive;
use crate::simulator::EstimateOptions;
use crate::{exec, Error, Result};

use super::config::{compare_optimizer, ExperimentConfig};
use super::vqe::{
    apply_particle_hole, measurement_stats, state_prep, state_prep_budget, SectorRun, StatePrepConfig,
    VqeObjective,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Shots implied by the configuration versus shots actually simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub expected: u64,
    pub used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub schema_version: u32,
    pub command: String,
    pub config: ExperimentConfig,
    pub runs: Vec<SectorRun>,
    #[serde(default)]
    pub failures: Vec<RunFailure>,
    pub chemical_potentials: Option<ChemicalPotentials>,
    pub budget: Budget,
}

impl ResultsFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialise")
    }

    /// Exit code of the first failed cell, if any.
    pub fn exit_code(&self) -> i32 {
        self.failures.first().map_or(0, |f| f.exit_code)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "results schema version {} is not supported (expected {SCHEMA_VERSION})",
                r.schema_version
            )));
        }
        Ok(r)
    }
}

fn state_prep_config(cfg: &ExperimentConfig) -> Result<StatePrepConfig> {
    Ok(StatePrepConfig {
        noise: cfg.noise_model()?,
        shots: cfg.shots,
        repetitions: cfg.repetitions,
        flags: cfg.mitigation,
        tflo_points: cfg.tflo_points,
        resamples: cfg.resamples,
        opts: estimate_options(cfg),
    })
}

fn estimate_options(cfg: &ExperimentConfig) -> EstimateOptions {
    EstimateOptions { spin_echo: cfg.spin_echo, no_postselect: false }
}

pub fn ansatz(cfg: &ExperimentConfig, n_occ: usize) -> Result<Ansatz> {
    Ok(Ansatz::new(cfg.lattice()?, cfg.sector(n_occ)?, cfg.layout, cfg.layers))
}

/// A sweep cell that failed; the other cells are still reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub n_occ: usize,
    pub exit_code: i32,
    pub message: String,
}

type Cell = (SectorRun, u64);

fn finish(
    cfg: &ExperimentConfig,
    command: &str,
    occ: &[usize],
    cells: Vec<Result<Cell>>,
) -> Result<ResultsFile> {
    let lattice = cfg.lattice()?;
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    let mut expected = 0;
    for (&n, c) in occ.iter().zip(cells) {
        match c {
            Ok((r, e)) => {
                expected += e;
                runs.push(r);
            }
            Err(e) => failures.push(RunFailure { n_occ: n, exit_code: e.exit_code(), message: e.to_string() }),
        }
    }
    if cfg.mitigation.particle_hole {
        apply_particle_hole(&mut runs, &lattice);
    }
    let used = runs.iter().map(|r| r.vqe_shots + r.state_prep.shots).sum();
    let chemical_potentials = if runs.len() >= 2 && failures.is_empty() {
        let e: Vec<(usize, f64, f64)> = runs
            .iter()
            .map(|r| {
                let f = r.state_prep.final_energy();
                (r.n_occ, f.value, f.stderr)
            })
            .collect();
        Some(chemical_potentials(&e)?)
    } else {
        None
    };
    Ok(ResultsFile {
        schema_version: SCHEMA_VERSION,
        command: command.into(),
        config: cfg.clone(),
        runs,
        failures,
        chemical_potentials,
        budget: Budget { expected, used },
    })
}

fn vqe_cell(cfg: &ExperimentConfig, spec: &optim::OptimizerSpec, sp: &StatePrepConfig, n: usize) -> Result<Cell> {
    let a = ansatz(cfg, n)?;
    let seed = derive(cfg.seed, n as u64);
    let theta0 = cfg.initial_params(a.n_params())?;
    let obj = VqeObjective::new(a.clone(), sp.noise, cfg.shots.per_eval, sp.opts);
    let result: OptimResult = optim::run(spec, &obj, &theta0, derive(seed, 0))?;
    let groups = a.measurement_circuits(&result.theta)?.len();
    let expected = (result.evals * groups * cfg.shots.per_eval) as u64 + state_prep_budget(sp, groups);
    let prep = state_prep(&a, &result.theta, sp, derive(seed, 1))?;
    let run = SectorRun {
        n_occ: n,
        sector: a.sector,
        ground_energy: exact_ground(&a.lattice, &a.sector)?.energy,
        circuit_stats: measurement_stats(&a, &result.theta, cfg.spin_echo)?,
        vqe_shots: obj.shots_used(),
        optimizer: Some(result),
        state_prep: prep,
    };
    Ok((run, expected))
}

fn measure_cell(cfg: &ExperimentConfig, sp: &StatePrepConfig, n: usize) -> Result<Cell> {
    let a = ansatz(cfg, n)?;
    let seed = derive(cfg.seed, n as u64);
    let params = match &cfg.params {
        Some(p) => p.clone(),
        None => simulate_vqe_optimum(&a, cfg.reference.vqe_restarts, derive(seed, 2))?.params,
    };
    let groups = a.measurement_circuits(&params)?.len();
    let prep = state_prep(&a, &params, sp, derive(seed, 1))?;
    let run = SectorRun {
        n_occ: n,
        sector: a.sector,
        ground_energy: exact_ground(&a.lattice, &a.sector)?.energy,
        circuit_stats: measurement_stats(&a, &params, cfg.spin_echo)?,
        vqe_shots: 0,
        optimizer: None,
        state_prep: prep,
    };
    Ok((run, state_prep_budget(sp, groups)))
}

/// VQE part followed by the state-preparation part, for every configured
/// occupation. Occupations run concurrently; a failing occupation is
/// recorded in `failures` and the others are kept.
pub fn run_vqe(cfg: &ExperimentConfig) -> Result<ResultsFile> {
    cfg.validate()?;
    let spec = cfg.optimizer_spec()?;
    let sp = state_prep_config(cfg)?;
    let occ = cfg.occupations()?;
    let cells = exec::map_slice(&occ, |&n| vqe_cell(cfg, &spec, &sp, n));
    finish(cfg, "vqe", &occ, cells)
}

/// State-preparation part only, at `params` from the config or at the
/// noiseless optimum.
pub fn run_measure(cfg: &ExperimentConfig) -> Result<ResultsFile> {
    cfg.validate()?;
    let sp = state_prep_config(cfg)?;
    let occ = cfg.occupations()?;
    let cells = exec::map_slice(&occ, |&n| measure_cell(cfg, &sp, n));
    finish(cfg, "measure", &occ, cells)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRow {
    pub n_occ: usize,
    pub e_exact: f64,
    pub e_vqe: f64,
    pub e_slater: f64,
}

/// Exact, noiseless-VQE and optimal-Slater energies per occupation.
pub fn run_exact(cfg: &ExperimentConfig) -> Result<Vec<ExactRow>> {
    cfg.validate()?;
    let occ = if cfg.sweep.is_none() && cfg.n_occ.is_none() {
        let l = cfg.lattice.lx * cfg.lattice.ly;
        (1..2 * l).collect()
    } else {
        cfg.occupations()?
    };
    exec::try_map_slice(&occ, |&n| {
        let a = ansatz(cfg, n)?;
        let seed = derive(cfg.seed, n as u64);
        Ok(ExactRow {
            n_occ: n,
            e_exact: exact_ground(&a.lattice, &a.sector)?.energy,
            e_vqe: simulate_vqe_optimum(&a, cfg.reference.vqe_restarts, derive(seed, 2))?.energy,
            e_slater: optimal_slater(&a.lattice, &a.sector, cfg.reference.slater_restarts.max(1), derive(seed, 3)),
        })
    })
}

pub fn exact_csv(rows: &[ExactRow], layers: usize) -> String {
    let mut s = format!("N_occ,E_exact,E_vqe_depth_{layers},E_slater\n");
    for r in rows {
        writeln!(s, "{},{:.12},{:.12},{:.12}", r.n_occ, r.e_exact, r.e_vqe, r.e_slater).unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub optimizer: String,
    pub eta: f64,
    pub seed: u64,
    pub iter: usize,
    pub evals: usize,
    pub exact: f64,
    pub predicted: f64,
    pub stderr: f64,
}

/// Seeded head-to-head optimizer runs with equal shots per iteration.
pub fn run_compare(cfg: &ExperimentConfig) -> Result<Vec<CompareRow>> {
    cfg.validate()?;
    let c = &cfg.compare;
    let mut rows = Vec::new();
    let push = |rows: &mut Vec<CompareRow>, label: &str, eta: f64, seed: u64, r: &OptimResult| {
        for t in &r.trace {
            rows.push(CompareRow {
                optimizer: label.into(),
                eta,
                seed,
                iter: t.iter,
                evals: t.evals,
                exact: t.exact.unwrap_or(f64::NAN),
                predicted: t.predicted,
                stderr: t.stderr,
            });
        }
    };
    for &eta in &c.etas {
        let opts: Vec<(String, optim::OptimizerSpec)> = c
            .optimizers
            .iter()
            .map(|name| compare_optimizer(name, eta).map(|s| (name.clone(), s)))
            .collect::<Result<_>>()?;
        if c.objective == "synthetic" {
            let trials = compare(&c.spec(cfg.seed), &opts)?;
            for t in &trials {
                push(&mut rows, &t.label, eta, t.seed, &t.result);
            }
        } else {
            let n = cfg.occupations()?[0];
            let a = ansatz(cfg, n)?;
            let theta0 = cfg.initial_params(a.n_params())?;
            let noise = cfg.noise_model()?;
            for (label, spec) in &opts {
                let per_iter = optim::harness::evals_per_iteration(spec, a.n_params());
                let shots = (c.shots_per_iteration / per_iter).max(1);
                let mut spec = spec.clone();
                spec.set_max_evals(c.iterations * per_iter * 2);
                for seed in 0..c.runs as u64 {
                    let obj = VqeObjective::new(a.clone(), noise, shots, estimate_options(cfg));
                    let r = optim::run(&spec, &obj, &theta0, derive(cfg.seed, seed))?;
                    push(&mut rows, label, eta, seed, &r);
                }
            }
        }
    }
    Ok(rows)
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut s = String::from("optimizer,eta,seed,iter,evals,exact,predicted,stderr\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{:.10},{:.10},{:.10}",
            r.optimizer, r.eta, r.seed, r.iter, r.evals, r.exact, r.predicted, r.stderr
        )
        .unwrap();
    }
    s
}

/// Stage-by-stage energy breakdown as CSV (`stage,value,stderr`), one block
/// per occupation.
pub fn stages_csv(results: &ResultsFile) -> String {
    let mut s = String::from("n_occ,stage,value,stderr\n");
    for r in &results.runs {
        for e in &r.state_prep.energy {
            writeln!(s, "{},{},{:.10},{:.10}", r.n_occ, e.last_stage().label(), e.value, e.stderr).unwrap();
        }
    }
    s
}

/// Re-run the energy pipeline on the raw estimates stored in `results`
/// (with the flags from its config) and return the stage breakdown.
pub fn remitigate(results: &ResultsFile) -> Result<ResultsFile> {
    let cfg = &results.config;
    let mut out = results.clone();
    for r in &mut out.runs {
        let seed = derive(derive(cfg.seed, r.n_occ as u64), 1);
        r.state_prep.energy =
            crate::mitigation::mitigate_energy(&r.state_prep.raw, &cfg.mitigation, cfg.resamples, derive(seed, 2))?;
        for list in &mut r.state_prep.observables {
            list.retain(|o| o.last_stage() != Stage::ParticleHole);
        }
    }
    if cfg.mitigation.particle_hole {
        apply_particle_hole(&mut out.runs, &cfg.lattice()?);
    }
    Ok(out)
}

/// Per-(lattice, U, N_occ, stage) table of energies and selected observables.
pub fn stats_table(results: &ResultsFile) -> String {
    let c = &results.config.lattice;
    let mut s = format!(
        "{:<6} {:>6} {:>5} {:<5} {:>14} {:>12} {:>14}\n",
        "lattice", "U", "N_occ", "stage", "energy", "stderr", "error_vs_exact"
    );
    for r in &results.runs {
        for e in &r.state_prep.energy {
            writeln!(
                s,
                "{:<7} {:>6.2} {:>5} {:<5} {:>14.6} {:>12.6} {:>14.6}",
                format!("{}x{}", c.lx, c.ly),
                c.u,
                r.n_occ,
                e.last_stage().label(),
                e.value,
                e.stderr,
                e.value - r.state_prep.exact_energy
            )
            .unwrap();
        }
    }
    if let Some(cp) = &results.chemical_potentials {
        s.push_str("\nN_occ     mu(N)    stderr\n");
        for (n, v, e) in &cp.mu {
            writeln!(s, "{n:>5} {v:>9.5} {e:>9.5}").unwrap();
        }
        s.push_str("\nN_occ    mu'(N)    stderr\n");
        for (n, v, e) in &cp.mu_prime {
            writeln!(s, "{n:>5} {v:>9.5} {e:>9.5}").unwrap();
        }
    }
    s
}

