//! Experiment runner: configuration, VQE and state-preparation parts,
//! exact sweeps and optimizer comparisons.

pub mod config;
pub mod run;
pub mod vqe;

pub use config::{ExperimentConfig, LatticeConfig, NoiseChoice, OptimizerChoice, ShotBudget};
pub use run::{
    exact_csv, compare_csv, remitigate, run_compare, run_exact, run_measure, run_vqe, stages_csv, stats_table,
    Budget, CompareRow, ExactRow, ResultsFile, RunFailure, SCHEMA_VERSION,
};
pub use vqe::{measure_paired, state_prep, StatePrepConfig, StatePrepResult, VqeObjective};
