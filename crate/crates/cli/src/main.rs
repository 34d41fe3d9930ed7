//! `fhvqe` command-line runner.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fhvqe::experiment::{self, ExperimentConfig, NoiseChoice, ResultsFile};
use fhvqe::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "fhvqe", version, about = "Fermi-Hubbard VQE simulation and error-mitigation runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override the master seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Print the measurement circuits (native gates, text form) for the
    /// configured parameters and exit.
    #[arg(long, global = true)]
    dump_circuit: bool,

    /// Override the noise model with a named preset.
    #[arg(long, global = true, value_name = "PRESET|none")]
    noise: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimise the ansatz, then run the mitigated state-preparation part.
    Vqe,
    /// Exact, noiseless-VQE and Slater energies per occupation (CSV).
    Exact,
    /// State-preparation part only, at configured or noiselessly optimal parameters.
    Measure,
    /// Re-run the energy mitigation pipeline on a results file (CSV).
    Mitigate {
        /// Results file written by `vqe` or `measure`.
        results: PathBuf,
    },
    /// Seeded head-to-head optimizer trials (per-iteration CSV).
    CompareOptimizers,
    /// Tables of staged energies and chemical potentials from a results file.
    Stats {
        results: PathBuf,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = &cli.noise {
        cfg.noise = NoiseChoice::Preset(n.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_results(path: &Path) -> Result<ResultsFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read results file {}: {e}", path.display())))?;
    ResultsFile::from_json(&text)
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dump_circuits(cfg: &ExperimentConfig) -> Result<String> {
    let mut s = String::new();
    for n in cfg.occupations()? {
        let a = experiment::run::ansatz(cfg, n)?;
        let params = match &cfg.params {
            Some(p) => p.clone(),
            None => cfg.initial_params(a.n_params())?,
        };
        for m in a.measurement_circuits(&params)? {
            let c = m.circuit.to_native();
            let st = c.stats();
            s.push_str(&format!(
                "# N_occ {n} group {:?} depth {} 2q-depth {} 2q-count {}\n",
                m.group, st.total_depth, st.two_qubit_depth, st.two_qubit_count
            ));
            s.push_str(&c.to_text());
        }
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<i32> {
    let results_cmd = matches!(cli.command, Command::Mitigate { .. } | Command::Stats { .. });
    if cli.dump_circuit {
        let cfg = match &cli.command {
            Command::Mitigate { results } | Command::Stats { results } => load_results(results)?.config,
            _ => load_config(cli)?,
        };
        emit(cli, &dump_circuits(&cfg)?)?;
        return Ok(0);
    }
    if results_cmd && (cli.config.is_some() || cli.seed.is_some() || cli.noise.is_some()) {
        return Err(Error::Config(
            "--config, --seed and --noise do not apply to a stored results file".into(),
        ));
    }
    let code = match &cli.command {
        Command::Vqe | Command::Measure => {
            let cfg = load_config(cli)?;
            let r = if matches!(cli.command, Command::Vqe) {
                experiment::run_vqe(&cfg)?
            } else {
                experiment::run_measure(&cfg)?
            };
            for f in &r.failures {
                eprintln!("N_occ {}: {}", f.n_occ, f.message);
            }
            emit(cli, &r.to_json())?;
            r.exit_code()
        }
        Command::Exact => {
            let cfg = load_config(cli)?;
            let rows = experiment::run_exact(&cfg)?;
            emit(cli, &experiment::exact_csv(&rows, cfg.layers))?;
            0
        }
        Command::CompareOptimizers => {
            let cfg = load_config(cli)?;
            emit(cli, &experiment::compare_csv(&experiment::run_compare(&cfg)?))?;
            0
        }
        Command::Mitigate { results } => {
            let r = experiment::remitigate(&load_results(results)?)?;
            emit(cli, &experiment::stages_csv(&r))?;
            0
        }
        Command::Stats { results } => {
            emit(cli, &experiment::stats_table(&load_results(results)?))?;
            0
        }
    };
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
