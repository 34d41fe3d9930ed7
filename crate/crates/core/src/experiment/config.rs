//! TOML experiment configuration.

use serde::{Deserialize, Serialize};

use crate::mitigation::MitigationFlags;
use crate::model::{LatticeSpec, Layout, SectorSpec};
use crate::optim::{Hyperparams, OptimizerSpec, PRESETS};
use crate::optim::harness::CompareSpec;
use crate::simulator::NoiseModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub lx: usize,
    pub ly: usize,
    pub u: f64,
}

/// Optimizer given by preset name (`"auto"` picks by lattice) or in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OptimizerChoice {
    Preset(String),
    Spec(OptimizerSpec),
}

/// Noise given by preset name or as explicit channel strengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseChoice {
    Preset(String),
    Model(NoiseModel),
}

/// Shots per measurement circuit for each kind of energy estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShotBudget {
    pub per_eval: usize,
    pub final_state: usize,
    pub tflo_closest: usize,
    pub tflo_training: usize,
}

impl Default for ShotBudget {
    fn default() -> Self {
        Self { per_eval: 1000, final_state: 100_000, tflo_closest: 100_000, tflo_training: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReferenceConfig {
    /// Random restarts of the noiseless ansatz optimisation.
    pub vqe_restarts: usize,
    pub slater_restarts: usize,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self { vqe_restarts: 8, slater_restarts: 4 }
    }
}

/// `compare-optimizers` settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    /// `"synthetic"` (noisy quadratic) or `"vqe"` (the configured instance).
    pub objective: String,
    pub optimizers: Vec<String>,
    pub etas: Vec<f64>,
    pub runs: usize,
    pub iterations: usize,
    pub n_params: usize,
    pub shots_per_iteration: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            objective: "synthetic".into(),
            optimizers: vec!["bayesmgd".into(), "mgd".into(), "spsa".into()],
            etas: vec![0.05, 0.7, 1.5],
            runs: 10,
            iterations: 30,
            n_params: 8,
            shots_per_iteration: 68_000,
        }
    }
}

impl CompareConfig {
    pub fn spec(&self, seed: u64) -> CompareSpec {
        CompareSpec {
            n_params: self.n_params,
            iterations: self.iterations,
            shots_per_iteration: self.shots_per_iteration,
            shot_sigma: 1.0,
            instance_seed: seed,
            seeds: (0..self.runs as u64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Single occupation N_occ; defaults to half filling.
    pub n_occ: Option<usize>,
    /// Inclusive occupation range; overrides `n_occ`.
    pub sweep: Option<[usize; 2]>,
    pub layers: usize,
    pub layout: Layout,
    pub repetitions: usize,
    pub spin_echo: bool,
    /// Initial parameters: empty means 0.1 everywhere, one entry is broadcast.
    pub theta0: Vec<f64>,
    /// Parameters for `measure`; the noiseless optimum is used when absent.
    pub params: Option<Vec<f64>>,
    pub tflo_points: usize,
    pub resamples: usize,
    pub optimizer: OptimizerChoice,
    pub noise: NoiseChoice,
    pub lattice: LatticeConfig,
    pub shots: ShotBudget,
    pub mitigation: MitigationFlags,
    pub reference: ReferenceConfig,
    pub compare: CompareConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_occ: None,
            sweep: None,
            layers: 1,
            layout: Layout::Zigzag,
            repetitions: 3,
            spin_echo: false,
            theta0: Vec::new(),
            params: None,
            tflo_points: 16,
            resamples: 1000,
            optimizer: OptimizerChoice::Preset("auto".into()),
            noise: NoiseChoice::Preset("none".into()),
            lattice: LatticeConfig { lx: 1, ly: 8, u: 4.0 },
            shots: ShotBudget::default(),
            mitigation: MitigationFlags::default(),
            reference: ReferenceConfig::default(),
            compare: CompareConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn lattice(&self) -> Result<LatticeSpec> {
        LatticeSpec::new(self.lattice.lx, self.lattice.ly, self.lattice.u)
    }

    pub fn occupations(&self) -> Result<Vec<usize>> {
        let l = self.lattice.lx * self.lattice.ly;
        let occ: Vec<usize> = match (self.sweep, self.n_occ) {
            (Some([a, b]), _) => (a..=b).collect(),
            (None, Some(n)) => vec![n],
            (None, None) => vec![l],
        };
        if occ.is_empty() || occ.iter().any(|&n| n > 2 * l) {
            return Err(Error::Config(format!("occupations must lie in 0..={}", 2 * l)));
        }
        Ok(occ)
    }

    pub fn sector(&self, n_occ: usize) -> Result<SectorSpec> {
        SectorSpec::from_total(&self.lattice()?, n_occ)
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        let m = match &self.noise {
            NoiseChoice::Preset(name) => NoiseModel::preset(name)
                .ok_or_else(|| Error::Config(format!("unknown noise preset `{name}`")))?,
            NoiseChoice::Model(m) => *m,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn optimizer_spec(&self) -> Result<OptimizerSpec> {
        let spec = match &self.optimizer {
            OptimizerChoice::Preset(name) if name == "auto" => {
                let name = if self.lattice.lx == 2 {
                    "bayesmgd-2x4"
                } else if self.layers >= 2 {
                    "bayesmgd-1x4"
                } else {
                    "bayesmgd-1x8"
                };
                OptimizerSpec::preset(name).expect("known preset")
            }
            OptimizerChoice::Preset(name) => OptimizerSpec::preset(name).ok_or_else(|| {
                Error::Config(format!("unknown optimizer preset `{name}` (known: auto, {})", PRESETS.join(", ")))
            })?,
            OptimizerChoice::Spec(s) => s.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Starting point of the optimizer for `n` parameters.
    pub fn initial_params(&self, n: usize) -> Result<Vec<f64>> {
        match self.theta0.len() {
            0 => Ok(vec![0.1; n]),
            1 => Ok(vec![self.theta0[0]; n]),
            k if k == n => Ok(self.theta0.clone()),
            k => Err(Error::Config(format!("theta0 has {k} entries, ansatz has {n} parameters"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lat = self.lattice()?;
        for n in self.occupations()? {
            self.sector(n)?;
        }
        if self.layers == 0 {
            return Err(Error::Config("layers must be at least 1".into()));
        }
        if self.repetitions == 0 || self.resamples == 0 {
            return Err(Error::Config("repetitions and resamples must be positive".into()));
        }
        let s = &self.shots;
        if s.per_eval == 0 || s.final_state == 0 || s.tflo_closest == 0 || s.tflo_training == 0 {
            return Err(Error::Config("all shot budgets must be positive".into()));
        }
        if self.mitigation.tflo && self.tflo_points < 2 {
            return Err(Error::Config("TFLO needs at least 2 training points".into()));
        }
        self.noise_model()?;
        self.optimizer_spec()?;
        self.mitigation.validate()?;
        let n = lat.params_per_layer() * self.layers;
        self.initial_params(n)?;
        if let Some(p) = &self.params {
            if p.len() != n {
                return Err(Error::ParamLength { expected: n, got: p.len() });
            }
        }
        let c = &self.compare;
        if c.objective != "synthetic" && c.objective != "vqe" {
            return Err(Error::Config(format!("unknown compare objective `{}`", c.objective)));
        }
        for name in &c.optimizers {
            compare_optimizer(name, 1.5)?;
        }
        Ok(())
    }
}

/// Optimizer for comparisons: `bayesmgd`/`mgd` with sampling ratio `eta`,
/// `spsa`, or any preset name.
pub fn compare_optimizer(name: &str, eta: f64) -> Result<OptimizerSpec> {
    let h = Hyperparams { eta, ..Hyperparams::default() };
    match name {
        "bayesmgd" => Ok(OptimizerSpec::BayesMgd(h)),
        "mgd" => Ok(OptimizerSpec::Mgd(h)),
        "spsa" => Ok(OptimizerSpec::preset("spsa-paper").expect("known preset")),
        other => OptimizerSpec::preset(other)
            .ok_or_else(|| Error::Config(format!("unknown optimizer `{other}`"))),
    }
}
