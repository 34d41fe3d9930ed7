use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hyperparameters shared by BayesMGD and MGD (MGD ignores `length_scale`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyperparams {
    pub gamma: f64,
    pub alpha: f64,
    pub stability: f64,
    pub delta: f64,
    pub xi: f64,
    pub eta: f64,
    pub length_scale: f64,
    pub epsilon: f64,
    pub max_evals: usize,
    /// Floor applied to reported standard errors before weighting.
    #[serde(default = "default_sigma_floor")]
    pub sigma_floor: f64,
}

fn default_sigma_floor() -> f64 {
    1e-3
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            gamma: 0.3,
            alpha: 0.602,
            stability: 1.0,
            delta: 0.6,
            xi: 0.101,
            eta: 1.5,
            length_scale: 0.2,
            epsilon: 1e-4,
            max_evals: 300,
            sigma_floor: default_sigma_floor(),
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("gamma", self.gamma),
            ("alpha", self.alpha),
            ("delta", self.delta),
            ("xi", self.xi),
            ("eta", self.eta),
            ("length_scale", self.length_scale),
            ("epsilon", self.epsilon),
            ("sigma_floor", self.sigma_floor),
        ];
        for (name, v) in pos {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("hyperparameter {name} must be positive, got {v}")));
            }
        }
        if !(self.stability >= 0.0) {
            return Err(Error::Config("hyperparameter stability must be non-negative".into()));
        }
        if self.alpha > 1.0 || self.xi > 1.0 {
            return Err(Error::Config("alpha and xi must lie in (0, 1]".into()));
        }
        if self.max_evals == 0 {
            return Err(Error::Config("max_evals must be positive".into()));
        }
        Ok(())
    }

    pub fn radius(&self, m: usize) -> f64 {
        self.delta / (m as f64).powf(self.xi)
    }

    pub fn step(&self, m: usize) -> f64 {
        self.gamma / (m as f64 + self.stability).powf(self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpsaParams {
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub stability: f64,
    pub max_evals: usize,
}

impl Default for SpsaParams {
    fn default() -> Self {
        Self { a: 0.2, c: 0.15, alpha: 0.602, gamma: 0.101, stability: 1.0, max_evals: 300 }
    }
}

impl SpsaParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("c", self.c), ("alpha", self.alpha), ("gamma", self.gamma)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("spsa {name} must be positive, got {v}")));
            }
        }
        if !(self.stability >= 0.0) || self.max_evals == 0 {
            return Err(Error::Config("spsa stability must be >= 0 and max_evals > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    BayesMgd,
    Mgd,
    Spsa,
}

/// Optimizer choice with its hyperparameters, as stored in configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OptimizerSpec {
    BayesMgd(Hyperparams),
    Mgd(Hyperparams),
    Spsa(SpsaParams),
}

pub const PRESETS: [&str; 5] = ["bayesmgd-1x8", "bayesmgd-1x4", "bayesmgd-2x4", "mgd", "spsa-paper"];

impl OptimizerSpec {
    pub fn preset(name: &str) -> Option<Self> {
        let base = Hyperparams::default();
        Some(match name {
            "bayesmgd-1x8" => Self::BayesMgd(Hyperparams { max_evals: 300, ..base }),
            "bayesmgd-1x4" => Self::BayesMgd(Hyperparams { max_evals: 2520, ..base }),
            "bayesmgd-2x4" => {
                Self::BayesMgd(Hyperparams { gamma: 0.6, stability: 2.0, max_evals: 600, ..base })
            }
            "mgd" => Self::Mgd(base),
            "spsa-paper" => Self::Spsa(SpsaParams::default()),
            _ => return None,
        })
    }

    pub fn kind(&self) -> OptimizerKind {
        match self {
            Self::BayesMgd(_) => OptimizerKind::BayesMgd,
            Self::Mgd(_) => OptimizerKind::Mgd,
            Self::Spsa(_) => OptimizerKind::Spsa,
        }
    }

    pub fn max_evals(&self) -> usize {
        match self {
            Self::BayesMgd(h) | Self::Mgd(h) => h.max_evals,
            Self::Spsa(s) => s.max_evals,
        }
    }

    pub fn set_max_evals(&mut self, n: usize) {
        match self {
            Self::BayesMgd(h) | Self::Mgd(h) => h.max_evals = n,
            Self::Spsa(s) => s.max_evals = n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::BayesMgd(h) | Self::Mgd(h) => h.validate(),
            Self::Spsa(s) => s.validate(),
        }
    }
}
