use super::symmetry::{ph_average, ph_transform_energy, time_reversal_average};
use super::tflo::{tflo_energy, TfloTrainingSet, TrainingPoint};
use crate::error::{Error, Result};
use crate::model::LatticeSpec;
use crate::observables::{ObservableEstimate, Stage};
use serde::{Deserialize, Serialize};

/// Which mitigation stages run. Stages always apply in the order
/// PS, Sym (time reversal + reflection), TFLO, Coh, PHS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MitigationFlags {
    pub postselect: bool,
    pub time_reversal: bool,
    pub reflection: bool,
    pub tflo: bool,
    pub coherent_correction: bool,
    pub particle_hole: bool,
}

impl Default for MitigationFlags {
    fn default() -> Self {
        Self {
            postselect: true,
            time_reversal: true,
            reflection: true,
            tflo: true,
            coherent_correction: true,
            particle_hole: true,
        }
    }
}

impl MitigationFlags {
    pub fn none() -> Self {
        Self {
            postselect: true,
            time_reversal: false,
            reflection: false,
            tflo: false,
            coherent_correction: false,
            particle_hole: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.postselect {
            return Err(Error::Config(
                "postselection is the first mitigation stage and cannot be disabled".into(),
            ));
        }
        if self.coherent_correction && !self.tflo {
            return Err(Error::Config("coherent_correction requires tflo".into()));
        }
        Ok(())
    }

    /// Stages that will be emitted, in order.
    pub fn stages(&self) -> Vec<Stage> {
        let mut s = vec![Stage::Postselected];
        if self.time_reversal || self.reflection {
            s.push(Stage::Symmetrized);
        }
        if self.tflo {
            s.push(Stage::Tflo);
        }
        if self.coherent_correction {
            s.push(Stage::Coherent);
        }
        if self.particle_hole {
            s.push(Stage::ParticleHole);
        }
        s
    }
}

/// Energy measured at θ and at −θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedEstimate {
    pub plus: ObservableEstimate,
    pub minus: ObservableEstimate,
}

impl PairedEstimate {
    pub fn symmetrized(&self, time_reversal: bool) -> ObservableEstimate {
        if time_reversal {
            time_reversal_average(&self.plus, &self.minus)
        } else {
            self.plus.staged(Stage::Symmetrized, self.plus.value, self.plus.stderr)
        }
    }
}

/// An FLO circuit's exact energy and its noisy paired measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloMeasurement {
    pub params: Vec<f64>,
    pub exact: f64,
    pub measured: PairedEstimate,
}

/// Everything the energy pipeline consumes, as stored in results files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEnergyData {
    pub target: PairedEstimate,
    #[serde(default)]
    pub closest: Option<FloMeasurement>,
    #[serde(default)]
    pub training: Vec<FloMeasurement>,
}

/// Energy after each enabled stage up to Coh, in pipeline order. PHS needs a
/// partner sector and is applied separately by [`particle_hole_stage`].
pub fn mitigate_energy(
    raw: &RawEnergyData,
    flags: &MitigationFlags,
    resamples: usize,
    seed: u64,
) -> Result<Vec<ObservableEstimate>> {
    flags.validate()?;
    let mut out = vec![raw.target.plus.clone()];
    let sym = flags.time_reversal || flags.reflection;
    let tr = flags.time_reversal;
    let target = raw.target.symmetrized(tr);
    if sym {
        out.push(target.clone());
    }
    if flags.tflo {
        let Some(closest) = &raw.closest else {
            return Err(Error::Config("TFLO enabled but no closest-FLO measurement".into()));
        };
        let point = |m: &FloMeasurement| {
            let s = m.measured.symmetrized(tr);
            TrainingPoint {
                params: m.params.clone(),
                exact: m.exact,
                noisy: s.value,
                noisy_stderr: s.stderr,
            }
        };
        let training = TfloTrainingSet {
            points: raw.training.iter().map(point).collect(),
            closest: point(closest),
        };
        let (t, c, _) = tflo_energy(&training, &target, resamples, seed);
        out.push(t);
        if flags.coherent_correction {
            out.push(c);
        }
    }
    Ok(out)
}

/// PHS stage: average with the partner sector's estimate mapped back by
/// E → E + U(L − N_partner). A self-paired sector is returned unchanged.
pub fn particle_hole_stage(
    current: &ObservableEstimate,
    partner: Option<(&ObservableEstimate, usize)>,
    lattice: &LatticeSpec,
) -> ObservableEstimate {
    match partner {
        Some((p, n_partner)) => ph_average(current, &ph_transform_energy(p, n_partner, lattice)),
        None => current.staged(Stage::ParticleHole, current.value, current.stderr),
    }
}
