//! Error mitigation: postselection, symmetries, TFLO and error bars.

pub mod montecarlo;
pub mod pipeline;
pub mod postselect;
pub mod symmetry;
pub mod tflo;
pub mod theil_sen;

pub use montecarlo::monte_carlo_errorbars;
pub use pipeline::{
    mitigate_energy, particle_hole_stage, FloMeasurement, MitigationFlags, PairedEstimate, RawEnergyData,
};
pub use postselect::{postselect, postselected_variance};
pub use symmetry::{
    ph_average, ph_transform_energy, ph_transform_observable, ph_transform_stats, reflection_average, reflection_average_matrix,
    select_run, time_reversal_average,
};
pub use tflo::{choose_flo_points, tflo_energy, tflo_observable, TfloTrainingSet, TrainingPoint};
pub use theil_sen::theil_sen;
