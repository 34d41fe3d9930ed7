use crate::error::{Error, Result};
use crate::model::{JwLayout, SectorSpec, Spin};
use crate::simulator::ShotBatch;

/// Keep shots whose per-spin Hamming weights equal the sector occupations.
/// Returns the kept batch and the retention fraction.
pub fn postselect(batch: &ShotBatch, sector: &SectorSpec, layout: &JwLayout) -> Result<(ShotBatch, f64)> {
    let up = layout.spin_mask(Spin::Up);
    let down = layout.spin_mask(Spin::Down);
    let bits: Vec<u32> = batch
        .bits
        .iter()
        .copied()
        .filter(|b| {
            (b & up).count_ones() as usize == sector.n_up
                && (b & down).count_ones() as usize == sector.n_down
        })
        .collect();
    if bits.is_empty() {
        return Err(Error::EmptyPostselection {
            context: format!("sector ({}, {})", sector.n_up, sector.n_down),
        });
    }
    let p = bits.len() as f64 / batch.bits.len() as f64;
    Ok((
        ShotBatch {
            n_qubits: batch.n_qubits,
            bits,
            seed: batch.seed,
        },
        p,
    ))
}

/// Variance of a postselected sample mean: sigma^2/(pN) * (1 + (1-p)/(pN)),
/// with N shots taken and retention probability p.
pub fn postselected_variance(sigma2: f64, n: usize, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Numerical(format!("retention {p} outside (0, 1]")));
    }
    if n == 0 {
        return Err(Error::Numerical("no shots".into()));
    }
    let pn = p * n as f64;
    Ok(sigma2 / pn * (1.0 + (1.0 - p) / pn))
}
