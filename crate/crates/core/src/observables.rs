//! Physical observables from diagonal (onsite-circuit) shot data or from
//! exact basis-state distributions.

use crate::error::{Error, Result};
use crate::mitigation::postselected_variance;
use crate::model::{JwLayout, Spin};
use crate::simulator::ShotBatch;
use serde::{Deserialize, Serialize};

/// Mitigation stage an estimate has been through, in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    Raw,
    /// Occupation postselection ("PS").
    Postselected,
    /// Time-reversal and reflection symmetrisation ("Sym").
    Symmetrized,
    /// Linear map fitted on FLO training points ("TFLO").
    Tflo,
    /// Residual correction at the closest FLO point ("Coh").
    Coherent,
    /// Particle-hole averaging ("PHS").
    ParticleHole,
}

impl Stage {
    pub fn label(&self) -> &'static str {
        match self {
            Stage::Raw => "raw",
            Stage::Postselected => "PS",
            Stage::Symmetrized => "Sym",
            Stage::Tflo => "TFLO",
            Stage::Coherent => "Coh",
            Stage::ParticleHole => "PHS",
        }
    }
}

/// Conditions noticed while mitigating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flag {
    /// TFLO fit had R^2 <= 0.7; noisy value passed through.
    TfloPassThrough,
    /// Exact training values within 0.05; only the residual correction applied.
    TfloCoherentOnly,
    /// No training data; value passed through.
    TfloNoTraining,
    /// All candidate FLO energies coincide.
    SpreadCollapse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObsKind {
    Energy,
    Density,
    Spin,
    CorrCharge,
    CorrSpin,
    Mu,
    MuPrime,
    Staggered,
}

/// Value with standard error and the stages that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableEstimate {
    pub value: f64,
    pub stderr: f64,
    pub kind: ObsKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sites: Vec<usize>,
    pub stages: Vec<Stage>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<Flag>,
}

impl ObservableEstimate {
    pub fn new(kind: ObsKind, value: f64, stderr: f64) -> Self {
        Self {
            value,
            stderr,
            kind,
            sites: Vec::new(),
            stages: vec![Stage::Raw],
            flags: Vec::new(),
        }
    }

    pub fn energy(value: f64, stderr: f64) -> Self {
        Self::new(ObsKind::Energy, value, stderr)
    }

    /// Copy with a new value/stderr and `stage` appended.
    pub fn staged(&self, stage: Stage, value: f64, stderr: f64) -> Self {
        let mut e = self.clone();
        e.value = value;
        e.stderr = stderr;
        if !e.stages.contains(&stage) {
            e.stages.push(stage);
        }
        e
    }

    pub fn with_flag(mut self, f: Flag) -> Self {
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
        self
    }

    pub fn last_stage(&self) -> Stage {
        *self.stages.last().unwrap_or(&Stage::Raw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Moment {
    pub mean: f64,
    pub stderr: f64,
}

/// Site-resolved diagonal statistics; sites in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalStats {
    pub n_sites: usize,
    /// Shots before postselection (0 for exact distributions).
    pub shots: usize,
    pub retention: f64,
    pub n_up: Vec<Moment>,
    pub n_down: Vec<Moment>,
    /// n_i = n_up + n_down.
    pub n: Vec<Moment>,
    /// S^z_i = n_up - n_down.
    pub sz: Vec<Moment>,
    /// <n_i n_j>.
    pub nn: Vec<Vec<Moment>>,
    /// <S^z_i S^z_j>.
    pub szsz: Vec<Vec<Moment>>,
}

impl DiagonalStats {
    /// Statistics of a weighted set of basis states. `shots`/`retention`
    /// determine standard errors through the postselected-variance formula;
    /// pass `shots = 0` for exact distributions.
    pub fn from_weighted(
        items: impl IntoIterator<Item = (u32, f64)>,
        layout: &JwLayout,
        shots: usize,
        retention: f64,
    ) -> Self {
        let l = layout.n_sites();
        let mut s1 = vec![[0.0f64; 4]; l];
        let mut s2 = vec![[0.0f64; 4]; l];
        let mut p1 = vec![vec![[0.0f64; 2]; l]; l];
        let mut p2 = vec![vec![[0.0f64; 2]; l]; l];
        let mut wsum = 0.0;
        let ups: Vec<usize> = (0..l).map(|i| layout.mode(i, Spin::Up)).collect();
        let downs: Vec<usize> = (0..l).map(|i| layout.mode(i, Spin::Down)).collect();
        let mut nvals = vec![0.0; l];
        let mut svals = vec![0.0; l];
        for (bits, w) in items {
            if w == 0.0 {
                continue;
            }
            wsum += w;
            for i in 0..l {
                let u = ((bits >> ups[i]) & 1) as f64;
                let d = ((bits >> downs[i]) & 1) as f64;
                nvals[i] = u + d;
                svals[i] = u - d;
                let v = [u, d, u + d, u - d];
                for k in 0..4 {
                    s1[i][k] += w * v[k];
                    s2[i][k] += w * v[k] * v[k];
                }
            }
            for i in 0..l {
                for j in 0..l {
                    let a = nvals[i] * nvals[j];
                    let b = svals[i] * svals[j];
                    p1[i][j][0] += w * a;
                    p1[i][j][1] += w * b;
                    p2[i][j][0] += w * a * a;
                    p2[i][j][1] += w * b * b;
                }
            }
        }
        let moment = |sum: f64, sq: f64| {
            let mean = if wsum > 0.0 { sum / wsum } else { 0.0 };
            let var = if wsum > 0.0 {
                (sq / wsum - mean * mean).max(0.0)
            } else {
                0.0
            };
            let stderr = if shots > 0 && retention > 0.0 {
                postselected_variance(var, shots, retention)
                    .map(f64::sqrt)
                    .unwrap_or(f64::NAN)
            } else {
                0.0
            };
            Moment { mean, stderr }
        };
        let col = |k: usize| -> Vec<Moment> { (0..l).map(|i| moment(s1[i][k], s2[i][k])).collect() };
        let pair = |k: usize| -> Vec<Vec<Moment>> {
            (0..l)
                .map(|i| (0..l).map(|j| moment(p1[i][j][k], p2[i][j][k])).collect())
                .collect()
        };
        DiagonalStats {
            n_sites: l,
            shots,
            retention,
            n_up: col(0),
            n_down: col(1),
            n: col(2),
            sz: col(3),
            nn: pair(0),
            szsz: pair(1),
        }
    }

    /// Statistics of a postselected batch; `total_shots` counts shots before
    /// postselection.
    pub fn from_batch(batch: &ShotBatch, layout: &JwLayout, total_shots: usize) -> Result<Self> {
        if batch.bits.is_empty() {
            return Err(Error::EmptyPostselection {
                context: "diagonal observables".into(),
            });
        }
        let retention = batch.bits.len() as f64 / total_shots.max(batch.bits.len()) as f64;
        Ok(Self::from_weighted(
            batch.bits.iter().map(|&b| (b, 1.0)),
            layout,
            total_shots.max(batch.bits.len()),
            retention,
        ))
    }

    pub fn densities(&self) -> Vec<f64> {
        self.n.iter().map(|m| m.mean).collect()
    }

    pub fn spins(&self) -> Vec<f64> {
        self.sz.iter().map(|m| m.mean).collect()
    }

    /// <n_i n_j> as a matrix of means.
    pub fn nn_means(&self) -> Vec<Vec<f64>> {
        self.nn.iter().map(|r| r.iter().map(|m| m.mean).collect()).collect()
    }

    pub fn szsz_means(&self) -> Vec<Vec<f64>> {
        self.szsz
            .iter()
            .map(|r| r.iter().map(|m| m.mean).collect())
            .collect()
    }
}

/// Normalised charge correlation C^c(0, i) relative to site 0.
pub fn charge_correlation(stats: &DiagonalStats, i: usize) -> Result<f64> {
    let n0 = stats.n[0].mean;
    let den = stats.nn[0][0].mean - n0 * n0;
    if den.abs() < 1e-14 {
        return Err(Error::Numerical(
            "charge correlation undefined: site 0 occupation is deterministic".into(),
        ));
    }
    Ok((stats.nn[0][i].mean - n0 * stats.n[i].mean) / den)
}

/// Connected spin correlation C^s(i, j).
pub fn spin_correlation(stats: &DiagonalStats, i: usize, j: usize) -> f64 {
    stats.szsz[i][j].mean - stats.sz[i].mean * stats.sz[j].mean
}

/// Sum over the snake of (-1)^s <S^z_s S^z_{s+1}>.
pub fn staggered_spin(stats: &DiagonalStats, layout: &JwLayout) -> f64 {
    (0..stats.n_sites.saturating_sub(1))
        .map(|s| {
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            sign * stats.szsz[layout.site_at(s)][layout.site_at(s + 1)].mean
        })
        .sum()
}

/// The site observables reported for one diagonal data set, in a fixed
/// order: densities n_i, spins S^z_i, C^c(0, i) for i >= 1, C^s between
/// snake neighbours, and the staggered sum. Correlation errors propagate only
/// the pair-moment error. An undefined C^c is reported as NaN.
pub fn observable_set(stats: &DiagonalStats, layout: &JwLayout) -> Vec<ObservableEstimate> {
    let l = stats.n_sites;
    let mut out = Vec::new();
    let at = |kind, sites: Vec<usize>, value, stderr| {
        let mut e = ObservableEstimate::new(kind, value, stderr);
        e.sites = sites;
        e
    };
    for i in 0..l {
        out.push(at(ObsKind::Density, vec![i], stats.n[i].mean, stats.n[i].stderr));
    }
    for i in 0..l {
        out.push(at(ObsKind::Spin, vec![i], stats.sz[i].mean, stats.sz[i].stderr));
    }
    let n0 = stats.n[0].mean;
    let den = stats.nn[0][0].mean - n0 * n0;
    for i in 1..l {
        let v = charge_correlation(stats, i).unwrap_or(f64::NAN);
        out.push(at(ObsKind::CorrCharge, vec![0, i], v, stats.nn[0][i].stderr / den.abs()));
    }
    let mut stag_var = 0.0;
    for s in 0..l.saturating_sub(1) {
        let (a, b) = (layout.site_at(s), layout.site_at(s + 1));
        let e = stats.szsz[a][b].stderr;
        stag_var += e * e;
        out.push(at(ObsKind::CorrSpin, vec![a, b], spin_correlation(stats, a, b), e));
    }
    out.push(at(ObsKind::Staggered, Vec::new(), staggered_spin(stats, layout), stag_var.sqrt()));
    out
}

/// Chemical potential and its discrete derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChemicalPotentials {
    /// (N, mu(N) = E(N) - E(N-1), stderr)
    pub mu: Vec<(usize, f64, f64)>,
    /// (N even, mu'(N) = E(N+1) - 2E(N) + E(N-1), stderr)
    pub mu_prime: Vec<(usize, f64, f64)>,
}

/// From (N, E, stderr) triples over a contiguous range of N. Errors are
/// propagated assuming independent energies.
pub fn chemical_potentials(energies: &[(usize, f64, f64)]) -> Result<ChemicalPotentials> {
    let mut e = energies.to_vec();
    e.sort_by_key(|t| t.0);
    for w in e.windows(2) {
        if w[1].0 != w[0].0 + 1 {
            return Err(Error::Config(format!(
                "energies must cover a contiguous range of N (gap after {})",
                w[0].0
            )));
        }
    }
    let mu = e
        .windows(2)
        .map(|w| (w[1].0, w[1].1 - w[0].1, w[1].2.hypot(w[0].2)))
        .collect();
    let mu_prime = e
        .windows(3)
        .filter(|w| w[1].0 % 2 == 0)
        .map(|w| {
            let err = (w[0].2.powi(2) + 4.0 * w[1].2.powi(2) + w[2].2.powi(2)).sqrt();
            (w[1].0, w[2].1 - 2.0 * w[1].1 + w[0].1, err)
        })
        .collect();
    Ok(ChemicalPotentials { mu, mu_prime })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LatticeSpec, Layout};

    #[test]
    fn all_ones() {
        let lat = LatticeSpec::new(1, 4, 1.0).unwrap();
        let lay = JwLayout::new(&lat, Layout::Rectangle);
        let b = ShotBatch {
            n_qubits: 8,
            bits: vec![0xff; 10],
            seed: 0,
        };
        let s = DiagonalStats::from_batch(&b, &lay, 10).unwrap();
        assert!(s.n_up.iter().all(|m| m.mean == 1.0));
        assert!(s.sz.iter().all(|m| m.mean == 0.0));
        assert!(charge_correlation(&s, 1).is_err());
    }

    #[test]
    fn linear_energies() {
        let e: Vec<_> = (0..5).map(|n| (n, 2.0 * n as f64 - 1.0, 0.0)).collect();
        let c = chemical_potentials(&e).unwrap();
        assert!(c.mu.iter().all(|m| (m.1 - 2.0).abs() < 1e-12));
        assert!(c.mu_prime.iter().all(|m| m.1.abs() < 1e-12));
        let c = chemical_potentials(&e[..2]).unwrap();
        assert_eq!(c.mu.len(), 1);
        assert!(c.mu_prime.is_empty());
    }
}
