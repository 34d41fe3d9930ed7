//! Time-reversal, particle-hole and reflection symmetrisation.

use crate::model::LatticeSpec;
use crate::observables::{DiagonalStats, Moment, ObsKind, ObservableEstimate, Stage};

/// Average of the estimates at theta and -theta; stderr is half the
/// root-sum-square of the two.
pub fn time_reversal_average(a: &ObservableEstimate, b: &ObservableEstimate) -> ObservableEstimate {
    a.staged(
        Stage::Symmetrized,
        0.5 * (a.value + b.value),
        0.5 * a.stderr.hypot(b.stderr),
    )
}

/// Energy of the particle-hole partner (L - n_up, L - n_down) from the
/// energy of the source sector with `n_occ` particles: E + U (L - n_occ).
pub fn ph_transform_energy(e: &ObservableEstimate, n_occ: usize, lattice: &LatticeSpec) -> ObservableEstimate {
    let mut out = e.clone();
    out.value = e.value + lattice.u * (lattice.n_sites() as f64 - n_occ as f64);
    out
}

/// Diagonal statistics under n_{i s} -> 1 - n_{i s}. With `spin_flip`, up and
/// down are exchanged first (partner measured in the spin-flipped sector).
pub fn ph_transform_stats(s: &DiagonalStats, spin_flip: bool) -> DiagonalStats {
    let l = s.n_sites;
    let flip = |m: &Moment| Moment {
        mean: 1.0 - m.mean,
        stderr: m.stderr,
    };
    let (up, down) = if spin_flip {
        (&s.n_down, &s.n_up)
    } else {
        (&s.n_up, &s.n_down)
    };
    let n_up: Vec<Moment> = up.iter().map(flip).collect();
    let n_down: Vec<Moment> = down.iter().map(flip).collect();
    let n: Vec<Moment> = s
        .n
        .iter()
        .map(|m| Moment {
            mean: 2.0 - m.mean,
            stderr: m.stderr,
        })
        .collect();
    // S^z -> -S^z under PH, and again under a spin flip.
    let sgn = if spin_flip { 1.0 } else { -1.0 };
    let sz: Vec<Moment> = s
        .sz
        .iter()
        .map(|m| Moment {
            mean: sgn * m.mean,
            stderr: m.stderr,
        })
        .collect();
    let nn = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| Moment {
                    mean: 4.0 - 2.0 * s.n[i].mean - 2.0 * s.n[j].mean + s.nn[i][j].mean,
                    stderr: s.nn[i][j].stderr,
                })
                .collect()
        })
        .collect();
    DiagonalStats {
        n_sites: l,
        shots: s.shots,
        retention: s.retention,
        n_up,
        n_down,
        n,
        sz,
        nn,
        szsz: s.szsz.clone(),
    }
}

/// Particle-hole image of a reported observable: n -> 2 - n, S^z -> -S^z
/// (unchanged with `spin_flip`); connected correlations are invariant.
pub fn ph_transform_observable(o: &ObservableEstimate, spin_flip: bool) -> ObservableEstimate {
    let mut out = o.clone();
    match o.kind {
        ObsKind::Density => out.value = 2.0 - o.value,
        ObsKind::Spin if !spin_flip => out.value = -o.value,
        _ => {}
    }
    out
}

/// Mean of an estimate and its (already transformed) particle-hole partner.
pub fn ph_average(a: &ObservableEstimate, partner: &ObservableEstimate) -> ObservableEstimate {
    a.staged(
        Stage::ParticleHole,
        0.5 * (a.value + partner.value),
        0.5 * a.stderr.hypot(partner.stderr),
    )
}

/// Entry-wise average of two stat sets (for particle-hole averaging).
pub fn average_stats(a: &DiagonalStats, b: &DiagonalStats) -> DiagonalStats {
    let avg = |x: &Moment, y: &Moment| Moment {
        mean: 0.5 * (x.mean + y.mean),
        stderr: 0.5 * x.stderr.hypot(y.stderr),
    };
    let v = |x: &[Moment], y: &[Moment]| x.iter().zip(y).map(|(p, q)| avg(p, q)).collect::<Vec<_>>();
    let m = |x: &[Vec<Moment>], y: &[Vec<Moment>]| {
        x.iter().zip(y).map(|(p, q)| v(p, q)).collect::<Vec<_>>()
    };
    DiagonalStats {
        n_sites: a.n_sites,
        shots: a.shots + b.shots,
        retention: 0.5 * (a.retention + b.retention),
        n_up: v(&a.n_up, &b.n_up),
        n_down: v(&a.n_down, &b.n_down),
        n: v(&a.n, &b.n),
        sz: v(&a.sz, &b.sz),
        nn: m(&a.nn, &b.nn),
        szsz: m(&a.szsz, &b.szsz),
    }
}

/// Site permutations of the lattice reflection group: 2 for 1xLy, 4 for 2xLy.
pub fn reflection_images(lattice: &LatticeSpec) -> Vec<Vec<usize>> {
    let (lx, ly) = (lattice.lx, lattice.ly);
    let flips: &[(bool, bool)] = if lx == 1 {
        &[(false, false), (false, true)]
    } else {
        &[(false, false), (true, false), (false, true), (true, true)]
    };
    flips
        .iter()
        .map(|&(fx, fy)| {
            (0..lattice.n_sites())
                .map(|s| {
                    let (x, y) = lattice.coords(s);
                    let x = if fx { lx - 1 - x } else { x };
                    let y = if fy { ly - 1 - y } else { y };
                    lattice.site(x, y)
                })
                .collect()
        })
        .collect()
}

/// Orbit average of a site-indexed vector.
pub fn reflection_average(values: &[f64], lattice: &LatticeSpec) -> Vec<f64> {
    let imgs = reflection_images(lattice);
    let k = imgs.len() as f64;
    (0..values.len())
        .map(|i| imgs.iter().map(|r| values[r[i]]).sum::<f64>() / k)
        .collect()
}

/// Orbit average of a site-pair matrix.
pub fn reflection_average_matrix(values: &[Vec<f64>], lattice: &LatticeSpec) -> Vec<Vec<f64>> {
    let imgs = reflection_images(lattice);
    let k = imgs.len() as f64;
    let n = values.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| imgs.iter().map(|r| values[r[i]][r[j]]).sum::<f64>() / k)
                .collect()
        })
        .collect()
}

/// Reflection-averaged statistics (means averaged; stderrs averaged too).
pub fn reflection_average_stats(s: &DiagonalStats, lattice: &LatticeSpec) -> DiagonalStats {
    let imgs = reflection_images(lattice);
    let k = imgs.len() as f64;
    let v = |x: &[Moment]| -> Vec<Moment> {
        (0..x.len())
            .map(|i| Moment {
                mean: imgs.iter().map(|r| x[r[i]].mean).sum::<f64>() / k,
                stderr: imgs.iter().map(|r| x[r[i]].stderr).sum::<f64>() / k,
            })
            .collect()
    };
    let m = |x: &[Vec<Moment>]| -> Vec<Vec<Moment>> {
        (0..x.len())
            .map(|i| {
                (0..x.len())
                    .map(|j| Moment {
                        mean: imgs.iter().map(|r| x[r[i]][r[j]].mean).sum::<f64>() / k,
                        stderr: imgs.iter().map(|r| x[r[i]][r[j]].stderr).sum::<f64>() / k,
                    })
                    .collect()
            })
            .collect()
    };
    DiagonalStats {
        n_sites: s.n_sites,
        shots: s.shots,
        retention: s.retention,
        n_up: v(&s.n_up),
        n_down: v(&s.n_down),
        n: v(&s.n),
        sz: v(&s.sz),
        nn: m(&s.nn),
        szsz: m(&s.szsz),
    }
}

/// Index of the lowest energy; earliest wins ties.
pub fn select_run(energies: &[f64]) -> usize {
    let mut best = 0;
    for (i, &e) in energies.iter().enumerate() {
        if e < energies[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_spreads_to_mirror() {
        let lat = LatticeSpec::new(1, 8, 4.0).unwrap();
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        let r = reflection_average(&v, &lat);
        assert_eq!(r[0], 0.5);
        assert_eq!(r[7], 0.5);
        assert_eq!(reflection_average(&r, &lat), r);
    }

    #[test]
    fn runs() {
        assert_eq!(select_run(&[1.0]), 0);
        assert_eq!(select_run(&[1.0, 1.0]), 0);
        assert_eq!(select_run(&[1.0, -2.0, -2.0, 0.0]), 1);
    }

    #[test]
    fn tr_stderr() {
        let a = ObservableEstimate::energy(1.0, 0.3);
        let b = ObservableEstimate::energy(2.0, 0.4);
        let c = time_reversal_average(&a, &b);
        assert!((c.value - 1.5).abs() < 1e-15);
        assert!((c.stderr - 0.25).abs() < 1e-15);
        assert_eq!(c.last_stage(), Stage::Symmetrized);
    }
}
