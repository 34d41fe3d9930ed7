//! EHV ansatz circuits and their measurement variants.

use super::circuit::Circuit;
use super::gate::{Gate, GateKind};
use super::givens::build_initial_prep;
use crate::error::{Error, Result};
use crate::model::{JwLayout, LatticeSpec, Layout, SectorSpec, Spin};
use serde::{Deserialize, Serialize};

/// A fully specified ansatz family: instance, layout and layer count.
#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    pub lattice: LatticeSpec,
    pub sector: SectorSpec,
    pub layout: JwLayout,
    pub layers: usize,
}

/// Which Hamiltonian group a measurement circuit estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasGroup {
    Onsite,
    /// Hopping group by id (see `model::edge_group`).
    Hopping(usize),
}

/// How to turn a measured bitstring into this group's energy.
#[derive(Debug, Clone, PartialEq)]
pub enum Readout {
    /// U times the number of sites whose two qubits both read 1.
    Onsite { pairs: Vec<(usize, usize)>, u: f64 },
    /// After B on (a, b): hopping energy -(n_b - n_a) per pair.
    Hopping { pairs: Vec<(usize, usize)> },
}

impl Readout {
    pub fn energy(&self, bits: u32) -> f64 {
        let bit = |q: usize| (bits >> q) & 1;
        match self {
            Readout::Onsite { pairs, u } => {
                let n = pairs.iter().filter(|&&(a, b)| bit(a) & bit(b) == 1).count();
                *u * n as f64
            }
            Readout::Hopping { pairs } => {
                let mut e = 0i32;
                for &(a, b) in pairs {
                    e -= bit(b) as i32 - bit(a) as i32;
                }
                e as f64
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementCircuit {
    pub group: MeasGroup,
    pub circuit: Circuit,
    /// Number of leading moments shared with the base ansatz circuit.
    pub shared_prefix: usize,
    pub readout: Readout,
}

/// Pairs (p, p+1) of JW positions starting at `start`, stepping by 2.
fn pairs(start: usize, l: usize) -> Vec<(usize, usize)> {
    (start..l.saturating_sub(1))
        .step_by(2)
        .map(|p| (p, p + 1))
        .collect()
}

fn both_spins(ps: &[(usize, usize)], l: usize) -> Vec<(usize, usize)> {
    let mut out = ps.to_vec();
    out.extend(ps.iter().map(|&(a, b)| (a + l, b + l)));
    out
}

fn layer_of(kind: GateKind, ps: &[(usize, usize)]) -> Vec<Gate> {
    ps.iter().map(|&(a, b)| Gate::two(kind, a, b)).collect()
}

struct Built {
    circuit: Circuit,
    /// Index of the last moment holding the final hopping layer (1xLy hop-even,
    /// 2xLy vertical-2), if that layer is non-empty.
    last_hop: Option<usize>,
}

impl Ansatz {
    pub fn new(lattice: LatticeSpec, sector: SectorSpec, layout: Layout, layers: usize) -> Self {
        let layout = JwLayout::new(&lattice, layout);
        Self {
            lattice,
            sector,
            layout,
            layers,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.lattice.n_modes()
    }

    pub fn n_params(&self) -> usize {
        self.lattice.params_per_layer() * self.layers
    }

    /// Index of the onsite angle of each layer in the parameter vector.
    pub fn onsite_indices(&self) -> Vec<usize> {
        let k = self.lattice.params_per_layer();
        (0..self.layers).map(|l| l * k).collect()
    }

    pub fn prep(&self) -> Circuit {
        build_initial_prep(&self.lattice, &self.sector, &self.layout)
    }

    fn check(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::ParamLength {
                expected: self.n_params(),
                got: params.len(),
            });
        }
        Ok(())
    }

    fn build(&self, params: &[f64]) -> Result<Built> {
        self.check(params)?;
        let l = self.lattice.n_sites();
        let mut c = self.prep();
        let mut last_hop = None;
        let even = pairs(0, l);
        let odd = pairs(1, l);
        let zig = self.layout.mode == Layout::Zigzag;
        for theta in params.chunks(self.lattice.params_per_layer()) {
            // Onsite, routed through spin-up swaps on the zig-zag layout.
            if zig {
                c.push(layer_of(GateKind::Fswap, &even));
            }
            let mut onsite = Vec::new();
            for p in 0..l {
                let up = if zig && even.iter().any(|&(a, b)| a == p || b == p) {
                    p ^ 1
                } else {
                    p
                };
                onsite.push(Gate::two(GateKind::O(theta[0]), up, l + p));
            }
            c.push(onsite);
            if zig {
                c.push(layer_of(GateKind::Fswap, &even));
            }
            if self.lattice.lx == 1 {
                c.push(layer_of(GateKind::H(theta[1]), &both_spins(&even, l)));
                c.push(layer_of(GateKind::H(theta[2]), &both_spins(&odd, l)));
            } else {
                c.push(layer_of(GateKind::HFswap(theta[1]), &both_spins(&even, l)));
                c.push(layer_of(GateKind::H(theta[2]), &both_spins(&odd, l)));
                c.push(layer_of(GateKind::Fswap, &both_spins(&even, l)));
                c.push(layer_of(GateKind::H(theta[3]), &both_spins(&odd, l)));
            }
            last_hop = if odd.is_empty() {
                None
            } else {
                Some(c.moments.len() - 1)
            };
        }
        Ok(Built {
            circuit: c,
            last_hop,
        })
    }

    /// Preparation followed by `layers` EHV layers.
    pub fn circuit(&self, params: &[f64]) -> Result<Circuit> {
        Ok(self.build(params)?.circuit)
    }

    fn onsite_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.lattice.n_sites())
            .map(|s| (self.layout.mode(s, Spin::Up), self.layout.mode(s, Spin::Down)))
            .collect()
    }

    /// Measurement circuits: 3 for 1xLy (onsite, hop-odd, hop-even) and 4 for
    /// 2xLy (onsite, horizontal, vertical-1, vertical-2).
    pub fn measurement_circuits(&self, params: &[f64]) -> Result<Vec<MeasurementCircuit>> {
        let built = self.build(params)?;
        let base = &built.circuit;
        let l = self.lattice.n_sites();
        let even = both_spins(&pairs(0, l), l);
        let odd = both_spins(&pairs(1, l), l);
        let mut out = vec![MeasurementCircuit {
            group: MeasGroup::Onsite,
            circuit: base.clone(),
            shared_prefix: base.moments.len(),
            readout: Readout::Onsite {
                pairs: self.onsite_pairs(),
                u: self.lattice.u,
            },
        }];
        let appended = |suffix: Vec<Vec<Gate>>, pairs: &[(usize, usize)], group: usize| {
            let mut c = base.clone();
            for m in suffix {
                c.push(m);
            }
            MeasurementCircuit {
                group: MeasGroup::Hopping(group),
                circuit: c,
                shared_prefix: base.moments.len(),
                readout: Readout::Hopping {
                    pairs: pairs.to_vec(),
                },
            }
        };
        // The final hopping layer absorbs its own basis change.
        let merged = |group: usize| match built.last_hop {
            Some(idx) => {
                let mut c = base.clone();
                let theta = match c.moments[idx][0].kind {
                    GateKind::H(t) => t,
                    _ => unreachable!("last hopping layer holds H gates"),
                };
                c.moments[idx] = layer_of(GateKind::BH(theta), &odd);
                MeasurementCircuit {
                    group: MeasGroup::Hopping(group),
                    circuit: c,
                    shared_prefix: idx,
                    readout: Readout::Hopping { pairs: odd.clone() },
                }
            }
            None => appended(vec![layer_of(GateKind::B, &odd)], &odd, group),
        };
        if self.lattice.lx == 1 {
            out.push(appended(vec![layer_of(GateKind::B, &even)], &even, 1));
            out.push(merged(2));
        } else {
            out.push(appended(vec![layer_of(GateKind::B, &even)], &even, 1));
            out.push(appended(
                vec![layer_of(GateKind::Fswap, &even), layer_of(GateKind::B, &odd)],
                &odd,
                2,
            ));
            out.push(merged(3));
        }
        Ok(out)
    }
}
