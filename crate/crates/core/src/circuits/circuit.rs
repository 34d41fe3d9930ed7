use super::gate::{decompose_slots, with_angle_bias, Gate, GateKind};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Moment-structured gate sequence. Gates within a moment act on disjoint qubits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub moments: Vec<Vec<Gate>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CircuitStats {
    /// Depth in the alternating single-qubit / two-qubit layer form.
    pub total_depth: usize,
    pub two_qubit_depth: usize,
    pub two_qubit_count: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            moments: Vec::new(),
        }
    }

    /// Append a moment; empty moments are dropped.
    pub fn push(&mut self, moment: Vec<Gate>) {
        if !moment.is_empty() {
            self.moments.push(moment);
        }
    }

    pub fn append(&mut self, other: &Circuit) {
        for m in &other.moments {
            self.push(m.clone());
        }
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.moments.iter().flatten()
    }

    /// Check qubit ranges and moment disjointness.
    pub fn validate(&self) -> Result<()> {
        for m in &self.moments {
            let mut used = vec![false; self.n_qubits];
            for g in m {
                for &q in g.support() {
                    if q >= self.n_qubits {
                        return Err(Error::QubitRange {
                            index: q,
                            n_qubits: self.n_qubits,
                        });
                    }
                    if used[q] {
                        return Err(Error::Parse(format!(
                            "qubit {q} used twice in one moment"
                        )));
                    }
                    used[q] = true;
                }
                if g.kind.arity() == 2 && g.qubits[0] == g.qubits[1] {
                    return Err(Error::Parse(format!(
                        "two-qubit gate on a single qubit {}",
                        g.qubits[0]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_native(&self) -> bool {
        self.gates().all(|g| g.kind.is_native())
    }

    /// Same circuit with `bias` added to every hopping/onsite angle.
    pub fn with_angle_bias(&self, bias: f64) -> Circuit {
        if bias == 0.0 {
            return self.clone();
        }
        Circuit {
            n_qubits: self.n_qubits,
            moments: self
                .moments
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|g| Gate {
                            kind: with_angle_bias(g.kind, bias),
                            qubits: g.qubits,
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Lower every composite gate to sqrt(iSWAP) and single-qubit rotations.
    ///
    /// A moment of composites becomes single-qubit moments, a sqrt(iSWAP)
    /// moment, single-qubit moments, a sqrt(iSWAP) moment and trailing
    /// single-qubit moments.
    pub fn to_native(&self) -> Circuit {
        let mut out = Circuit::new(self.n_qubits);
        for m in &self.moments {
            if m.iter().all(|g| g.kind.is_native()) {
                let (two, one): (Vec<Gate>, Vec<Gate>) =
                    m.iter().partition(|g| g.kind.arity() == 2);
                out.push(one);
                out.push(two);
                continue;
            }
            let mut pre = Vec::new();
            let mut mid = Vec::new();
            let mut post = Vec::new();
            let mut sq = Vec::new();
            for g in m {
                match decompose_slots(g) {
                    Some(s) => {
                        pre.extend(s.pre.iter().copied());
                        mid.extend(s.mid.iter().copied());
                        post.extend(s.post.iter().copied());
                        sq.push(Gate::two(GateKind::SqrtISwap, s.qubits[0], s.qubits[1]));
                    }
                    None => pre.push(*g),
                }
            }
            push_single_qubit_run(&mut out, &pre);
            out.push(sq.clone());
            push_single_qubit_run(&mut out, &mid);
            out.push(sq);
            push_single_qubit_run(&mut out, &post);
        }
        out
    }

    /// Depth and two-qubit statistics of the native form.
    pub fn stats(&self) -> CircuitStats {
        let native;
        let c = if self.is_native() {
            self
        } else {
            native = self.to_native();
            &native
        };
        let mut s = CircuitStats::default();
        let mut any = false;
        for m in &c.moments {
            let n2 = m.iter().filter(|g| g.kind.arity() == 2).count();
            if n2 > 0 {
                s.two_qubit_depth += 1;
                s.two_qubit_count += n2;
            }
            any |= !m.is_empty();
        }
        s.total_depth = if s.two_qubit_depth > 0 {
            2 * s.two_qubit_depth + 1
        } else {
            usize::from(any)
        };
        s
    }

    /// Line-oriented text form: a header comment with the qubit count, then
    /// one moment per line as `NAME q0 [q1] [angle]` items separated by `; `.
    pub fn to_text(&self) -> String {
        let mut s = format!("# qubits {}\n", self.n_qubits);
        for m in &self.moments {
            let items: Vec<String> = m
                .iter()
                .map(|g| {
                    let mut t = g.kind.name().to_string();
                    for q in g.support() {
                        let _ = write!(t, " {q}");
                    }
                    if let Some(a) = g.kind.angle() {
                        let _ = write!(t, " {a:?}");
                    }
                    t
                })
                .collect();
            s.push_str(&items.join("; "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut n_qubits = None;
        let mut moments = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("qubits") {
                    n_qubits = it.next().and_then(|v| v.parse().ok());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut moment = Vec::new();
            for item in line.split(';') {
                let toks: Vec<&str> = item.split_whitespace().collect();
                let name = *toks
                    .first()
                    .ok_or_else(|| Error::Parse(format!("empty gate in `{line}`")))?;
                let probe = GateKind::from_parts(name, Some(0.0))
                    .ok_or_else(|| Error::Parse(format!("unknown gate `{name}`")))?;
                let arity = probe.arity();
                let has_angle = probe.angle().is_some();
                if toks.len() != 1 + arity + usize::from(has_angle) {
                    return Err(Error::Parse(format!("malformed gate `{}`", item.trim())));
                }
                let mut qs = [0usize; 2];
                for k in 0..arity {
                    qs[k] = toks[1 + k]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad qubit in `{}`", item.trim())))?;
                }
                if arity == 1 {
                    qs[1] = qs[0];
                }
                let angle = if has_angle {
                    Some(
                        toks[1 + arity]
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad angle in `{}`", item.trim())))?,
                    )
                } else {
                    None
                };
                let kind = GateKind::from_parts(name, angle).expect("checked above");
                moment.push(Gate { kind, qubits: qs });
            }
            moments.push(moment);
        }
        let n_qubits = match n_qubits {
            Some(n) => n,
            None => moments
                .iter()
                .flatten()
                .flat_map(|g: &Gate| g.support().to_vec())
                .max()
                .map_or(0, |q| q + 1),
        };
        let c = Circuit { n_qubits, moments };
        c.validate()?;
        Ok(c)
    }
}

/// Emit a time-ordered list of single-qubit gates as the fewest moments that
/// keep each qubit's order.
fn push_single_qubit_run(out: &mut Circuit, gates: &[Gate]) {
    let mut per_qubit: BTreeMap<usize, Vec<Gate>> = BTreeMap::new();
    for g in gates {
        per_qubit.entry(g.qubits[0]).or_default().push(*g);
    }
    let depth = per_qubit.values().map(Vec::len).max().unwrap_or(0);
    for k in 0..depth {
        out.push(per_qubit.values().filter_map(|v| v.get(k).copied()).collect());
    }
}

/// Sandwich every other two-qubit moment (the 1st, 3rd, ...) between layers of
/// X on all qubits. X x X commutes with sqrt(iSWAP), and idle qubits see X X = I.
pub fn apply_spin_echo(c: &Circuit) -> Result<Circuit> {
    if !c.is_native() {
        let bad = c.gates().find(|g| !g.kind.is_native()).unwrap();
        return Err(Error::NotNative(bad.kind.name().into()));
    }
    let xs: Vec<Gate> = (0..c.n_qubits)
        .map(|q| Gate::one(GateKind::X, q))
        .collect();
    let mut out = Circuit::new(c.n_qubits);
    let mut k = 0;
    for m in &c.moments {
        let two = m.iter().any(|g| g.kind.arity() == 2);
        if two && k % 2 == 0 {
            out.push(xs.clone());
            out.push(m.clone());
            out.push(xs.clone());
        } else {
            out.push(m.clone());
        }
        if two {
            k += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = Circuit::new(4);
        c.push(vec![Gate::one(GateKind::X, 0), Gate::one(GateKind::X, 2)]);
        c.push(vec![
            Gate::two(GateKind::H(0.123456789), 0, 1),
            Gate::two(GateKind::Fswap, 2, 3),
        ]);
        c.push(vec![Gate::one(GateKind::Rz(-1.0 / 3.0), 3)]);
        let t = c.to_text();
        assert_eq!(Circuit::from_text(&t).unwrap(), c);
    }

    #[test]
    fn empty_stats() {
        assert_eq!(Circuit::new(3).stats(), CircuitStats::default());
    }

    #[test]
    fn echo_single_moment() {
        let mut c = Circuit::new(2);
        c.push(vec![Gate::two(GateKind::SqrtISwap, 0, 1)]);
        let e = apply_spin_echo(&c).unwrap();
        assert_eq!(e.moments.len(), 3);
        assert!(apply_spin_echo(&Circuit::new(0)).unwrap().moments.is_empty());
    }

    #[test]
    fn rejects_overlap() {
        assert!(Circuit::from_text("H 0 1 0.1; X 1\n").is_err());
        assert!(Circuit::from_text("NOPE 0\n").is_err());
    }
}
