//! Classical simulation of reversible circuits on basis inputs, with one
//! designated qubit carried as a two-component vector so controlled
//! unitaries on it can be checked exactly.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::QubitMap;
use crate::circuit::{AdaptiveCircuit, Addr, Gate, Mat2};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum BoolOp {
    Flip { controls: Vec<usize>, target: usize },
    Swap(usize, usize),
    Fanout { source: usize, targets: Vec<usize> },
    OnTarget { controls: Vec<usize>, u: Mat2 },
}

/// A circuit compiled to index form for repeated classical runs.
#[derive(Clone, Debug)]
pub struct BooleanProgram {
    map: QubitMap,
    target: Option<usize>,
    ops: Vec<BoolOp>,
}

impl BooleanProgram {
    /// `target` names the qubit that may receive arbitrary controlled
    /// unitaries; every other qubit must stay a classical bit.
    pub fn compile(circuit: &AdaptiveCircuit, target: Option<&Addr>, extra: &[Addr]) -> Result<Self> {
        let map = QubitMap::for_circuit(circuit, extra.iter().cloned().chain(target.cloned()));
        let target = target.map(|t| map.get(t)).transpose()?;
        let mut ops = Vec::new();
        for op in circuit.ops() {
            let idx: Vec<usize> = op.qubits.iter().map(|q| map.get(q)).collect::<Result<_>>()?;
            let unsupported = || Error::UnsupportedGate(format!("{} in a classical simulation", op.gate.name()));
            let reads_target = |qs: &[usize]| target.is_some_and(|t| qs.contains(&t));
            let compiled = match &op.gate {
                Gate::X => BoolOp::Flip {
                    controls: vec![],
                    target: idx[0],
                },
                Gate::Cnot => BoolOp::Flip {
                    controls: vec![idx[0]],
                    target: idx[1],
                },
                Gate::Mcx { controls } => BoolOp::Flip {
                    controls: idx[..*controls].to_vec(),
                    target: idx[*controls],
                },
                Gate::Swap => BoolOp::Swap(idx[0], idx[1]),
                Gate::Fanout { .. } => BoolOp::Fanout {
                    source: idx[0],
                    targets: idx[1..].to_vec(),
                },
                Gate::Mcu { controls, u } if Some(idx[*controls]) == target => BoolOp::OnTarget {
                    controls: idx[..*controls].to_vec(),
                    u: *u,
                },
                Gate::Mcu { controls, u } if u.approx_eq(&Mat2::x(), 1e-12) => BoolOp::Flip {
                    controls: idx[..*controls].to_vec(),
                    target: idx[*controls],
                },
                g => match g.matrix() {
                    Some(u) if Some(idx[0]) == target => BoolOp::OnTarget { controls: vec![], u },
                    _ => return Err(unsupported()),
                },
            };
            let touches_target_classically = match &compiled {
                BoolOp::Flip { controls, target: t } => {
                    reads_target(controls) || Some(*t) == target
                }
                BoolOp::Swap(a, b) => reads_target(&[*a, *b]),
                BoolOp::Fanout { source, targets } => {
                    reads_target(&[*source]) || reads_target(targets)
                }
                BoolOp::OnTarget { controls, .. } => reads_target(controls),
            };
            let compiled = match compiled {
                BoolOp::Flip { controls, target: t } if Some(t) == target && !reads_target(&controls) => {
                    BoolOp::OnTarget { controls, u: Mat2::x() }
                }
                _ if touches_target_classically => return Err(unsupported()),
                other => other,
            };
            ops.push(compiled);
        }
        Ok(Self { map, target, ops })
    }

    pub fn map(&self) -> &QubitMap {
        &self.map
    }

    pub fn run(&self, bits: &mut [bool], vector: &mut [Complex64; 2]) {
        let all = |bits: &[bool], cs: &[usize]| cs.iter().all(|&c| bits[c]);
        for op in &self.ops {
            match op {
                BoolOp::Flip { controls, target } => {
                    if all(bits, controls) {
                        bits[*target] ^= true;
                    }
                }
                BoolOp::Swap(a, b) => bits.swap(*a, *b),
                BoolOp::Fanout { source, targets } => {
                    if bits[*source] {
                        for &t in targets {
                            bits[t] ^= true;
                        }
                    }
                }
                BoolOp::OnTarget { controls, u } => {
                    if all(bits, controls) {
                        let [a, b, c, d] = u.0;
                        let [x, y] = *vector;
                        *vector = [a * x + b * y, c * x + d * y];
                    }
                }
            }
        }
    }

    pub fn index(&self, a: &Addr) -> Result<usize> {
        self.map.get(a)
    }

    pub fn target(&self) -> Option<usize> {
        self.target
    }
}

/// Classical assignment plus the optional quantum target.
#[derive(Clone, Debug, PartialEq)]
pub struct BooleanState {
    pub bits: BTreeMap<Addr, bool>,
    pub target: Option<(Addr, [Complex64; 2])>,
}

/// Run on a basis input; qubits missing from `initial.bits` start at zero.
pub fn run_boolean(circuit: &AdaptiveCircuit, initial: &BooleanState) -> Result<BooleanState> {
    let target_addr = initial.target.as_ref().map(|(a, _)| a);
    let extra: Vec<Addr> = initial.bits.keys().cloned().collect();
    let prog = BooleanProgram::compile(circuit, target_addr, &extra)?;
    let mut bits = vec![false; prog.map.len()];
    for (a, v) in &initial.bits {
        bits[prog.map.get(a)?] = *v;
    }
    let mut vector = initial
        .target
        .as_ref()
        .map(|(_, v)| *v)
        .unwrap_or([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    prog.run(&mut bits, &mut vector);
    let bits = prog
        .map
        .addrs()
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != prog.target)
        .map(|(i, a)| (a.clone(), bits[i]))
        .collect();
    Ok(BooleanState {
        bits,
        target: initial.target.as_ref().map(|(a, _)| (a.clone(), vector)),
    })
}
