//! Lowering of logical timesteps to physical ones.
//!
//! Each logical gate is replaced by a fixed sequence of two-qubit gates
//! acting between its hub and its leaves. Controlled gates use the parity
//! expansion `2^(c-1) c1...cc = sum over nonempty S of (-1)^(|S|+1) xor(S)`
//! with controlled roots of `U`. A peephole pass then removes adjacent
//! self-inverse pairs and the result is packed as early as possible.

use std::collections::HashMap;

use super::{AdaptiveCircuit, Addr, BasicOp, Gate, Mat2, MeasurementId, StepKind, Timestep};

#[derive(Clone, Copy)]
enum Prim {
    Swap(usize, usize),
    Cnot(usize, usize),
    /// Controlled root, inverted when the flag is set.
    Root(usize, usize, bool),
}

use Prim::{Cnot, Root, Swap};

/// Position 0 is the target, positions 1.. the controls in listed order.
const TWO_CONTROLS: [Prim; 7] = [
    Root(1, 0, false),
    Root(2, 0, false),
    Swap(0, 1),
    Cnot(2, 0),
    Root(0, 1, true),
    Cnot(2, 0),
    Swap(0, 1),
];

/// Uses the third control only in its last ten gates, so a late third
/// input delays the result as little as possible.
const THREE_CONTROLS: [Prim; 17] = [
    Root(1, 0, false),
    Root(2, 0, false),
    Swap(0, 1),
    Cnot(2, 0),
    Root(0, 1, true),
    Cnot(2, 0),
    Swap(0, 3),
    Cnot(2, 0),
    Root(0, 1, true),
    Cnot(3, 0),
    Root(0, 1, false),
    Cnot(2, 0),
    Root(0, 1, true),
    Cnot(3, 0),
    Root(0, 1, false),
    Swap(0, 3),
    Swap(0, 1),
];

/// Singletons first with the target on the hub, then the target moves to
/// leaf 1 while the hub walks through the remaining parities.
const FOUR_CONTROLS: [Prim; 35] = [
    Root(1, 0, false),
    Root(2, 0, false),
    Root(3, 0, false),
    Root(4, 0, false),
    Swap(0, 1),
    Cnot(3, 0),
    Root(0, 1, true),
    Cnot(4, 0),
    Root(0, 1, false),
    Cnot(3, 0),
    Root(0, 1, true),
    Cnot(2, 0),
    Root(0, 1, false),
    Cnot(3, 0),
    Root(0, 1, true),
    Cnot(4, 0),
    Root(0, 1, false),
    Cnot(3, 0),
    Root(0, 1, true),
    Swap(0, 2),
    Cnot(3, 0),
    Root(0, 1, true),
    Cnot(4, 0),
    Root(0, 1, false),
    Cnot(3, 0),
    Root(0, 1, true),
    Swap(0, 4),
    Cnot(3, 0),
    Root(0, 1, true),
    Cnot(3, 0),
    Swap(0, 4),
    Cnot(4, 0),
    Swap(0, 2),
    Cnot(2, 0),
    Swap(0, 1),
];

fn controlled(controls: &[Addr], target: &Addr, u: Mat2, mirrored: bool) -> Vec<BasicOp> {
    let table: &[Prim] = match controls.len() {
        1 => return vec![controlled_single(&controls[0], target, u)],
        2 => &TWO_CONTROLS,
        3 => &THREE_CONTROLS,
        4 => &FOUR_CONTROLS,
        _ => unreachable!("caller checks arity"),
    };
    let root = u.root(1 << (controls.len() - 1));
    let inverse = root.dagger();
    let at = |i: usize| if i == 0 { target.clone() } else { controls[i - 1].clone() };
    let lower = |p: &Prim| match *p {
        Swap(a, b) => BasicOp::swap(at(a), at(b)),
        Cnot(a, b) => BasicOp::cnot(at(a), at(b)),
        Root(a, b, inv) => BasicOp::mcu(vec![at(a)], at(b), if inv { inverse } else { root }),
    };
    if mirrored {
        table.iter().rev().map(lower).collect()
    } else {
        table.iter().map(lower).collect()
    }
}

fn controlled_single(control: &Addr, target: &Addr, u: Mat2) -> BasicOp {
    if u.approx_eq(&Mat2::x(), 1e-12) {
        BasicOp::cnot(control.clone(), target.clone())
    } else {
        BasicOp::mcu(vec![control.clone()], target.clone(), u)
    }
}

/// Physical replacement for one operation. Gates on at most two qubits are
/// kept, as are gates wider than five qubits, which have no local expansion.
///
/// Controlled gates on two to four controls end with a SWAP between the
/// target and the first control; the `mirrored` form is the same sequence
/// reversed, which implements the same gate and starts with that SWAP.
pub fn decompose_logical(op: &BasicOp, mirrored: bool) -> Vec<BasicOp> {
    let q = &op.qubits;
    match &op.gate {
        Gate::Mcx { controls } if (1..=4).contains(controls) => {
            controlled(&q[..*controls], &q[*controls], Mat2::x(), mirrored)
        }
        Gate::Mcu { controls, u } if (2..=4).contains(controls) => {
            controlled(&q[..*controls], &q[*controls], *u, mirrored)
        }
        Gate::Fanout { targets } if *targets >= 2 => q[1..]
            .iter()
            .map(|t| BasicOp::cnot(q[0].clone(), t.clone()))
            .collect(),
        Gate::Fanout { .. } => vec![BasicOp::cnot(q[0].clone(), q[1].clone())],
        _ => vec![op.clone()],
    }
}

fn same_involution(a: &BasicOp, b: &BasicOp) -> bool {
    if a.condition.is_some() || b.condition.is_some() || a.gate != b.gate || !a.gate.is_involution() {
        return false;
    }
    if a.gate == Gate::Swap {
        let mut x = a.qubits.clone();
        let mut y = b.qubits.clone();
        x.sort();
        y.sort();
        x == y
    } else {
        a.qubits == b.qubits
    }
}

/// Remove pairs of identical self-inverse gates with nothing in between on
/// their qubits.
pub fn peephole(ops: Vec<BasicOp>) -> Vec<BasicOp> {
    let mut out: Vec<Option<BasicOp>> = Vec::with_capacity(ops.len());
    let mut last: HashMap<Addr, Vec<usize>> = HashMap::new();
    for op in ops {
        let prev: Vec<Option<usize>> = op
            .qubits
            .iter()
            .map(|q| last.get(q).and_then(|s| s.last().copied()))
            .collect();
        if let Some(Some(j)) = prev.first() {
            let j = *j;
            let cancel = prev.iter().all(|p| *p == Some(j))
                && out[j]
                    .as_ref()
                    .is_some_and(|o| o.qubits.len() == op.qubits.len() && same_involution(o, &op));
            if cancel {
                out[j] = None;
                for q in &op.qubits {
                    last.get_mut(q).map(Vec::pop);
                }
                continue;
            }
        }
        let idx = out.len();
        for q in &op.qubits {
            last.entry(q.clone()).or_default().push(idx);
        }
        out.push(Some(op));
    }
    out.into_iter().flatten().collect()
}

/// Greedy layering: each operation goes to the first layer after every
/// earlier operation sharing a qubit or feeding its condition.
pub fn schedule_asap(ops: Vec<BasicOp>) -> Vec<Vec<BasicOp>> {
    let mut ready: HashMap<Addr, usize> = HashMap::new();
    let mut measured: HashMap<MeasurementId, usize> = HashMap::new();
    let mut layers: Vec<Vec<BasicOp>> = Vec::new();
    for op in ops {
        let mut layer = op.qubits.iter().map(|q| ready.get(q).copied().unwrap_or(0)).max().unwrap_or(0);
        if let Some(cond) = &op.condition {
            for id in cond.ids() {
                if let Some(&l) = measured.get(&id) {
                    layer = layer.max(l + 1);
                }
            }
        }
        for q in &op.qubits {
            ready.insert(q.clone(), layer + 1);
        }
        if let Some(id) = op.measurement_id {
            measured.insert(id, layer);
        }
        if layers.len() <= layer {
            layers.resize_with(layer + 1, Vec::new);
        }
        layers[layer].push(op);
    }
    layers
}

/// Decompose a run of logical operations, mirroring a controlled gate when
/// the previous operation on its target is a SWAP with its first control.
fn lower_segment<'a>(ops: impl Iterator<Item = &'a BasicOp>) -> Vec<BasicOp> {
    let mut out: Vec<BasicOp> = Vec::new();
    let mut last: HashMap<Addr, usize> = HashMap::new();
    for op in ops {
        let mirrored = match op.gate {
            Gate::Mcx { controls } | Gate::Mcu { controls, .. } if controls >= 2 => {
                let target = &op.qubits[controls];
                last.get(target).is_some_and(|&i| {
                    let prev = &out[i];
                    prev.gate == Gate::Swap
                        && prev.qubits.contains(target)
                        && prev.qubits.contains(&op.qubits[0])
                })
            }
            _ => false,
        };
        for low in decompose_logical(op, mirrored) {
            for q in &low.qubits {
                last.insert(q.clone(), out.len());
            }
            out.push(low);
        }
    }
    out
}

/// Replace every run of logical timesteps by scheduled physical timesteps.
pub fn expand_to_physical(circuit: &AdaptiveCircuit) -> AdaptiveCircuit {
    let mut out = AdaptiveCircuit {
        timesteps: Vec::with_capacity(circuit.timesteps.len()),
        ..circuit.clone()
    };
    let mut segment: Vec<&BasicOp> = Vec::new();
    let flush = |segment: &mut Vec<&BasicOp>, out: &mut AdaptiveCircuit| {
        if segment.is_empty() {
            return;
        }
        let ops = peephole(lower_segment(std::mem::take(segment).into_iter()));
        out.timesteps
            .extend(schedule_asap(ops).into_iter().map(Timestep::physical));
    };
    for step in &circuit.timesteps {
        match step.kind {
            StepKind::Logical => segment.extend(step.ops.iter()),
            StepKind::Physical => {
                flush(&mut segment, &mut out);
                out.timesteps.push(step.clone());
            }
        }
    }
    flush(&mut segment, &mut out);
    out
}
