#![allow(dead_code)]

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use nnq::circuit::{AdaptiveCircuit, Addr, BasicOp, Gate, Mat2, Model, Timestep};

/// Single-qubit rotation about a random axis.
pub fn random_unitary<R: Rng>(rng: &mut R) -> Mat2 {
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    let axis = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.0)];
    Mat2::rotation(theta, axis)
}

/// Random normalized state on `n` qubits.
pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

/// Measurement-free abstract circuit with `depth` non-empty steps of
/// disjoint one- and two-qubit gates on `n` indexed qubits.
pub fn random_abstract_circuit<R: Rng>(n: usize, depth: usize, rng: &mut R) -> AdaptiveCircuit {
    let mut c = AdaptiveCircuit::new(Model::Ccac, 1);
    c.n_inputs = n;
    for _ in 0..depth {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut ops = Vec::new();
        let mut rest = order.as_slice();
        while let Some((&a, tail)) = rest.split_first() {
            let pair = !tail.is_empty() && rng.gen_bool(0.5);
            if pair {
                let b = tail[0];
                rest = &tail[1..];
                ops.push(if rng.gen_bool(0.5) {
                    BasicOp::cnot(a, b)
                } else {
                    BasicOp::mcu(vec![Addr::Index(a)], b, random_unitary(rng))
                });
            } else {
                rest = tail;
                match rng.gen_range(0..4) {
                    0 => ops.push(BasicOp::single(Gate::H, a)),
                    1 => ops.push(BasicOp::single(Gate::U { matrix: random_unitary(rng) }, a)),
                    2 => ops.push(BasicOp::single(Gate::S, a)),
                    _ => {}
                }
            }
        }
        if ops.is_empty() {
            ops.push(BasicOp::single(Gate::X, order[0]));
        }
        c.timesteps.push(Timestep::physical(ops));
    }
    c
}

/// Random Clifford abstract circuit, for stabilizer checks.
pub fn random_clifford_circuit<R: Rng>(n: usize, depth: usize, rng: &mut R) -> AdaptiveCircuit {
    let mut c = AdaptiveCircuit::new(Model::Ccac, 1);
    c.n_inputs = n;
    for _ in 0..depth {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut ops = Vec::new();
        for chunk in order.chunks(2) {
            match (chunk, rng.gen_range(0..5)) {
                ([a, b], 0 | 1) => ops.push(BasicOp::cnot(*a, *b)),
                ([a, b], 2) => ops.push(BasicOp::swap(*a, *b)),
                ([a, ..], k) => {
                    let g = [Gate::H, Gate::S, Gate::Sdg, Gate::X, Gate::Y, Gate::Z][k % 6].clone();
                    ops.push(BasicOp::single(g, *a));
                }
                _ => {}
            }
        }
        if ops.is_empty() {
            ops.push(BasicOp::single(Gate::H, order[0]));
        }
        c.timesteps.push(Timestep::physical(ops));
    }
    c
}
