//! Clifford simulation with a destabilizer/stabilizer tableau.
//!
//! Rows `0..n` are destabilizers, `n..2n` stabilizers and row `2n` is
//! scratch space. Each row stores X and Z bits packed into words plus a sign.

use num_complex::Complex64;

use super::{OutcomeSource, QubitMap, Record};
use crate::circuit::{AdaptiveCircuit, BasicOp, Gate, Mat2, Timestep};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct StabilizerState {
    map: QubitMap,
    n: usize,
    words: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    signs: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Clifford1 {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
}

fn classify(u: &Mat2) -> Option<Clifford1> {
    let candidates = [
        (Clifford1::I, Mat2::identity()),
        (Clifford1::X, Mat2::x()),
        (Clifford1::Y, Mat2::y()),
        (Clifford1::Z, Mat2::z()),
        (Clifford1::H, Mat2::h()),
        (Clifford1::S, Mat2::s()),
        (Clifford1::Sdg, Mat2::sdg()),
    ];
    candidates.into_iter().find_map(|(k, m)| {
        let pivot = (0..4).find(|&i| m.0[i].norm() > 0.5)?;
        if u.0[pivot].norm() < 1e-9 {
            return None;
        }
        let phase: Complex64 = u.0[pivot] / m.0[pivot];
        m.scale(phase).approx_eq(u, 1e-9).then_some(k)
    })
}

impl StabilizerState {
    /// All qubits in `|0>`.
    pub fn zero(map: QubitMap) -> Self {
        let n = map.len();
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut s = Self {
            map,
            n,
            words,
            xs: vec![0; rows * words],
            zs: vec![0; rows * words],
            signs: vec![false; rows],
        };
        for i in 0..n {
            s.set_x(i, i, true);
            s.set_z(i + n, i, true);
        }
        s
    }

    pub fn map(&self) -> &QubitMap {
        &self.map
    }

    fn x(&self, row: usize, q: usize) -> bool {
        self.xs[row * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    fn z(&self, row: usize, q: usize) -> bool {
        self.zs[row * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.xs[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let w = &mut self.zs[row * self.words + q / 64];
        *w = (*w & !(1 << (q % 64))) | ((v as u64) << (q % 64));
    }

    fn rows(&self) -> std::ops::Range<usize> {
        0..2 * self.n
    }

    pub fn h(&mut self, q: usize) {
        for r in self.rows() {
            let (x, z) = (self.x(r, q), self.z(r, q));
            self.signs[r] ^= x & z;
            self.set_x(r, q, z);
            self.set_z(r, q, x);
        }
    }

    pub fn s(&mut self, q: usize) {
        for r in self.rows() {
            let (x, z) = (self.x(r, q), self.z(r, q));
            self.signs[r] ^= x & z;
            self.set_z(r, q, z ^ x);
        }
    }

    pub fn pauli(&mut self, q: usize, px: bool, pz: bool) {
        for r in self.rows() {
            let flip = (px && self.z(r, q)) ^ (pz && self.x(r, q));
            self.signs[r] ^= flip;
        }
    }

    pub fn cnot(&mut self, a: usize, b: usize) {
        for r in self.rows() {
            let (xa, za, xb, zb) = (self.x(r, a), self.z(r, a), self.x(r, b), self.z(r, b));
            self.signs[r] ^= xa & zb & !(xb ^ za);
            self.set_x(r, b, xb ^ xa);
            self.set_z(r, a, za ^ zb);
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        for r in self.rows() {
            let (xa, za, xb, zb) = (self.x(r, a), self.z(r, a), self.x(r, b), self.z(r, b));
            self.set_x(r, a, xb);
            self.set_z(r, a, zb);
            self.set_x(r, b, xa);
            self.set_z(r, b, za);
        }
    }

    /// Row `h` becomes the product of rows `i` and `h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut phase: i64 = 2 * (self.signs[h] as i64) + 2 * (self.signs[i] as i64);
        for w in 0..self.words {
            let (x1, z1) = (self.xs[i * self.words + w], self.zs[i * self.words + w]);
            let (x2, z2) = (self.xs[h * self.words + w], self.zs[h * self.words + w]);
            let mut live = (x1 | z1) & (x2 | z2);
            while live != 0 {
                let b = live.trailing_zeros();
                live &= live - 1;
                let bit = |v: u64| ((v >> b) & 1) as i64;
                let (a1, c1, a2, c2) = (bit(x1), bit(z1), bit(x2), bit(z2));
                phase += match (a1, c1) {
                    (1, 1) => c2 - a2,
                    (1, 0) => c2 * (2 * a2 - 1),
                    (0, 1) => a2 * (1 - 2 * c2),
                    _ => 0,
                };
            }
            self.xs[h * self.words + w] = x1 ^ x2;
            self.zs[h * self.words + w] = z1 ^ z2;
        }
        self.signs[h] = phase.rem_euclid(4) == 2;
    }

    fn clear_row(&mut self, r: usize) {
        for w in 0..self.words {
            self.xs[r * self.words + w] = 0;
            self.zs[r * self.words + w] = 0;
        }
        self.signs[r] = false;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        for w in 0..self.words {
            self.xs[dst * self.words + w] = self.xs[src * self.words + w];
            self.zs[dst * self.words + w] = self.zs[src * self.words + w];
        }
        self.signs[dst] = self.signs[src];
    }

    /// Outcome of a Z measurement on `q` if it is deterministic.
    pub fn peek_z(&mut self, q: usize) -> Option<bool> {
        if (self.n..2 * self.n).any(|r| self.x(r, q)) {
            return None;
        }
        let scratch = 2 * self.n;
        self.clear_row(scratch);
        for i in 0..self.n {
            if self.x(i, q) {
                self.rowsum(scratch, i + self.n);
            }
        }
        Some(self.signs[scratch])
    }

    pub fn measure(&mut self, q: usize, id: crate::circuit::MeasurementId, source: &mut dyn OutcomeSource) -> Result<bool> {
        if let Some(v) = self.peek_z(q) {
            return Ok(v);
        }
        let n = self.n;
        let p = (n..2 * n).find(|&r| self.x(r, q)).expect("random branch has a pivot");
        for r in 0..2 * n {
            if r != p && self.x(r, q) {
                self.rowsum(r, p);
            }
        }
        self.copy_row(p - n, p);
        self.clear_row(p);
        self.set_z(p, q, true);
        let value = source.outcome(id, 0.5)?;
        self.signs[p] = value;
        Ok(value)
    }

    fn single(&mut self, q: usize, k: Clifford1) {
        match k {
            Clifford1::I => {}
            Clifford1::X => self.pauli(q, true, false),
            Clifford1::Y => self.pauli(q, true, true),
            Clifford1::Z => self.pauli(q, false, true),
            Clifford1::H => self.h(q),
            Clifford1::S => self.s(q),
            Clifford1::Sdg => {
                self.s(q);
                self.s(q);
                self.s(q);
            }
        }
    }

    pub fn apply_op(&mut self, op: &BasicOp, record: &mut Record, source: &mut dyn OutcomeSource) -> Result<()> {
        let idx: Vec<usize> = op.qubits.iter().map(|q| self.map.get(q)).collect::<Result<_>>()?;
        let unsupported = || Error::UnsupportedGate(op.gate.name().into());
        match &op.gate {
            Gate::Cnot | Gate::Mcx { controls: 1 } => self.cnot(idx[0], idx[1]),
            Gate::Swap => self.swap(idx[0], idx[1]),
            Gate::Fanout { .. } => {
                for &t in &idx[1..] {
                    self.cnot(idx[0], t);
                }
            }
            Gate::Mcu { controls: 1, u } => match classify(u).ok_or_else(unsupported)? {
                Clifford1::I => {}
                Clifford1::X => self.cnot(idx[0], idx[1]),
                Clifford1::Z => {
                    self.h(idx[1]);
                    self.cnot(idx[0], idx[1]);
                    self.h(idx[1]);
                }
                _ => return Err(unsupported()),
            },
            Gate::Measure => {
                let id = op.measurement_id.ok_or_else(unsupported)?;
                let v = self.measure(idx[0], id, source)?;
                record.insert(id, v);
            }
            Gate::PauliCorrection => {
                let cond = op.condition.as_ref().ok_or_else(unsupported)?;
                let (x, z) = cond.resolve(|id| record.get(id))?;
                self.pauli(idx[0], x, z);
            }
            g => {
                let u = g.matrix().ok_or_else(unsupported)?;
                let k = classify(&u).ok_or_else(unsupported)?;
                self.single(idx[0], k);
            }
        }
        Ok(())
    }

    pub fn apply_step(&mut self, step: &Timestep, record: &mut Record, source: &mut dyn OutcomeSource) -> Result<()> {
        step.ops
            .iter()
            .try_for_each(|op| self.apply_op(op, record, source))
    }

    pub fn run(&mut self, circuit: &AdaptiveCircuit, source: &mut dyn OutcomeSource) -> Result<Record> {
        let mut record = Record::default();
        for step in &circuit.timesteps {
            self.apply_step(step, &mut record, source)?;
        }
        Ok(record)
    }

    /// Stabilizer generators as signed Pauli strings over the map order.
    pub fn generators(&self) -> Vec<String> {
        (self.n..2 * self.n)
            .map(|r| {
                let mut s = String::from(if self.signs[r] { "-" } else { "+" });
                for q in 0..self.n {
                    s.push(match (self.x(r, q), self.z(r, q)) {
                        (false, false) => 'I',
                        (true, false) => 'X',
                        (true, true) => 'Y',
                        (false, true) => 'Z',
                    });
                }
                s
            })
            .collect()
    }
}

/// Run `circuit` from `initial`, returning the final state and the outcomes.
pub fn run_stabilizer(
    circuit: &AdaptiveCircuit,
    mut initial: StabilizerState,
    source: &mut dyn OutcomeSource,
) -> Result<(StabilizerState, Record)> {
    let record = initial.run(circuit, source)?;
    Ok((initial, record))
}
