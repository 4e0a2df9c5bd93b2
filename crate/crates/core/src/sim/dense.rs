//! State-vector simulation. Qubit `i` of the map is bit `i` of the basis
//! index.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{OutcomeSource, QubitMap, Record};
use crate::circuit::{AdaptiveCircuit, BasicOp, Gate, Mat2, Timestep};
use crate::error::{Error, Result};

pub const MAX_DENSE_QUBITS: usize = 24;

pub(crate) fn apply_controlled(amps: &mut [Complex64], control_mask: usize, target: usize, u: &Mat2) {
    let tbit = 1usize << target;
    let [a, b, c, d] = u.0;
    for i in 0..amps.len() {
        if i & tbit != 0 || i & control_mask != control_mask {
            continue;
        }
        let j = i | tbit;
        let (x, y) = (amps[i], amps[j]);
        amps[i] = a * x + b * y;
        amps[j] = c * x + d * y;
    }
}

pub(crate) fn apply_swap(amps: &mut [Complex64], p: usize, q: usize) {
    let (bp, bq) = (1usize << p, 1usize << q);
    for i in 0..amps.len() {
        if i & bp != 0 && i & bq == 0 {
            amps.swap(i, (i & !bp) | bq);
        }
    }
}

/// Unitary action of `op` on indices given by `idx`, with matrices passed
/// through `adjust` (used to conjugate for the density-matrix column side).
pub(crate) fn apply_unitary_op(
    amps: &mut [Complex64],
    op: &BasicOp,
    idx: &[usize],
    adjust: impl Fn(Mat2) -> Mat2,
) -> Result<()> {
    let mask = |qs: &[usize]| qs.iter().fold(0usize, |m, &q| m | (1 << q));
    match &op.gate {
        Gate::Cnot => apply_controlled(amps, 1 << idx[0], idx[1], &adjust(Mat2::x())),
        Gate::Swap => apply_swap(amps, idx[0], idx[1]),
        Gate::Mcx { controls } => {
            apply_controlled(amps, mask(&idx[..*controls]), idx[*controls], &adjust(Mat2::x()))
        }
        Gate::Mcu { controls, u } => {
            apply_controlled(amps, mask(&idx[..*controls]), idx[*controls], &adjust(*u))
        }
        Gate::Fanout { .. } => {
            for &t in &idx[1..] {
                apply_controlled(amps, 1 << idx[0], t, &adjust(Mat2::x()));
            }
        }
        g => match g.matrix() {
            Some(u) => apply_controlled(amps, 0, idx[0], &adjust(u)),
            None => return Err(Error::UnsupportedGate(g.name().into())),
        },
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct DenseState {
    map: QubitMap,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// All qubits in `|0>`.
    pub fn zero(map: QubitMap) -> Result<Self> {
        if map.len() > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits(map.len()));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << map.len()];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { map, amps })
    }

    pub fn from_amplitudes(map: QubitMap, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << map.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                1usize << map.len(),
                amps.len()
            )));
        }
        Ok(Self { map, amps })
    }

    pub fn map(&self) -> &QubitMap {
        &self.map
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn indices(&self, op: &BasicOp) -> Result<Vec<usize>> {
        op.qubits.iter().map(|q| self.map.get(q)).collect()
    }

    pub fn probability_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Project qubit `q` onto `value` and renormalize.
    pub fn collapse(&mut self, q: usize, value: bool) {
        let bit = 1usize << q;
        let mut norm = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) != value {
                *a = Complex64::new(0.0, 0.0);
            } else {
                norm += a.norm_sqr();
            }
        }
        let s = 1.0 / norm.sqrt();
        for a in &mut self.amps {
            *a *= s;
        }
    }

    pub fn apply_op(&mut self, op: &BasicOp, record: &mut Record, source: &mut dyn OutcomeSource) -> Result<()> {
        let idx = self.indices(op)?;
        match &op.gate {
            Gate::Measure => {
                let id = op
                    .measurement_id
                    .ok_or_else(|| Error::InvalidArgument("measurement without id".into()))?;
                let p1 = self.probability_one(idx[0]).clamp(0.0, 1.0);
                let value = source.outcome(id, p1)?;
                self.collapse(idx[0], value);
                record.insert(id, value);
            }
            Gate::PauliCorrection => {
                let cond = op
                    .condition
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("correction without condition".into()))?;
                let (x, z) = cond.resolve(|id| record.get(id))?;
                if z {
                    apply_controlled(&mut self.amps, 0, idx[0], &Mat2::z());
                }
                if x {
                    apply_controlled(&mut self.amps, 0, idx[0], &Mat2::x());
                }
            }
            _ => apply_unitary_op(&mut self.amps, op, &idx, |m| m)?,
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

    /// Reduced density matrix on `keep`; index bit `i` is `keep[i]`.
    pub fn reduced_density(&self, keep: &[usize]) -> DMatrix<Complex64> {
        let dim = 1usize << keep.len();
        let keep_mask = keep.iter().fold(0usize, |m, &q| m | (1 << q));
        let local = |i: usize| {
            keep.iter()
                .enumerate()
                .fold(0usize, |acc, (b, &q)| acc | (((i >> q) & 1) << b))
        };
        let mut rho = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        let mut groups: std::collections::HashMap<usize, Vec<(usize, Complex64)>> = Default::default();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > 0.0 {
                groups.entry(i & !keep_mask).or_default().push((local(i), *a));
            }
        }
        for entries in groups.values() {
            for &(r, a) in entries {
                for &(c, b) in entries {
                    rho[(r, c)] += a * b.conj();
                }
            }
        }
        rho
    }
}

/// Run `circuit` from `initial`, returning the final state and the outcomes.
pub fn run_dense(
    circuit: &AdaptiveCircuit,
    mut initial: DenseState,
    source: &mut dyn OutcomeSource,
) -> Result<(DenseState, Record)> {
    let record = initial.run(circuit, source)?;
    Ok((initial, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Addr, Model};
    use crate::sim::SeededOutcomes;

    fn map(n: usize) -> QubitMap {
        QubitMap::new((0..n).map(Addr::Index))
    }

    #[test]
    fn bell_state_density() {
        let mut s = DenseState::zero(map(2)).unwrap();
        let mut rec = Record::default();
        let mut src = SeededOutcomes::new(1);
        s.apply_op(&BasicOp::single(Gate::H, 0usize), &mut rec, &mut src).unwrap();
        s.apply_op(&BasicOp::cnot(0usize, 1usize), &mut rec, &mut src).unwrap();
        let rho = s.reduced_density(&[0]);
        assert!((rho[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!(rho[(0, 1)].norm() < 1e-12);
        let full = s.reduced_density(&[0, 1]);
        assert!((full[(0, 3)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn swap_and_measure() {
        let mut s = DenseState::zero(map(3)).unwrap();
        let mut rec = Record::default();
        let mut src = SeededOutcomes::new(2);
        s.apply_op(&BasicOp::single(Gate::X, 0usize), &mut rec, &mut src).unwrap();
        s.apply_op(&BasicOp::swap(0usize, 2usize), &mut rec, &mut src).unwrap();
        assert!((s.probability_one(2) - 1.0).abs() < 1e-12);
        let mut c = AdaptiveCircuit::new(Model::Ccac, 0);
        c.measurement_count = 1;
        c.timesteps = vec![Timestep::physical(vec![BasicOp::measure(2usize, crate::circuit::MeasurementId(0))])];
        let rec = s.run(&c, &mut src).unwrap();
        assert_eq!(rec.get(crate::circuit::MeasurementId(0)), Some(true));
    }
}
