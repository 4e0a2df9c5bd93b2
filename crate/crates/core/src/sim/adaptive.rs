//! Step-by-step execution where a controller chooses each timestep after
//! seeing the outcomes so far.

use super::dense::DenseState;
use super::stabilizer::StabilizerState;
use super::{OutcomeSource, Record};
use crate::circuit::{
    validate, AdaptiveCircuit, Addr, BasicOp, Gate, Mat2, MeasurementId, Model, Timestep, ViolationKind,
};
use crate::error::{Error, Result};
use crate::geom::GridPoint;
use crate::pauli::{compose, sigma_of, BellOutcome};

pub trait Controller {
    /// The next timestep, or `None` to halt.
    fn next_step(&mut self, record: &Record) -> Option<Timestep>;
}

pub trait Device {
    fn apply(&mut self, step: &Timestep, record: &mut Record, source: &mut dyn OutcomeSource) -> Result<()>;
}

impl Device for DenseState {
    fn apply(&mut self, step: &Timestep, record: &mut Record, source: &mut dyn OutcomeSource) -> Result<()> {
        self.apply_step(step, record, source)
    }
}

impl Device for StabilizerState {
    fn apply(&mut self, step: &Timestep, record: &mut Record, source: &mut dyn OutcomeSource) -> Result<()> {
        self.apply_step(step, record, source)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Transcript {
    pub steps: Vec<Timestep>,
    pub record: Record,
}

impl Transcript {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }
}

/// Structural check of one proposed step against the model's locality
/// rules. Conditions are checked against the record when applied.
fn check_step(step: &Timestep, model: Model, dim: usize) -> Result<()> {
    let probe = AdaptiveCircuit {
        measurement_count: u32::MAX,
        timesteps: vec![step.clone()],
        ..AdaptiveCircuit::new(model, dim)
    };
    let violations: Vec<_> = validate(&probe)
        .into_iter()
        .filter(|v| !matches!(v.kind, ViolationKind::Causality(_)))
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Rejected(violations))
    }
}

pub fn execute_adaptive(
    controller: &mut dyn Controller,
    device: &mut dyn Device,
    source: &mut dyn OutcomeSource,
    model: Model,
    dim: usize,
) -> Result<Transcript> {
    let mut transcript = Transcript::default();
    while let Some(step) = controller.next_step(&transcript.record) {
        check_step(&step, model, dim)?;
        device.apply(&step, &mut transcript.record, source)?;
        transcript.steps.push(step);
    }
    Ok(transcript)
}

/// Replays a precompiled circuit.
pub struct ReplayController<'a> {
    circuit: &'a AdaptiveCircuit,
    next: usize,
}

impl<'a> ReplayController<'a> {
    pub fn new(circuit: &'a AdaptiveCircuit) -> Self {
        Self { circuit, next: 0 }
    }
}

impl Controller for ReplayController<'_> {
    fn next_step(&mut self, _record: &Record) -> Option<Timestep> {
        let step = self.circuit.timesteps.get(self.next).cloned();
        self.next += 1;
        step
    }
}

/// Teleports one qubit along a line of adjacent points, computing the Pauli
/// correction from the outcomes it sees rather than through a condition.
pub struct TeleportController {
    line: Vec<GridPoint>,
    outcomes: Vec<BellOutcome>,
    stage: usize,
}

impl TeleportController {
    pub fn new(line: Vec<GridPoint>) -> Self {
        let mut outcomes = Vec::new();
        let even = (line.len() - 1) & !1;
        for i in (0..even).step_by(2) {
            outcomes.push(BellOutcome {
                phase_bit: MeasurementId(2 * (i / 2) as u32),
                flip_bit: MeasurementId(2 * (i / 2) as u32 + 1),
            });
        }
        Self {
            line,
            outcomes,
            stage: 0,
        }
    }

    fn pairs(&self, offset: usize) -> impl Iterator<Item = (Addr, Addr)> + '_ {
        let even = (self.line.len() - 1) & !1;
        (offset..even)
            .step_by(2)
            .filter(move |&i| i < even)
            .map(|i| (Addr::from(&self.line[i]), Addr::from(&self.line[i + 1])))
    }
}

impl Controller for TeleportController {
    fn next_step(&mut self, record: &Record) -> Option<Timestep> {
        let d = self.line.len() - 1;
        let even = d & !1;
        let stage = self.stage;
        self.stage += 1;
        if even == 0 {
            return match (stage, d) {
                (0, 1) => Some(Timestep::physical(vec![BasicOp::swap(&self.line[0], &self.line[1])])),
                _ => None,
            };
        }
        let ops = match stage {
            0 => self.pairs(1).map(|(a, _)| BasicOp::single(Gate::H, a)).collect(),
            1 => self.pairs(1).map(|(a, b)| BasicOp::cnot(a, b)).collect(),
            2 => self.pairs(0).map(|(a, b)| BasicOp::cnot(a, b)).collect(),
            3 => self.pairs(0).map(|(a, _)| BasicOp::single(Gate::H, a)).collect(),
            4 => self
                .pairs(0)
                .zip(&self.outcomes)
                .flat_map(|((a, b), o)| [BasicOp::measure(a, o.phase_bit), BasicOp::measure(b, o.flip_bit)])
                .collect(),
            5 => {
                let sigmas: Vec<_> = self
                    .outcomes
                    .iter()
                    .map(|o| sigma_of(o.index(|id| record.get(id).unwrap_or(false))))
                    .collect();
                let p = compose(&sigmas);
                let mut u = Mat2::identity();
                if p.x {
                    u = u.mul(&Mat2::x());
                }
                if p.z {
                    u = u.mul(&Mat2::z());
                }
                vec![BasicOp::single(Gate::U { matrix: u }, &self.line[even])]
            }
            6 if d % 2 == 1 => vec![BasicOp::swap(&self.line[even], &self.line[d])],
            _ => return None,
        };
        Some(Timestep::physical(ops))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{QubitMap, SeededOutcomes};

    #[test]
    fn rejects_non_local_steps() {
        let step = Timestep::physical(vec![BasicOp::cnot(GridPoint::xy(0, 0), GridPoint::xy(2, 0))]);
        assert!(matches!(check_step(&step, Model::Ccntc, 2), Err(Error::Rejected(_))));
    }

    #[test]
    fn teleport_controller_moves_basis_state() {
        let line: Vec<GridPoint> = (0..5).map(|x| GridPoint::xy(x, 0)).collect();
        for seed in 0..8 {
            let map = QubitMap::new(line.iter().map(Addr::from));
            let mut dev = StabilizerState::zero(map);
            dev.pauli(0, true, false);
            let mut ctl = TeleportController::new(line.clone());
            let mut src = SeededOutcomes::new(seed);
            let t = execute_adaptive(&mut ctl, &mut dev, &mut src, Model::Ccntc, 2).unwrap();
            assert_eq!(t.depth(), 6);
            assert_eq!(dev.peek_z(4), Some(true));
        }
    }
}
