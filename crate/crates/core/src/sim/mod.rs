//! Simulators: classical reversible, stabilizer, dense state vector and
//! density matrix, plus an adaptive execution loop.

pub mod adaptive;
pub mod boolean;
pub mod dense;
pub mod density;
pub mod stabilizer;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{AdaptiveCircuit, Addr, MeasurementId};
use crate::error::{Error, Result};

/// Bijection between addresses and simulator indices, in sorted order.
#[derive(Clone, Debug, Default)]
pub struct QubitMap {
    addrs: Vec<Addr>,
    index: HashMap<Addr, usize>,
}

impl QubitMap {
    pub fn new(addrs: impl IntoIterator<Item = Addr>) -> Self {
        let mut addrs: Vec<Addr> = addrs.into_iter().collect();
        addrs.sort();
        addrs.dedup();
        let index = addrs.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Self { addrs, index }
    }

    /// Every qubit of the circuit plus the extra addresses.
    pub fn for_circuit(circuit: &AdaptiveCircuit, extra: impl IntoIterator<Item = Addr>) -> Self {
        Self::new(circuit.qubits().into_iter().chain(extra))
    }

    pub fn len(&self) -> usize {
        self.addrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.addrs.is_empty()
    }

    pub fn get(&self, a: &Addr) -> Result<usize> {
        self.index
            .get(a)
            .copied()
            .ok_or_else(|| Error::UnknownQubit(a.to_string()))
    }

    pub fn addrs(&self) -> &[Addr] {
        &self.addrs
    }
}

/// Supplies measurement results for outcomes that are not deterministic.
pub trait OutcomeSource {
    /// Outcome for measurement `id` given the probability of reading one.
    fn outcome(&mut self, id: MeasurementId, p_one: f64) -> Result<bool>;
}

/// Outcomes drawn from a seeded generator.
pub struct SeededOutcomes(ChaCha8Rng);

impl SeededOutcomes {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl OutcomeSource for SeededOutcomes {
    fn outcome(&mut self, _id: MeasurementId, p_one: f64) -> Result<bool> {
        Ok(self.0.gen::<f64>() < p_one)
    }
}

/// Outcomes fixed in advance; a fallback decides unlisted measurements.
pub struct ScriptedOutcomes {
    script: HashMap<MeasurementId, bool>,
    fallback: Option<bool>,
}

impl ScriptedOutcomes {
    pub fn new(script: HashMap<MeasurementId, bool>) -> Self {
        Self {
            script,
            fallback: None,
        }
    }

    /// Every measurement reads `value`.
    pub fn constant(value: bool) -> Self {
        Self {
            script: HashMap::new(),
            fallback: Some(value),
        }
    }
}

impl OutcomeSource for ScriptedOutcomes {
    fn outcome(&mut self, id: MeasurementId, p_one: f64) -> Result<bool> {
        let value = self
            .script
            .get(&id)
            .copied()
            .or(self.fallback)
            .ok_or(Error::UnknownMeasurement(id.0))?;
        let p = if value { p_one } else { 1.0 - p_one };
        if p < 1e-12 {
            return Err(Error::ImpossibleOutcome(id.0));
        }
        Ok(value)
    }
}

/// Recorded outcomes indexed by measurement id.
#[derive(Clone, Debug, Default)]
pub struct Record(HashMap<MeasurementId, bool>);

impl Record {
    pub fn get(&self, id: MeasurementId) -> Option<bool> {
        self.0.get(&id).copied()
    }

    pub fn insert(&mut self, id: MeasurementId, value: bool) {
        self.0.insert(id, value);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
