use std::collections::BTreeSet;

use super::{expand_to_physical, AdaptiveCircuit, Addr, Model, StepKind};

fn physical(circuit: &AdaptiveCircuit) -> std::borrow::Cow<'_, AdaptiveCircuit> {
    if circuit.timesteps.iter().all(|s| s.kind == StepKind::Physical) {
        std::borrow::Cow::Borrowed(circuit)
    } else {
        std::borrow::Cow::Owned(expand_to_physical(circuit))
    }
}

/// Number of physical timesteps.
pub fn depth(circuit: &AdaptiveCircuit) -> usize {
    physical(circuit).timesteps.len()
}

/// Number of physical operations.
pub fn size(circuit: &AdaptiveCircuit) -> usize {
    physical(circuit).ops().count()
}

/// Distinct qubits acted on.
pub fn qubits_touched(circuit: &AdaptiveCircuit) -> BTreeSet<Addr> {
    circuit.qubits()
}

/// Qubits acted on, or for the grid model with classical control the volume
/// of the smallest axis-aligned hypercube containing them.
pub fn width(circuit: &AdaptiveCircuit) -> usize {
    let touched = qubits_touched(circuit);
    if circuit.model != Model::Ccntc {
        return touched.len();
    }
    let points: Vec<_> = touched.iter().filter_map(Addr::grid).collect();
    if points.is_empty() {
        return 0;
    }
    let dim = points[0].dim();
    let side = (0..dim)
        .map(|d| {
            let lo = points.iter().map(|p| p.coords()[d]).min().unwrap_or(0);
            let hi = points.iter().map(|p| p.coords()[d]).max().unwrap_or(0);
            hi - lo + 1
        })
        .max()
        .unwrap_or(0);
    (side as usize).pow(dim as u32)
}
