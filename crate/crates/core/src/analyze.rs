//! Light cones, depth lower bounds, input sensitivity and scaling tables.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{
    depth, expand_to_physical, size, width, AdaptiveCircuit, Addr, BasicOp, Gate, Mat2, Model,
    Timestep,
};
use crate::compactor::{control_circuit_kd, fanout_circuit};
use crate::error::{Error, Result};
use crate::geom::{control_layout, distance, ControlLayout, GridPoint, Norm};
use crate::sim::density::{partial_trace, trace_distance, DensityMatrix};
use crate::sim::QubitMap;

/// Largest register `sensitivity_check` will simulate.
pub const MAX_SENSITIVITY_QUBITS: usize = 10;

/// Fraction of `|S|^(1/k)` used as the distance threshold in [`far_subset`].
pub const FAR_FRACTION: f64 = 0.25;

/// Which qubits can affect `target`, and through which operations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LightconeCertificate {
    pub target: GridPoint,
    pub influence: BTreeSet<GridPoint>,
    /// `(timestep, op)` positions in the physical expansion.
    pub active_ops: BTreeSet<(usize, usize)>,
    /// Physical depth of the analyzed circuit.
    pub depth: usize,
    /// Largest l1 distance from an influencing qubit to the target; the
    /// circuit depth can be no smaller.
    pub depth_bound: i64,
}

impl LightconeCertificate {
    /// Points within l1 distance `depth` of the target among `candidates`.
    pub fn ball<'a>(&self, candidates: impl IntoIterator<Item = &'a GridPoint>) -> BTreeSet<GridPoint> {
        candidates
            .into_iter()
            .filter(|p| matches!(distance(p, &self.target, Norm::L1), Ok(d) if d <= self.depth as i64))
            .cloned()
            .collect()
    }

    /// True when every influencing qubit lies in the depth ball.
    pub fn contained_in_ball(&self) -> bool {
        self.influence.len() == self.ball(&self.influence).len()
    }
}

fn grid_point(a: &Addr) -> Result<&GridPoint> {
    a.grid()
        .ok_or_else(|| Error::InvalidArgument(format!("light cones need grid addresses, got {a}")))
}

/// Sweep the physical expansion of `circuit` backwards from its last step.
/// An operation is active when it touches `target` or shares a qubit with an
/// active operation in a later step.
pub fn influence_set(circuit: &AdaptiveCircuit, target: &GridPoint) -> Result<LightconeCertificate> {
    if circuit.model.is_adaptive() {
        return Err(Error::InvalidArgument(
            "light cones are defined for non-adaptive circuits".into(),
        ));
    }
    let physical = expand_to_physical(circuit);
    let mut live: BTreeSet<GridPoint> = BTreeSet::from([target.clone()]);
    let mut active_ops = BTreeSet::new();
    for (t, step) in physical.timesteps.iter().enumerate().rev() {
        let mut reached = Vec::new();
        for (i, op) in step.ops.iter().enumerate() {
            let points: Vec<&GridPoint> = op.qubits.iter().map(grid_point).collect::<Result<_>>()?;
            if points.iter().any(|p| live.contains(*p)) {
                active_ops.insert((t, i));
                reached.extend(points.into_iter().cloned());
            }
        }
        live.extend(reached);
    }
    let influence: BTreeSet<GridPoint> = if active_ops.is_empty() {
        BTreeSet::new()
    } else {
        live
    };
    let depth_bound = influence
        .iter()
        .map(|p| distance(p, target, Norm::L1))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    Ok(LightconeCertificate {
        target: target.clone(),
        influence,
        active_ops,
        depth: physical.timesteps.len(),
        depth_bound,
    })
}

/// Largest l1 distance from a control to the target.
pub fn depth_lower_bound(layout: &ControlLayout) -> Result<i64> {
    layout
        .controls
        .iter()
        .map(|c| distance(c, &layout.target, Norm::L1))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .ok_or_else(|| Error::InvalidArgument("layout has no controls".into()))
}

/// Members of `points` at l1 distance at least `FAR_FRACTION * |S|^(1/k)`
/// from `origin`, with `k` the dimension of `origin`.
pub fn far_subset(points: &BTreeSet<GridPoint>, origin: &GridPoint) -> BTreeSet<GridPoint> {
    if points.is_empty() {
        return BTreeSet::new();
    }
    let k = origin.dim().max(1) as f64;
    let threshold = FAR_FRACTION * (points.len() as f64).powf(1.0 / k);
    points
        .iter()
        .filter(|p| matches!(distance(p, origin, Norm::L1), Ok(d) if d as f64 >= threshold))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SensitivityProbe {
    pub probe: Addr,
    pub observed: Addr,
    pub perturbation: Mat2,
    /// Largest trace distance over the supplied inputs, in `[0, 1]`.
    pub measured_distance: f64,
}

impl SensitivityProbe {
    pub fn is_sensitive(&self, epsilon: f64) -> bool {
        self.measured_distance >= epsilon
    }
}

/// Compare the state of `observed` after `circuit` with and without
/// `perturbation` applied to `probe` first, maximized over `inputs`.
///
/// Inputs are density matrices over the circuit's qubits plus `probe` and
/// `observed`, in sorted address order.
pub fn sensitivity_check(
    circuit: &AdaptiveCircuit,
    probe: &Addr,
    observed: &Addr,
    perturbation: Mat2,
    inputs: &[DMatrix<Complex64>],
) -> Result<SensitivityProbe> {
    let map = QubitMap::for_circuit(circuit, [probe.clone(), observed.clone()]);
    let n = map.len();
    if n > MAX_SENSITIVITY_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let keep = [map.get(observed)?];
    let mut kick = AdaptiveCircuit::new(Model::Nantc, circuit.dim);
    kick.timesteps = vec![Timestep::physical(vec![BasicOp::single(
        Gate::U { matrix: perturbation },
        probe.clone(),
    )])];
    let mut measured: f64 = 0.0;
    for rho in inputs {
        let mut plain = DensityMatrix::from_matrix(map.clone(), rho)?;
        let mut kicked = plain.clone();
        kicked.evolve(&kick)?;
        kicked.evolve(circuit)?;
        plain.evolve(circuit)?;
        let a = partial_trace(&plain.to_matrix(), n, &keep);
        let b = partial_trace(&kicked.to_matrix(), n, &keep);
        measured = measured.max(trace_distance(&a, &b));
    }
    Ok(SensitivityProbe {
        probe: probe.clone(),
        observed: observed.clone(),
        perturbation,
        measured_distance: measured.clamp(0.0, 1.0),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub m: usize,
    pub n: usize,
    pub depth: usize,
    pub size: usize,
    pub width: usize,
    pub depth_bound: i64,
    pub fanout_depth: usize,
    pub fanout_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub dim: usize,
    pub rows: Vec<ScalingRow>,
    /// max/min of `depth / m` over the rows.
    pub depth_ratio: f64,
    /// max/min of `size / n` over the rows.
    pub size_ratio: f64,
}

impl ScalingReport {
    pub fn bounds_respected(&self) -> bool {
        self.rows.iter().all(|r| r.depth as i64 >= r.depth_bound)
    }
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo.is_finite() && lo > 0.0 {
        hi / lo
    } else {
        f64::NAN
    }
}

/// Metrics of the controlled-X and fan-out circuits for each side length.
pub fn scaling_report(m_values: &[usize], dim: usize) -> Result<ScalingReport> {
    let mut rows = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let layout = control_layout(m, dim)?;
        let control = control_circuit_kd(m, dim, Mat2::x())?;
        let fanout = fanout_circuit(m, dim)?;
        rows.push(ScalingRow {
            m,
            n: layout.n_controls(),
            depth: depth(&control),
            size: size(&control),
            width: width(&control),
            depth_bound: depth_lower_bound(&layout)?,
            fanout_depth: depth(&fanout),
            fanout_size: size(&fanout),
        });
    }
    let depth_ratio = spread(rows.iter().map(|r| r.depth as f64 / r.m as f64));
    let size_ratio = spread(rows.iter().map(|r| r.size as f64 / r.n as f64));
    Ok(ScalingReport {
        dim,
        rows,
        depth_ratio,
        size_ratio,
    })
}
