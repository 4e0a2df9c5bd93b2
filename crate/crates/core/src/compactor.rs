//! Ring compaction: computing the AND of many controls into a few qubits
//! next to the target, in depth linear in the grid side.
//!
//! Controls sit on the odd cells of the grid. Ring 0 needs no work. On each
//! inner ring, every even cell absorbs the AND of the odd cells facing it on
//! the ring outside together with odd cells of its own ring: a corner takes
//! its two outside neighbors only, the even cell before a corner also takes
//! the corner's predecessor, and every other even cell takes its
//! predecessor. A rotation then moves the results back onto odd cells. On the
//! 3x3 ring every even cell is a corner and takes its predecessor as well,
//! so after its rotation the four neighbors of the center hold everything
//! and drive the controlled gate. Uncomputing is the same sequence in
//! reverse.
//!
//! In three dimensions the layers above and below the central plane are
//! first folded onto it, after which the planar procedure runs.

use serde::Serialize;

use crate::circuit::{AdaptiveCircuit, Addr, BasicOp, CircuitBuilder, Mat2, Model};
use crate::error::{Error, Result};
use crate::geom::{control_layout, ring_points, ControlLayout, GridPoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CompactOp {
    /// `target ^= AND(sources)`.
    And {
        target: GridPoint,
        sources: Vec<GridPoint>,
    },
    Swap(GridPoint, GridPoint),
}

impl CompactOp {
    fn to_gate(&self) -> BasicOp {
        match self {
            CompactOp::And { target, sources } => {
                BasicOp::mcx(sources.iter().map(Addr::from).collect(), target)
            }
            CompactOp::Swap(a, b) => BasicOp::swap(a, b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub label: String,
    pub steps: Vec<Vec<CompactOp>>,
}

/// The compute half of a compaction plus the qubits that finally hold the
/// combined controls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactionPlan {
    pub layout: ControlLayout,
    pub stages: Vec<Stage>,
    pub center_sources: Vec<GridPoint>,
}

type Embed = dyn Fn(i64, i64) -> GridPoint;

fn ring(m: usize, k: usize, embed: &Embed) -> Result<Vec<GridPoint>> {
    Ok(ring_points(m, k)?
        .points
        .iter()
        .map(|p| embed(p.x(), p.y()))
        .collect())
}

fn planar(x: i64, y: i64) -> GridPoint {
    GridPoint::xy(x, y)
}

fn inner_ring(m: usize, k: usize) -> Result<()> {
    if k == 0 || 2 * k + 3 > m {
        return Err(Error::InvalidArgument(format!(
            "ring {k} has no inner compaction step for m = {m}"
        )));
    }
    Ok(())
}

fn clockwise_on(m: usize, k: usize, embed: &Embed) -> Result<Vec<CompactOp>> {
    let inner = ring(m, k, embed)?;
    let outer = ring(m, k - 1, embed)?;
    let corners = ring_points(m, k)?;
    let len = inner.len();
    let is_corner = |i: usize| corners.is_corner(i % len);
    let innermost = m - 2 * k == 3;
    Ok((0..len)
        .step_by(2)
        .map(|i| {
            let outward = outer.iter().filter(|o| o.is_adjacent(&inner[i])).cloned();
            let pred = inner[(i + len - 1) % len].clone();
            let sources: Vec<GridPoint> = if innermost {
                std::iter::once(pred).chain(outward).collect()
            } else if is_corner(i) {
                outward.collect()
            } else if is_corner(i + 2) {
                [pred, inner[i + 1].clone()].into_iter().chain(outward).collect()
            } else {
                std::iter::once(pred).chain(outward).collect()
            };
            CompactOp::And {
                target: inner[i].clone(),
                sources,
            }
        })
        .collect())
}

fn rotate_on(m: usize, k: usize, embed: &Embed) -> Result<Vec<CompactOp>> {
    let r = ring(m, k, embed)?;
    let len = r.len();
    Ok((0..len)
        .step_by(2)
        .map(|i| CompactOp::Swap(r[i].clone(), r[(i + len - 1) % len].clone()))
        .collect())
}

/// Absorb ring `k - 1` into the even cells of ring `k`.
pub fn control_clockwise(m: usize, k: usize) -> Result<Vec<CompactOp>> {
    inner_ring(m, k)?;
    clockwise_on(m, k, &planar)
}

/// Move the results on ring `k` from even to odd cells.
pub fn rotate(m: usize, k: usize) -> Result<Vec<CompactOp>> {
    inner_ring(m, k)?;
    rotate_on(m, k, &planar)
}

/// Stages for the planar procedure, with qubits placed by `embed`.
fn planar_stages(m: usize, embed: &Embed) -> Result<(Vec<Stage>, Vec<GridPoint>)> {
    let base = (m - 3) / 2;
    let mut stages = Vec::new();
    for k in 1..=base {
        stages.push(Stage {
            label: format!("ring {k}"),
            steps: vec![clockwise_on(m, k, embed)?, rotate_on(m, k, embed)?],
        });
    }
    let r = ring(m, base, embed)?;
    Ok((stages, vec![r[1].clone(), r[3].clone(), r[5].clone(), r[7].clone()]))
}

/// Stages folding the off-plane layers onto the central plane.
fn fold_stages(m: usize) -> Vec<Stage> {
    let c = ((m - 1) / 2) as i64;
    let side = m as i64;
    let pairs: Vec<((i64, i64), (i64, i64))> = (0..side - 1)
        .step_by(2)
        .flat_map(|x| (0..side).map(move |y| ((x, y), (x + 1, y))))
        .chain((0..side - 1).step_by(2).map(|y| ((side - 1, y), (side - 1, y + 1))))
        .collect();
    let mut stages = Vec::new();
    for s in 1..c {
        let mut ands = Vec::new();
        let mut swaps = Vec::new();
        for (layer, below) in [(s, s - 1), (side - 1 - s, side - s)] {
            for &(a, b) in &pairs {
                let is_control = |(x, y): (i64, i64)| (x + y + layer - c).rem_euclid(2) == 0;
                let (anc, ctl) = if is_control(a) { (b, a) } else { (a, b) };
                let anc_p = GridPoint::xyz(anc.0, anc.1, layer);
                let ctl_p = GridPoint::xyz(ctl.0, ctl.1, layer);
                ands.push(CompactOp::And {
                    target: anc_p.clone(),
                    sources: vec![ctl_p.clone(), GridPoint::xyz(anc.0, anc.1, below)],
                });
                swaps.push(CompactOp::Swap(anc_p, ctl_p));
            }
        }
        stages.push(Stage {
            label: format!("layer {s}"),
            steps: vec![ands, swaps],
        });
    }
    let plane = (0..side)
        .flat_map(|x| (0..side).map(move |y| (x, y)))
        .filter(|(x, y)| (x + y) % 2 == 1)
        .map(|(x, y)| CompactOp::And {
            target: GridPoint::xyz(x, y, c),
            sources: vec![GridPoint::xyz(x, y, c - 1), GridPoint::xyz(x, y, c + 1)],
        })
        .collect();
    stages.push(Stage {
        label: "plane".into(),
        steps: vec![plane],
    });
    stages
}

pub fn plan(m: usize, dim: usize) -> Result<CompactionPlan> {
    let layout = control_layout(m, dim)?;
    let (stages, center_sources) = match dim {
        2 => planar_stages(m, &planar)?,
        _ => {
            let c = ((m - 1) / 2) as i64;
            let mut stages = fold_stages(m);
            let (rest, sources) = planar_stages(m, &move |x, y| GridPoint::xyz(x, y, c))?;
            stages.extend(rest);
            (stages, sources)
        }
    };
    Ok(CompactionPlan {
        layout,
        stages,
        center_sources,
    })
}

impl CompactionPlan {
    pub fn m(&self) -> usize {
        self.layout.m
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    /// Non-empty compute steps in order.
    pub fn compute_steps(&self) -> impl DoubleEndedIterator<Item = &Vec<CompactOp>> {
        self.stages
            .iter()
            .flat_map(|s| s.steps.iter())
            .filter(|s| !s.is_empty())
    }

    fn builder(&self) -> CircuitBuilder {
        let mut b = CircuitBuilder::new(Model::Nantc, self.dim());
        b.set_grid_side(self.m()).set_inputs(self.layout.n_controls() + 1);
        b
    }

    /// `U` on the target controlled by every control qubit.
    pub fn controlled(&self, u: Mat2) -> AdaptiveCircuit {
        let mut b = self.builder();
        for step in self.compute_steps() {
            b.logical(step.iter().map(CompactOp::to_gate).collect());
        }
        let sources = self.center_sources.iter().map(Addr::from).collect();
        b.logical(vec![BasicOp::mcu(sources, &self.layout.target, u)]);
        for step in self.compute_steps().rev() {
            b.logical(step.iter().rev().map(CompactOp::to_gate).collect());
        }
        b.finish()
    }

    /// XOR of the target into every control.
    ///
    /// Each AND of the compute sequence is replaced by a relay: fan the
    /// result back out to its sources, then clear it with a CNOT from the
    /// first source. Run backwards, this spreads a bit on the final sources
    /// to every control and leaves ancillas clean; run forwards it undoes
    /// that. Conjugating a fan-out from the target by it gives the result.
    pub fn fanout(&self) -> AdaptiveCircuit {
        let mut b = self.builder();
        let relay = |step: &Vec<CompactOp>, fan_first: bool| -> Vec<Vec<BasicOp>> {
            let mut fan = Vec::new();
            let mut clear = Vec::new();
            let mut swaps = Vec::new();
            for op in step {
                match op {
                    CompactOp::And { target, sources } => {
                        fan.push(BasicOp::fanout(target, sources.iter().map(Addr::from).collect()));
                        clear.push(BasicOp::cnot(&sources[0], target));
                    }
                    CompactOp::Swap(a, c) => swaps.push(BasicOp::swap(a, c)),
                }
            }
            let mut out = if fan_first { vec![fan, clear] } else { vec![clear, fan] };
            out.push(swaps);
            out.retain(|s| !s.is_empty());
            out
        };
        for step in self.compute_steps() {
            for s in relay(step, false) {
                b.logical(s);
            }
        }
        let sources = self.center_sources.iter().map(Addr::from).collect();
        b.logical(vec![BasicOp::fanout(&self.layout.target, sources)]);
        for step in self.compute_steps().rev() {
            for s in relay(step, true) {
                b.logical(s);
            }
        }
        b.finish()
    }
}

/// Controlled-`U` on an `m x m` grid.
pub fn control_circuit(m: usize, u: Mat2) -> Result<AdaptiveCircuit> {
    control_circuit_kd(m, 2, u)
}

/// Controlled-`U` on a `dim`-dimensional grid of side `m` (`dim` is 2 or 3).
pub fn control_circuit_kd(m: usize, dim: usize, u: Mat2) -> Result<AdaptiveCircuit> {
    if !u.is_unitary() {
        return Err(Error::InvalidArgument("matrix is not unitary".into()));
    }
    Ok(plan(m, dim)?.controlled(u))
}

pub fn fanout_circuit(m: usize, dim: usize) -> Result<AdaptiveCircuit> {
    Ok(plan(m, dim)?.fanout())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::validate;

    #[test]
    fn clockwise_operation_counts() {
        let ops = control_clockwise(5, 1).unwrap();
        assert_eq!(ops.len(), 4);
        for op in &ops {
            let CompactOp::And { sources, .. } = op else { panic!() };
            assert_eq!(sources.len(), 3);
        }
        let ops = control_clockwise(7, 1).unwrap();
        assert_eq!(ops.len(), 8);
        let arities: Vec<usize> = ops
            .iter()
            .map(|op| match op {
                CompactOp::And { sources, .. } => sources.len(),
                CompactOp::Swap(..) => 0,
            })
            .collect();
        assert_eq!(arities, [2, 3, 2, 3, 2, 3, 2, 3]);
        let ring = ring_points(7, 1).unwrap();
        let CompactOp::And { sources, .. } = &ops[1] else { panic!() };
        assert_eq!(sources[..2], [ring.points[1].clone(), ring.points[3].clone()]);
        assert!(control_clockwise(5, 0).is_err());
        assert!(control_clockwise(5, 2).is_err());
    }

    #[test]
    fn rotate_pairs_even_with_predecessor() {
        let ops = rotate(5, 1).unwrap();
        assert_eq!(ops.len(), 4);
        assert_eq!(ops[0], CompactOp::Swap(GridPoint::xy(1, 1), GridPoint::xy(2, 1)));
    }

    #[test]
    fn circuits_are_valid_and_local() {
        for (m, dim) in [(3, 2), (5, 2), (7, 2), (3, 3), (5, 3)] {
            let c = control_circuit_kd(m, dim, Mat2::x()).unwrap();
            assert!(validate(&c).is_empty(), "m={m} dim={dim}: {:?}", validate(&c));
            let f = fanout_circuit(m, dim).unwrap();
            assert!(validate(&f).is_empty(), "fanout m={m} dim={dim}");
        }
    }

    #[test]
    fn logical_depth_is_linear() {
        for m in [3usize, 5, 7, 9] {
            let k = (m - 3) / 2;
            let c = control_circuit(m, Mat2::x()).unwrap();
            assert_eq!(c.timesteps.len(), 4 * k + 1);
        }
    }

    #[test]
    fn non_unitary_rejected() {
        assert!(control_circuit(5, Mat2::real(1.0, 1.0, 0.0, 1.0)).is_err());
    }
}
