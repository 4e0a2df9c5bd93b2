//! SVG diagrams of planar circuits: one panel per block of timesteps, with
//! qubits shaded by role, teleportation chains as dashed arrows and SWAPs
//! as double-headed arrows.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::ops::Range;

use crate::circuit::{AdaptiveCircuit, Gate};
use crate::error::{Error, Result};
use crate::geom::GridPoint;
use crate::teleport::Chain;

const CELL: i64 = 40;
const MARGIN: i64 = 30;
const GAP: i64 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Data,
    Ancilla,
    Unused,
}

impl Role {
    fn class(self) -> &'static str {
        match self {
            Role::Data => "data",
            Role::Ancilla => "ancilla",
            Role::Unused => "unused",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Panel {
    pub steps: Range<usize>,
    pub chains: Vec<Chain>,
}

#[derive(Clone, Debug, Default)]
pub struct RenderSpec {
    /// Empty means a single panel over every timestep.
    pub panels: Vec<Panel>,
    pub data: BTreeSet<GridPoint>,
    /// Overrides the circuit's grid side.
    pub grid_side: Option<usize>,
}

impl RenderSpec {
    /// Qubits in `data` are data, qubits touched in `steps` are working
    /// ancillas, everything else is unused.
    pub fn role(&self, circuit: &AdaptiveCircuit, steps: &Range<usize>, p: &GridPoint) -> Role {
        if self.data.contains(p) {
            return Role::Data;
        }
        let touched = circuit.timesteps[steps.clone()]
            .iter()
            .flat_map(|s| s.ops.iter())
            .any(|op| op.qubits.iter().any(|q| q.grid() == Some(p)));
        if touched {
            Role::Ancilla
        } else {
            Role::Unused
        }
    }
}

fn center(p: &GridPoint, origin_x: i64) -> (i64, i64) {
    (origin_x + MARGIN + p.x() * CELL, MARGIN + p.y() * CELL)
}

fn line(out: &mut String, class: &str, a: (i64, i64), b: (i64, i64), markers: &str) {
    let _ = writeln!(
        out,
        r#"    <line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"{markers}/>"#,
        a.0, a.1, b.0, b.1
    );
}

pub fn render(circuit: &AdaptiveCircuit, spec: &RenderSpec) -> Result<String> {
    if circuit.dim != 2 {
        return Err(Error::InvalidArgument(format!(
            "only planar circuits can be drawn, got dim {}",
            circuit.dim
        )));
    }
    let side = spec
        .grid_side
        .or(circuit.grid_side)
        .ok_or_else(|| Error::InvalidArgument("circuit has no grid side".into()))? as i64;
    let panels = if spec.panels.is_empty() {
        vec![Panel {
            steps: 0..circuit.timesteps.len(),
            chains: Vec::new(),
        }]
    } else {
        spec.panels.clone()
    };
    if let Some(p) = panels.iter().find(|p| p.steps.end > circuit.timesteps.len() || p.steps.start > p.steps.end) {
        return Err(Error::InvalidArgument(format!(
            "step range {:?} outside the circuit's {} steps",
            p.steps,
            circuit.timesteps.len()
        )));
    }
    let panel_w = 2 * MARGIN + (side - 1) * CELL;
    let width = panels.len() as i64 * panel_w + (panels.len() as i64 - 1).max(0) * GAP;
    let height = 2 * MARGIN + (side - 1) * CELL + 20;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    out.push_str(concat!(
        "  <defs>\n",
        "    <marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\">\n",
        "      <path d=\"M0,0 L10,5 L0,10 z\"/>\n",
        "    </marker>\n",
        "  </defs>\n",
        "  <style>\n",
        "    .data { fill: #3a9d5d; }\n",
        "    .ancilla { fill: #4a78c2; }\n",
        "    .unused { fill: #ffffff; stroke: #888888; }\n",
        "    .chain { stroke: #c0392b; stroke-width: 2; stroke-dasharray: 5,4; }\n",
        "    .swap { stroke: #333333; stroke-width: 2; }\n",
        "    .gate { stroke: #999999; stroke-width: 1; }\n",
        "    text { font: 12px sans-serif; }\n",
        "  </style>\n",
    ));
    for (i, panel) in panels.iter().enumerate() {
        let ox = i as i64 * (panel_w + GAP);
        let _ = writeln!(out, r#"  <g class="panel" data-steps="{}-{}">"#, panel.steps.start, panel.steps.end);
        for step in &circuit.timesteps[panel.steps.clone()] {
            for op in &step.ops {
                let pts: Vec<&GridPoint> = op.qubits.iter().filter_map(|q| q.grid()).collect();
                match (&op.gate, pts.as_slice()) {
                    (Gate::Swap, [a, b]) => line(
                        &mut out,
                        "swap",
                        center(a, ox),
                        center(b, ox),
                        r#" marker-start="url(#head)" marker-end="url(#head)""#,
                    ),
                    (_, [hub, rest @ ..]) if !rest.is_empty() => {
                        for leaf in rest {
                            line(&mut out, "gate", center(hub, ox), center(leaf, ox), "");
                        }
                    }
                    _ => {}
                }
            }
        }
        for chain in &panel.chains {
            line(&mut out, "chain", center(&chain.from, ox), center(&chain.to, ox), r#" marker-end="url(#head)""#);
        }
        for x in 0..side {
            for y in 0..side {
                let p = GridPoint::xy(x, y);
                let (cx, cy) = center(&p, ox);
                let role = spec.role(circuit, &panel.steps, &p);
                let _ = writeln!(
                    out,
                    r#"    <circle class="{}" cx="{cx}" cy="{cy}" r="6"/>"#,
                    role.class()
                );
            }
        }
        let _ = writeln!(
            out,
            r#"    <text x="{}" y="{}">steps {}..{}</text>"#,
            ox + MARGIN,
            height - 8,
            panel.steps.start,
            panel.steps.end
        );
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
