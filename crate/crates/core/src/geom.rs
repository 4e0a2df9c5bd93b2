//! Integer lattice geometry: points, norms, concentric square rings and
//! the control layouts used by the compactor.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the integer lattice `Z^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridPoint(Vec<i64>);

impl GridPoint {
    pub fn new(coords: Vec<i64>) -> Self {
        Self(coords)
    }

    /// Planar point with `x` the column and `y` the row.
    pub fn xy(x: i64, y: i64) -> Self {
        Self(vec![x, y])
    }

    pub fn xyz(x: i64, y: i64, z: i64) -> Self {
        Self(vec![x, y, z])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn x(&self) -> i64 {
        self.0[0]
    }

    pub fn y(&self) -> i64 {
        self.0[1]
    }

    pub fn offset(&self, delta: &[i64]) -> Self {
        Self(self.0.iter().zip(delta).map(|(a, d)| a + d).collect())
    }

    /// True when the two points differ by one unit along exactly one axis.
    pub fn is_adjacent(&self, other: &Self) -> bool {
        matches!(distance(self, other, Norm::L1), Ok(1))
    }

    /// Sum of coordinates modulo two.
    pub fn parity(&self) -> u8 {
        (self.0.iter().sum::<i64>().rem_euclid(2)) as u8
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    Linf,
}

pub fn distance(a: &GridPoint, b: &GridPoint, norm: Norm) -> Result<i64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let diffs = a.0.iter().zip(&b.0).map(|(p, q)| (p - q).abs());
    Ok(match norm {
        Norm::L1 => diffs.sum(),
        Norm::Linf => diffs.max().unwrap_or(0),
    })
}

/// One concentric square ring of an `m x m` grid, listed clockwise from its
/// bottom-left corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingDescriptor {
    pub m: usize,
    pub ring_index: usize,
    pub points: Vec<GridPoint>,
    pub corners: [GridPoint; 4],
    pub directions: [[i64; 2]; 4],
    pub last_index: usize,
}

impl RingDescriptor {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Position `i` taken cyclically.
    pub fn at(&self, i: isize) -> &GridPoint {
        let len = self.points.len() as isize;
        &self.points[i.rem_euclid(len) as usize]
    }

    pub fn is_corner(&self, i: usize) -> bool {
        self.corners.contains(&self.points[i])
    }
}

fn check_side(m: usize) -> Result<()> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "grid side must be odd and at least 3, got {m}"
        )));
    }
    Ok(())
}

pub fn ring_points(m: usize, ring_index: usize) -> Result<RingDescriptor> {
    check_side(m)?;
    let center = (m - 1) / 2;
    if ring_index > center {
        return Err(Error::InvalidArgument(format!(
            "ring index {ring_index} out of range for m = {m}"
        )));
    }
    let directions = [[0, 1], [1, 0], [0, -1], [-1, 0]];
    let k = ring_index as i64;
    let far = m as i64 - k - 1;
    let corners = [
        GridPoint::xy(k, k),
        GridPoint::xy(k, far),
        GridPoint::xy(far, far),
        GridPoint::xy(far, k),
    ];
    if ring_index == center {
        return Ok(RingDescriptor {
            m,
            ring_index,
            points: vec![corners[0].clone()],
            corners,
            directions,
            last_index: 0,
        });
    }
    let side = far - k;
    let mut points = Vec::with_capacity(4 * side as usize);
    let mut p = corners[0].clone();
    for dir in &directions {
        for _ in 0..side {
            points.push(p.clone());
            p = p.offset(dir);
        }
    }
    let last_index = points.len() - 1;
    Ok(RingDescriptor {
        m,
        ring_index,
        points,
        corners,
        directions,
        last_index,
    })
}

/// Placement of controls, ancillas and the target inside a hypercube of
/// side `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlLayout {
    pub m: usize,
    pub dim: usize,
    pub controls: BTreeSet<GridPoint>,
    pub ancillas: BTreeSet<GridPoint>,
    pub target: GridPoint,
}

impl ControlLayout {
    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn all_qubits(&self) -> BTreeSet<GridPoint> {
        let mut all = self.controls.clone();
        all.extend(self.ancillas.iter().cloned());
        all.insert(self.target.clone());
        all
    }
}

/// Layout for `dim` 2 or 3.
///
/// In the plane, controls sit on the odd checkerboard color and the target at
/// the center. In three dimensions every layer off the central plane holds a
/// checkerboard of controls (color chosen so the center has the ancilla
/// color), except the column above the `(m-1, m-1)` corner, which stays
/// empty; the central plane holds only ancillas and the target.
pub fn control_layout(m: usize, dim: usize) -> Result<ControlLayout> {
    check_side(m)?;
    let c = ((m - 1) / 2) as i64;
    let side = m as i64;
    let mut controls = BTreeSet::new();
    let mut ancillas = BTreeSet::new();
    let target;
    match dim {
        2 => {
            target = GridPoint::xy(c, c);
            for x in 0..side {
                for y in 0..side {
                    let p = GridPoint::xy(x, y);
                    if p == target {
                        continue;
                    }
                    if p.parity() == 1 {
                        controls.insert(p);
                    } else {
                        ancillas.insert(p);
                    }
                }
            }
        }
        3 => {
            target = GridPoint::xyz(c, c, c);
            for x in 0..side {
                for y in 0..side {
                    for z in 0..side {
                        let p = GridPoint::xyz(x, y, z);
                        if p == target {
                            continue;
                        }
                        let in_plane = z == c;
                        let unused_column = x == side - 1 && y == side - 1;
                        if !in_plane && unused_column {
                            continue;
                        }
                        if !in_plane && (x + y + z - c).rem_euclid(2) == 0 {
                            controls.insert(p);
                        } else {
                            ancillas.insert(p);
                        }
                    }
                }
            }
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "control layouts exist for dim 2 and 3, got {dim}"
            )))
        }
    }
    Ok(ControlLayout {
        m,
        dim,
        controls,
        ancillas,
        target,
    })
}
