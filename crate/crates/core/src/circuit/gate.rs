use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const EPS: f64 = 1e-9;

/// A 2x2 complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [Complex64; 4]);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self([a, b, c, d])
    }

    pub fn real(a: f64, b: f64, cc: f64, d: f64) -> Self {
        Self([c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0)])
    }

    pub fn identity() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn x() -> Self {
        Self::real(0.0, 1.0, 1.0, 0.0)
    }

    pub fn y() -> Self {
        Self([c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn z() -> Self {
        Self::real(1.0, 0.0, 0.0, -1.0)
    }

    pub fn h() -> Self {
        Self::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2)
    }

    pub fn s() -> Self {
        Self([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
    }

    pub fn sdg() -> Self {
        Self::s().dagger()
    }

    /// Rotation `exp(-i theta/2 n.sigma)` about the axis `(nx, ny, nz)`.
    pub fn rotation(theta: f64, axis: [f64; 3]) -> Self {
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        let [nx, ny, nz] = axis.map(|a| a / norm);
        let (sn, cs) = (theta / 2.0).sin_cos();
        Self([
            c(cs, -sn * nz),
            c(-sn * ny, -sn * nx),
            c(sn * ny, -sn * nx),
            c(cs, sn * nz),
        ])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a, b, cc, d] = self.0;
        let [e, f, g, h] = o.0;
        Self([a * e + b * g, a * f + b * h, cc * e + d * g, cc * f + d * h])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.map(|v| v * s))
    }

    pub fn dagger(&self) -> Self {
        let [a, b, cc, d] = self.0;
        Self([a.conj(), cc.conj(), b.conj(), d.conj()])
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn is_unitary(&self) -> bool {
        self.mul(&self.dagger()).approx_eq(&Self::identity(), 1e-8)
    }

    /// A principal `r`-th root: `root^r == self`.
    pub fn root(&self, r: u32) -> Self {
        if r == 1 {
            return *self;
        }
        let [a, b, cc, d] = self.0;
        let tr = a + d;
        let det = a * d - b * cc;
        let disc = (tr * tr - 4.0 * det).sqrt();
        let l1 = (tr + disc) / 2.0;
        let l2 = (tr - disc) / 2.0;
        let p = |z: Complex64| z.powf(1.0 / r as f64);
        if (l1 - l2).norm() < EPS {
            return Self::identity().scale(p(l1));
        }
        let minus = |m: &Self, l: Complex64| Self([m.0[0] - l, m.0[1], m.0[2], m.0[3] - l]);
        let p1 = minus(self, l2).scale(1.0 / (l1 - l2));
        let p2 = minus(self, l1).scale(1.0 / (l2 - l1));
        let (r1, r2) = (p(l1), p(l2));
        Self([
            p1.0[0] * r1 + p2.0[0] * r2,
            p1.0[1] * r1 + p2.0[1] * r2,
            p1.0[2] * r1 + p2.0[2] * r2,
            p1.0[3] * r1 + p2.0[3] * r2,
        ])
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::identity(), |acc, _| acc.mul(self))
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.0.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: [[f64; 2]; 4] = Deserialize::deserialize(d)?;
        Ok(Self(pairs.map(|[re, im]| c(re, im))))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate")]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    #[serde(rename = "SDG")]
    Sdg,
    U {
        matrix: Mat2,
    },
    #[serde(rename = "CNOT")]
    Cnot,
    #[serde(rename = "SWAP")]
    Swap,
    /// Controls first, target last.
    #[serde(rename = "MCX")]
    Mcx {
        controls: usize,
    },
    #[serde(rename = "MCU")]
    Mcu {
        controls: usize,
        u: Mat2,
    },
    /// Source first, then the targets.
    #[serde(rename = "FANOUT")]
    Fanout {
        targets: usize,
    },
    #[serde(rename = "MEASURE")]
    Measure,
    #[serde(rename = "PAULI_CORRECTION")]
    PauliCorrection,
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot | Gate::Swap => 2,
            Gate::Mcx { controls } | Gate::Mcu { controls, .. } => controls + 1,
            Gate::Fanout { targets } => targets + 1,
            _ => 1,
        }
    }

    /// Matrix of a single-qubit unitary gate.
    pub fn matrix(&self) -> Option<Mat2> {
        Some(match self {
            Gate::H => Mat2::h(),
            Gate::X => Mat2::x(),
            Gate::Y => Mat2::y(),
            Gate::Z => Mat2::z(),
            Gate::S => Mat2::s(),
            Gate::Sdg => Mat2::sdg(),
            Gate::U { matrix } => *matrix,
            _ => return None,
        })
    }

    /// Self-inverse gates whose repetition on the same qubits cancels.
    pub fn is_involution(&self) -> bool {
        matches!(
            self,
            Gate::H | Gate::X | Gate::Y | Gate::Z | Gate::Cnot | Gate::Swap | Gate::Mcx { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::S => "S",
            Gate::Sdg => "SDG",
            Gate::U { .. } => "U",
            Gate::Cnot => "CNOT",
            Gate::Swap => "SWAP",
            Gate::Mcx { .. } => "MCX",
            Gate::Mcu { .. } => "MCU",
            Gate::Fanout { .. } => "FANOUT",
            Gate::Measure => "MEASURE",
            Gate::PauliCorrection => "PAULI_CORRECTION",
        }
    }

    /// Parse a named single-qubit gate (`H`, `X`, `Y`, `Z`, `S`, `SDG`).
    pub fn named_unitary(name: &str) -> Option<Mat2> {
        Some(match name.to_ascii_uppercase().as_str() {
            "H" => Mat2::h(),
            "X" => Mat2::x(),
            "Y" => Mat2::y(),
            "Z" => Mat2::z(),
            "S" => Mat2::s(),
            "SDG" => Mat2::sdg(),
            "I" => Mat2::identity(),
            _ => return None,
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_multiply_back() {
        let mats = [
            Mat2::x(),
            Mat2::h(),
            Mat2::z(),
            Mat2::y(),
            Mat2::identity(),
            Mat2::rotation(1.234, [0.3, -0.5, 0.8]),
        ];
        for m in mats {
            for r in [1u32, 2, 4, 8] {
                let root = m.root(r);
                assert!(root.pow(r).approx_eq(&m, 1e-10), "{m:?} r={r}");
                assert!(root.is_unitary());
            }
        }
    }

    #[test]
    fn basic_matrices_are_unitary() {
        for m in [Mat2::h(), Mat2::s(), Mat2::sdg(), Mat2::y()] {
            assert!(m.is_unitary());
        }
        assert!(!Mat2::real(1.0, 1.0, 0.0, 1.0).is_unitary());
        assert!(Mat2::s().mul(&Mat2::s()).approx_eq(&Mat2::z(), 1e-12));
    }

    #[test]
    fn gate_serde_shape() {
        let json = serde_json::to_string(&Gate::Mcx { controls: 2 }).unwrap();
        assert_eq!(json, r#"{"gate":"MCX","controls":2}"#);
        let back: Gate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Gate::Mcx { controls: 2 });
    }
}
