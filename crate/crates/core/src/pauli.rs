//! Bell-basis measurement outcomes and the Pauli corrections they induce.
//!
//! Bell states are indexed `Phi_0 = (|00>+|11>)/sqrt2`, `Phi_1 = (|01>+|10>)/sqrt2`,
//! `Phi_2 = (|01>-|10>)/sqrt2`, `Phi_3 = (|00>-|11>)/sqrt2`, and outcome `k`
//! leaves the teleported state multiplied by `sigma_k` with `sigma_0 = I`,
//! `sigma_1 = X`, `sigma_2 = XZ`, `sigma_3 = Z`.

use std::collections::BTreeSet;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::circuit::{ClassicalCondition, MeasurementId};

/// `i^phase X^x Z^z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliOp {
    pub x: bool,
    pub z: bool,
    pub phase: u8,
}

impl PauliOp {
    pub const IDENTITY: PauliOp = PauliOp {
        x: false,
        z: false,
        phase: 0,
    };

    pub fn new(x: bool, z: bool) -> Self {
        Self { x, z, phase: 0 }
    }

    pub fn eq_up_to_phase(&self, other: &PauliOp) -> bool {
        self.x == other.x && self.z == other.z
    }
}

impl Mul for PauliOp {
    type Output = PauliOp;

    /// Product using `Z X = -X Z`.
    fn mul(self, rhs: PauliOp) -> PauliOp {
        let swap_sign = if self.z && rhs.x { 2 } else { 0 };
        PauliOp {
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
            phase: (self.phase + rhs.phase + swap_sign) % 4,
        }
    }
}

pub fn sigma_of(k: u8) -> PauliOp {
    match k & 3 {
        0 => PauliOp::new(false, false),
        1 => PauliOp::new(true, false),
        2 => PauliOp::new(true, true),
        _ => PauliOp::new(false, true),
    }
}

/// Bell index from the two measured bits: the bit read on the second qubit
/// (flip) and the bit read on the first qubit after the Hadamard (phase).
pub fn bell_index(flip: bool, phase: bool) -> u8 {
    match (flip, phase) {
        (false, false) => 0,
        (true, false) => 1,
        (true, true) => 2,
        (false, true) => 3,
    }
}

/// Product of the operators in order, evaluated as a balanced tree so the
/// combination depth is logarithmic in the list length.
pub fn compose(ops: &[PauliOp]) -> PauliOp {
    match ops {
        [] => PauliOp::IDENTITY,
        [p] => *p,
        _ => {
            let (l, r) = ops.split_at(ops.len() / 2);
            compose(l) * compose(r)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BellOutcome {
    pub phase_bit: MeasurementId,
    pub flip_bit: MeasurementId,
}

impl BellOutcome {
    pub fn index(&self, lookup: impl Fn(MeasurementId) -> bool) -> u8 {
        bell_index(lookup(self.flip_bit), lookup(self.phase_bit))
    }
}

/// Classical condition implementing the correction for a chain of Bell
/// measurements: X on the parity of all flip bits, Z on the parity of all
/// phase bits.
pub fn correction_condition(outcomes: &[BellOutcome]) -> ClassicalCondition {
    let mut x: BTreeSet<MeasurementId> = BTreeSet::new();
    let mut z: BTreeSet<MeasurementId> = BTreeSet::new();
    for o in outcomes {
        if !x.insert(o.flip_bit) {
            x.remove(&o.flip_bit);
        }
        if !z.insert(o.phase_bit) {
            z.remove(&o.phase_bit);
        }
    }
    ClassicalCondition {
        x_parity_of: x,
        z_parity_of: z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Mat2;
    use num_complex::Complex64;

    fn matrix(p: PauliOp) -> Mat2 {
        let mut m = Mat2::identity();
        if p.x {
            m = m.mul(&Mat2::x());
        }
        if p.z {
            m = m.mul(&Mat2::z());
        }
        m.scale(Complex64::i().powu(p.phase as u32))
    }

    #[test]
    fn multiplication_matches_matrices() {
        let all: Vec<PauliOp> = (0..16)
            .map(|i| PauliOp {
                x: i & 1 == 1,
                z: i & 2 == 2,
                phase: (i >> 2) as u8,
            })
            .collect();
        for a in &all {
            for b in &all {
                let lhs = matrix(*a * *b);
                let rhs = matrix(*a).mul(&matrix(*b));
                assert!(lhs.approx_eq(&rhs, 1e-12));
            }
        }
    }

    #[test]
    fn bell_index_round_trip() {
        assert_eq!(bell_index(false, false), 0);
        assert_eq!(bell_index(true, false), 1);
        assert_eq!(bell_index(true, true), 2);
        assert_eq!(bell_index(false, true), 3);
        for k in 0..4u8 {
            let s = sigma_of(k);
            assert_eq!(bell_index(s.x, s.z), k);
        }
    }

    #[test]
    fn sigma_two_is_xz() {
        let xz = Mat2::x().mul(&Mat2::z());
        assert!(matrix(sigma_of(2)).approx_eq(&xz, 1e-12));
    }

    #[test]
    fn condition_cancels_repeats() {
        let o = BellOutcome {
            phase_bit: MeasurementId(0),
            flip_bit: MeasurementId(1),
        };
        let c = correction_condition(&[o, o]);
        assert!(c.x_parity_of.is_empty() && c.z_parity_of.is_empty());
    }
}
