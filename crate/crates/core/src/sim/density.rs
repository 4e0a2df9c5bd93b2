//! Density-matrix evolution for unitary circuits, and distances between
//! mixed states.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dense::apply_unitary_op;
use super::QubitMap;
use crate::circuit::{AdaptiveCircuit, Gate};
use crate::error::{Error, Result};

pub const MAX_DENSITY_QUBITS: usize = 11;

/// `rho` stored as a vector over `2n` bits: row index in the low `n` bits,
/// column index in the high `n` bits. Unitary evolution then acts as `U` on
/// the low half and `conj(U)` on the high half.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    map: QubitMap,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(map: QubitMap, rho: &DMatrix<Complex64>) -> Result<Self> {
        let n = map.len();
        if n > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let dim = 1usize << n;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be {dim}x{dim} for {n} qubits"
            )));
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[r | (c << n)] = rho[(r, c)];
            }
        }
        Ok(Self { map, entries })
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let n = self.map.len();
        let dim = 1usize << n;
        DMatrix::from_fn(dim, dim, |r, c| self.entries[r | (c << n)])
    }

    pub fn map(&self) -> &QubitMap {
        &self.map
    }

    /// Apply every operation of a measurement-free circuit.
    pub fn evolve(&mut self, circuit: &AdaptiveCircuit) -> Result<()> {
        let n = self.map.len();
        for op in circuit.ops() {
            if matches!(op.gate, Gate::Measure | Gate::PauliCorrection) {
                return Err(Error::UnsupportedGate(op.gate.name().into()));
            }
            let rows: Vec<usize> = op.qubits.iter().map(|q| self.map.get(q)).collect::<Result<_>>()?;
            let cols: Vec<usize> = rows.iter().map(|r| r + n).collect();
            apply_unitary_op(&mut self.entries, op, &rows, |m| m)?;
            apply_unitary_op(&mut self.entries, op, &cols, |m| {
                crate::circuit::Mat2(m.0.map(|z| z.conj()))
            })?;
        }
        Ok(())
    }
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let diff = a - b;
    let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>() / 2.0
}

/// Trace out every qubit not in `keep`; index bit `i` of the result is
/// qubit `keep[i]` of the input.
pub fn partial_trace(rho: &DMatrix<Complex64>, n: usize, keep: &[usize]) -> DMatrix<Complex64> {
    let dim = 1usize << keep.len();
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let embed = |local: usize, rest: usize| {
        let mut i = 0usize;
        for (b, &q) in keep.iter().enumerate() {
            i |= ((local >> b) & 1) << q;
        }
        for (b, &q) in traced.iter().enumerate() {
            i |= ((rest >> b) & 1) << q;
        }
        i
    };
    DMatrix::from_fn(dim, dim, |r, c| {
        (0..1usize << traced.len())
            .map(|k| rho[(embed(r, k), embed(c, k))])
            .sum()
    })
}

/// `|psi><psi|` for a normalized vector.
pub fn pure(psi: &[Complex64]) -> DMatrix<Complex64> {
    let v = nalgebra::DVector::from_column_slice(psi);
    &v * v.adjoint()
}
