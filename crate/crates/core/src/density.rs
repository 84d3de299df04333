//! Two-party density operators over the pseudo-spin basis.
//!
//! Basis order is `(|-k>, |k>) ⊗ (|-k>, |k>)` with Diana (the party holding
//! the `H` photon) as the first factor and Charlie as the second.

use nalgebra::{Matrix2, Matrix3, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const EIGENVALUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator4 {
    entries: Matrix4<Complex64>,
}

impl DensityOperator4 {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: Matrix4<Complex64>) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let asym = (entries - entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {asym:e})")));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace} != 1")));
        }
        let rho = Self { entries };
        let min = rho.min_eigenvalue();
        if min < -EIGENVALUE_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    /// Projector onto a normalized pure state.
    pub fn pure(psi: &[Complex64; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|r, c| psi[r] * psi[c].conj()))
    }

    pub fn maximally_mixed() -> Self {
        Self { entries: Matrix4::identity() * Complex64::new(0.25, 0.0) }
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (self.entries * self.entries).trace().re
    }

    /// `Tr(rho O)` for a Hermitian two-party observable.
    pub fn expectation(&self, observable: &Matrix4<Complex64>) -> f64 {
        (self.entries * observable).trace().re
    }

    /// Multiplies the coherence between basis states `i` and `j` (and its
    /// conjugate) by `factor`. Positivity is kept for `factor` in `[0, 1]`.
    pub fn with_coherence_scaled(&self, i: usize, j: usize, factor: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&factor) {
            return Err(Error::InvalidParameter(format!("coherence factor {factor} not in [0, 1]")));
        }
        let mut entries = self.entries;
        entries[(i, j)] *= factor;
        entries[(j, i)] *= factor;
        Ok(Self { entries })
    }

    /// Correlation matrix `T[m][n] = Tr(rho sigma_m ⊗ sigma_n)`, with the
    /// first party indexing rows.
    pub fn correlation_tensor(&self) -> Matrix3<f64> {
        let paulis = pauli_matrices();
        Matrix3::from_fn(|m, n| self.expectation(&kron(&paulis[m], &paulis[n])))
    }
}

/// `[sigma_x, sigma_y, sigma_z]`.
pub fn pauli_matrices() -> [Matrix2<Complex64>; 3] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(one, o, o, -one),
    ]
}

/// Kronecker product of two single-party operators.
pub fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}
