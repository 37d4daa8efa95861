use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{ProbabilityProfile, PureState};
use super::CMatrix;
use crate::error::{CoherenceError, Result};
use crate::tolerance::ToleranceConfig;

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, &ToleranceConfig::default())
    }

    /// Validates the matrix; invalid input is rejected, never repaired.
    pub fn with_tolerance(matrix: CMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows == 0 || rows != cols {
            return Err(CoherenceError::InvalidDensityMatrix(format!(
                "matrix must be square and nonempty, got {rows}x{cols}"
            )));
        }
        if matrix
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(CoherenceError::InvalidDensityMatrix(
                "non-finite entry".into(),
            ));
        }
        let herm = hermiticity_residual(&matrix);
        if herm > tol.herm_tol {
            return Err(CoherenceError::InvalidDensityMatrix(format!(
                "not Hermitian (residual {herm:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol.norm_tol || trace.im.abs() > tol.norm_tol {
            return Err(CoherenceError::InvalidDensityMatrix(format!(
                "trace is {trace}, expected 1"
            )));
        }
        let min_eig = hermitian_eigenvalues(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -tol.psd_tol {
            return Err(CoherenceError::InvalidDensityMatrix(format!(
                "not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// `|s><s|`.
    pub fn from_pure(s: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        Self {
            matrix: &v * v.adjoint(),
        }
    }

    /// `diag(p)`.
    pub fn diagonal(p: &ProbabilityProfile) -> Self {
        let d = p.len();
        let mut matrix = DMatrix::zeros(d, d);
        for (k, &x) in p.entries().iter().enumerate() {
            matrix[(k, k)] = Complex64::new(x, 0.0);
        }
        Self { matrix }
    }

    /// `I / d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(CoherenceError::InvalidDensityMatrix(
                "dim must be at least 1".into(),
            ));
        }
        Ok(Self {
            matrix: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Real parts of the diagonal.
    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.matrix[(k, k)].re).collect()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // Tr(rho rho) = sum |rho_ij|^2 for Hermitian rho
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest off-diagonal modulus.
    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                if r != c {
                    m = m.max(self.matrix[(r, c)].norm());
                }
            }
        }
        m
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// Removes every off-diagonal entry; the diagonal is copied bit for bit.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let mut matrix = DMatrix::zeros(d, d);
    for k in 0..d {
        matrix[(k, k)] = rho.matrix[(k, k)];
    }
    DensityMatrix { matrix }
}

/// `<s|rho|s>`.
pub fn fidelity_to_pure(rho: &DensityMatrix, s: &PureState) -> Result<f64> {
    if rho.dim() != s.dim() {
        return Err(CoherenceError::DimensionMismatch {
            expected: rho.dim(),
            found: s.dim(),
        });
    }
    let v = nalgebra::DVector::from_column_slice(s.amplitudes());
    let value = (v.adjoint() * &rho.matrix * &v)[(0, 0)];
    Ok(value.re)
}

/// Max-entry distance between two equally sized matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}
