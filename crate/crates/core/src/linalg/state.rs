use num_complex::Complex64;

use super::eig::{eig_hermitian, eigvals_hermitian};
use super::matrix::{vec_norm, ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Default structural tolerance for density operators.
pub const DENSITY_TOL: f64 = 1e-10;
/// Unit-norm tolerance for pure states.
pub const NORM_TOL: f64 = 1e-12;

/// Normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let norm = vec_norm(&amplitudes);
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Normalises an arbitrary nonzero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    /// Computational basis vector |i⟩.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index out of range");
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[i] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            matrix: self.projector(),
        }
    }
}

/// A validated quantum state: Hermitian, unit trace and positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates with the default tolerance.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        validate_density(matrix, DENSITY_TOL)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// ϱₐ ⊗ ϱ_b, which is a state whenever both factors are.
    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            matrix: super::bipartite::kron(&self.matrix, &other.matrix),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvals_hermitian(&self.matrix).expect("density operators are Hermitian")
    }

    /// tr ρ² computed directly from the entries.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Wraps a matrix already known to satisfy the invariants.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }
}

/// Checks hermiticity, trace and positivity in that order.
///
/// Each failure carries the magnitude of the violation.
pub fn validate_density(matrix: ComplexMatrix, tol: f64) -> Result<DensityOperator> {
    matrix.require_square()?;
    let deviation = matrix.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = matrix.trace().re;
    if (trace - 1.0).abs() > tol {
        return Err(Error::TraceNotUnit { trace });
    }
    let min = eig_hermitian(&matrix)?.min();
    if min < -tol {
        return Err(Error::NegativeEigenvalue { value: min });
    }
    Ok(DensityOperator { matrix })
}

/// ½‖a − b‖₁ for Hermitian `a`, `b`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", a.rows(), a.cols()),
            found: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    let diff = a - b;
    Ok(0.5 * eigvals_hermitian(&diff)?.iter().map(|x| x.abs()).sum::<f64>())
}
