//! Expectation values of Hermitian observables.
//!
//! The observable is shifted to `A′ = γI + A ≥ 0`, normalised into the state
//! `ϱ_{A′} = A′ / tr A′` and overlapped with the unknown state. The SWAP
//! visibility `v = tr(ϱ_{A′} ϱ)` then gives `⟨A⟩ = v·tr A + γ(v·d − 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::overlap_labeled;
use crate::linalg::{eig_hermitian, ComplexMatrix, DensityOperator, DENSITY_TOL};
use crate::rng::labels;

/// Relative pad added to `γ` whenever `A` has no strictly positive minimum eigenvalue.
pub const GAMMA_PAD: f64 = 1e-6;

/// A Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.require_square()?;
        let deviation = matrix.hermiticity_deviation();
        if deviation > DENSITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `αA + βB`.
    pub fn combine(&self, alpha: f64, other: &Observable, beta: f64) -> Result<Observable> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("dimension {}", self.dim()),
                found: format!("dimension {}", other.dim()),
            });
        }
        Observable::new(&self.matrix.scale_real(alpha) + &other.matrix.scale_real(beta))
    }
}

/// The state encoding an observable.
#[derive(Debug, Clone, Serialize)]
pub struct Embedding {
    pub gamma: f64,
    /// `tr A + γ·d`.
    pub trace_a_prime: f64,
    pub trace_a: f64,
    pub rho_a_prime: DensityOperator,
}

/// Builds `ϱ_{A′}`.
///
/// `γ = max(0, −λ_min)` plus a pad of `1e-6·max|A_ij|` unless `λ_min > 0`.
/// The inversion formula is exact for any `γ`, so the pad does not bias the
/// exact-mode expectation.
pub fn embed_observable(a: &Observable) -> Result<Embedding> {
    let scale = a.matrix.max_abs();
    if scale == 0.0 {
        return Err(Error::ZeroObservable);
    }
    let d = a.dim();
    let lambda_min = eig_hermitian(&a.matrix)?.min();
    let pad = if lambda_min > 0.0 { 0.0 } else { GAMMA_PAD * scale };
    let gamma = (-lambda_min).max(0.0) + pad;
    let trace_a = a.matrix.trace().re;
    let trace_a_prime = trace_a + gamma * d as f64;
    assert!(trace_a_prime > 0.0, "shifted observable must have positive trace");

    let mut shifted = a.matrix.clone();
    for i in 0..d {
        shifted[(i, i)] += gamma;
    }
    let rho_a_prime = DensityOperator::new(shifted.scale_real(1.0 / trace_a_prime))?;
    Ok(Embedding {
        gamma,
        trace_a_prime,
        trace_a,
        rho_a_prime,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpectationEstimate {
    pub value: f64,
    /// `(tr A + γd)·stderr(v)`; zero in exact mode.
    pub stderr: f64,
    pub visibility: f64,
    pub gamma: f64,
    pub shots_used: u64,
}

/// `⟨A⟩ = v·tr A + γ(v·d − 1)` with `v` from the SWAP overlap.
pub fn expectation_estimate(a: &Observable, rho_b: &DensityOperator, shots: u64, seed: u64) -> Result<ExpectationEstimate> {
    if a.dim() != rho_b.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("dimension {}", a.dim()),
            found: format!("dimension {}", rho_b.dim()),
        });
    }
    let emb = embed_observable(a)?;
    let vis = overlap_labeled(&emb.rho_a_prime, rho_b, shots, seed, labels::OBSERVABLE)?;
    let v = vis.v;
    let d = a.dim() as f64;
    Ok(ExpectationEstimate {
        value: v * emb.trace_a + emb.gamma * (v * d - 1.0),
        stderr: emb.trace_a_prime * vis.stderr_v(),
        visibility: v,
        gamma: emb.gamma,
        shots_used: vis.shots_used,
    })
}

pub fn expectation(a: &Observable, rho_b: &DensityOperator, shots: u64, seed: u64) -> Result<f64> {
    Ok(expectation_estimate(a, rho_b, shots, seed)?.value)
}
