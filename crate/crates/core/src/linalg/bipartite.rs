//! Bipartite operations. The composite index is `i_a * d_b + i_b` everywhere,
//! so the first Kronecker factor is subsystem A.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, ONE, ZERO};
use super::state::PureState;
use crate::error::{Error, Result};

/// Tensor factor of a bipartite operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// SWAP on two d-dimensional systems: `V(|i⟩⊗|j⟩) = |j⟩⊗|i⟩`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    assert!(d >= 1, "dimension must be positive");
    let mut v = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            v[(j * d + i, i * d + j)] = ONE;
        }
    }
    v
}

/// |φ₊⟩ = d^{-1/2} Σᵢ |i⟩|i⟩.
pub fn max_entangled_state(d: usize) -> PureState {
    assert!(d >= 1, "dimension must be positive");
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    PureState::normalized(v).expect("nonzero vector")
}

/// P₊ = |φ₊⟩⟨φ₊|.
pub fn max_entangled_projector(d: usize) -> ComplexMatrix {
    max_entangled_state(d).projector()
}

fn check_bipartite(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<()> {
    let n = d_a * d_b;
    if d_a == 0 || d_b == 0 || m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n} ({d_a}x{d_b} bipartite)"),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    Ok(())
}

/// Transposes the indices of one tensor factor.
pub fn partial_transpose(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    subsystem: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartite(m, d_a, d_b)?;
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    for ia in 0..d_a {
        for ib in 0..d_b {
            for ja in 0..d_a {
                for jb in 0..d_b {
                    let (sa, ta, sb, tb) = match subsystem {
                        Subsystem::A => (ja, ia, ib, jb),
                        Subsystem::B => (ia, ja, jb, ib),
                    };
                    out[(ia * d_b + ib, ja * d_b + jb)] = m[(sa * d_b + sb, ta * d_b + tb)];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out the factor not named by `keep`.
pub fn partial_trace(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    check_bipartite(m, d_a, d_b)?;
    let out = match keep {
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(d_a, d_a);
            for i in 0..d_a {
                for j in 0..d_a {
                    out[(i, j)] = (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum();
                }
            }
            out
        }
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(d_b, d_b);
            for i in 0..d_b {
                for j in 0..d_b {
                    out[(i, j)] = (0..d_a).map(|k| m[(k * d_b + i, k * d_b + j)]).sum();
                }
            }
            out
        }
    };
    Ok(out)
}
