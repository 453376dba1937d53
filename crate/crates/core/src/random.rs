//! Random matrices and states used for restarts and test fixtures.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::KrausChannel;
use crate::linalg::{inner, ComplexMatrix, DensityOperator, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_vec(rows, cols, (0..rows * cols).map(|_| gaussian(rng)).collect())
        .expect("finite gaussian entries")
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    random_matrix(d, d, rng).hermitian_part()
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    PureState::normalized((0..d).map(|_| gaussian(rng)).collect()).expect("nonzero gaussian vector")
}

/// Full-rank Ginibre state G G† / tr(G G†).
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator {
    random_density_with_rank(d, d, rng)
}

pub fn random_density_with_rank<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityOperator {
    let g = random_matrix(d, rank, rng);
    let mut w = &g * &g.adjoint();
    w = w.hermitian_part();
    let tr = w.trace().re;
    DensityOperator::from_trusted(w.scale_real(1.0 / tr))
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_matrix(d, d, rng);
    orthonormalize_columns(&g)
}

/// Random isometry of shape `rows x cols` (`rows >= cols`).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "an isometry needs rows >= cols");
    orthonormalize_columns(&random_matrix(rows, cols, rng))
}

/// Random channel with `rank` Kraus operators, cut from one random isometry.
pub fn random_channel<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> KrausChannel {
    let w = random_isometry(d * rank, d, rng);
    let kraus = (0..rank)
        .map(|r| {
            let mut k = ComplexMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    k[(i, j)] = w[(r * d + i, j)];
                }
            }
            k
        })
        .collect();
    KrausChannel::new(kraus).expect("isometry blocks form a complete Kraus set")
}

fn orthonormalize_columns(g: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = (g.rows(), g.cols());
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.column(j);
        // two passes keep the result orthonormal to working precision
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &v);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        basis.push(PureState::normalized(v).expect("full-rank gaussian").amplitudes().to_vec());
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for (j, b) in basis.iter().enumerate() {
        for i in 0..rows {
            out[(i, j)] = b[i];
        }
    }
    out
}

/// Two-qubit state with a maximally mixed first marginal, obtained as the
/// Choi state of a random qubit channel.
pub fn random_half_mixed_two_qubit<R: Rng + ?Sized>(rng: &mut R) -> DensityOperator {
    let rank = rng.gen_range(1..=4);
    random_channel(2, rank, rng).choi_state().state().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_hermitian;
    use crate::rng::stream;

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = stream(99, 0);
        for d in 1..=5 {
            assert!(random_unitary(d, &mut rng).unitarity_deviation() < 1e-12);
            let rho = random_density(d, &mut rng);
            assert!(DensityOperator::new(rho.matrix().clone()).is_ok());
            let ch = random_channel(d, 3, &mut rng);
            assert_eq!(ch.kraus_ops().len(), 3);
        }
        let e = eig_hermitian(random_density_with_rank(4, 1, &mut rng).matrix()).unwrap();
        assert!((e.max() - 1.0).abs() < 1e-12);
    }
}
