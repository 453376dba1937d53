//! Reference computations that do not go through the estimator code paths.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use swapscope::ComplexMatrix;

pub fn to_na(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(m).symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// tr(AB) by explicit summation.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.rows();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// ½‖A − B‖₁.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let diff = to_na(a) - to_na(b);
    let h = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    0.5 * h.symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

/// Σ_k K ρ K†.
pub fn kraus_action(kraus: &[ComplexMatrix], rho: &ComplexMatrix) -> DMatrix<Complex64> {
    let r = to_na(rho);
    let mut out = DMatrix::zeros(r.nrows(), r.ncols());
    for k in kraus {
        let k = to_na(k);
        out += &k * &r * k.adjoint();
    }
    out
}

pub fn max_abs_diff_na(a: &DMatrix<Complex64>, b: &ComplexMatrix) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
