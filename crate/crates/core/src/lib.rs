//! Controlled-SWAP interferometric estimation.
//!
//! A single interferometer with a controlled-U between two Hadamards is
//! driven by different input data to estimate overlaps, reconstruct states,
//! evaluate observables, measure purity, locate extremal eigenvalues and
//! characterise channels. Every estimator runs either exactly (`shots = 0`)
//! or with seeded finite-shot sampling of the control qubit.

pub mod channels;
pub mod cli;
pub mod error;
pub mod interferometer;
pub mod json;
pub mod linalg;
pub mod observables;
pub mod random;
pub mod rng;
pub mod spectral;
pub mod tomography;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityOperator, PureState};
pub use num_complex::Complex64;
