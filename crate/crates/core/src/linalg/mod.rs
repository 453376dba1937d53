//! Dense complex linear algebra and state validation.

pub mod bipartite;
pub mod eig;
pub mod matrix;
pub mod state;

pub use bipartite::{
    kron, kron_vec, max_entangled_projector, max_entangled_state, partial_trace,
    partial_transpose, swap_operator, Subsystem,
};
pub use eig::{eig_hermitian, eigvals_hermitian, HermitianEigen};
pub use matrix::{inner, vec_norm, ComplexMatrix};
pub use state::{trace_distance, validate_density, DensityOperator, PureState, DENSITY_TOL};
