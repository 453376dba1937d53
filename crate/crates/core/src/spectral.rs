//! Purity, Bloch length and extremal eigenvalue search.
//!
//! The extremal search varies a pure probe |ψ⟩ and follows the visibility
//! `v_ψ = ⟨ψ|ϱ|ψ⟩`, a convex combination of the eigenvalues of ϱ. In exact
//! mode the step is the projected Rayleigh-quotient gradient
//! `g = ϱ|ψ⟩ − v_ψ|ψ⟩`; in sampled mode the gradient is replaced by central
//! finite differences of measured visibilities over the 2d real coordinates
//! of ψ, with both sides of each difference drawn from the same stream.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::{overlap_labeled, VisibilityEstimate};
use crate::linalg::{partial_trace, vec_norm, DensityOperator, PureState, Subsystem};
use crate::random::random_pure_state;
use crate::rng::{child_label, labels, stream};

/// Band below ½ within which a qubit purity is treated as sampling noise.
pub const BLOCH_CLAMP: f64 = 0.05;
/// Tolerance on λ_max for the exact-mode separability test.
pub const EIGEN_TOL: f64 = 1e-6;
/// Maximum marginal deviation from I/2 accepted by the separability test.
pub const MARGINAL_TOL: f64 = 1e-6;

const FD_STEP: f64 = 0.1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub step_size: f64,
    pub grad_tol: f64,
    pub value_tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// 0 selects exact mode.
    pub shots_per_eval: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            step_size: 0.5,
            grad_tol: 1e-8,
            value_tol: 1e-12,
            restarts: 5,
            seed: 0,
            shots_per_eval: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidConfig("restarts must be at least 1"));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be at least 1"));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidConfig("step_size must be positive"));
        }
        if !(self.grad_tol >= 0.0 && self.value_tol >= 0.0) {
            return Err(Error::InvalidConfig("tolerances must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extremum {
    Min,
    Max,
}

impl Extremum {
    fn sign(self) -> f64 {
        match self {
            Extremum::Min => -1.0,
            Extremum::Max => 1.0,
        }
    }

    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Extremum::Min => a < b,
            Extremum::Max => a > b,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub which: Extremum,
    pub eigenvalue_estimate: f64,
    pub eigenvector_estimate: PureState,
    /// Iterations taken by the restart that produced the estimate.
    pub iterations_used: usize,
    pub restarts_used: usize,
    pub converged: bool,
    /// Visibilities along the winning restart.
    pub visibility_trace: Vec<f64>,
    /// Standard error of the final visibility; zero in exact mode.
    pub stderr: f64,
}

/// `tr ϱ²` from the SWAP test on two copies.
pub fn purity_estimate(rho_b: &DensityOperator, shots: u64, seed: u64) -> Result<VisibilityEstimate> {
    overlap_labeled(rho_b, rho_b, shots, seed, labels::PURITY)
}

pub fn purity(rho_b: &DensityOperator, shots: u64, seed: u64) -> Result<f64> {
    Ok(purity_estimate(rho_b, shots, seed)?.v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochLength {
    pub length: f64,
    /// Set when a slightly unphysical purity was pulled back to [½, 1].
    pub clamped: bool,
}

/// `|r| = √(2v − 1)` for a qubit purity `v`. The direction is not recoverable.
pub fn bloch_length(v: f64) -> Result<BlochLength> {
    if !v.is_finite() || !(0.5 - BLOCH_CLAMP..=1.0 + BLOCH_CLAMP).contains(&v) {
        return Err(Error::InconsistentVisibility(v));
    }
    Ok(if v < 0.5 {
        BlochLength {
            length: 0.0,
            clamped: true,
        }
    } else if v > 1.0 {
        BlochLength {
            length: 1.0,
            clamped: true,
        }
    } else {
        BlochLength {
            length: (2.0 * v - 1.0).sqrt(),
            clamped: false,
        }
    })
}

fn visibility_at_labeled(psi: &PureState, rho_b: &DensityOperator, shots: u64, seed: u64, label: u64) -> Result<VisibilityEstimate> {
    overlap_labeled(&psi.to_density(), rho_b, shots, seed, label)
}

/// Overlap of |ψ⟩⟨ψ| with `rho_b`; in exact mode the Rayleigh quotient.
pub fn visibility_at(psi: &PureState, rho_b: &DensityOperator, shots: u64, seed: u64) -> Result<f64> {
    Ok(visibility_at_labeled(psi, rho_b, shots, seed, labels::EXTREMAL)?.v)
}

struct RestartOutcome {
    value: f64,
    vector: Vec<Complex64>,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
    stderr: f64,
}

/// Searches for λ_min or λ_max of `rho_b` over pure probes.
///
/// Restarts begin from seeded Haar-random vectors and the best restart wins.
/// A run that exhausts `max_iters` everywhere still returns its best value
/// with `converged = false`.
pub fn extremal_eigen(rho_b: &DensityOperator, which: Extremum, cfg: &OptimizerConfig) -> Result<ExtremalResult> {
    cfg.validate()?;
    let mut best: Option<RestartOutcome> = None;
    for restart in 0..cfg.restarts {
        let label = child_label(labels::EXTREMAL, restart as u64);
        let mut rng = stream(cfg.seed, label);
        let start = random_pure_state(rho_b.dim(), &mut rng).amplitudes().to_vec();
        let outcome = if cfg.shots_per_eval == 0 {
            ascend_exact(rho_b, which, cfg, start)
        } else {
            ascend_sampled(rho_b, which, cfg, start, label)?
        };
        let replace = match &best {
            None => true,
            Some(b) => which.better(outcome.value, b.value),
        };
        if replace {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one restart");
    Ok(ExtremalResult {
        which,
        eigenvalue_estimate: best.value,
        eigenvector_estimate: PureState::normalized(best.vector)?,
        iterations_used: best.iterations,
        restarts_used: cfg.restarts,
        converged: best.converged,
        visibility_trace: best.trace,
        stderr: best.stderr,
    })
}

fn rayleigh(rho: &DensityOperator, psi: &[Complex64]) -> (f64, Vec<Complex64>) {
    let w = rho.matrix().matvec(psi).expect("dimension checked");
    let v = psi.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
    (v, w)
}

fn normalize(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= n);
    v
}

fn ascend_exact(rho: &DensityOperator, which: Extremum, cfg: &OptimizerConfig, start: Vec<Complex64>) -> RestartOutcome {
    let step = which.sign() * cfg.step_size;
    let mut psi = start;
    let (mut value, mut w) = rayleigh(rho, &psi);
    let mut trace = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        let grad: Vec<Complex64> = w.iter().zip(&psi).map(|(wi, pi)| wi - pi * value).collect();
        if vec_norm(&grad) <= cfg.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;
        psi = normalize(psi.iter().zip(&grad).map(|(p, g)| p + g * step).collect());
        let (next, next_w) = rayleigh(rho, &psi);
        trace.push(next);
        let change = (next - value).abs();
        value = next;
        w = next_w;
        if change <= cfg.value_tol {
            converged = true;
            break;
        }
    }
    RestartOutcome {
        value,
        vector: psi,
        iterations,
        converged,
        trace,
        stderr: 0.0,
    }
}

fn ascend_sampled(
    rho: &DensityOperator,
    which: Extremum,
    cfg: &OptimizerConfig,
    start: Vec<Complex64>,
    restart_label: u64,
) -> Result<RestartOutcome> {
    let shots = cfg.shots_per_eval;
    let d = rho.dim();
    let step = which.sign() * cfg.step_size;
    // expected norm of the gradient estimate when the true gradient vanishes
    let noise_floor = (2.0 * d as f64).sqrt() / (shots as f64).sqrt() / (2.0 * 2f64.sqrt() * FD_STEP);
    let stop_at = cfg.grad_tol.max(2.0 * noise_floor);

    let measure = |psi: &[Complex64], label: u64| -> Result<VisibilityEstimate> {
        let state = PureState::normalized(psi.to_vec())?;
        visibility_at_labeled(&state, rho, shots, cfg.seed, label)
    };

    let mut psi = start;
    let mut trace = vec![measure(&psi, child_label(restart_label, u64::MAX - 1))?.v];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        let iter_label = child_label(restart_label, iterations as u64);
        let mut grad = vec![Complex64::new(0.0, 0.0); d];
        for (j, slot) in grad.iter_mut().enumerate() {
            for (part, unit) in [(0u64, Complex64::new(1.0, 0.0)), (1, Complex64::new(0.0, 1.0))] {
                let label = child_label(iter_label, 2 * j as u64 + part);
                let mut plus = psi.clone();
                plus[j] += unit * FD_STEP;
                let mut minus = psi.clone();
                minus[j] -= unit * FD_STEP;
                let diff = (measure(&plus, label)?.v - measure(&minus, label)?.v) / (2.0 * FD_STEP);
                // ∂v/∂Re ψ_j = 2 Re g_j and ∂v/∂Im ψ_j = 2 Im g_j
                *slot += unit * (0.5 * diff);
            }
        }
        iterations += 1;
        if vec_norm(&grad) <= stop_at {
            converged = true;
            break;
        }
        psi = normalize(psi.iter().zip(&grad).map(|(p, g)| p + g * step).collect());
        trace.push(measure(&psi, child_label(iter_label, u64::MAX))?.v);
    }
    let last = measure(&psi, child_label(restart_label, u64::MAX))?;
    Ok(RestartOutcome {
        value: last.v,
        vector: psi,
        iterations,
        converged,
        trace,
        stderr: last.stderr_v(),
    })
}

/// Separability test for two qubits with a maximally mixed marginal: the
/// state is indicated separable iff λ_max ≤ ½ (within tolerance).
pub fn maximally_mixed_subsystem_separability_check(rho_b: &DensityOperator, cfg: &OptimizerConfig) -> Result<bool> {
    if rho_b.dim() != 4 {
        return Err(Error::NotTwoQubit(rho_b.dim()));
    }
    let half = DensityOperator::maximally_mixed(2);
    let dev_a = partial_trace(rho_b.matrix(), 2, 2, Subsystem::A)?.max_abs_diff(half.matrix());
    let dev_b = partial_trace(rho_b.matrix(), 2, 2, Subsystem::B)?.max_abs_diff(half.matrix());
    if dev_a > MARGINAL_TOL && dev_b > MARGINAL_TOL {
        return Err(Error::NoMaximallyMixedSubsystem { dev_a, dev_b });
    }
    let res = extremal_eigen(rho_b, Extremum::Max, cfg)?;
    let tol = if cfg.shots_per_eval == 0 { EIGEN_TOL } else { 3.0 * res.stderr };
    Ok(res.eigenvalue_estimate <= 0.5 + tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, max_entangled_projector, ComplexMatrix};
    use crate::random::random_density;

    #[test]
    fn purity_cases() {
        let mut rng = stream(41, 0);
        let psi = random_pure_state(3, &mut rng).to_density();
        assert!((purity(&psi, 0, 0).unwrap() - 1.0).abs() < 1e-12);
        for d in 2..=5 {
            let mixed = DensityOperator::maximally_mixed(d);
            assert!((purity(&mixed, 0, 0).unwrap() - 1.0 / d as f64).abs() < 1e-12);
        }
        let rho = random_density(3, &mut rng);
        let oracle: f64 = eig_hermitian(rho.matrix()).unwrap().values.iter().map(|x| x * x).sum();
        assert!((purity(&rho, 0, 0).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn bloch_cases() {
        assert_eq!(bloch_length(0.5).unwrap().length, 0.0);
        assert_eq!(bloch_length(1.0).unwrap().length, 1.0);
        assert!((bloch_length(0.625).unwrap().length - 0.5).abs() < 1e-15);
        let c = bloch_length(0.47).unwrap();
        assert!(c.clamped && c.length == 0.0);
        assert!(bloch_length(0.4).is_err());
        assert!(bloch_length(1.1).is_err());
        assert!(bloch_length(f64::NAN).is_err());
    }

    #[test]
    fn visibility_at_eigenvectors_and_uniform_probe() {
        let rho = DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.5, 0.3, 0.2])).unwrap();
        for (i, l) in [0.5, 0.3, 0.2].into_iter().enumerate() {
            assert!((visibility_at(&PureState::basis(3, i), &rho, 0, 0).unwrap() - l).abs() < 1e-15);
        }
        let uniform = PureState::normalized(vec![Complex64::new(1.0, 0.0); 3]).unwrap();
        assert!((visibility_at(&uniform, &rho, 0, 0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_max() {
        let rho = DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.7, 0.3])).unwrap();
        let r = extremal_eigen(&rho, Extremum::Max, &OptimizerConfig::default()).unwrap();
        assert!((r.eigenvalue_estimate - 0.7).abs() < 1e-10);
        assert!(r.converged);
        assert!((r.eigenvector_estimate.amplitudes()[0].norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_landscape_converges_at_start() {
        let rho = DensityOperator::maximally_mixed(4);
        for which in [Extremum::Min, Extremum::Max] {
            let r = extremal_eigen(&rho, which, &OptimizerConfig::default()).unwrap();
            assert!((r.eigenvalue_estimate - 0.25).abs() < 1e-15);
            assert!(r.converged);
            assert_eq!(r.iterations_used, 0);
        }
    }

    #[test]
    fn random_d6_matches_oracle() {
        let mut rng = stream(42, 0);
        let rho = random_density(6, &mut rng);
        let eig = eig_hermitian(rho.matrix()).unwrap();
        let cfg = OptimizerConfig::default();
        let max = extremal_eigen(&rho, Extremum::Max, &cfg).unwrap();
        let min = extremal_eigen(&rho, Extremum::Min, &cfg).unwrap();
        assert!((max.eigenvalue_estimate - eig.max()).abs() <= 1e-6);
        assert!((min.eigenvalue_estimate - eig.min()).abs() <= 1e-6);
        assert!(max.visibility_trace.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        assert!(min.visibility_trace.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn sampled_search_lands_near_oracle() {
        let rho = DensityOperator::new(ComplexMatrix::from_real_diagonal(&[0.7, 0.3])).unwrap();
        let cfg = OptimizerConfig {
            shots_per_eval: 100_000,
            max_iters: 200,
            restarts: 2,
            seed: 3,
            ..OptimizerConfig::default()
        };
        let r = extremal_eigen(&rho, Extremum::Max, &cfg).unwrap();
        assert!((r.eigenvalue_estimate - 0.7).abs() < 0.02, "{}", r.eigenvalue_estimate);
        assert!(r.stderr > 0.0);
        let again = extremal_eigen(&rho, Extremum::Max, &cfg).unwrap();
        assert_eq!(again.eigenvalue_estimate, r.eigenvalue_estimate);
    }

    #[test]
    fn invalid_config_rejected() {
        let rho = DensityOperator::maximally_mixed(2);
        let cfg = OptimizerConfig {
            restarts: 0,
            ..OptimizerConfig::default()
        };
        assert!(extremal_eigen(&rho, Extremum::Max, &cfg).is_err());
        let cfg = OptimizerConfig {
            step_size: 0.0,
            ..OptimizerConfig::default()
        };
        assert!(extremal_eigen(&rho, Extremum::Max, &cfg).is_err());
    }

    #[test]
    fn separability_examples() {
        let cfg = OptimizerConfig::default();
        let bell = DensityOperator::new(max_entangled_projector(2)).unwrap();
        assert!(!maximally_mixed_subsystem_separability_check(&bell, &cfg).unwrap());
        let mixed = DensityOperator::maximally_mixed(4);
        assert!(maximally_mixed_subsystem_separability_check(&mixed, &cfg).unwrap());
        let p = 0.4;
        let werner = DensityOperator::new(
            &max_entangled_projector(2).scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0),
        )
        .unwrap();
        let lmax = eig_hermitian(werner.matrix()).unwrap().max();
        assert!((lmax - 0.55).abs() < 1e-12);
        assert!(!maximally_mixed_subsystem_separability_check(&werner, &cfg).unwrap());
    }

    #[test]
    fn separability_preconditions() {
        let cfg = OptimizerConfig::default();
        let zero = PureState::basis(4, 0).to_density();
        assert!(matches!(
            maximally_mixed_subsystem_separability_check(&zero, &cfg),
            Err(Error::NoMaximallyMixedSubsystem { .. })
        ));
        assert!(matches!(
            maximally_mixed_subsystem_separability_check(&DensityOperator::maximally_mixed(3), &cfg),
            Err(Error::NotTwoQubit(3))
        ));
    }
}
