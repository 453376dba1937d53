//! Single-qubit interferometer with a controlled-U between the Hadamards.
//!
//! The phase shifter multiplies the |1⟩ branch of the control by `e^{iφ}`,
//! which gives
//!
//! ```text
//! Pr(0) = ½ [1 + Re(e^{iφ} tr ρU)]
//! ```
//!
//! Only the control qubit is ever sampled: a sampled run draws `shots`
//! Bernoulli(Pr(0)) outcomes from a seeded stream and reports the empirical
//! frequency.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{swap_operator, ComplexMatrix, DensityOperator};
use crate::rng::{labels, stream};

/// Unitarity tolerance for the controlled operation.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Mode {
    Exact,
    Sampled { shots: u64 },
}

impl Mode {
    /// `shots == 0` selects exact mode.
    pub fn from_shots(shots: u64) -> Self {
        if shots == 0 {
            Mode::Exact
        } else {
            Mode::Sampled { shots }
        }
    }

    pub fn shots(&self) -> u64 {
        match self {
            Mode::Exact => 0,
            Mode::Sampled { shots } => *shots,
        }
    }
}

/// One configured use of the interferometer.
#[derive(Debug, Clone)]
pub struct InterferometerRun {
    u: ComplexMatrix,
    rho: DensityOperator,
    phase: f64,
    mode: Mode,
    seed: u64,
    label: u64,
}

impl InterferometerRun {
    pub fn new(u: ComplexMatrix, rho: DensityOperator, phase: f64, mode: Mode, seed: u64) -> Result<Self> {
        check_operator(&u, &rho)?;
        if mode == (Mode::Sampled { shots: 0 }) {
            return Err(Error::NoShots);
        }
        Ok(Self {
            u,
            rho,
            phase,
            mode,
            seed,
            label: labels::RUN,
        })
    }

    /// Selects the generator stream used by a sampled run.
    pub fn with_label(mut self, label: u64) -> Self {
        self.label = label;
        self
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

/// Outcome of one interferometer configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityEstimate {
    /// `2·Pr(0) − 1`; in sampled mode this may leave [0, 1] by shot noise.
    pub v: f64,
    pub alpha: f64,
    pub p0: f64,
    pub shots_used: u64,
    pub stderr_p0: f64,
}

impl VisibilityEstimate {
    /// Standard error of `v`.
    pub fn stderr_v(&self) -> f64 {
        2.0 * self.stderr_p0
    }
}

/// Complex `tr ρU` recovered from two fringe settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEstimate {
    pub re: f64,
    pub im: f64,
    /// Modulus `v`.
    pub v: f64,
    /// Phase `α ∈ (−π, π]`.
    pub alpha: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub shots_used: u64,
}

impl TraceEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn check_operator(u: &ComplexMatrix, rho: &DensityOperator) -> Result<()> {
    let n = u.require_square()?;
    if n != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{} unitary", rho.dim(), rho.dim()),
            found: format!("{n}x{n}"),
        });
    }
    let deviation = u.unitarity_deviation();
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

fn prob_zero_unchecked(u: &ComplexMatrix, rho: &DensityOperator, phi: f64) -> f64 {
    let t = rho
        .matrix()
        .trace_product(u)
        .expect("dimensions checked by caller");
    let p = 0.5 * (1.0 + (Complex64::from_polar(1.0, phi) * t).re);
    p.clamp(0.0, 1.0)
}

/// Exact probability of finding the control qubit in |0⟩.
pub fn prob_zero_exact(u: &ComplexMatrix, rho: &DensityOperator, phi: f64) -> Result<f64> {
    check_operator(u, rho)?;
    Ok(prob_zero_unchecked(u, rho, phi))
}

/// Draws `shots` ancilla outcomes and returns the empirical frequency of |0⟩.
pub fn sample_frequency<R: Rng + ?Sized>(p0: f64, shots: u64, rng: &mut R) -> f64 {
    let zeros = Binomial::new(shots, p0.clamp(0.0, 1.0))
        .expect("probability in [0, 1]")
        .sample(rng);
    zeros as f64 / shots as f64
}

fn estimate_from_p0(p0: f64, mode: Mode, seed: u64, label: u64) -> VisibilityEstimate {
    match mode {
        Mode::Exact => VisibilityEstimate {
            v: 2.0 * p0 - 1.0,
            alpha: 0.0,
            p0,
            shots_used: 0,
            stderr_p0: 0.0,
        },
        Mode::Sampled { shots } => {
            let mut rng = stream(seed, label);
            let p_hat = sample_frequency(p0, shots, &mut rng);
            VisibilityEstimate {
                v: 2.0 * p_hat - 1.0,
                alpha: 0.0,
                p0: p_hat,
                shots_used: shots,
                stderr_p0: (p_hat * (1.0 - p_hat) / shots as f64).sqrt(),
            }
        }
    }
}

/// Executes a run, reading the visibility as `2·Pr(0) − 1`.
///
/// This reading assumes `tr ρU` is real at the configured phase, as in the
/// SWAP overlap setting; use [`estimate_tr_rho_u`] for complex traces.
pub fn run(r: &InterferometerRun) -> VisibilityEstimate {
    let p0 = prob_zero_unchecked(&r.u, &r.rho, r.phase);
    estimate_from_p0(p0, r.mode, r.seed, r.label)
}

/// Recovers `tr ρU = v e^{iα}` from the fringe settings φ = 0 and φ = −π/2.
pub fn estimate_tr_rho_u(u: &ComplexMatrix, rho: &DensityOperator, shots: u64, seed: u64) -> Result<TraceEstimate> {
    check_operator(u, rho)?;
    let mode = Mode::from_shots(shots);
    let real = estimate_from_p0(prob_zero_unchecked(u, rho, 0.0), mode, seed, labels::FRINGE_REAL);
    let imag = estimate_from_p0(prob_zero_unchecked(u, rho, -FRAC_PI_2), mode, seed, labels::FRINGE_IMAG);
    let (re, im) = (real.v, imag.v);
    let mut alpha = im.atan2(re);
    if alpha <= -PI {
        alpha = PI;
    }
    Ok(TraceEstimate {
        re,
        im,
        v: re.hypot(im),
        alpha,
        stderr_re: real.stderr_v(),
        stderr_im: imag.stderr_v(),
        shots_used: real.shots_used + imag.shots_used,
    })
}

pub(crate) fn overlap_labeled(
    rho_a: &DensityOperator,
    rho_b: &DensityOperator,
    shots: u64,
    seed: u64,
    label: u64,
) -> Result<VisibilityEstimate> {
    if rho_a.dim() != rho_b.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("dimension {}", rho_a.dim()),
            found: format!("dimension {}", rho_b.dim()),
        });
    }
    let joint = rho_a.tensor(rho_b);
    let swap = swap_operator(rho_a.dim());
    let run = InterferometerRun::new(swap, joint, 0.0, Mode::from_shots(shots), seed)?.with_label(label);
    Ok(self::run(&run))
}

/// SWAP-test overlap: `v ≈ tr(ϱₐ ϱ_b)`.
pub fn overlap(rho_a: &DensityOperator, rho_b: &DensityOperator, shots: u64, seed: u64) -> Result<VisibilityEstimate> {
    overlap_labeled(rho_a, rho_b, shots, seed, labels::RUN)
}

/// Least-squares fit of `Pr(0)(φ) = ½[1 + v cos(α + φ)]` over sampled phases.
///
/// Returns `(v, α)`; needs at least three distinct phases.
pub fn fit_fringes(phases: &[f64], probs: &[f64]) -> Option<(f64, f64)> {
    if phases.len() != probs.len() || phases.len() < 3 {
        return None;
    }
    // model: c + a cos φ + b sin φ, with a = ½v cos α and b = −½v sin α
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (&phi, &p) in phases.iter().zip(probs) {
        let row = [1.0, phi.cos(), phi.sin()];
        for i in 0..3 {
            atb[i] += row[i] * p;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let sol = solve3(ata, atb)?;
    let (a, b) = (sol[1], sol[2]);
    let v = 2.0 * a.hypot(b);
    let alpha = (-b).atan2(a);
    Some((v, alpha))
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = det3(&m);
    if det.abs() < 1e-300 {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = b[row];
        }
        *slot = det3(&mc) / det;
    }
    Some(out)
}
