//! State reconstruction from SWAP-test visibilities against pure probes.
//!
//! A probe |ψ⟩ paired with the unknown ϱ yields `v = ⟨ψ|ϱ|ψ⟩`. With probes
//! |n⟩, (|n⟩+|k⟩)/√2 and (|n⟩+i|k⟩)/√2 the matrix elements follow from
//!
//! ```text
//! ϱ_nn    = v_diag(n)
//! Re ϱ_nk = v_real(n,k) − ½(ϱ_nn + ϱ_kk)
//! Im ϱ_nk = ½(ϱ_nn + ϱ_kk) − v_imag(n,k)
//! ```
//!
//! where `ϱ_nk = ⟨n|ϱ|k⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::{overlap_labeled, VisibilityEstimate};
use crate::linalg::{eig_hermitian, ComplexMatrix, DensityOperator, PureState};
use crate::rng::{child_label, labels};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Diagonal,
    RealOffdiag,
    ImagOffdiag,
}

/// Which pure probe to pair with the unknown state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub kind: ProbeKind,
    pub n: usize,
    /// Unused (zero) for diagonal probes.
    pub k: usize,
}

impl ProbeSpec {
    pub fn diagonal(n: usize) -> Self {
        Self {
            kind: ProbeKind::Diagonal,
            n,
            k: 0,
        }
    }

    pub fn real(n: usize, k: usize) -> Self {
        Self {
            kind: ProbeKind::RealOffdiag,
            n,
            k,
        }
    }

    pub fn imag(n: usize, k: usize) -> Self {
        Self {
            kind: ProbeKind::ImagOffdiag,
            n,
            k,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let ok = match self.kind {
            ProbeKind::Diagonal => self.n < dim,
            _ => self.n < self.k && self.k < dim,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidProbe {
                kind: self.kind,
                n: self.n,
                k: self.k,
                dim,
            })
        }
    }

    fn stream_key(&self) -> u64 {
        let kind = match self.kind {
            ProbeKind::Diagonal => 0u64,
            ProbeKind::RealOffdiag => 1,
            ProbeKind::ImagOffdiag => 2,
        };
        (kind << 48) | ((self.n as u64) << 24) | self.k as u64
    }
}

/// The pure state |ψ⟩ a probe stands for.
pub fn probe_state(p: ProbeSpec, dim: usize) -> Result<PureState> {
    p.validate(dim)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    match p.kind {
        ProbeKind::Diagonal => amps[p.n] = Complex64::new(1.0, 0.0),
        ProbeKind::RealOffdiag => {
            amps[p.n] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            amps[p.k] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        }
        ProbeKind::ImagOffdiag => {
            amps[p.n] = Complex64::new(FRAC_1_SQRT_2, 0.0);
            amps[p.k] = Complex64::new(0.0, FRAC_1_SQRT_2);
        }
    }
    PureState::new(amps)
}

/// A complete, ordered set of d² probes with a uniform shot allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographySchedule {
    dim: usize,
    probes: Vec<ProbeSpec>,
    shots_per_probe: u64,
}

impl TomographySchedule {
    /// Accepts any ordering, provided every probe of the complete set occurs exactly once.
    pub fn new(dim: usize, probes: Vec<ProbeSpec>, shots_per_probe: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        for p in &probes {
            p.validate(dim)?;
        }
        let mut sorted = probes.clone();
        sorted.sort_by_key(|p| p.stream_key());
        sorted.dedup();
        if probes.len() != dim * dim || sorted.len() != probes.len() {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                found: sorted.len(),
            });
        }
        Ok(Self {
            dim,
            probes,
            shots_per_probe,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn probes(&self) -> &[ProbeSpec] {
        &self.probes
    }

    pub fn shots_per_probe(&self) -> u64 {
        self.shots_per_probe
    }

    pub fn total_shots(&self) -> u64 {
        self.shots_per_probe * self.probes.len() as u64
    }
}

/// Canonical schedule: diagonals ascending, then real pairs, then imaginary
/// pairs, each in lexicographic order.
pub fn default_schedule(dim: usize, shots_per_probe: u64) -> Result<TomographySchedule> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    let pairs: Vec<(usize, usize)> = (0..dim)
        .flat_map(|n| ((n + 1)..dim).map(move |k| (n, k)))
        .collect();
    let probes = (0..dim)
        .map(ProbeSpec::diagonal)
        .chain(pairs.iter().map(|&(n, k)| ProbeSpec::real(n, k)))
        .chain(pairs.iter().map(|&(n, k)| ProbeSpec::imag(n, k)))
        .collect();
    TomographySchedule::new(dim, probes, shots_per_probe)
}

/// Overlap of the probe with `rho_b`, keeping the shot statistics.
pub fn measure_probe_estimate(p: ProbeSpec, rho_b: &DensityOperator, shots: u64, seed: u64) -> Result<VisibilityEstimate> {
    let psi = probe_state(p, rho_b.dim())?.to_density();
    overlap_labeled(&psi, rho_b, shots, seed, child_label(labels::TOMOGRAPHY, p.stream_key()))
}

pub fn measure_probe(p: ProbeSpec, rho_b: &DensityOperator, shots: u64, seed: u64) -> Result<f64> {
    Ok(measure_probe_estimate(p, rho_b, shots, seed)?.v)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub schedule: TomographySchedule,
    pub per_probe_visibilities: Vec<f64>,
    /// Standard error of each visibility; empty when the visibilities were supplied externally.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_probe_stderr: Vec<f64>,
    /// Hermitian estimate before projection; its trace may drift from 1 under noise.
    pub raw_hermitian: ComplexMatrix,
    pub state: DensityOperator,
    pub total_shots: u64,
}

/// Linear inversion of the visibilities followed by [`project_to_physical`].
pub fn reconstruct(schedule: &TomographySchedule, visibilities: &[f64]) -> Result<ReconstructionReport> {
    let raw = invert_visibilities(schedule, visibilities)?;
    let state = project_to_physical(&raw)?;
    Ok(ReconstructionReport {
        schedule: schedule.clone(),
        per_probe_visibilities: visibilities.to_vec(),
        per_probe_stderr: Vec::new(),
        raw_hermitian: raw,
        state,
        total_shots: schedule.total_shots(),
    })
}

fn invert_visibilities(schedule: &TomographySchedule, visibilities: &[f64]) -> Result<ComplexMatrix> {
    let d = schedule.dim();
    if visibilities.len() != schedule.probes().len() {
        return Err(Error::LengthMismatch {
            expected: schedule.probes().len(),
            found: visibilities.len(),
        });
    }
    let mut diag = vec![0.0; d];
    for (p, &v) in schedule.probes().iter().zip(visibilities) {
        if p.kind == ProbeKind::Diagonal {
            diag[p.n] = v;
        }
    }
    let mut raw = ComplexMatrix::zeros(d, d);
    for (n, &x) in diag.iter().enumerate() {
        raw[(n, n)] = Complex64::new(x, 0.0);
    }
    for (p, &v) in schedule.probes().iter().zip(visibilities) {
        let mean = 0.5 * (diag[p.n] + diag[p.k]);
        match p.kind {
            ProbeKind::Diagonal => {}
            ProbeKind::RealOffdiag => raw[(p.n, p.k)].re = v - mean,
            ProbeKind::ImagOffdiag => raw[(p.n, p.k)].im = mean - v,
        }
    }
    for n in 0..d {
        for k in (n + 1)..d {
            raw[(k, n)] = raw[(n, k)].conj();
        }
    }
    Ok(raw)
}

/// Clips negative eigenvalues to zero and rescales the spectrum to unit sum.
pub fn project_to_physical(h: &ComplexMatrix) -> Result<DensityOperator> {
    let eig = eig_hermitian(h)?;
    let total: f64 = eig.values.iter().map(|&x| x.max(0.0)).sum();
    if total <= 0.0 {
        return Err(Error::ZeroAfterClipping);
    }
    let m = eig.reassemble_with(|x| x.max(0.0) / total).hermitian_part();
    Ok(DensityOperator::from_trusted(m))
}

/// Full procedure: schedule, one overlap experiment per probe, reconstruction.
///
/// `oracle` supplies the copies of the unknown state; in simulation it is the
/// true matrix. Each probe consumes its own random stream.
pub fn tomography(oracle: &DensityOperator, shots_per_probe: u64, seed: u64) -> Result<ReconstructionReport> {
    let schedule = default_schedule(oracle.dim(), shots_per_probe)?;
    let estimates = schedule
        .probes()
        .iter()
        .map(|&p| measure_probe_estimate(p, oracle, shots_per_probe, seed))
        .collect::<Result<Vec<VisibilityEstimate>>>()?;
    let visibilities: Vec<f64> = estimates.iter().map(|e| e.v).collect();
    let mut report = reconstruct(&schedule, &visibilities)?;
    report.per_probe_stderr = estimates.iter().map(|e| e.stderr_v()).collect();
    Ok(report)
}
