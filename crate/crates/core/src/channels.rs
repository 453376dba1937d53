//! Channel characterisation through the Choi state.
//!
//! The reference half A of |φ₊⟩ is kept and half B is sent through the
//! channel, giving `ϱ_Λ = (I ⊗ Λ)P₊ = (1/d) Σᵢⱼ |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`. The
//! channel action is recovered as `Λ(ρ) = d·tr_A[(ρᵀ ⊗ I) ϱ_Λ]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, kron, max_entangled_projector, partial_trace, trace_distance, ComplexMatrix,
    DensityOperator, Subsystem,
};
use crate::spectral::{extremal_eigen, Extremum, OptimizerConfig};
use crate::tomography::{tomography, ReconstructionReport};

/// Completeness tolerance for Kraus sets.
pub const KRAUS_TOL: f64 = 1e-10;
/// Allowed deviation of the Choi reference marginal from I/d.
pub const CHOI_MARGINAL_TOL: f64 = 1e-9;
/// Margin above ½ required for a positive exact-mode capacity verdict.
pub const CAPACITY_MARGIN: f64 = 1e-6;
/// Eigenvalue threshold for the distillability verdict.
pub const DISTILL_TOL: f64 = 1e-10;

/// A trace-preserving channel in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Requires `Σ K†K = I` within [`KRAUS_TOL`].
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::ZeroDimension)?;
        let dim = first.require_square()?;
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for k in &kraus {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: format!("{dim}x{dim} Kraus operator"),
                    found: format!("{}x{}", k.rows(), k.cols()),
                });
            }
            sum = &sum + &(&k.adjoint() * k);
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > KRAUS_TOL {
            return Err(Error::IncompleteKraus { deviation });
        }
        Ok(Self { dim, kraus })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// `Λ(ρ) = pρ + (1 − p) I/d`, valid for `p ∈ [−1/(d²−1), 1]`.
    pub fn depolarizing(dim: usize, p: f64) -> Result<Self> {
        let d2 = (dim * dim) as f64;
        let weight_rest = (1.0 - p) / d2;
        let weight_id = p + weight_rest;
        if weight_id < 0.0 || weight_rest < 0.0 {
            return Err(Error::InvalidConfig("depolarizing parameter out of range"));
        }
        // Σ over the d² Weyl operators X^a Z^b with weights (1−p)/d², plus p on the identity
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / dim as f64);
        let mut kraus = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                let w = if a == 0 && b == 0 { weight_id } else { weight_rest };
                if w == 0.0 {
                    continue;
                }
                let mut k = ComplexMatrix::zeros(dim, dim);
                for j in 0..dim {
                    k[((j + a) % dim, j)] = omega.powu((b * j) as u32) * w.sqrt();
                }
                kraus.push(k);
            }
        }
        Self::new(kraus)
    }

    /// Qubit decay |1⟩ → |0⟩ with probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidConfig("damping probability must lie in [0, 1]"));
        }
        let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()])?;
        let k1 = ComplexMatrix::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0])?;
        Self::new(vec![k0, k1])
    }

    /// Qubit bit flip with probability `q`.
    pub fn bit_flip(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidConfig("flip probability must lie in [0, 1]"));
        }
        let k0 = ComplexMatrix::identity(2).scale_real((1.0 - q).sqrt());
        let k1 = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])?.scale_real(q.sqrt());
        Self::new(vec![k0, k1])
    }

    /// Σᵢ KᵢρKᵢ† for an arbitrary square matrix.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0}", self.dim),
                found: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = &out + &(&(k * rho) * &k.adjoint());
        }
        Ok(out)
    }

    pub fn choi_state(&self) -> ChoiState {
        let d = self.dim;
        let p = max_entangled_projector(d);
        let id = ComplexMatrix::identity(d);
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for k in &self.kraus {
            let lifted = kron(&id, k);
            out = &out + &(&(&lifted * &p) * &lifted.adjoint());
        }
        ChoiState {
            dim: d,
            state: DensityOperator::from_trusted(out.hermitian_part()),
        }
    }
}

/// `Σ KᵢρKᵢ†`.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    let out = ch.apply_matrix(rho.matrix())?;
    DensityOperator::new(out.hermitian_part())
}

/// `(I ⊗ Λ)P₊`.
pub fn choi_state(ch: &KrausChannel) -> ChoiState {
    ch.choi_state()
}

/// Bipartite state of a channel: A is the kept reference, B the channel output.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState {
    dim: usize,
    state: DensityOperator,
}

impl ChoiState {
    /// Requires `tr_B ϱ_Λ = I/d` within [`CHOI_MARGINAL_TOL`].
    pub fn new(dim: usize, state: DensityOperator) -> Result<Self> {
        let c = Self::unchecked(dim, state)?;
        let deviation = c.reference_marginal_deviation();
        if deviation > CHOI_MARGINAL_TOL {
            return Err(Error::ChoiMarginal { deviation });
        }
        Ok(c)
    }

    fn unchecked(dim: usize, state: DensityOperator) -> Result<Self> {
        if dim == 0 || state.dim() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: format!("state of dimension {}", dim * dim),
                found: format!("dimension {}", state.dim()),
            });
        }
        Ok(Self { dim, state })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn marginal(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(self.state.matrix(), self.dim, self.dim, keep).expect("dimensions fixed at construction")
    }

    /// Max entrywise deviation of the reference (A) marginal from I/d.
    pub fn reference_marginal_deviation(&self) -> f64 {
        self.marginal(Subsystem::A)
            .max_abs_diff(DensityOperator::maximally_mixed(self.dim).matrix())
    }

    /// Max entrywise deviation of the output (B) marginal from I/d.
    pub fn output_marginal_deviation(&self) -> f64 {
        self.marginal(Subsystem::B)
            .max_abs_diff(DensityOperator::maximally_mixed(self.dim).matrix())
    }
}

/// `Λ(ρ) = d·tr_A[(ρᵀ ⊗ I) ϱ_Λ]`.
pub fn channel_from_choi(c: &ChoiState, rho_in: &DensityOperator) -> Result<DensityOperator> {
    let out = channel_from_choi_matrix(c, rho_in.matrix())?;
    DensityOperator::new(out.hermitian_part())
}

pub(crate) fn channel_from_choi_matrix(c: &ChoiState, rho_in: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = c.dim;
    if rho_in.rows() != d || rho_in.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("{d}x{d}"),
            found: format!("{}x{}", rho_in.rows(), rho_in.cols()),
        });
    }
    let lifted = kron(&rho_in.transpose(), &ComplexMatrix::identity(d));
    let prod = &lifted * c.state.matrix();
    Ok(partial_trace(&prod, d, d, Subsystem::B)?.scale_real(d as f64))
}

/// True iff the output marginal is also I/d within `tol`.
pub fn is_bistochastic(c: &ChoiState, tol: f64) -> bool {
    c.output_marginal_deviation() <= tol
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelTomographyReport {
    pub dim: usize,
    pub reconstruction: ReconstructionReport,
    /// Deviation of the estimated reference marginal from I/d.
    pub reference_marginal_deviation: f64,
}

impl ChannelTomographyReport {
    /// The estimate as a Choi state; the reference marginal is not re-imposed.
    pub fn choi(&self) -> ChoiState {
        ChoiState::unchecked(self.dim, self.reconstruction.state.clone()).expect("dimension checked")
    }
}

/// State tomography of the d²-dimensional Choi state prepared by `ch_oracle`.
pub fn channel_tomography(ch_oracle: &KrausChannel, shots_per_probe: u64, seed: u64) -> Result<ChannelTomographyReport> {
    let target = ch_oracle.choi_state();
    let reconstruction = tomography(target.state(), shots_per_probe, seed)?;
    let est = ChoiState::unchecked(ch_oracle.dim(), reconstruction.state.clone())?;
    Ok(ChannelTomographyReport {
        dim: ch_oracle.dim(),
        reference_marginal_deviation: est.reference_marginal_deviation(),
        reconstruction,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityVerdict {
    /// Whether the two-way capacity is indicated positive.
    pub positive: bool,
    pub lambda_max: f64,
    /// Sampled estimate within three standard errors of ½.
    pub inconclusive: bool,
    pub stderr: f64,
    pub converged: bool,
}

/// Two-way capacity test for a qubit channel: positive iff λ_max(ϱ_Λ) > ½.
pub fn two_way_capacity_positive(c: &ChoiState, cfg: &OptimizerConfig) -> Result<CapacityVerdict> {
    if c.dim() != 2 {
        return Err(Error::NotTwoQubit(c.dim() * c.dim()));
    }
    let res = extremal_eigen(c.state(), Extremum::Max, cfg)?;
    let lambda_max = res.eigenvalue_estimate;
    let sampled = cfg.shots_per_eval > 0;
    Ok(CapacityVerdict {
        positive: lambda_max > 0.5 + CAPACITY_MARGIN,
        lambda_max,
        inconclusive: sampled && (lambda_max - 0.5).abs() <= 3.0 * res.stderr,
        stderr: res.stderr,
        converged: res.converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistillabilityVerdict {
    pub distillable: bool,
    pub min_eig: f64,
}

/// Two-qubit two-way distillability: `ϱ_A ⊗ I − ϱ_AB` has a negative eigenvalue.
pub fn distillability_operator_test(rho_ab: &DensityOperator) -> Result<DistillabilityVerdict> {
    if rho_ab.dim() != 4 {
        return Err(Error::NotTwoQubit(rho_ab.dim()));
    }
    let rho_a = partial_trace(rho_ab.matrix(), 2, 2, Subsystem::A)?;
    let op = &kron(&rho_a, &ComplexMatrix::identity(2)) - rho_ab.matrix();
    let min_eig = eig_hermitian(&op)?.min();
    Ok(DistillabilityVerdict {
        distillable: min_eig < -DISTILL_TOL,
        min_eig,
    })
}

/// Trace distance between two Choi states.
pub fn choi_distance(a: &ChoiState, b: &ChoiState) -> Result<f64> {
    trace_distance(a.state().matrix(), b.state().matrix())
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Serialize for KrausChannel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelJson {
            dim: self.dim,
            kraus: self.kraus.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KrausChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ChannelJson::deserialize(d)?;
        let ch = KrausChannel::new(j.kraus).map_err(serde::de::Error::custom)?;
        if ch.dim != j.dim {
            return Err(serde::de::Error::custom(format!(
                "declared dim {} but Kraus operators are {}x{}",
                j.dim, ch.dim, ch.dim
            )));
        }
        Ok(ch)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
struct SubsystemLabels {
    #[serde(rename = "A")]
    a: String,
    #[serde(rename = "B")]
    b: String,
}

impl Default for SubsystemLabels {
    fn default() -> Self {
        Self {
            a: "reference".into(),
            b: "channel_output".into(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ChoiJson {
    #[serde(flatten)]
    matrix: crate::json::MatrixJson,
    channel_dim: usize,
    #[serde(default)]
    labeling: SubsystemLabels,
}

impl Serialize for ChoiState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut matrix = crate::json::MatrixJson::from(self.state.matrix());
        matrix.dim = Some(self.state.dim());
        ChoiJson {
            matrix,
            channel_dim: self.dim,
            labeling: SubsystemLabels::default(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ChoiState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ChoiJson::deserialize(d)?;
        let state = crate::json::density_from_json(j.matrix, crate::linalg::DENSITY_TOL)
            .map_err(serde::de::Error::custom)?;
        ChoiState::new(j.channel_dim, state).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;
    use crate::random::{random_channel, random_density, random_unitary};
    use crate::rng::stream;

    #[test]
    fn identity_channel_leaves_state() {
        let mut rng = stream(51, 0);
        let rho = random_density(3, &mut rng);
        let out = apply_channel(&KrausChannel::identity(3), &rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn fully_depolarizing_outputs_maximally_mixed() {
        let ch = KrausChannel::depolarizing(2, 0.0).unwrap();
        let mut rng = stream(52, 0);
        for _ in 0..5 {
            let out = apply_channel(&ch, &random_density(2, &mut rng)).unwrap();
            assert!(out.matrix().max_abs_diff(DensityOperator::maximally_mixed(2).matrix()) < 1e-14);
        }
    }

    #[test]
    fn depolarizing_matches_definition() {
        let mut rng = stream(53, 0);
        for d in 2..=3 {
            let p = 0.37;
            let ch = KrausChannel::depolarizing(d, p).unwrap();
            let rho = random_density(d, &mut rng);
            let expected = &rho.matrix().scale_real(p) + &ComplexMatrix::identity(d).scale_real((1.0 - p) / d as f64);
            assert!(apply_channel(&ch, &rho).unwrap().matrix().max_abs_diff(&expected) < 1e-14);
        }
        assert!(KrausChannel::depolarizing(2, 1.5).is_err());
    }

    #[test]
    fn amplitude_damping_on_excited_state() {
        let g = 0.3;
        let ch = KrausChannel::amplitude_damping(g).unwrap();
        let out = apply_channel(&ch, &PureState::basis(2, 1).to_density()).unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[g, 1.0 - g])) < 1e-15);
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let k = ComplexMatrix::identity(2).scale_real(0.9);
        assert!(matches!(KrausChannel::new(vec![k]), Err(Error::IncompleteKraus { .. })));
        assert!(KrausChannel::new(vec![]).is_err());
    }

    #[test]
    fn choi_examples() {
        let id = KrausChannel::identity(2).choi_state();
        assert!(id.state().matrix().max_abs_diff(&max_entangled_projector(2)) < 1e-15);

        let full = KrausChannel::depolarizing(2, 0.0).unwrap().choi_state();
        assert!(full.state().matrix().max_abs_diff(DensityOperator::maximally_mixed(4).matrix()) < 1e-15);
        assert!((eig_hermitian(full.state().matrix()).unwrap().max() - 0.25).abs() < 1e-14);

        let p = 0.6;
        let dep = KrausChannel::depolarizing(2, p).unwrap().choi_state();
        let expected = &max_entangled_projector(2).scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
        assert!(dep.state().matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn choi_reference_marginal() {
        let mut rng = stream(54, 0);
        for d in 2..=3 {
            let c = random_channel(d, 2, &mut rng).choi_state();
            assert!(c.reference_marginal_deviation() < 1e-12);
            assert!(ChoiState::new(d, c.state().clone()).is_ok());
        }
        let bad = PureState::basis(4, 0).to_density();
        assert!(matches!(ChoiState::new(2, bad), Err(Error::ChoiMarginal { .. })));
    }

    #[test]
    fn inversion_needs_the_transpose() {
        // Λ(ρ) = d·tr_A[(ρᵀ⊗I)ϱ_Λ] reproduces the Kraus action; dropping the
        // transpose does not for complex inputs.
        let mut rng = stream(55, 0);
        let ch = random_channel(2, 2, &mut rng);
        let c = ch.choi_state();
        let rho = random_density(2, &mut rng);
        let direct = apply_channel(&ch, &rho).unwrap();
        let via = channel_from_choi(&c, &rho).unwrap();
        assert!(via.matrix().max_abs_diff(direct.matrix()) < 1e-12);
        let wrong = {
            let lifted = kron(rho.matrix(), &ComplexMatrix::identity(2));
            partial_trace(&(&lifted * c.state().matrix()), 2, 2, Subsystem::B)
                .unwrap()
                .scale_real(2.0)
        };
        assert!(wrong.max_abs_diff(direct.matrix()) > 1e-3);
    }

    #[test]
    fn choi_inversion_examples() {
        let mut rng = stream(56, 0);
        let rho = random_density(2, &mut rng);
        let id = KrausChannel::identity(2).choi_state();
        assert!(channel_from_choi(&id, &rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-14);
        let p = 0.3;
        let dep = KrausChannel::depolarizing(2, p).unwrap();
        let zero = PureState::basis(2, 0).to_density();
        let expected = ComplexMatrix::from_real_diagonal(&[p + (1.0 - p) / 2.0, (1.0 - p) / 2.0]);
        let got = channel_from_choi(&dep.choi_state(), &zero).unwrap();
        assert!(got.matrix().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn bistochastic_examples() {
        assert!(is_bistochastic(&KrausChannel::identity(2).choi_state(), 1e-9));
        let mut rng = stream(57, 0);
        let u = KrausChannel::unitary(random_unitary(3, &mut rng)).unwrap();
        assert!(is_bistochastic(&u.choi_state(), 1e-9));
        assert!(is_bistochastic(&KrausChannel::bit_flip(0.2).unwrap().choi_state(), 1e-9));
        assert!(!is_bistochastic(&KrausChannel::amplitude_damping(0.5).unwrap().choi_state(), 1e-9));
    }

    #[test]
    fn capacity_examples() {
        let cfg = OptimizerConfig::default();
        let id = two_way_capacity_positive(&KrausChannel::identity(2).choi_state(), &cfg).unwrap();
        assert!(id.positive && (id.lambda_max - 1.0).abs() < 1e-10);
        let full = two_way_capacity_positive(&KrausChannel::depolarizing(2, 0.0).unwrap().choi_state(), &cfg).unwrap();
        assert!(!full.positive && (full.lambda_max - 0.25).abs() < 1e-10);
        for p in [0.2, 0.5] {
            let v = two_way_capacity_positive(&KrausChannel::depolarizing(2, p).unwrap().choi_state(), &cfg).unwrap();
            assert!((v.lambda_max - (1.0 + 3.0 * p) / 4.0).abs() < 1e-10);
            assert_eq!(v.positive, p > 1.0 / 3.0);
        }
        // exactly at threshold λ_max = ½ is not positive
        let at = two_way_capacity_positive(&KrausChannel::depolarizing(2, 1.0 / 3.0).unwrap().choi_state(), &cfg).unwrap();
        assert!(!at.positive);
        assert!(two_way_capacity_positive(&KrausChannel::identity(3).choi_state(), &cfg).is_err());
    }

    #[test]
    fn distillability_examples() {
        let bell = DensityOperator::new(max_entangled_projector(2)).unwrap();
        let v = distillability_operator_test(&bell).unwrap();
        assert!(v.distillable && (v.min_eig + 0.5).abs() < 1e-12);
        let v = distillability_operator_test(&DensityOperator::maximally_mixed(4)).unwrap();
        assert!(!v.distillable && (v.min_eig - 0.25).abs() < 1e-12);
        assert!(distillability_operator_test(&DensityOperator::maximally_mixed(2)).is_err());
    }

    #[test]
    fn channel_and_choi_json() {
        let ch = KrausChannel::amplitude_damping(0.25).unwrap();
        let text = serde_json::to_string(&ch).unwrap();
        let back: KrausChannel = serde_json::from_str(&text).unwrap();
        assert_eq!(back.kraus_ops().len(), 2);
        assert!(back.kraus_ops()[1].max_abs_diff(&ch.kraus_ops()[1]) < 1e-15);

        let c = ch.choi_state();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["channel_dim"], 2);
        assert_eq!(v["dim"], 4);
        assert_eq!(v["labeling"]["A"], "reference");
        let back: ChoiState = serde_json::from_value(v).unwrap();
        assert!(back.state().matrix().max_abs_diff(c.state().matrix()) < 1e-12);

        let bad = r#"{"dim":2,"kraus":[{"rows":2,"cols":2,"re":[1,0,0,0.5]}]}"#;
        assert!(serde_json::from_str::<KrausChannel>(bad).is_err());
    }

    #[test]
    fn exact_channel_tomography() {
        let report = channel_tomography(&KrausChannel::identity(2), 0, 0).unwrap();
        let truth = KrausChannel::identity(2).choi_state();
        assert!(choi_distance(&report.choi(), &truth).unwrap() <= 1e-9);
        assert!(report.reference_marginal_deviation < 1e-9);
    }
}
