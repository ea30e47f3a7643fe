//! Mixed-state quantum Fisher information engines.
//!
//! Three routes to the same quantity live here:
//!
//! 1. [`qfi_spectral`] — the full spectral sum
//!    F_Q = Σ_{m,n} 2|⟨λ_m|∂ρ/∂φ|λ_n⟩|² / (λ_m + λ_n)
//!    over eigenpairs of ρ with λ_m + λ_n above a rank threshold. Needs only
//!    ρ and its derivative, so it serves as the production oracle.
//! 2. [`qfi_three_term`] — the decomposition over the nonzero-weight subset:
//!    Σ (λ_i′)²/λ_i  +  Σ λ_i·F_{Q,i}  -  Σ_{i≠j} 8λ_iλ_j |⟨λ_i′|λ_j⟩|²/(λ_i+λ_j),
//!    with F_{Q,i} = 4(⟨λ_i′|λ_i′⟩ - |⟨λ_i′|λ_i⟩|²). Used where eigenvector
//!    trajectories are analytic; generic numerical eigenvector derivatives
//!    are ill-conditioned near degeneracies.
//! 3. [`diagonalize_nonorthogonal`] — the generalized eigenproblem
//!    ρc = λAc over a non-orthogonal basis with Gram matrix A, solved by
//!    Cholesky reduction instead of forming A⁻¹ρ.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
// Shadowed by inherent f64 methods whenever a build links std (e.g. the
// test harness); required for the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::closed_forms;
use crate::fock::{self, BranchBasis, BranchKet, FockError, LabeledDensityMatrix};
use crate::linalg::{self, CMatrix, LinalgError};
use crate::model::{EcsSpec, LossChannel};

/// Rank threshold: eigenvalues below this fraction of the trace count as
/// zero in the spectral sum and the nonzero-subset selection.
pub const DEFAULT_RANK_THRESHOLD_SCALE: f64 = 1e-12;

/// Eigenvalues this far below zero are treated as roundoff and clamped;
/// anything lower fails the positive-semidefiniteness check.
const NEGATIVE_EIGENVALUE_FLOOR: f64 = -1e-10;

/// Orthonormality and trajectory-consistency tolerance for supplied
/// eigenvector trajectories.
const TRAJECTORY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum QfiError {
    #[error("density matrix carries no φ-derivative")]
    MissingDerivative,
    #[error("density matrix is not positive semidefinite (eigenvalue {value:e})")]
    NotPositiveSemidefinite { value: f64 },
    #[error("trajectory weight {value:e} at index {index} is not positive")]
    ZeroWeight { index: usize, value: f64 },
    #[error("trajectory vectors are not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("trajectory derivatives violate ⟨λ_i|λ_j'⟩ + ⟨λ_i'|λ_j⟩ = 0 (defect {defect:e})")]
    InconsistentTrajectory { defect: f64 },
    #[error("trajectory field lengths disagree")]
    MismatchedTrajectory,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Total QFI together with one of the two published decompositions and the
/// phase-precision bound δφ_min = 1/√F_Q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiBreakdown {
    total: f64,
    decomposition: QfiDecomposition,
    delta_phi_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QfiDecomposition {
    /// total = classical + heisenberg
    ClassicalHeisenberg { classical: f64, heisenberg: f64 },
    /// total = classical_fisher + weighted_pure - coupling
    ThreeTerm {
        classical_fisher: f64,
        weighted_pure: f64,
        coupling: f64,
    },
}

impl QfiBreakdown {
    pub fn from_classical_heisenberg(classical: f64, heisenberg: f64) -> Self {
        Self::assemble(
            classical + heisenberg,
            QfiDecomposition::ClassicalHeisenberg {
                classical,
                heisenberg,
            },
        )
    }

    pub fn from_three_term(classical_fisher: f64, weighted_pure: f64, coupling: f64) -> Self {
        Self::assemble(
            classical_fisher + weighted_pure - coupling,
            QfiDecomposition::ThreeTerm {
                classical_fisher,
                weighted_pure,
                coupling,
            },
        )
    }

    fn assemble(total: f64, decomposition: QfiDecomposition) -> Self {
        let delta_phi_min = if total > 0.0 {
            1.0 / total.sqrt()
        } else {
            f64::INFINITY
        };
        Self {
            total,
            decomposition,
            delta_phi_min,
        }
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.total
    }

    #[inline]
    pub fn decomposition(&self) -> &QfiDecomposition {
        &self.decomposition
    }

    /// δφ_min = 1/√F_Q; +∞ when the state carries no phase information.
    #[inline]
    pub fn delta_phi_min(&self) -> f64 {
        self.delta_phi_min
    }
}

/// Eigendecomposition of a density matrix with a rank threshold separating
/// genuine weights from numerical zeros.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenvalues in descending order, roundoff negatives clamped to 0.
    pub eigenvalues: Vec<f64>,
    /// Matching eigenvector columns over the labeled basis.
    pub eigenvectors: CMatrix,
    /// Weights at or below this value count as zero.
    pub rank_threshold: f64,
}

impl EigenSystem {
    pub fn of_density_matrix(rho: &LabeledDensityMatrix) -> Result<Self, QfiError> {
        Self::with_threshold_scale(rho, DEFAULT_RANK_THRESHOLD_SCALE)
    }

    pub fn with_threshold_scale(
        rho: &LabeledDensityMatrix,
        threshold_scale: f64,
    ) -> Result<Self, QfiError> {
        let eig = linalg::hermitian_eigen(rho.rho())?;
        let trace = rho.trace();
        let eigenvalues = clamp_spectrum(eig.values, trace)?;
        Ok(Self {
            eigenvalues,
            eigenvectors: eig.vectors,
            rank_threshold: threshold_scale * trace.abs(),
        })
    }

    pub fn nonzero_indices(&self) -> Vec<usize> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > self.rank_threshold)
            .map(|(i, _)| i)
            .collect()
    }
}

fn clamp_spectrum(values: Vec<f64>, trace: f64) -> Result<Vec<f64>, QfiError> {
    let floor = NEGATIVE_EIGENVALUE_FLOOR * trace.abs().max(1.0);
    values
        .into_iter()
        .map(|v| {
            if v < floor {
                Err(QfiError::NotPositiveSemidefinite { value: v })
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect()
}

/// QFI from the full spectral formula at the default rank threshold.
pub fn qfi_spectral(rho: &LabeledDensityMatrix) -> Result<f64, QfiError> {
    qfi_spectral_with_threshold(rho, DEFAULT_RANK_THRESHOLD_SCALE)
}

/// QFI from the full spectral formula, summing ordered eigenpairs whose
/// combined weight exceeds `threshold_scale · trace(ρ)`.
pub fn qfi_spectral_with_threshold(
    rho: &LabeledDensityMatrix,
    threshold_scale: f64,
) -> Result<f64, QfiError> {
    let drho = rho.drho_dphi().ok_or(QfiError::MissingDerivative)?;
    let system = EigenSystem::with_threshold_scale(rho, threshold_scale)?;
    let dim = system.eigenvectors.dim();
    let eps = system.rank_threshold;
    let nonzero = system.nonzero_indices();

    // ⟨λ_m|ρ'|λ_n⟩ for every nonzero m against all n.
    let image = drho.mul(&system.eigenvectors);
    let columns: Vec<Vec<Complex64>> = (0..dim).map(|j| system.eigenvectors.column(j)).collect();

    let mut total = 0.0;
    for &m in &nonzero {
        let vm = &columns[m];
        for n in 0..dim {
            let mut overlap = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                overlap += vm[k].conj() * image[(k, n)];
            }
            let weight_sq = overlap.norm_sqr();
            if system.eigenvalues[n] > eps {
                total += 2.0 * weight_sq / (system.eigenvalues[m] + system.eigenvalues[n]);
            } else {
                // The mirrored ordered pair (n, m) is not enumerated.
                total += 4.0 * weight_sq / system.eigenvalues[m];
            }
        }
    }
    Ok(total)
}

/// Eigenvalue/eigenvector trajectory λ_i(φ), |λ_i(φ)⟩ restricted to the
/// nonzero-weight subset, with derivatives in φ.
#[derive(Debug, Clone)]
pub struct EigenTrajectory {
    pub weights: Vec<f64>,
    pub weight_derivatives: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
    pub vector_derivatives: Vec<Vec<Complex64>>,
}

/// QFI from the three-term nonzero-subset decomposition.
///
/// The supplied trajectory must be orthonormal and differentiable:
/// ⟨λ_i|λ_j⟩ = δ_ij and ⟨λ_i|λ_j′⟩ + ⟨λ_i′|λ_j⟩ = 0 within 1e-8.
pub fn qfi_three_term(trajectory: &EigenTrajectory) -> Result<QfiBreakdown, QfiError> {
    let k = trajectory.weights.len();
    if trajectory.weight_derivatives.len() != k
        || trajectory.vectors.len() != k
        || trajectory.vector_derivatives.len() != k
        || trajectory
            .vectors
            .iter()
            .chain(&trajectory.vector_derivatives)
            .any(|v| v.len() != trajectory.vectors[0].len())
    {
        return Err(QfiError::MismatchedTrajectory);
    }
    for (index, &weight) in trajectory.weights.iter().enumerate() {
        if weight.is_nan() || weight <= 0.0 {
            return Err(QfiError::ZeroWeight {
                index,
                value: weight,
            });
        }
    }
    for i in 0..k {
        for j in 0..k {
            let gram = linalg::inner(&trajectory.vectors[i], &trajectory.vectors[j]);
            let expected = if i == j { 1.0 } else { 0.0 };
            let defect = (gram - expected).norm();
            if defect > TRAJECTORY_TOL {
                return Err(QfiError::NotOrthonormal { defect });
            }
            let drift = linalg::inner(&trajectory.vectors[i], &trajectory.vector_derivatives[j])
                + linalg::inner(&trajectory.vector_derivatives[i], &trajectory.vectors[j]);
            if drift.norm() > TRAJECTORY_TOL {
                return Err(QfiError::InconsistentTrajectory {
                    defect: drift.norm(),
                });
            }
        }
    }

    let classical_fisher: f64 = trajectory
        .weights
        .iter()
        .zip(&trajectory.weight_derivatives)
        .map(|(&w, &dw)| dw * dw / w)
        .sum();

    let weighted_pure: f64 = (0..k)
        .map(|i| {
            let dv = &trajectory.vector_derivatives[i];
            let pure = 4.0
                * (linalg::inner(dv, dv).re
                    - linalg::inner(dv, &trajectory.vectors[i]).norm_sqr());
            trajectory.weights[i] * pure
        })
        .sum();

    let mut coupling = 0.0;
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            let wi = trajectory.weights[i];
            let wj = trajectory.weights[j];
            let overlap =
                linalg::inner(&trajectory.vector_derivatives[i], &trajectory.vectors[j]);
            coupling += 8.0 * wi * wj / (wi + wj) * overlap.norm_sqr();
        }
    }

    Ok(QfiBreakdown::from_three_term(
        classical_fisher,
        weighted_pure,
        coupling,
    ))
}

/// Solution of the generalized eigenproblem ρc = λAc over a non-orthogonal
/// basis with Gram matrix A.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    /// Eigenvalues in descending order; real by construction.
    pub eigenvalues: Vec<f64>,
    /// Coefficient columns, normalized to c†Ac = 1.
    pub coefficients: CMatrix,
}

/// Solves ρc = λAc through the Cholesky factor A = LL†: the similar
/// Hermitian problem (L⁻¹ρL⁻†)y = λy is diagonalized and c = L⁻†y
/// recovered, which keeps the eigenvalues exactly real and lands the
/// coefficients A-normalized.
pub fn diagonalize_nonorthogonal(
    overlap: &CMatrix,
    rho_in_basis: &CMatrix,
) -> Result<GeneralizedEigen, QfiError> {
    if overlap.dim() != rho_in_basis.dim() {
        return Err(QfiError::Linalg(LinalgError::DimensionMismatch {
            left: overlap.dim(),
            right: rho_in_basis.dim(),
        }));
    }
    let l = linalg::cholesky(overlap)?;
    let half = linalg::solve_lower(&l, rho_in_basis);
    let reduced = linalg::solve_lower(&l, &half.adjoint()).adjoint();
    let eig = linalg::hermitian_eigen(&reduced)?;
    let coefficients = linalg::solve_upper_adjoint(&l, &eig.vectors);
    Ok(GeneralizedEigen {
        eigenvalues: eig.values,
        coefficients,
    })
}

/// Gram matrix A_ij = ⟨Φ_i|Φ_j⟩ and projected density matrix
/// ρ_ij = ⟨Φ_i|ρ|Φ_j⟩ of the lossy ECS over its two sensor states
/// Φ₁ = |√Tα⟩₁, Φ₂ = |√Tα·e^{iφ}⟩₂. The phase cancels in every entry.
pub fn ecs_sensor_overlap_matrices(spec: &EcsSpec, channel: LossChannel) -> (CMatrix, CMatrix) {
    let a = spec.alpha_sq();
    let nsq = spec.norm_sq();
    let s = (-channel.transmission() * a).exp();
    let x = (-channel.loss() * a).exp();

    let mut gram = CMatrix::identity(2);
    gram[(0, 1)] = Complex64::new(s, 0.0);
    gram[(1, 0)] = Complex64::new(s, 0.0);

    let diag = nsq * (1.0 + s * s + 2.0 * x * s);
    let off = nsq * (2.0 * s + x * (1.0 + s * s));
    let mut rho = CMatrix::zeros(2);
    rho[(0, 0)] = Complex64::new(diag, 0.0);
    rho[(1, 1)] = Complex64::new(diag, 0.0);
    rho[(0, 1)] = Complex64::new(off, 0.0);
    rho[(1, 0)] = Complex64::new(off, 0.0);
    (gram, rho)
}

/// Analytic eigensystem trajectory of the lossy ECS: φ-independent weights
/// λ± and eigenvectors |λ±(φ)⟩ = η±·(±|√Tα⟩₁ + |√Tα·e^{iφ}⟩₂) with their
/// exact derivatives, expanded over the branch basis. Weights at or below
/// the rank threshold are dropped (λ₋ vanishes for R = 0 or T = 0).
pub fn ecs_analytic_eigensystem(
    spec: &EcsSpec,
    channel: LossChannel,
    phi: f64,
    n_max: usize,
) -> Result<EigenTrajectory, QfiError> {
    let data = closed_forms::ecs_spectral_data(spec, channel);
    let basis = BranchBasis::new(n_max);
    let (d1, d2) =
        fock::lossy_branch_amplitudes(channel.transmission() * spec.alpha_sq(), phi, n_max)?;

    let eps = DEFAULT_RANK_THRESHOLD_SCALE * (data.lambda_plus + data.lambda_minus);
    let mut trajectory = EigenTrajectory {
        weights: Vec::new(),
        weight_derivatives: Vec::new(),
        vectors: Vec::new(),
        vector_derivatives: Vec::new(),
    };
    for (sign, weight, eta_sq) in [
        (1.0, data.lambda_plus, data.eta_plus_sq),
        (-1.0, data.lambda_minus, data.eta_minus_sq),
    ] {
        if weight <= eps {
            continue;
        }
        let eta = eta_sq.sqrt();
        let mut vector = vec![Complex64::new(0.0, 0.0); basis.dim()];
        let mut derivative = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for n in 0..=n_max {
            vector[basis.index_of(BranchKet::ModeOne(n))] +=
                Complex64::new(sign * eta * d1[n], 0.0);
            vector[basis.index_of(BranchKet::ModeTwo(n))] += eta * d2[n];
            derivative[basis.index_of(BranchKet::ModeTwo(n))] +=
                Complex64::new(0.0, eta * n as f64) * d2[n];
        }
        trajectory.weights.push(weight);
        trajectory.weight_derivatives.push(0.0);
        trajectory.vectors.push(vector);
        trajectory.vector_derivatives.push(derivative);
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{ecs_lossy_qfi, ecs_spectral_data, noon_qfi};
    use crate::fock::{build_ecs_rho_analytic, build_noon_rho, choose_cutoff, DEFAULT_PHI};
    use crate::model::{ecs_from_alpha_sq, NoonSpec};
    use approx::assert_relative_eq;

    fn channel(t: f64) -> LossChannel {
        LossChannel::from_transmission(t).unwrap()
    }

    #[test]
    fn breakdown_assembly() {
        let b = QfiBreakdown::from_classical_heisenberg(3.0, 1.0);
        assert_eq!(b.total(), 4.0);
        assert_eq!(b.delta_phi_min(), 0.5);
        let t = QfiBreakdown::from_three_term(1.0, 4.0, 2.0);
        assert_eq!(t.total(), 3.0);
        let dead = QfiBreakdown::from_classical_heisenberg(0.0, 0.0);
        assert!(dead.delta_phi_min().is_infinite());
    }

    #[test]
    fn spectral_reduces_to_pure_formula_on_rank_one_input() {
        let spec = ecs_from_alpha_sq(4.0).unwrap();
        let n_max = choose_cutoff(4.0, 1e-13);
        let rho = build_ecs_rho_analytic(&spec, channel(1.0), DEFAULT_PHI, n_max).unwrap();
        let f = qfi_spectral(&rho).unwrap();
        assert_relative_eq!(f, crate::closed_forms::ecs_lossless_qfi(&spec), max_relative = 1e-10);
    }

    #[test]
    fn spectral_matches_closed_form_for_lossy_ecs() {
        let spec = ecs_from_alpha_sq(4.0).unwrap();
        let n_max = choose_cutoff(4.0, 1e-12);
        let rho = build_ecs_rho_analytic(&spec, channel(0.9), DEFAULT_PHI, n_max).unwrap();
        let f = qfi_spectral(&rho).unwrap();
        let closed = ecs_lossy_qfi(&spec, channel(0.9)).total();
        assert_relative_eq!(f, closed, max_relative = 1e-8);
    }

    #[test]
    fn spectral_matches_noon_power_law() {
        let spec = NoonSpec::new(4).unwrap();
        let rho = build_noon_rho(&spec, channel(0.9), DEFAULT_PHI);
        let f = qfi_spectral(&rho).unwrap();
        assert_relative_eq!(f, 16.0 * 0.9f64.powi(4), max_relative = 1e-10);
        assert_relative_eq!(f, noon_qfi(&spec, channel(0.9)), max_relative = 1e-10);
    }

    #[test]
    fn spectral_requires_a_derivative() {
        let spec = ecs_from_alpha_sq(1.0).unwrap();
        let n_max = choose_cutoff(1.0, 1e-12);
        let basis = BranchBasis::new(n_max);
        let state = fock::build_noon_superposition(
            &fock::ecs_superposition(&spec, n_max),
            0.0,
            crate::model::GeneratorKind::ModeTwoNumber,
            basis,
        )
        .unwrap();
        let rho = fock::apply_loss_channel(&state, channel(0.9));
        assert!(matches!(
            qfi_spectral(&rho),
            Err(QfiError::MissingDerivative)
        ));
    }

    #[test]
    fn spectral_is_insensitive_to_the_rank_threshold() {
        let spec = ecs_from_alpha_sq(9.0).unwrap();
        let n_max = choose_cutoff(9.0, 1e-12);
        let rho = build_ecs_rho_analytic(&spec, channel(0.8), DEFAULT_PHI, n_max).unwrap();
        let reference = qfi_spectral_with_threshold(&rho, 1e-12).unwrap();
        for scale in [1e-14, 1e-13, 1e-11, 1e-10] {
            let f = qfi_spectral_with_threshold(&rho, scale).unwrap();
            assert_relative_eq!(f, reference, max_relative = 1e-9);
        }
    }

    #[test]
    fn spectral_is_phase_independent() {
        let spec = ecs_from_alpha_sq(4.0).unwrap();
        let n_max = choose_cutoff(4.0, 1e-12);
        let noon = NoonSpec::new(5).unwrap();
        let mut ecs_values = Vec::new();
        let mut noon_values = Vec::new();
        for phi in [0.3, 0.7, 1.1, 2.9] {
            let rho = build_ecs_rho_analytic(&spec, channel(0.9), phi, n_max).unwrap();
            ecs_values.push(qfi_spectral(&rho).unwrap());
            noon_values.push(qfi_spectral(&build_noon_rho(&noon, channel(0.9), phi)).unwrap());
        }
        for values in [ecs_values, noon_values] {
            for pair in values.windows(2) {
                assert_relative_eq!(pair[0], pair[1], max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn eigensystem_invariants() {
        let spec = ecs_from_alpha_sq(4.0).unwrap();
        let n_max = choose_cutoff(4.0, 1e-12);
        let rho = build_ecs_rho_analytic(&spec, channel(0.9), DEFAULT_PHI, n_max).unwrap();
        let system = EigenSystem::of_density_matrix(&rho).unwrap();
        let total: f64 = system.eigenvalues.iter().sum();
        assert!((total - rho.trace()).abs() < 1e-10);
        assert!(system.eigenvalues.iter().all(|&v| v >= 0.0));
        let gram = system.eigenvectors.adjoint().mul(&system.eigenvectors);
        assert!(gram.max_abs_diff(&CMatrix::identity(gram.dim())) < 1e-10);
        // exactly two weights survive the rank threshold
        assert_eq!(system.nonzero_indices().len(), 2);
    }

    #[test]
    fn analytic_eigensystem_matches_published_inner_products() {
        let spec = ecs_from_alpha_sq(4.0).unwrap();
        let t = 0.9;
        let n_max = choose_cutoff(4.0, 1e-13);
        let trajectory =
            ecs_analytic_eigensystem(&spec, channel(t), DEFAULT_PHI, n_max).unwrap();
        assert_eq!(trajectory.weights.len(), 2);
        let data = ecs_spectral_data(&spec, channel(t));
        let a_t = 4.0 * t;
        for (i, eta_sq) in [(0, data.eta_plus_sq), (1, data.eta_minus_sq)] {
            // ⟨λ|λ'⟩ = i·η²·|α|²T
            let autocorr = linalg::inner(&trajectory.vectors[i], &trajectory.vector_derivatives[i]);
            assert!((autocorr.re).abs() < 1e-12);
            assert_relative_eq!(autocorr.im, eta_sq * a_t, max_relative = 1e-10);
            // ⟨λ'|λ'⟩ = η²·|α|²T·(1 + |α|²T)
            let derivative_norm =
                linalg::inner(&trajectory.vector_derivatives[i], &trajectory.vector_derivatives[i]);
            assert_relative_eq!(
                derivative_norm.re,
                eta_sq * a_t * (1.0 + a_t),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn analytic_eigensystem_drops_the_vanishing_weight() {
        let spec = ecs_from_alpha_sq(4.0).unwrap();
        let n_max = choose_cutoff(4.0, 1e-13);
        let trajectory =
            ecs_analytic_eigensystem(&spec, channel(1.0), DEFAULT_PHI, n_max).unwrap();
        assert_eq!(trajectory.weights.len(), 1);
        assert_relative_eq!(trajectory.weights[0], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn three_term_agrees_with_spectral_oracle() {
        let spec = ecs_from_alpha_sq(4.0).unwrap();
        let t = 0.9;
        let n_max = choose_cutoff(4.0, 1e-12);
        let trajectory =
            ecs_analytic_eigensystem(&spec, channel(t), DEFAULT_PHI, n_max).unwrap();
        let breakdown = qfi_three_term(&trajectory).unwrap();
        match breakdown.decomposition() {
            QfiDecomposition::ThreeTerm {
                classical_fisher, ..
            } => assert_eq!(*classical_fisher, 0.0),
            _ => unreachable!(),
        }
        let rho = build_ecs_rho_analytic(&spec, channel(t), DEFAULT_PHI, n_max).unwrap();
        let spectral = qfi_spectral(&rho).unwrap();
        assert_relative_eq!(breakdown.total(), spectral, max_relative = 1e-8);
    }

    #[test]
    fn three_term_on_a_single_pure_eigenstate() {
        let spec = ecs_from_alpha_sq(4.0).unwrap();
        let n_max = choose_cutoff(4.0, 1e-13);
        let trajectory =
            ecs_analytic_eigensystem(&spec, channel(1.0), DEFAULT_PHI, n_max).unwrap();
        let breakdown = qfi_three_term(&trajectory).unwrap();
        match breakdown.decomposition() {
            QfiDecomposition::ThreeTerm {
                coupling,
                weighted_pure,
                ..
            } => {
                assert_eq!(*coupling, 0.0);
                assert_relative_eq!(breakdown.total(), *weighted_pure, max_relative = 1e-14);
            }
            _ => unreachable!(),
        }
        assert_relative_eq!(
            breakdown.total(),
            crate::closed_forms::ecs_lossless_qfi(&spec),
            max_relative = 1e-10
        );
    }

    #[test]
    fn three_term_rejects_bad_trajectories() {
        let unit = vec![Complex64::new(1.0, 0.0)];
        let zero = vec![Complex64::new(0.0, 0.0)];
        let dead = EigenTrajectory {
            weights: vec![0.0],
            weight_derivatives: vec![0.0],
            vectors: vec![unit.clone()],
            vector_derivatives: vec![zero.clone()],
        };
        assert!(matches!(
            qfi_three_term(&dead),
            Err(QfiError::ZeroWeight { .. })
        ));

        let skewed = EigenTrajectory {
            weights: vec![0.5],
            weight_derivatives: vec![0.0],
            vectors: vec![vec![Complex64::new(0.7, 0.0)]],
            vector_derivatives: vec![zero],
        };
        assert!(matches!(
            qfi_three_term(&skewed),
            Err(QfiError::NotOrthonormal { .. })
        ));

        let drifting = EigenTrajectory {
            weights: vec![1.0],
            weight_derivatives: vec![0.0],
            vectors: vec![unit.clone()],
            vector_derivatives: vec![unit],
        };
        assert!(matches!(
            qfi_three_term(&drifting),
            Err(QfiError::InconsistentTrajectory { .. })
        ));
    }

    #[test]
    fn generalized_eigen_reduces_to_standard_for_identity_gram() {
        let mut rho = CMatrix::zeros(2);
        rho[(0, 0)] = Complex64::new(0.7, 0.0);
        rho[(1, 1)] = Complex64::new(0.3, 0.0);
        rho[(0, 1)] = Complex64::new(0.1, 0.05);
        rho[(1, 0)] = Complex64::new(0.1, -0.05);
        let plain = linalg::hermitian_eigen(&rho).unwrap();
        let general = diagonalize_nonorthogonal(&CMatrix::identity(2), &rho).unwrap();
        for (a, b) in plain.values.iter().zip(&general.eigenvalues) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn generalized_eigen_solves_the_ecs_sensor_problem() {
        let spec = ecs_from_alpha_sq(4.0).unwrap();
        let ch = channel(0.9);
        let (gram, rho) = ecs_sensor_overlap_matrices(&spec, ch);
        let solution = diagonalize_nonorthogonal(&gram, &rho).unwrap();
        let data = ecs_spectral_data(&spec, ch);
        assert_relative_eq!(solution.eigenvalues[0], data.lambda_plus, max_relative = 1e-12);
        assert_relative_eq!(solution.eigenvalues[1], data.lambda_minus, max_relative = 1e-12);

        // amplitudes obey c₁ = ±c₂
        for j in 0..2 {
            let c1 = solution.coefficients[(0, j)];
            let c2 = solution.coefficients[(1, j)];
            let ratio = c1 / c2;
            assert!((ratio.norm() - 1.0).abs() < 1e-10);
            assert!(ratio.im.abs() < 1e-10);
        }
        // and are Gram-normalized
        let c0 = solution.coefficients.column(0);
        let norm = linalg::inner(&c0, &gram.mat_vec(&c0)).re;
        assert_relative_eq!(norm, 1.0, max_relative = 1e-12);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn reduced_matrix_matches_the_explicit_two_level_form() {
        // A⁻¹ρ for the ECS sensor pair has the explicit entries
        // 𝒩²(1 + e^(-a)) on the diagonal and 𝒩²(e^(-Ta) + e^(-Ra)) off it.
        let spec = ecs_from_alpha_sq(4.0).unwrap();
        let ch = channel(0.9);
        let (gram, rho) = ecs_sensor_overlap_matrices(&spec, ch);
        let s = gram[(0, 1)].re;
        let det = 1.0 - s * s;
        let inv = |i: usize, j: usize| {
            let sign = if i == j { 1.0 } else { -1.0 };
            let val = if i == j { 1.0 } else { s };
            sign * val / det
        };
        let mut reduced = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    reduced[i][j] += inv(i, k) * rho[(k, j)].re;
                }
            }
        }
        let a = spec.alpha_sq();
        let nsq = spec.norm_sq();
        let expected_diag = nsq * (1.0 + (-a).exp());
        let expected_off =
            nsq * ((-ch.transmission() * a).exp() + (-ch.loss() * a).exp());
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { expected_diag } else { expected_off };
                assert!((reduced[i][j] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generalized_eigen_rejects_degenerate_gram() {
        let mut gram = CMatrix::identity(2);
        gram[(0, 1)] = Complex64::new(1.0, 0.0);
        gram[(1, 0)] = Complex64::new(1.0, 0.0);
        let rho = CMatrix::identity(2);
        assert!(diagonalize_nonorthogonal(&gram, &rho).is_err());
    }
}
