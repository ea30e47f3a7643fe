//! Truncated Fock-space numerics: coherent amplitudes, probe states,
//! photon-loss channels in Kraus form, and lossy density matrices with
//! analytic φ-derivatives.
//!
//! Every state handled here lives in the span of the "branch basis"
//! { |n⟩₁|0⟩₂ } ∪ { |0⟩₁|m⟩₂ }: all photons sit in one mode while the other
//! is in vacuum. The double vacuum |0⟩₁|0⟩₂ appears once, so a cutoff of
//! n_max photons gives dimension 2·n_max + 1 instead of (n_max + 1)².
//! Photon loss only removes photons from the occupied mode, so the channel
//! preserves this subspace.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
// Shadowed by inherent f64 methods whenever a build links std (e.g. the
// test harness); required for the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::linalg::CMatrix;
use crate::model::{EcsSpec, GeneratorKind, LossChannel, NoonSpec, NoonSuperposition};
use crate::specfun::{ln_binomial, ln_factorial};

/// Default bound on the coherent-amplitude probability mass allowed beyond
/// the Fock cutoff.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Default phase at which density matrices are evaluated in tests and the
/// CLI: a non-special angle, away from the symmetry points 0 and π.
pub const DEFAULT_PHI: f64 = 0.7;

/// Builders reject cutoffs that lose more than this fraction of the state
/// norm; looser truncations produce matrices that are not meaningfully
/// density matrices any more.
const MAX_TRUNCATION_DEFICIT: f64 = 1e-2;

#[derive(Debug, Error, PartialEq)]
pub enum FockError {
    #[error("coefficient list needs {needed} Fock components but the cutoff allows {available}")]
    CoefficientsExceedCutoff { needed: usize, available: usize },
    #[error("cutoff too small: truncated norm deficit {deficit:e}")]
    CutoffTooSmall { deficit: f64 },
    #[error("state has zero norm after assembly")]
    ZeroNorm,
}

/// A basis ket of the branch basis. `ModeOne(0)` is the shared double
/// vacuum; `ModeTwo(0)` is normalized away and never produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchKet {
    /// |n⟩₁|0⟩₂
    ModeOne(usize),
    /// |0⟩₁|n⟩₂
    ModeTwo(usize),
}

impl BranchKet {
    /// Total photon number of the ket.
    #[inline]
    pub fn photon_number(&self) -> usize {
        match *self {
            BranchKet::ModeOne(n) | BranchKet::ModeTwo(n) => n,
        }
    }

    /// Eigenvalue of the phase-shift generator on this ket.
    #[inline]
    pub fn generator_eigenvalue(&self, generator: GeneratorKind) -> f64 {
        match (generator, *self) {
            (GeneratorKind::ModeTwoNumber, BranchKet::ModeOne(_)) => 0.0,
            (GeneratorKind::ModeTwoNumber, BranchKet::ModeTwo(n)) => n as f64,
            (GeneratorKind::HalfDifference, BranchKet::ModeOne(n)) => -(n as f64) / 2.0,
            (GeneratorKind::HalfDifference, BranchKet::ModeTwo(n)) => n as f64 / 2.0,
        }
    }
}

/// The branch basis up to a photon cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchBasis {
    n_max: usize,
}

impl BranchBasis {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    #[inline]
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    #[inline]
    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }

    /// Index layout: |n⟩₁ at n for n = 0..=n_max, then |m⟩₂ at n_max + m
    /// for m = 1..=n_max.
    #[inline]
    pub fn index_of(&self, ket: BranchKet) -> usize {
        match ket {
            BranchKet::ModeOne(n) => {
                debug_assert!(n <= self.n_max);
                n
            }
            BranchKet::ModeTwo(0) => 0,
            BranchKet::ModeTwo(m) => {
                debug_assert!(m <= self.n_max);
                self.n_max + m
            }
        }
    }

    #[inline]
    pub fn label(&self, index: usize) -> BranchKet {
        debug_assert!(index < self.dim());
        if index <= self.n_max {
            BranchKet::ModeOne(index)
        } else {
            BranchKet::ModeTwo(index - self.n_max)
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = BranchKet> + '_ {
        (0..self.dim()).map(move |i| self.label(i))
    }

    /// Per-mode occupations (n₁, n₂) of a basis index.
    #[inline]
    fn occupations(&self, index: usize) -> (usize, usize) {
        match self.label(index) {
            BranchKet::ModeOne(n) => (n, 0),
            BranchKet::ModeTwo(m) => (0, m),
        }
    }

    #[inline]
    fn index_of_occupations(&self, n1: usize, n2: usize) -> usize {
        debug_assert!(n1 == 0 || n2 == 0);
        if n2 == 0 {
            n1
        } else {
            self.n_max + n2
        }
    }
}

/// A normalized pure state expanded over a [`BranchBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    basis: BranchBasis,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    #[inline]
    pub fn basis(&self) -> BranchBasis {
        self.basis
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨n̂ᵏ⟩ over the total photon number.
    pub fn photon_moment(&self, power: u32) -> f64 {
        let norm = self.norm_sqr();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let n = self.basis.label(i).photon_number() as f64;
                n.powi(power as i32) * a.norm_sqr()
            })
            .sum::<f64>()
            / norm
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.photon_moment(1)
    }
}

/// A density matrix over a labeled branch basis, optionally carrying the
/// analytic derivative ∂ρ/∂φ.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDensityMatrix {
    basis: BranchBasis,
    rho: CMatrix,
    drho_dphi: Option<CMatrix>,
}

impl LabeledDensityMatrix {
    pub(crate) fn new(basis: BranchBasis, rho: CMatrix, drho_dphi: Option<CMatrix>) -> Self {
        Self {
            basis,
            rho,
            drho_dphi,
        }
    }

    #[inline]
    pub fn basis(&self) -> BranchBasis {
        self.basis
    }

    #[inline]
    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    #[inline]
    pub fn drho_dphi(&self) -> Option<&CMatrix> {
        self.drho_dphi.as_ref()
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }
}

/// Coherent-state amplitude d_n(α) = ⟨n|α⟩ = αⁿ·e^(-|α|²/2)/√(n!),
/// evaluated in log space so large n and |α|² do not overflow.
pub fn coherent_amplitude(n: usize, alpha: Complex64) -> Complex64 {
    let r_sq = alpha.norm_sqr();
    if r_sq == 0.0 {
        return if n == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let ln_mag = 0.5 * (n as f64) * r_sq.ln() - 0.5 * r_sq - 0.5 * ln_factorial(n as u32);
    Complex64::from_polar(ln_mag.exp(), n as f64 * alpha.arg())
}

/// Smallest cutoff n_max whose Poisson tail Σ_{n > n_max} |d_n(α)|² stays
/// below `tail_tol`, capped at |α|² + 10·√|α|² + 20.
pub fn choose_cutoff(alpha_sq: f64, tail_tol: f64) -> usize {
    assert!(alpha_sq >= 0.0, "|α|² must be non-negative");
    assert!(
        tail_tol > 0.0 && tail_tol < 1.0,
        "tail tolerance must lie in (0, 1)"
    );
    if alpha_sq == 0.0 {
        return 0;
    }
    let cap = (alpha_sq + 10.0 * alpha_sq.sqrt() + 20.0).ceil() as usize;
    let ln_lambda = alpha_sq.ln();
    let mut cumulative = 0.0;
    for n in 0..=cap {
        cumulative += (-alpha_sq + n as f64 * ln_lambda - ln_factorial(n as u32)).exp();
        if 1.0 - cumulative <= tail_tol {
            return n;
        }
    }
    cap
}

/// Assembles Σ c_n·(|n⟩₁ + |n⟩₂)/√2 at phase φ, applying the generator's
/// phase to each component, and normalizes the result.
///
/// The n = 0 component of both branches is the same double vacuum, so the
/// raw assembly can leave Σ|amplitude|² ≠ 1; renormalizing keeps the
/// returned state physical. For coefficient lists without a vacuum
/// component this is a no-op.
pub fn build_noon_superposition(
    superposition: &NoonSuperposition,
    phi: f64,
    generator: GeneratorKind,
    basis: BranchBasis,
) -> Result<PureState, FockError> {
    let coefficients = superposition.coefficients();
    if coefficients.len() > basis.n_max() + 1 {
        return Err(FockError::CoefficientsExceedCutoff {
            needed: coefficients.len(),
            available: basis.n_max() + 1,
        });
    }
    let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for (n, &c) in coefficients.iter().enumerate() {
        for ket in [BranchKet::ModeOne(n), BranchKet::ModeTwo(n)] {
            let g = ket.generator_eigenvalue(generator);
            let phase = Complex64::from_polar(1.0, phi * g);
            amplitudes[basis.index_of(ket)] += c * phase * inv_sqrt2;
        }
    }
    let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if norm_sq <= 0.0 {
        return Err(FockError::ZeroNorm);
    }
    let scale = 1.0 / norm_sq.sqrt();
    for a in &mut amplitudes {
        *a *= scale;
    }
    Ok(PureState { basis, amplitudes })
}

/// Coefficients c_n ∝ d_n(α) that assemble into the entangled coherent
/// state 𝒩_α(|α⟩₁ + |α⟩₂) through [`build_noon_superposition`].
pub fn ecs_superposition(spec: &EcsSpec, n_max: usize) -> NoonSuperposition {
    let alpha = Complex64::new(spec.alpha_sq().sqrt(), 0.0);
    let raw: Vec<Complex64> = (0..=n_max).map(|n| coherent_amplitude(n, alpha)).collect();
    NoonSuperposition::normalized(raw).expect("coherent amplitudes have positive norm")
}

/// Pure-state QFI 4·(⟨G²⟩ - ⟨G⟩²) for a state evolved through e^{iφG}.
pub fn pure_qfi(state: &PureState, generator: GeneratorKind) -> f64 {
    let norm = state.norm_sqr();
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for (i, a) in state.amplitudes().iter().enumerate() {
        let g = state.basis().label(i).generator_eigenvalue(generator);
        let p = a.norm_sqr();
        g1 += g * p;
        g2 += g * g * p;
    }
    g1 /= norm;
    g2 /= norm;
    4.0 * (g2 - g1 * g1)
}

/// sqrt(C(n, l)·T^(n-l)·R^l): the amplitude-damping Kraus weight taking
/// |n⟩ to |n-l⟩. Computed per cutoff as a triangular table.
fn kraus_weights(n_max: usize, channel: LossChannel) -> Vec<Vec<f64>> {
    let ln_t = channel.transmission().ln();
    let ln_r = channel.loss().ln();
    (0..=n_max)
        .map(|n| {
            (0..=n)
                .map(|l| {
                    let ln_c = ln_binomial(n as u32, l as u32).expect("l <= n");
                    (0.5 * (ln_c + weighted_log(ln_t, n - l) + weighted_log(ln_r, l))).exp()
                })
                .collect()
        })
        .collect()
}

/// k·ln(base) with the convention 0·ln(0) = 0, so T = 0 and T = 1 fall out
/// of the same formula.
#[inline]
fn weighted_log(ln_base: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * ln_base
    }
}

/// Image of an operator under identical single-mode amplitude-damping
/// channels on both modes. Restricted to the branch basis this factorizes
/// into independent photon-removal sums per mode.
#[allow(clippy::needless_range_loop)] // l1/l2 index several tables at once
fn kraus_image(op: &CMatrix, basis: BranchBasis, channel: LossChannel) -> CMatrix {
    let weights = kraus_weights(basis.n_max(), channel);
    let dim = basis.dim();
    let mut out = CMatrix::zeros(dim);
    for i in 0..dim {
        let (k1, k2) = basis.occupations(i);
        for j in 0..dim {
            let elem = op[(i, j)];
            if elem.norm_sqr() == 0.0 {
                continue;
            }
            let (b1, b2) = basis.occupations(j);
            for l1 in 0..=k1.min(b1) {
                let w1 = weights[k1][l1] * weights[b1][l1];
                for l2 in 0..=k2.min(b2) {
                    let w = w1 * weights[k2][l2] * weights[b2][l2];
                    let ti = basis.index_of_occupations(k1 - l1, k2 - l2);
                    let tj = basis.index_of_occupations(b1 - l1, b2 - l2);
                    out[(ti, tj)] += elem * w;
                }
            }
        }
    }
    out
}

fn outer_product(x: &[Complex64], y: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(x.len(), |i, j| x[i] * y[j].conj())
}

/// Sends |ψ⟩⟨ψ| through the photon-loss channel. The returned matrix
/// carries no φ-derivative; see
/// [`apply_loss_channel_with_phase_derivative`] when one is needed.
pub fn apply_loss_channel(state: &PureState, channel: LossChannel) -> LabeledDensityMatrix {
    let rho0 = outer_product(state.amplitudes(), state.amplitudes());
    LabeledDensityMatrix::new(state.basis(), kraus_image(&rho0, state.basis(), channel), None)
}

/// Like [`apply_loss_channel`], additionally propagating the analytic
/// φ-derivative. The input is read as a snapshot of e^{iφG}|ψ_in⟩, whose
/// derivative is iG|ψ⟩; the channel is φ-independent and linear, so
/// ∂ρ/∂φ is the channel image of |ψ′⟩⟨ψ| + |ψ⟩⟨ψ′|.
pub fn apply_loss_channel_with_phase_derivative(
    state: &PureState,
    channel: LossChannel,
    generator: GeneratorKind,
) -> LabeledDensityMatrix {
    let basis = state.basis();
    let psi = state.amplitudes();
    let dpsi: Vec<Complex64> = psi
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let g = basis.label(i).generator_eigenvalue(generator);
            Complex64::new(0.0, g) * a
        })
        .collect();
    let rho0 = outer_product(psi, psi);
    let mut drho0 = outer_product(&dpsi, psi);
    let conj_part = outer_product(psi, &dpsi);
    for i in 0..basis.dim() {
        for j in 0..basis.dim() {
            let v = conj_part[(i, j)];
            drho0[(i, j)] += v;
        }
    }
    LabeledDensityMatrix::new(
        basis,
        kraus_image(&rho0, basis, channel),
        Some(kraus_image(&drho0, basis, channel)),
    )
}

/// Branch-basis coherent amplitudes of the two lossy sensor states:
/// d_n(√T·α) (real) and d_n(√T·α·e^{iφ}) = d_n(√T·α)·e^{inφ}.
pub(crate) fn lossy_branch_amplitudes(
    beta_sq: f64,
    phi: f64,
    n_max: usize,
) -> Result<(Vec<f64>, Vec<Complex64>), FockError> {
    let beta = Complex64::new(beta_sq.sqrt(), 0.0);
    let d1: Vec<f64> = (0..=n_max).map(|n| coherent_amplitude(n, beta).re).collect();
    let captured: f64 = d1.iter().map(|d| d * d).sum();
    let deficit = 1.0 - captured;
    if deficit > MAX_TRUNCATION_DEFICIT {
        return Err(FockError::CutoffTooSmall { deficit });
    }
    let d2: Vec<Complex64> = d1
        .iter()
        .enumerate()
        .map(|(n, &d)| Complex64::from_polar(d, n as f64 * phi))
        .collect();
    Ok((d1, d2))
}

/// Reduced density matrix of the lossy entangled coherent state, expanded
/// in the branch basis directly from the traced-out form
///
///   ρ = 𝒩²_α { |√Tα⟩₁⟨√Tα| + |√Tα·e^{iφ}⟩₂⟨√Tα·e^{iφ}|
///              + e^(-R|α|²)·( |√Tα⟩₁⟨√Tα·e^{iφ}|₂ + h.c. ) },
///
/// together with its analytic φ-derivative (branch-2 amplitudes carry all
/// the phase dependence: ∂_φ d_n(√Tα·e^{iφ}) = i·n·d_n).
pub fn build_ecs_rho_analytic(
    spec: &EcsSpec,
    channel: LossChannel,
    phi: f64,
    n_max: usize,
) -> Result<LabeledDensityMatrix, FockError> {
    let basis = BranchBasis::new(n_max);
    let (d1, d2) = lossy_branch_amplitudes(channel.transmission() * spec.alpha_sq(), phi, n_max)?;
    let coherence = (-channel.loss() * spec.alpha_sq()).exp();
    let nsq = spec.norm_sq();

    let dim = basis.dim();
    let mut rho = CMatrix::zeros(dim);
    let mut drho = CMatrix::zeros(dim);
    let i_unit = Complex64::new(0.0, 1.0);
    for n in 0..=n_max {
        let i1n = basis.index_of(BranchKet::ModeOne(n));
        let i2n = basis.index_of(BranchKet::ModeTwo(n));
        for m in 0..=n_max {
            let i1m = basis.index_of(BranchKet::ModeOne(m));
            let i2m = basis.index_of(BranchKet::ModeTwo(m));

            let projector_one = nsq * d1[n] * d1[m];
            rho[(i1n, i1m)] += Complex64::new(projector_one, 0.0);

            let projector_two = nsq * d2[n] * d2[m].conj();
            rho[(i2n, i2m)] += projector_two;
            drho[(i2n, i2m)] += i_unit * (n as f64 - m as f64) * projector_two;

            let cross = nsq * coherence * d1[n] * d2[m].conj();
            rho[(i1n, i2m)] += cross;
            drho[(i1n, i2m)] += -i_unit * (m as f64) * cross;

            let cross_conj = nsq * coherence * d2[n] * d1[m];
            rho[(i2n, i1m)] += cross_conj;
            drho[(i2n, i1m)] += i_unit * (n as f64) * cross_conj;
        }
    }
    Ok(LabeledDensityMatrix::new(basis, rho, Some(drho)))
}

/// Largest element-wise deviations (ρ, ∂ρ/∂φ) between the two independent
/// constructions of the lossy ECS density matrix: the Kraus channel applied
/// to the assembled pure state, and the coherent-overlap expansion.
///
/// Both are built on a padded basis: the channel pulls weight down from
/// above, so with a cutoff sized only for the input state's probability
/// tail the comparison would be dominated by input-side truncation of the
/// Kraus route rather than by a genuine disagreement. Padding by half the
/// cutoff plus a constant pushes that effect below 1e-10 for any
/// tail tolerance ≤ 1e-12.
pub fn ecs_rho_construction_deviation(
    spec: &EcsSpec,
    channel: LossChannel,
    phi: f64,
    tail_tol: f64,
) -> Result<(f64, f64), FockError> {
    let cutoff = choose_cutoff(spec.alpha_sq(), tail_tol);
    let padded = cutoff + cutoff / 2 + 12;
    let basis = BranchBasis::new(padded);
    let state = build_noon_superposition(
        &ecs_superposition(spec, padded),
        phi,
        GeneratorKind::ModeTwoNumber,
        basis,
    )?;
    let kraus =
        apply_loss_channel_with_phase_derivative(&state, channel, GeneratorKind::ModeTwoNumber);
    let analytic = build_ecs_rho_analytic(spec, channel, phi, padded)?;
    Ok((
        kraus.rho().max_abs_diff(analytic.rho()),
        kraus
            .drho_dphi()
            .expect("derivative requested")
            .max_abs_diff(analytic.drho_dphi().expect("analytic derivative always present")),
    ))
}

/// Reduced density matrix of the lossy NOON state,
///
///   ρ = Σ_{n<N} λ_n·(|n⟩₁⟨n| + |n⟩₂⟨n|) + T^N·|ψ_NOON⟩⟨ψ_NOON|,
///   λ_n = C(N, n)·Tⁿ·R^(N-n)/2,
///   |ψ_NOON⟩ = (|N⟩₁ + e^{iNφ}|N⟩₂)/√2,
///
/// with the analytic φ-derivative (only the coherent NOON block moves).
pub fn build_noon_rho(spec: &NoonSpec, channel: LossChannel, phi: f64) -> LabeledDensityMatrix {
    let n_photons = spec.photon_number() as usize;
    let basis = BranchBasis::new(n_photons);
    let dim = basis.dim();
    let mut rho = CMatrix::zeros(dim);
    let mut drho = CMatrix::zeros(dim);

    let ln_t = channel.transmission().ln();
    let ln_r = channel.loss().ln();
    for n in 0..n_photons {
        let ln_c = ln_binomial(n_photons as u32, n as u32).expect("n < N");
        let lambda_n = 0.5
            * (ln_c + weighted_log(ln_t, n) + weighted_log(ln_r, n_photons - n)).exp();
        let i1 = basis.index_of(BranchKet::ModeOne(n));
        let i2 = basis.index_of(BranchKet::ModeTwo(n));
        rho[(i1, i1)] += Complex64::new(lambda_n, 0.0);
        rho[(i2, i2)] += Complex64::new(lambda_n, 0.0);
    }

    let weight = weighted_log(ln_t, n_photons).exp();
    let i1 = basis.index_of(BranchKet::ModeOne(n_photons));
    let i2 = basis.index_of(BranchKet::ModeTwo(n_photons));
    let phase = Complex64::from_polar(1.0, (n_photons as f64) * phi);
    rho[(i1, i1)] += Complex64::new(0.5 * weight, 0.0);
    rho[(i2, i2)] += Complex64::new(0.5 * weight, 0.0);
    rho[(i1, i2)] += 0.5 * weight * phase.conj();
    rho[(i2, i1)] += 0.5 * weight * phase;

    let i_n = Complex64::new(0.0, n_photons as f64);
    drho[(i1, i2)] += 0.5 * weight * phase.conj() * (-i_n);
    drho[(i2, i1)] += 0.5 * weight * phase * i_n;

    LabeledDensityMatrix::new(basis, rho, Some(drho))
}
