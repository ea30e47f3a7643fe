//! Exact analytical QFI expressions for the entangled coherent state (ECS)
//! and the NOON state, their large-n̄ asymptotics, and the spectral weights
//! of the lossy ECS density matrix.
//!
//! Conventions: T is the channel transmission, R = 1 - T the loss, a = |α|²,
//! n̄ the mean photon number, 𝒩² = 1/[2(1 + e^(-a))] the ECS normalization,
//! and w = W₀(n̄·e^(-n̄)) = n̄·e^(-a) the Lambert-W term.

// Shadowed by inherent f64 methods whenever a build links std (e.g. the
// test harness); required for the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::model::{EcsSpec, LossChannel, NoonSpec};
use crate::qfi::QfiBreakdown;
use crate::specfun;

#[derive(Debug, Error, PartialEq)]
pub enum ClosedFormError {
    #[error("the optimal NOON size -2/ln T is undefined at T = {t}")]
    OptimalNoonUndefined { t: f64 },
}

/// Eigenvalues λ± and normalization factors η±² of the two nonzero-weight
/// eigenvectors of the lossy ECS density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcsSpectralData {
    /// λ₊ = 𝒩²(1 + e^(-R·a))(1 + e^(-T·a))
    pub lambda_plus: f64,
    /// λ₋ = 𝒩²(1 - e^(-R·a))(1 - e^(-T·a))
    pub lambda_minus: f64,
    /// η₊² = 1/[2(1 + e^(-T·a))]
    pub eta_plus_sq: f64,
    /// η₋² = 1/[2(1 - e^(-T·a))]; +∞ in the degenerate T·a = 0 limit,
    /// where λ₋ = 0 and the minus eigenvector drops out.
    pub eta_minus_sq: f64,
}

/// Spectral weights of the lossy ECS. The factored form is returned; the
/// additive form 𝒩²[(1 + e^(-a)) ± (e^(-T·a) + e^(-R·a))] is algebraically
/// identical and asserted against it in debug builds.
pub fn ecs_spectral_data(spec: &EcsSpec, channel: LossChannel) -> EcsSpectralData {
    let a = spec.alpha_sq();
    let nsq = spec.norm_sq();
    let t = channel.transmission();
    let r = channel.loss();
    let decay_r = (-r * a).exp();
    let decay_t = (-t * a).exp();
    // 1 - e^(-x) through expm1 keeps λ₋ accurate when x is small.
    let one_minus_r = -(-r * a).exp_m1();
    let one_minus_t = -(-t * a).exp_m1();

    let lambda_plus = nsq * (1.0 + decay_r) * (1.0 + decay_t);
    let lambda_minus = nsq * one_minus_r * one_minus_t;

    #[cfg(debug_assertions)]
    {
        let total = 1.0 + (-a).exp();
        let split = decay_t + decay_r;
        debug_assert!((lambda_plus - nsq * (total + split)).abs() <= 1e-14);
        debug_assert!((lambda_minus - nsq * (total - split)).abs() <= 1e-14);
    }

    EcsSpectralData {
        lambda_plus,
        lambda_minus,
        eta_plus_sq: 1.0 / (2.0 * (1.0 + decay_t)),
        eta_minus_sq: 1.0 / (2.0 * one_minus_t),
    }
}

fn lambert_term(spec: &EcsSpec) -> f64 {
    let n_bar = spec.mean_photons();
    specfun::lambert_w0(n_bar * (-n_bar).exp(), specfun::DEFAULT_LAMBERT_TOL)
        .expect("n̄·e^(-n̄) lies inside the principal branch domain")
}

/// Lossless ECS QFI: F_Q = 2n̄·[1 + W₀(n̄·e^(-n̄))] + n̄², which approaches
/// n̄(n̄ + 2) once e^(-|α|²) is negligible.
pub fn ecs_lossless_qfi(spec: &EcsSpec) -> f64 {
    let n_bar = spec.mean_photons();
    2.0 * n_bar * (1.0 + lambert_term(spec)) + n_bar * n_bar
}

/// Exact lossy ECS QFI, split into the classical term
/// F_cl = 2n̄T·[1 + T·W₀(n̄e^(-n̄))] and the Heisenberg term
/// F_HL = (n̄T)²·(e^(-2R·a) - e^(-2T·a)) / (1 - e^(-2T·a)).
///
/// Both exponential differences run through expm1, so nothing cancels as
/// T → 0; the T = 0 value is 0 by continuity.
pub fn ecs_lossy_qfi(spec: &EcsSpec, channel: LossChannel) -> QfiBreakdown {
    let a = spec.alpha_sq();
    let t = channel.transmission();
    if t == 0.0 || a == 0.0 {
        return QfiBreakdown::from_classical_heisenberg(0.0, 0.0);
    }
    let n_bar = spec.mean_photons();
    let r = channel.loss();

    let classical = 2.0 * n_bar * t * (1.0 + t * lambert_term(spec));

    let em_r = (-2.0 * r * a).exp_m1(); // e^(-2Ra) - 1
    let em_t = (-2.0 * t * a).exp_m1(); // e^(-2Ta) - 1
    let heisenberg = (n_bar * t).powi(2) * (em_r - em_t) / (-em_t);

    let breakdown = QfiBreakdown::from_classical_heisenberg(classical, heisenberg);
    debug_assert!(
        (breakdown.total() - ecs_lossy_qfi_crosscheck(spec, channel)).abs()
            <= 1e-12 * breakdown.total().abs().max(1.0),
        "the two closed-form routes disagree"
    );
    breakdown
}

/// The same exact lossy ECS QFI evaluated along an algebraically equivalent
/// but numerically independent route,
///
///   F_Q = 4𝒩²aT·[1 + aT - 𝒩²aT·(1 + (1 - e^(-2R·a))/(1 - e^(-2T·a)))],
///
/// kept as a transcription guard for [`ecs_lossy_qfi`].
pub fn ecs_lossy_qfi_crosscheck(spec: &EcsSpec, channel: LossChannel) -> f64 {
    let a = spec.alpha_sq();
    let t = channel.transmission();
    if t == 0.0 || a == 0.0 {
        return 0.0;
    }
    let r = channel.loss();
    let nsq = spec.norm_sq();
    let u = -(-2.0 * r * a).exp_m1(); // 1 - e^(-2Ra)
    let v = -(-2.0 * t * a).exp_m1(); // 1 - e^(-2Ta)
    let nat = nsq * a * t;
    4.0 * nat * (1.0 + a * t - nat * (1.0 + u / v))
}

/// Large-n̄ approximation F_Q ≈ 2n̄T + (n̄T)²·e^(-2Rn̄), valid for T near 1
/// and |α|² ≫ 1.
pub fn ecs_lossy_qfi_approx(n_bar: f64, channel: LossChannel) -> QfiBreakdown {
    let t = channel.transmission();
    let r = channel.loss();
    let classical = 2.0 * n_bar * t;
    let heisenberg = (n_bar * t).powi(2) * (-2.0 * r * n_bar).exp();
    QfiBreakdown::from_classical_heisenberg(classical, heisenberg)
}

/// Lossy NOON QFI: F_Q = N²·Tᴺ.
pub fn noon_qfi(spec: &NoonSpec, channel: LossChannel) -> f64 {
    let n = spec.photon_number();
    f64::from(n).powi(2) * channel.transmission().powi(n as i32)
}

/// N²·Tᴺ with the photon number treated as a continuous variable, as used
/// when equating the two states over a shared n̄ axis.
pub fn noon_qfi_continuous(n: f64, channel: LossChannel) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let t = channel.transmission();
    if t == 0.0 {
        return 0.0;
    }
    n * n * (n * t.ln()).exp()
}

/// The real-valued stationary point N_opt = -2/ln T of the NOON precision
/// T^(-N/2)/N. The integer optimum is its floor or ceiling.
pub fn noon_optimal_n(channel: LossChannel) -> Result<f64, ClosedFormError> {
    let t = channel.transmission();
    if t <= 0.0 || t >= 1.0 {
        return Err(ClosedFormError::OptimalNoonUndefined { t });
    }
    Ok(-2.0 / t.ln())
}
