//! Probe-state and loss-channel parameterizations shared by the closed forms
//! and the Fock-space oracle.
//!
//! The entangled coherent state (ECS) 𝒩_α(|α⟩₁|0⟩₂ + |0⟩₁|α⟩₂) is described
//! by [`EcsSpec`], which keeps |α|², the normalization 𝒩²_α and the mean
//! photon number n̄ mutually consistent. α is taken real and non-negative;
//! every quantity in this crate depends only on |α|².

use alloc::vec::Vec;
use num_complex::Complex64;
// Shadowed by inherent f64 methods whenever a build links std (e.g. the
// test harness); required for the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::specfun::{self, SpecFunError};

/// Tolerance on Σ|c_n|² - 1 accepted by [`NoonSuperposition::new`].
pub const COEFFICIENT_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("|α|² must be non-negative, got {value}")]
    NegativeAlphaSq { value: f64 },
    #[error("mean photon number must be non-negative, got {value}")]
    NegativeMeanPhotons { value: f64 },
    #[error("transmission must lie in [0, 1], got {value}")]
    TransmissionOutOfRange { value: f64 },
    #[error("NOON photon number must be at least 1")]
    ZeroPhotonNumber,
    #[error("superposition coefficients must not be empty")]
    EmptyCoefficients,
    #[error("superposition coefficients have |Σ|c|² - 1| = {deficit:e} > 1e-12")]
    UnnormalizedCoefficients { deficit: f64 },
    #[error("superposition coefficients have zero norm")]
    ZeroNorm,
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Photon-loss channel modeled by a beam splitter of transmission T and
/// loss R = 1 - T. Only T is stored; R is always derived, so T + R = 1
/// holds exactly under either constructor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    transmission: f64,
}

impl LossChannel {
    pub fn from_transmission(t: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(ModelError::TransmissionOutOfRange { value: t });
        }
        Ok(Self { transmission: t })
    }

    pub fn from_loss(r: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(ModelError::TransmissionOutOfRange { value: 1.0 - r });
        }
        Ok(Self {
            transmission: 1.0 - r,
        })
    }

    pub fn lossless() -> Self {
        Self { transmission: 1.0 }
    }

    #[inline]
    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    #[inline]
    pub fn loss(&self) -> f64 {
        1.0 - self.transmission
    }
}

/// Size parameters of an entangled coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcsSpec {
    alpha_sq: f64,
    norm_sq: f64,
    mean_photons: f64,
}

impl EcsSpec {
    /// |α|².
    #[inline]
    pub fn alpha_sq(&self) -> f64 {
        self.alpha_sq
    }

    /// 𝒩²_α = 1 / [2(1 + e^(-|α|²))].
    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// n̄ = |α|² / (1 + e^(-|α|²)).
    #[inline]
    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }
}

/// Builds an [`EcsSpec`] from |α|².
pub fn ecs_from_alpha_sq(alpha_sq: f64) -> Result<EcsSpec, ModelError> {
    if alpha_sq.is_nan() || alpha_sq < 0.0 {
        return Err(ModelError::NegativeAlphaSq { value: alpha_sq });
    }
    let damping = (-alpha_sq).exp();
    Ok(EcsSpec {
        alpha_sq,
        norm_sq: 1.0 / (2.0 * (1.0 + damping)),
        mean_photons: alpha_sq / (1.0 + damping),
    })
}

/// Builds an [`EcsSpec`] from the mean photon number, inverting n̄(|α|²)
/// through |α|² = n̄ + W₀(n̄·e^(-n̄)).
pub fn ecs_from_mean_photons(n_bar: f64) -> Result<EcsSpec, ModelError> {
    if n_bar.is_nan() || n_bar < 0.0 {
        return Err(ModelError::NegativeMeanPhotons { value: n_bar });
    }
    let w = specfun::lambert_w0(n_bar * (-n_bar).exp(), specfun::DEFAULT_LAMBERT_TOL)?;
    ecs_from_alpha_sq(n_bar + w)
}

/// NOON state photon number N ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoonSpec {
    photon_number: u32,
}

impl NoonSpec {
    pub fn new(photon_number: u32) -> Result<Self, ModelError> {
        if photon_number == 0 {
            return Err(ModelError::ZeroPhotonNumber);
        }
        Ok(Self { photon_number })
    }

    #[inline]
    pub fn photon_number(&self) -> u32 {
        self.photon_number
    }
}

/// Phase-shift generator applied between the two interferometer modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// G = n̂₂: only the second mode accumulates phase.
    ModeTwoNumber,
    /// G = (n̂₂ - n̂₁)/2: the modes accumulate opposite half phases.
    HalfDifference,
}

/// Coefficients c_n of a coherent superposition Σ c_n(|n⟩₁ + |n⟩₂)/√2 of
/// NOON states. Coefficients may be complex; all QFI formulas depend only
/// on |c_n|².
#[derive(Debug, Clone, PartialEq)]
pub struct NoonSuperposition {
    coefficients: Vec<Complex64>,
}

impl NoonSuperposition {
    /// Accepts a coefficient list already normalized to Σ|c_n|² = 1 within
    /// [`COEFFICIENT_NORM_TOL`].
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self, ModelError> {
        if coefficients.is_empty() {
            return Err(ModelError::EmptyCoefficients);
        }
        let norm_sq: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        let deficit = (norm_sq - 1.0).abs();
        if deficit > COEFFICIENT_NORM_TOL {
            return Err(ModelError::UnnormalizedCoefficients { deficit });
        }
        Ok(Self { coefficients })
    }

    /// Rescales an arbitrary nonzero coefficient list to Σ|c_n|² = 1.
    pub fn normalized(coefficients: Vec<Complex64>) -> Result<Self, ModelError> {
        if coefficients.is_empty() {
            return Err(ModelError::EmptyCoefficients);
        }
        let norm_sq: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(ModelError::ZeroNorm);
        }
        let scale = 1.0 / norm_sq.sqrt();
        Ok(Self {
            coefficients: coefficients.into_iter().map(|c| c * scale).collect(),
        })
    }

    /// The single-component superposition c_n = δ_{n,N}, i.e. a bare NOON
    /// state (or the vacuum for N = 0).
    pub fn single(photon_number: usize) -> Self {
        let mut coefficients = alloc::vec![Complex64::new(0.0, 0.0); photon_number + 1];
        coefficients[photon_number] = Complex64::new(1.0, 0.0);
        Self { coefficients }
    }

    #[inline]
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Largest Fock component carried by the coefficient list.
    #[inline]
    pub fn max_component(&self) -> usize {
        self.coefficients.len() - 1
    }
}
