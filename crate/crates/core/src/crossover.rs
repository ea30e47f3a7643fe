//! Solver for the ECS/NOON performance crossover.
//!
//! With the NOON photon number treated as a continuous variable N = n̄, the
//! two QFI curves F_NOON(n̄) = n̄²·Tⁿ̄ and F_ECS(n̄) can intersect at zero,
//! one, or two points. Inside a root pair the NOON state is the better
//! probe; outside, the ECS prevails. The pair shrinks as T drops and merges
//! at a critical transmission below which no crossover exists.

use alloc::vec::Vec;
// Shadowed by inherent f64 methods whenever a build links std (e.g. the
// test harness); required for the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::closed_forms;
use crate::model::{ecs_from_mean_photons, LossChannel, ModelError};

/// Points in the geometric bracketing scan over [1, search_max].
const SCAN_POINTS: usize = 200;

/// Width of the bisection bracket at which a root counts as located.
const ROOT_TOL: f64 = 1e-6;

/// Denser scan used while hunting the critical transmission, where the two
/// roots approach each other and a coarse grid could step over the pair.
const CRITICAL_SCAN_POINTS: usize = 2000;
const CRITICAL_SEARCH_MAX: f64 = 1e3;

#[derive(Debug, Error, PartialEq)]
pub enum CrossoverError {
    #[error("crossover search needs 0 < T < 1, got {t}")]
    InvalidTransmission { t: f64 },
    #[error("search_max must exceed 1, got {value}")]
    InvalidSearchMax { value: f64 },
    #[error("critical-point bisection failed to bracket the root-pair merge")]
    NoConvergence,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which expression stands in for the ECS QFI when equating the two states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossoverMode {
    /// 2n̄T + (n̄T)²e^(-2Rn̄): the large-n̄ form behind the published
    /// crossover condition n̄·Tⁿ̄⁻¹ = 2 + n̄T·e^(-2Rn̄).
    #[default]
    LargeNApproximation,
    /// The exact closed form, for sensitivity analysis.
    ExactClosedForm,
}

/// Intersections of the two QFI curves at a fixed transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverResult {
    pub transmission: f64,
    /// 0, 1, or 2 crossing points n̄, sorted ascending.
    pub roots: Vec<f64>,
    /// Search interval that was scanned.
    pub bracket: (f64, f64),
}

/// ln F_NOON - ln F_ECS; compared in log space because the QFI spans many
/// orders of magnitude over the scan range.
fn log_gap(n: f64, channel: LossChannel, mode: CrossoverMode) -> Result<f64, CrossoverError> {
    let noon = 2.0 * n.ln() + n * channel.transmission().ln();
    let ecs = match mode {
        CrossoverMode::LargeNApproximation => {
            closed_forms::ecs_lossy_qfi_approx(n, channel).total().ln()
        }
        CrossoverMode::ExactClosedForm => {
            let spec = ecs_from_mean_photons(n)?;
            closed_forms::ecs_lossy_qfi(&spec, channel).total().ln()
        }
    };
    Ok(noon - ecs)
}

fn scan_roots(
    channel: LossChannel,
    mode: CrossoverMode,
    search_max: f64,
    points: usize,
) -> Result<Vec<f64>, CrossoverError> {
    let log_span = search_max.ln();
    let grid = |i: usize| (log_span * i as f64 / (points - 1) as f64).exp();

    let mut roots = Vec::new();
    let mut previous_n = grid(0);
    let mut previous_gap = log_gap(previous_n, channel, mode)?;
    for i in 1..points {
        let n = grid(i);
        let gap = log_gap(n, channel, mode)?;
        if previous_gap == 0.0 {
            roots.push(previous_n);
        } else if previous_gap.signum() != gap.signum() && gap != 0.0 {
            roots.push(bisect_root(previous_n, n, previous_gap, channel, mode)?);
        }
        previous_n = n;
        previous_gap = gap;
    }
    if previous_gap == 0.0 {
        roots.push(previous_n);
    }
    Ok(roots)
}

fn bisect_root(
    mut lo: f64,
    mut hi: f64,
    gap_lo: f64,
    channel: LossChannel,
    mode: CrossoverMode,
) -> Result<f64, CrossoverError> {
    let sign_lo = gap_lo.signum();
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let gap = log_gap(mid, channel, mode)?;
        if gap == 0.0 {
            return Ok(mid);
        }
        if gap.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Finds every n̄ ∈ [1, search_max] where F_NOON(n̄) = F_ECS(n̄) by a
/// geometric bracketing scan refined with bisection to |Δn̄| ≤ 1e-6.
/// An empty root list is a valid outcome (no crossover at this T).
pub fn crossover_roots(
    t: f64,
    mode: CrossoverMode,
    search_max: f64,
) -> Result<CrossoverResult, CrossoverError> {
    if t.is_nan() || t <= 0.0 || t >= 1.0 {
        return Err(CrossoverError::InvalidTransmission { t });
    }
    if search_max.is_nan() || search_max <= 1.0 {
        return Err(CrossoverError::InvalidSearchMax { value: search_max });
    }
    let channel = LossChannel::from_transmission(t).expect("validated above");
    let roots = scan_roots(channel, mode, search_max, SCAN_POINTS)?;
    Ok(CrossoverResult {
        transmission: t,
        roots,
        bracket: (1.0, search_max),
    })
}

/// Locates the transmission below which the crossover disappears, by
/// bisecting on T with a dense nested root scan, and returns (T_c, n̄_c)
/// with n̄_c the midpoint of the merging root pair.
pub fn critical_point(tol: f64) -> Result<(f64, f64), CrossoverError> {
    assert!(tol > 0.0, "critical-point tolerance must be positive");
    let mode = CrossoverMode::LargeNApproximation;
    let count = |t: f64| -> Result<Vec<f64>, CrossoverError> {
        let channel = LossChannel::from_transmission(t).expect("bisection stays inside (0, 1)");
        scan_roots(channel, mode, CRITICAL_SEARCH_MAX, CRITICAL_SCAN_POINTS)
    };

    // Initial bracket: a pair of transmissions with and without a root pair.
    let mut lo = 0.80;
    while count(lo)?.len() >= 2 {
        lo -= 0.05;
        if lo <= 0.5 {
            return Err(CrossoverError::NoConvergence);
        }
    }
    let mut hi = 0.90;
    while count(hi)?.len() < 2 {
        hi += 0.02;
        if hi >= 0.995 {
            return Err(CrossoverError::NoConvergence);
        }
    }

    let mut pair = count(hi)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let roots = count(mid)?;
        if roots.len() >= 2 {
            hi = mid;
            pair = roots;
        } else {
            lo = mid;
        }
    }
    let n_c = 0.5 * (pair[0] + pair[pair.len() - 1]);
    Ok((0.5 * (lo + hi), n_c))
}

/// The published fit curves bounding the crossover region:
/// n̄_u ≈ 3.2·T⁶/R^1.15 and n̄_l ≈ 1.4·T⁻³/R^0.5.
pub fn fitted_boundaries(t: f64) -> (f64, f64) {
    assert!(t > 0.0 && t < 1.0, "fit curves need 0 < T < 1");
    let r = 1.0 - t;
    let upper = 3.2 * t.powi(6) / r.powf(1.15);
    let lower = 1.4 * t.powi(-3) / r.sqrt();
    (upper, lower)
}
