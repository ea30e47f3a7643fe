//! Scalar special functions behind the closed-form QFI expressions:
//! principal-branch Lambert W, log-factorial, and log-binomial coefficients.

// Shadowed by inherent f64 methods whenever a build links std (e.g. the
// test harness); required for the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

/// Default relative-residual tolerance for [`lambert_w0`]. Downstream QFI
/// comparisons target 1e-8 agreement; this leaves two orders of margin.
pub const DEFAULT_LAMBERT_TOL: f64 = 1e-12;

const MAX_HALLEY_ITERATIONS: usize = 64;

/// -1/e, the left edge of the principal Lambert branch.
const NEG_INV_E: f64 = -0.36787944117144233;

#[derive(Debug, Error, PartialEq)]
pub enum SpecFunError {
    #[error("lambert_w0 is undefined for z = {z:e} < -1/e")]
    LambertDomain { z: f64 },
    #[error("lambert_w0 did not reach residual {tol:e} for z = {z:e}")]
    LambertNoConvergence { z: f64, tol: f64 },
    #[error("binomial coefficient needs k <= n, got n = {n}, k = {k}")]
    BinomialDomain { n: u32, k: u32 },
}

/// Principal branch W₀ of the Lambert W function: the solution w ≥ -1 of
/// w·e^w = z for z ≥ -1/e.
///
/// Halley iteration refined inside a sign-change bracket, so a poor initial
/// guess degrades to bisection instead of diverging. Convergence is declared
/// at |w·e^w - z| ≤ tol·max(1, |z|).
pub fn lambert_w0(z: f64, tol: f64) -> Result<f64, SpecFunError> {
    assert!(tol > 0.0, "lambert_w0 tolerance must be positive");
    if z.is_nan() || z < NEG_INV_E {
        return Err(SpecFunError::LambertDomain { z });
    }
    if z == 0.0 {
        return Ok(0.0);
    }

    // Bracket: W₀ is increasing, W₀(-1/e) = -1, W₀(0) = 0, W₀(z) ≤ ln z
    // for z ≥ e.
    let (mut lo, mut hi) = if z < 0.0 {
        (-1.0, 0.0)
    } else if z <= core::f64::consts::E {
        (0.0, 1.0)
    } else {
        (1.0, z.ln())
    };

    let mut w = initial_guess(z).clamp(lo, hi);
    let target = tol * z.abs().max(1.0);

    for _ in 0..MAX_HALLEY_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - z;
        if f.abs() <= target {
            return Ok(w);
        }
        if f > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        // Halley step for f(w) = w·e^w - z:
        //   w' = w - f / (e^w·(w+1) - (w+2)·f / (2(w+1)))
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let candidate = w - f / denom;
        w = if candidate.is_finite() && candidate > lo && candidate < hi {
            candidate
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(SpecFunError::LambertNoConvergence { z, tol })
}

fn initial_guess(z: f64) -> f64 {
    if z < -0.25 {
        // Series around the branch point z = -1/e in p = sqrt(2(e·z + 1)).
        let p2 = 2.0 * (core::f64::consts::E * z + 1.0);
        if p2 <= 0.0 {
            return -1.0;
        }
        let p = p2.sqrt();
        -1.0 + p - p2 / 3.0 + 11.0 / 72.0 * p * p2
    } else if z < 1.0 {
        // Leading Taylor terms of W₀ near zero.
        z * (1.0 - z)
    } else {
        // Asymptotic ln z - ln ln z, safe since ln z ≥ 0 here.
        let l1 = z.ln();
        if l1 > 1.0 {
            l1 - l1.ln()
        } else {
            0.5
        }
    }
}

// n! for n ≤ 20 is exactly representable in f64.
const FACTORIALS: [f64; 21] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
];

/// ln(n!), exact table below 21 and a Stirling series above, with relative
/// error well under 1e-12 across the supported range (n ≤ 10⁶ and beyond).
pub fn ln_factorial(n: u32) -> f64 {
    if let Some(&f) = FACTORIALS.get(n as usize) {
        return f.ln();
    }
    let x = f64::from(n);
    let x2 = x * x;
    (x + 0.5) * x.ln() - x
        + 0.5 * (2.0 * core::f64::consts::PI).ln()
        + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x2)
        + 1.0 / (1260.0 * x * x2 * x2)
        - 1.0 / (1680.0 * x * x2 * x2 * x2)
}

/// ln C(n, k) via log-factorial differences.
pub fn ln_binomial(n: u32, k: u32) -> Result<f64, SpecFunError> {
    if k > n {
        return Err(SpecFunError::BinomialDomain { n, k });
    }
    Ok(ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))
}
