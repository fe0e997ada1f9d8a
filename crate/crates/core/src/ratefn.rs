//! Exponential decay rates of the aggregate estimation error.
//!
//! With `L = C/R` sensors deployed under a sum-rate budget `C`, the
//! majority-vote error probability vanishes exponentially in `C`. This module
//! provides the decay rate (nats per unit capacity) along three routes:
//!
//! * the closed form obtained from the Bernoulli rate function evaluated at
//!   the decision boundary,
//!
//!   ```text
//!   I_p(R) = -(1/R) { ln 2 + ln(rho_p(R))/2 + ln(1 - rho_p(R))/2 },
//!   ```
//!
//! * the level-0 value `(1 - 2p)^2 ln 2`, the `R -> 0` limit of the above,
//!
//! * a Gaussian tail approximation `alpha^2 / (2R (1 - alpha)(1 + alpha))`
//!   with `alpha = (1 - 2p)(1 - 2 D(R))`, kept as a first-class alternative
//!   because it visibly disagrees with the exact route at moderate rates.
//!
//! The Bernoulli rate function itself (the KL divergence driving the large
//! deviations of the per-symbol error count) is exposed so the closed form
//! can be cross-checked by direct numerical minimization over the deviation
//! set `{z >= 1/2}`.

use std::f64::consts::LN_2;

use crate::error::DomainError;
use crate::finite::SensorCount;
use crate::prob::{distortion_rate, rho_of_rate, CombinedError, NoiseLevel, RateLevel};

/// Nonnegative exponential decay rate in nats per unit capacity.
///
/// Positive infinity is a legitimate value, not an error: it marks
/// configurations whose error probability is exactly zero (noiseless
/// observations sent losslessly). Keeping it representable keeps sweep
/// tables total.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DecayRate(f64);

impl DecayRate {
    pub const INFINITE: DecayRate = DecayRate(f64::INFINITY);

    pub(crate) fn from_value(i: f64) -> Self {
        debug_assert!(i >= 0.0, "decay rate must be nonnegative, got {i}");
        Self(i)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

/// A point evaluation of the sample-mean rate function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunctionPoint {
    /// Sample-mean argument in `(0, 1)`.
    pub z: f64,
    /// Rate-function value in nats; zero exactly at the mean.
    pub value: f64,
}

/// Parameters of the Gaussian tail approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianApproxParams {
    /// `alpha = (1 - 2p)(1 - 2 D(R))`, in `(0, 1]`. Satisfies
    /// `alpha^2 = 1 - 4 rho (1 - rho)`.
    pub alpha: f64,
    /// Lower standardized integration endpoint,
    /// `(1/2 - rho) / sqrt(rho (1 - rho)) * sqrt(L)`.
    pub lambda1: f64,
    /// Upper standardized integration endpoint,
    /// `(1 - rho) / sqrt(rho (1 - rho)) * sqrt(L)`.
    pub lambda2: f64,
}

/// Rate function of a Bernoulli(`rho`) sample mean at `z`: the KL divergence
/// of Bernoulli(`z`) from Bernoulli(`rho`) in nats,
/// `z ln(z/rho) + (1 - z) ln((1 - z)/(1 - rho))`.
///
/// Zero iff `z = rho`, strictly convex in `z`. Degenerate `rho` (0 or 1) is
/// rejected: the rate is infinite everywhere except at the atom.
pub fn bernoulli_rate_function(
    z: f64,
    rho: CombinedError,
) -> Result<RateFunctionPoint, DomainError> {
    if !(z > 0.0 && z < 1.0) {
        return Err(DomainError::SampleMean(z));
    }
    let rho = rho.value();
    if rho == 0.0 {
        return Err(DomainError::DegenerateRho(rho));
    }
    let value = z * (z / rho).ln() + (1.0 - z) * ((1.0 - z) / (1.0 - rho)).ln();
    // Clamp the tiny negative values floating-point noise can produce at the
    // minimum.
    Ok(RateFunctionPoint {
        z,
        value: value.max(0.0),
    })
}

/// Capacity-normalized rate function: the Bernoulli rate function at
/// crossover `rho_p(R)`, divided by `R` (one capacity unit buys `1/R`
/// sensors).
pub fn scaled_rate_function(
    z: f64,
    p: NoiseLevel,
    r: RateLevel,
) -> Result<RateFunctionPoint, DomainError> {
    if r.is_zero() {
        return Err(DomainError::ZeroRate);
    }
    let inner = bernoulli_rate_function(z, rho_of_rate(p, r))?;
    Ok(RateFunctionPoint {
        z,
        value: inner.value / r.value(),
    })
}

/// Exact decay rate
/// `I_p(R) = -(1/R) { ln 2 + ln(rho_p(R))/2 + ln(1 - rho_p(R))/2 }`.
///
/// Identically equal to `scaled_rate_function(1/2, p, r)`. Strictly positive
/// for `p < 1/2`; infinite exactly when `rho_p(R) = 0`, i.e. `p = 0, R = 1`.
pub fn decay_rate_exact(p: NoiseLevel, r: RateLevel) -> Result<DecayRate, DomainError> {
    if r.is_zero() {
        return Err(DomainError::ZeroRate);
    }
    let rho = rho_of_rate(p, r).value();
    if rho == 0.0 {
        return Ok(DecayRate::INFINITE);
    }
    let value = -(LN_2 + 0.5 * rho.ln() + 0.5 * (-rho).ln_1p()) / r.value();
    Ok(DecayRate::from_value(value.max(0.0)))
}

/// Level-0 decay rate `(1 - 2p)^2 ln 2`, the limit of `decay_rate_exact` as
/// `R -> 0`. The agreement of the closed form with the limit is asserted by
/// tests rather than assumed.
pub fn decay_rate_level0(p: NoiseLevel) -> DecayRate {
    let a = 1.0 - 2.0 * p.value();
    DecayRate::from_value(a * a * LN_2)
}

/// Gaussian-approximation decay rate.
///
/// Returns the level-0 value at `R = 0` and
/// `alpha^2 / (2R (1 - alpha)(1 + alpha))` for `R > 0`; infinite when
/// `alpha = 1` (`p = 0, R = 1`). Overestimates the exact rate, which is why
/// both arms are exposed side by side.
pub fn decay_rate_gaussian(p: NoiseLevel, r: RateLevel) -> DecayRate {
    if r.is_zero() {
        return decay_rate_level0(p);
    }
    let d = distortion_rate(r).value();
    let alpha = (1.0 - 2.0 * p.value()) * (1.0 - 2.0 * d);
    if alpha >= 1.0 {
        return DecayRate::INFINITE;
    }
    let value = alpha * alpha / (2.0 * r.value() * (1.0 - alpha) * (1.0 + alpha));
    DecayRate::from_value(value)
}

/// Standardized endpoints and `alpha` of the Gaussian tail approximation at
/// sensor count `L`.
///
/// Requires `rho_p(R)` in `(0, 1/2)`: a zero crossover has no Gaussian scale
/// and `rho = 1/2` puts the mean on the decision boundary.
pub fn gaussian_tail_params(
    p: NoiseLevel,
    r: RateLevel,
    l: SensorCount,
) -> Result<GaussianApproxParams, DomainError> {
    if r.is_zero() {
        return Err(DomainError::ZeroRate);
    }
    let rho = rho_of_rate(p, r).value();
    if rho == 0.0 {
        return Err(DomainError::DegenerateRho(rho));
    }
    let d = distortion_rate(r).value();
    let alpha = (1.0 - 2.0 * p.value()) * (1.0 - 2.0 * d);
    let scale = (rho * (1.0 - rho)).sqrt();
    let sqrt_l = (l.value() as f64).sqrt();
    Ok(GaussianApproxParams {
        alpha,
        lambda1: (0.5 - rho) / scale * sqrt_l,
        lambda2: (1.0 - rho) / scale * sqrt_l,
    })
}
