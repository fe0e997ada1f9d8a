//! Binary-entropy primitives and the noise/distortion composition.
//!
//! A sensor observes a uniform binary source through an independent crossover
//! channel with probability `p` and lossily encodes its observations at rate
//! `R` bits per symbol. Ideal coding at rate `R` reproduces each symbol with
//! Hamming distortion `D(R)`, the inverse of the rate-distortion function of
//! the uniform binary source,
//!
//! ```text
//! R(D) = 1 - H2(D),    H2(d) = -d log2 d - (1 - d) log2 (1 - d).
//! ```
//!
//! Observation noise and coding distortion chain into a single effective
//! crossover between the source symbol and the reproduced symbol,
//!
//! ```text
//! rho = p (1 - D) + (1 - p) D,
//! ```
//!
//! which is what every downstream error computation consumes. Useful identity:
//! `1/2 - rho = (1 - 2p)(1/2 - D)`.

use crate::error::DomainError;

/// Per-sensor observation crossover probability, `p` in `[0, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NoiseLevel(f64);

impl NoiseLevel {
    pub fn new(p: f64) -> Result<Self, DomainError> {
        if (0.0..0.5).contains(&p) {
            Ok(Self(p))
        } else {
            Err(DomainError::NoiseLevel(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Per-sensor code rate in bits per source symbol, `R` in `[0, 1]`.
///
/// `R = 0` is admitted so the level-0 limit can be represented; operations
/// that need a strictly positive rate reject it individually.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RateLevel(f64);

impl RateLevel {
    pub fn new(r: f64) -> Result<Self, DomainError> {
        if (0.0..=1.0).contains(&r) {
            Ok(Self(r))
        } else {
            Err(DomainError::RateLevel(r))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

/// Per-symbol reproduction error probability, `D` in `[0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Distortion(f64);

impl Distortion {
    pub fn new(d: f64) -> Result<Self, DomainError> {
        if (0.0..=0.5).contains(&d) {
            Ok(Self(d))
        } else {
            Err(DomainError::Distortion(d))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Effective crossover probability between source and reproduced symbol,
/// `rho` in `[0, 1/2]`. Satisfies `rho >= max(p, D)` for any generating pair.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CombinedError(f64);

impl CombinedError {
    pub fn new(rho: f64) -> Result<Self, DomainError> {
        if (0.0..=0.5).contains(&rho) {
            Ok(Self(rho))
        } else {
            Err(DomainError::CombinedError(rho))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Natural log of `1 - x`, accurate for small `x`.
#[inline]
fn ln_one_minus(x: f64) -> f64 {
    (-x).ln_1p()
}

/// Binary entropy in bits with the convention `0 log 0 = 0`.
fn h2_unchecked(d: f64) -> f64 {
    if d == 0.0 || d == 1.0 {
        return 0.0;
    }
    -(d * d.ln() + (1.0 - d) * ln_one_minus(d)) / std::f64::consts::LN_2
}

/// Binary entropy function `H2(d)` in bits.
///
/// Defined on `[0, 1]`, symmetric under `d -> 1 - d`, maximal (1 bit) at
/// `d = 1/2`.
pub fn binary_entropy(d: f64) -> Result<f64, DomainError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(DomainError::EntropyArgument(d));
    }
    Ok(h2_unchecked(d))
}

/// Distortion-rate function of the uniform binary source: the unique
/// `d` in `[0, 1/2]` with `1 - H2(d) = R`.
///
/// Strictly decreasing in `R`; `D(1) = 0` and `D(0) = 1/2` exactly. The
/// interior is located by bisection, which is immune to the vanishing slope
/// of `H2` near `d = 1/2`; the interval is shrunk to 1e-14 so the result is
/// well inside the 1e-12 contract.
pub fn distortion_rate(r: RateLevel) -> Distortion {
    let r = r.value();
    if r == 1.0 {
        return Distortion(0.0);
    }
    if r == 0.0 {
        return Distortion(0.5);
    }
    // 1 - H2(d) - r is positive at d = 0 and negative at d = 1/2.
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - h2_unchecked(mid) - r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Distortion(0.5 * (lo + hi))
}

/// Combined error probability `rho = p (1 - d) + (1 - p) d`.
///
/// Equals `p` iff `d = 0` and `1/2` iff `d = 1/2`.
pub fn combined_error(p: NoiseLevel, d: Distortion) -> CombinedError {
    let (p, d) = (p.value(), d.value());
    CombinedError(p * (1.0 - d) + (1.0 - p) * d)
}

/// Combined error as a function of the code rate:
/// `rho_p(R) = p (1 - D(R)) + (1 - p) D(R)`.
///
/// Strictly decreasing in `R` for fixed `p < 1/2`, with `p <= rho_p(R) < 1/2`
/// for `R > 0` and `rho_p(0) = 1/2`.
pub fn rho_of_rate(p: NoiseLevel, r: RateLevel) -> CombinedError {
    combined_error(p, distortion_rate(r))
}
