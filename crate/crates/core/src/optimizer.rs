//! Locating the best and worst per-sensor code rates.
//!
//! For a fixed noise level the decay rate is a smooth function of `R` on
//! `(0, 1]` that extends continuously to the level-0 value at `R = 0`, but
//! nothing guarantees unimodality and the global maximum can sit at either
//! endpoint. The extremizers here therefore bracket the optimum with a coarse
//! scan, refine the bracket by golden-section search, and always compare the
//! refined candidate against both endpoints explicitly. All decisions are
//! comparisons, so results are invariant under positive rescaling of the
//! objective.
//!
//! The noise axis splits into three regimes: below a threshold `p1` the full
//! rate `R = 1` is optimal, above a threshold `p0` the maximizer collapses to
//! `R = 0` (many maximally compressed sensors), and in between the optimum is
//! interior. Both thresholds are located by bisection over the regime
//! classification.

use rayon::prelude::*;

use crate::error::DomainError;
use crate::prob::{NoiseLevel, RateLevel};
use crate::ratefn::{decay_rate_exact, decay_rate_gaussian, decay_rate_level0, DecayRate};

/// Classification tolerance for boundary optima.
///
/// The exact-arm maximizer approaches the endpoints asymptotically instead of
/// attaining them (the interior maximum sits within 3e-8 of `R = 1` already
/// at `p = 0.01`), so an argmax within this distance of 0 or 1 is reported as
/// the endpoint itself.
pub const BOUNDARY_TOL: f64 = 2e-4;

/// Probe width of the one-sided difference used by
/// [`full_rate_locally_optimal`]. Chosen to resolve boundary optima at the
/// same scale as [`BOUNDARY_TOL`].
pub const DERIVATIVE_PROBE_H: f64 = 5e-4;

/// Where an extremizer landed after boundary classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Interior,
    AtZero,
    AtOne,
}

/// Which decay-rate arm an optimization targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Exact,
    Gaussian,
}

/// An extremizing rate together with the decay rate achieved there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalLevel {
    pub rate: RateLevel,
    pub decay: DecayRate,
    pub boundary: Boundary,
}

/// The two noise thresholds separating the full-rate, interior, and zero-rate
/// regimes, with `0 < p1 < p0 < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoints {
    pub p0: NoiseLevel,
    pub p1: NoiseLevel,
}

/// One row of a noise sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSweepRow {
    pub p: f64,
    pub r_star: f64,
    pub r_dagger: f64,
    pub i_star: f64,
    pub i_dagger: f64,
    pub r_star_gauss: Option<f64>,
}

/// Tie preference when two candidates achieve the same objective value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tie {
    PreferLargerRate,
    PreferSmallerRate,
}

const SCAN_STEP: usize = 1000;
const REFINE_TOL: f64 = 1e-8;

fn golden_section_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > REFINE_TOL {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximize `f` over `[0, 1]`: grid scan at step 1e-3 to bracket the global
/// maximum, golden-section refinement inside the bracket, then an explicit
/// comparison against `f(0)` and `f(1)`. Returns the argmax and the value.
///
/// Entirely comparison-based: multiplying `f` by a positive constant leaves
/// the argmax unchanged up to the refinement tolerance.
pub fn maximize_on_unit_interval(f: impl Fn(f64) -> f64, tie: Tie) -> (f64, f64) {
    let keep_new = |new: f64, best: f64| match tie {
        Tie::PreferLargerRate => new >= best,
        Tie::PreferSmallerRate => new > best,
    };

    let mut best_idx = 0;
    let mut best_val = f(0.0);
    for i in 1..=SCAN_STEP {
        let v = f(i as f64 / SCAN_STEP as f64);
        if keep_new(v, best_val) {
            best_idx = i;
            best_val = v;
        }
    }

    let lo = (best_idx.saturating_sub(1)) as f64 / SCAN_STEP as f64;
    let hi = ((best_idx + 1).min(SCAN_STEP)) as f64 / SCAN_STEP as f64;
    let (refined_x, refined_v) = golden_section_max(&f, lo, hi);

    // Endpoints can carry the global maximum; compare them explicitly.
    // Ascending rate order plus the tie rule in `keep_new` settles equal
    // values toward the preferred side.
    let candidates = [(0.0, f(0.0)), (refined_x, refined_v), (1.0, f(1.0))];
    let mut best = candidates[0];
    for &(x, v) in &candidates[1..] {
        if keep_new(v, best.1) {
            best = (x, v);
        }
    }
    best
}

fn arm_objective(p: NoiseLevel, arm: Arm) -> impl Fn(f64) -> f64 {
    move |rv: f64| {
        if rv == 0.0 {
            return decay_rate_level0(p).value();
        }
        let r = RateLevel::new(rv).expect("optimizer stays inside [0, 1]");
        match arm {
            Arm::Exact => decay_rate_exact(p, r).expect("rate is positive").value(),
            Arm::Gaussian => decay_rate_gaussian(p, r).value(),
        }
    }
}

fn classify(p: NoiseLevel, arm: Arm, rate: f64, value: f64) -> OptimalLevel {
    let f = arm_objective(p, arm);
    if rate < BOUNDARY_TOL {
        OptimalLevel {
            rate: RateLevel::new(0.0).expect("zero is a valid rate"),
            decay: decay_rate_level0(p),
            boundary: Boundary::AtZero,
        }
    } else if rate > 1.0 - BOUNDARY_TOL {
        OptimalLevel {
            rate: RateLevel::new(1.0).expect("one is a valid rate"),
            decay: wrap(f(1.0)),
            boundary: Boundary::AtOne,
        }
    } else {
        OptimalLevel {
            rate: RateLevel::new(rate).expect("optimizer stays inside [0, 1]"),
            decay: wrap(value),
            boundary: Boundary::Interior,
        }
    }
}

fn wrap(v: f64) -> DecayRate {
    if v.is_infinite() {
        DecayRate::INFINITE
    } else {
        DecayRate::from_value(v)
    }
}

/// Rate maximizing the selected decay-rate arm over `[0, 1]`, with the
/// `R = 0` endpoint served by the level-0 value. Ties prefer the larger rate
/// (fewer sensors at equal decay).
pub fn optimal_level(p: NoiseLevel, arm: Arm) -> OptimalLevel {
    let f = arm_objective(p, arm);
    let (rate, value) = maximize_on_unit_interval(&f, Tie::PreferLargerRate);
    classify(p, arm, rate, value)
}

/// Rate minimizing the exact decay rate over `[0, 1]` (the most pessimistic
/// choice). Ties prefer the smaller rate.
pub fn pessimistic_level(p: NoiseLevel) -> OptimalLevel {
    let f = arm_objective(p, Arm::Exact);
    let neg = |rv: f64| -f(rv);
    let (rate, _) = maximize_on_unit_interval(neg, Tie::PreferSmallerRate);
    classify(p, Arm::Exact, rate, f(rate))
}

/// One-sided probe of the exact arm at the full-rate endpoint: does the decay
/// rate still rise into `R = 1` at scale [`DERIVATIVE_PROBE_H`]? Used as an
/// independent detector of the level-1 regime.
pub fn full_rate_locally_optimal(p: NoiseLevel) -> bool {
    let f = arm_objective(p, Arm::Exact);
    f(1.0) >= f(1.0 - DERIVATIVE_PROBE_H)
}

fn bisect_noise(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    debug_assert!(!pred(lo) && pred(hi), "bisection bracket must straddle");
    while hi - lo > 1e-5 {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Locate the two noise thresholds by bisection over the boundary
/// classification of [`optimal_level`], to width 1e-5 in `p`.
///
/// `p0` is the infimum of the zero-rate regime, `p1` the supremum of the
/// full-rate regime. The brackets rest on the regime layout: the maximizer
/// is within 1e-10 of `R = 1` at `p = 0.001`, interior at `p = 0.15`, and
/// exactly at `R = 0` from `p = 0.30` on.
pub fn critical_points() -> CriticalPoints {
    let boundary_at = |pv: f64| {
        optimal_level(
            NoiseLevel::new(pv).expect("bisection stays inside [0, 0.5)"),
            Arm::Exact,
        )
        .boundary
    };
    let p0 = bisect_noise(0.15, 0.30, |pv| boundary_at(pv) == Boundary::AtZero);
    let p1 = bisect_noise(0.001, 0.15, |pv| boundary_at(pv) != Boundary::AtOne);
    CriticalPoints {
        p0: NoiseLevel::new(p0).expect("inside bracket"),
        p1: NoiseLevel::new(p1).expect("inside bracket"),
    }
}

/// Evaluate the optimal and pessimistic levels across a noise grid.
///
/// The grid must be strictly increasing. Rows are computed in parallel; the
/// output order and every value are independent of scheduling.
pub fn sweep_noise(
    p_grid: &[NoiseLevel],
    include_gaussian: bool,
) -> Result<Vec<NoiseSweepRow>, DomainError> {
    if p_grid.is_empty() {
        return Err(DomainError::Grid("noise grid must be nonempty"));
    }
    if p_grid.windows(2).any(|w| w[1].value() <= w[0].value()) {
        return Err(DomainError::Grid("noise grid must be strictly increasing"));
    }
    Ok(p_grid
        .par_iter()
        .map(|&p| {
            let opt = optimal_level(p, Arm::Exact);
            let pes = pessimistic_level(p);
            let gauss = include_gaussian.then(|| optimal_level(p, Arm::Gaussian).rate.value());
            NoiseSweepRow {
                p: p.value(),
                r_star: opt.rate.value(),
                r_dagger: pes.rate.value(),
                i_star: opt.decay.value(),
                i_dagger: pes.decay.value(),
                r_star_gauss: gauss,
            }
        })
        .collect())
}
