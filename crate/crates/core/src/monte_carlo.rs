//! Stochastic simulation of the full sensing pipeline.
//!
//! Each trial draws a source symbol uniformly from {+1, -1}, pushes it
//! through every sensor's observation noise and idealized lossy coding, and
//! takes the majority vote of the reproductions. Lossy coding is modeled as
//! its achieving test channel: an independent flip with probability `D(R)`
//! per reproduced symbol, so a sensor's output disagrees with the source
//! exactly with probability `rho = p(1 - D) + (1 - p)D`, realized as the two
//! physical flips rather than one combined one. Voting ties resolve with one
//! fair coin, matching the halved middle term of the exact even-count
//! formula, so simulation and closed form estimate the same quantity.
//!
//! # Randomness contract
//!
//! Reproducibility across thread counts and schedules comes from a fixed
//! stream derivation, which is part of the public interface:
//!
//! * trial `t` of a simulation with seed `s` draws from a ChaCha8 generator
//!   keyed by `seed_from_u64(s)` on stream `t`;
//! * inside a trial the draw order is: source bit, then per sensor the noise
//!   flip followed by the reproduction flip, then one tie-break bit if the
//!   vote sum is zero;
//! * grid point `i` of a rate scan with seed `s` runs its simulation with
//!   seed [`derive_stream_seed`]`(s, i)`, the `i`-th output of the SplitMix64
//!   sequence started at `s`.
//!
//! Error counts accumulate by integer addition, so parallel reduction order
//! cannot change any result.

use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::DomainError;
use crate::finite::{exact_error_probability, sensor_count, SensorCount};
use crate::prob::{distortion_rate, rho_of_rate, Distortion, NoiseLevel, RateLevel};

/// A complete simulation request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub capacity: u32,
    pub rate: RateLevel,
    pub noise: NoiseLevel,
    pub trials: u64,
    pub seed: u64,
}

/// Outcome of a simulation. Identical configs (seed included) produce
/// identical results regardless of parallel scheduling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub error_count: u64,
    pub trials: u64,
    /// Empirical error rate `error_count / trials`.
    pub p_hat: f64,
    /// 95% normal-approximation halfwidth. The variance estimate is floored
    /// at `1/(4 trials)` so degenerate counts (all successes or all
    /// failures) still yield a nonzero width; a single trial reports a
    /// width of 0.98, i.e. unusable.
    pub ci_halfwidth: f64,
    pub l_used: SensorCount,
}

/// One grid point of an empirical rate scan, with the exact error alongside
/// for validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateScanRow {
    pub rate: f64,
    pub sensors: u64,
    pub rho: f64,
    pub p_hat: f64,
    pub ci_halfwidth: f64,
    pub exact: f64,
}

/// Result of an empirical rate scan.
#[derive(Debug, Clone, PartialEq)]
pub struct RateScan {
    pub rows: Vec<RateScanRow>,
    /// Index of the row with the smallest empirical error rate; ties go to
    /// the larger rate.
    pub best_index: usize,
    /// Rows whose confidence interval overlaps the best row's interval:
    /// statistically indistinguishable from the winner.
    pub indistinguishable: Vec<usize>,
}

/// The `index`-th output of the SplitMix64 sequence started at `seed`.
///
/// This is the documented mixing function deriving per-grid-point seeds from
/// a master seed.
pub fn derive_stream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15_u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Majority decision with a fair-coin tie break.
fn majority_sign(sum: i64, rng: &mut impl Rng) -> i8 {
    match sum.cmp(&0) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => {
            if rng.random::<bool>() {
                1
            } else {
                -1
            }
        }
    }
}

/// Simulate one estimation of the source symbol `x` (+1 or -1) through `l`
/// sensors with observation noise `p` and reproduction distortion `d`.
///
/// Each sensor flips `x` with probability `p` (observation) and flips the
/// result with probability `d` (reproduction); the estimate is the sign of
/// the vote sum, with a zero sum resolved by one fair bit.
pub fn simulate_trial(
    x: i8,
    l: SensorCount,
    p: NoiseLevel,
    d: Distortion,
    rng: &mut impl Rng,
) -> i8 {
    debug_assert!(x == 1 || x == -1, "source symbol must be +1 or -1");
    let noise_flip = Bernoulli::new(p.value()).expect("noise level is a probability");
    let repro_flip = Bernoulli::new(d.value()).expect("distortion is a probability");
    let mut sum: i64 = 0;
    for _ in 0..l.value() {
        let mut symbol = x;
        if noise_flip.sample(rng) {
            symbol = -symbol;
        }
        if repro_flip.sample(rng) {
            symbol = -symbol;
        }
        sum += i64::from(symbol);
    }
    majority_sign(sum, rng)
}

fn ci_halfwidth(errors: u64, trials: u64) -> f64 {
    let n = trials as f64;
    let p_hat = errors as f64 / n;
    let variance = (p_hat * (1.0 - p_hat)).max(0.25 / n);
    1.96 * (variance / n).sqrt()
}

/// Estimate the error probability of a configuration by independent trials.
///
/// Derives `L` from the capacity budget and `D` from the rate, then runs
/// `cfg.trials` trials in parallel under the randomness contract above.
pub fn estimate_error(cfg: &SimConfig) -> Result<SimResult, DomainError> {
    if cfg.trials < 1 {
        return Err(DomainError::NoTrials);
    }
    let l = sensor_count(cfg.capacity, cfg.rate)?;
    let d = distortion_rate(cfg.rate);
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = cfg.noise;
    let error_count: u64 = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = base.clone();
            rng.set_stream(trial);
            let x: i8 = if rng.random::<bool>() { 1 } else { -1 };
            let estimate = simulate_trial(x, l, noise, d, &mut rng);
            u64::from(estimate != x)
        })
        .sum();
    Ok(SimResult {
        error_count,
        trials: cfg.trials,
        p_hat: error_count as f64 / cfg.trials as f64,
        ci_halfwidth: ci_halfwidth(error_count, cfg.trials),
        l_used: l,
    })
}

/// Run one simulation per grid rate, each with a seed derived from the
/// master seed and its grid index, and report the empirical minimizer with
/// its statistically indistinguishable neighbors.
pub fn empirical_rate_scan(
    capacity: u32,
    noise: NoiseLevel,
    r_grid: &[RateLevel],
    trials: u64,
    seed: u64,
) -> Result<RateScan, DomainError> {
    if r_grid.is_empty() {
        return Err(DomainError::Grid("rate grid must be nonempty"));
    }
    let mut rows = Vec::with_capacity(r_grid.len());
    for (i, &rate) in r_grid.iter().enumerate() {
        let cfg = SimConfig {
            capacity,
            rate,
            noise,
            trials,
            seed: derive_stream_seed(seed, i as u64),
        };
        let sim = estimate_error(&cfg)?;
        let rho = rho_of_rate(noise, rate);
        rows.push(RateScanRow {
            rate: rate.value(),
            sensors: sim.l_used.value(),
            rho: rho.value(),
            p_hat: sim.p_hat,
            ci_halfwidth: sim.ci_halfwidth,
            exact: exact_error_probability(sim.l_used, rho),
        });
    }
    let mut best_index = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.p_hat <= rows[best_index].p_hat {
            best_index = i;
        }
    }
    let best = rows[best_index];
    let indistinguishable = rows
        .iter()
        .enumerate()
        .filter(|(i, row)| {
            *i != best_index && (row.p_hat - best.p_hat).abs() <= row.ci_halfwidth + best.ci_halfwidth
        })
        .map(|(i, _)| i)
        .collect();
    Ok(RateScan {
        rows,
        best_index,
        indistinguishable,
    })
}
