//! Exact finite-capacity computations.
//!
//! For a concrete budget `C` the number of deployable sensors is the largest
//! `L` with `L R <= C`, and the majority-vote estimate fails exactly when
//! more than half of the `L` reproduced symbols are wrong. With crossover
//! `rho` per symbol the error probability is a binomial tail,
//!
//! ```text
//! odd L:   sum_{k = (L+1)/2}^{L} Q_rho(k | L)
//! even L:  sum_{k = L/2 + 1}^{L} Q_rho(k | L) + Q_rho(L/2 | L) / 2
//! ```
//!
//! where the halved middle term is the fair-coin resolution of voting ties.
//!
//! Everything is computed through log-space probability mass terms combined
//! with log-sum-exp, smallest term first: the consistency checks against the
//! asymptotic decay rate push error probabilities down to `e^{-1000}` and
//! beyond, far outside the range of naive summation.

use crate::error::DomainError;
use crate::prob::{rho_of_rate, CombinedError, NoiseLevel, RateLevel};

/// Number of deployed sensors, at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SensorCount(u64);

impl SensorCount {
    pub fn new(l: u64) -> Result<Self, DomainError> {
        if l >= 1 {
            Ok(Self(l))
        } else {
            Err(DomainError::SensorCount(l))
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

/// A fully derived `(C, R, p)` configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteSystem {
    /// Total capacity in bits per source symbol across the network.
    pub capacity: u32,
    /// Per-sensor code rate.
    pub rate: RateLevel,
    /// Per-sensor observation noise.
    pub noise: NoiseLevel,
    /// Largest sensor count satisfying `L R <= C`.
    pub sensors: SensorCount,
    /// Effective per-symbol crossover `rho_p(R)`.
    pub rho: CombinedError,
}

impl FiniteSystem {
    pub fn new(capacity: u32, rate: RateLevel, noise: NoiseLevel) -> Result<Self, DomainError> {
        let sensors = sensor_count(capacity, rate)?;
        Ok(Self {
            capacity,
            rate,
            noise,
            sensors,
            rho: rho_of_rate(noise, rate),
        })
    }
}

/// Largest `L` with `L R <= C`, i.e. `floor(C / R)` guarded against
/// floating-point boundaries: a quotient within 1e-9 of an integer snaps to
/// that integer. The budget constraint is exact arithmetic; an unlucky
/// binary representation of `R` must not deny a legitimate sensor
/// (`C = 49, R = 0.07` evaluates to 699.9999999999999).
pub fn sensor_count(capacity: u32, rate: RateLevel) -> Result<SensorCount, DomainError> {
    if capacity < 1 {
        return Err(DomainError::Capacity(capacity));
    }
    if rate.is_zero() {
        return Err(DomainError::ZeroRate);
    }
    let quotient = f64::from(capacity) / rate.value();
    let nearest = quotient.round();
    let l = if (quotient - nearest).abs() < 1e-9 {
        nearest as u64
    } else {
        quotient.floor() as u64
    };
    SensorCount::new(l)
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

// Exact Stirling errors ln(n!) - ((n + 1/2) ln n - n + ln sqrt(2 pi)) for
// n = 0..=15; the asymptotic series takes over beyond the table.
const STIRLERR_EXACT: [f64; 16] = [
    0.0, // unused: the n = 0 factorials short-circuit before reaching here
    0.081_061_466_795_327_26,
    0.041_340_695_955_409_3,
    0.027_677_925_684_998_34,
    0.020_790_672_103_765_093,
    0.016_644_691_189_821_193,
    0.013_876_128_823_070_748,
    0.011_896_709_945_891_77,
    0.010_411_265_261_972_096,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_87,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_53,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_847_5,
    0.005_554_733_551_962_801,
];

/// Stirling series error `ln(n!) - ((n + 1/2) ln n - n + ln sqrt(2 pi))`.
///
/// Truncating after the n^-9 term leaves an error below 2e-16 for every
/// n > 15.
fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        return STIRLERR_EXACT[n as usize];
    }
    let nf = n as f64;
    let nn = nf * nf;
    (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
}

/// Binomial deviance `x ln(x / m) + m - x`, evaluated through its series
/// when `x` is near `m` to avoid the cancellation in the direct form.
fn binomial_deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let v2 = v * v;
        let mut sum = (x - m) * v;
        let mut term = 2.0 * x * v;
        let mut j = 1_u32;
        loop {
            term *= v2;
            let next = sum + term / f64::from(2 * j + 1);
            if next == sum {
                return next;
            }
            sum = next;
            j += 1;
        }
    }
    x * (x / m).ln() + m - x
}

/// Natural log of the binomial mass `C(n, k) rho^k (1 - rho)^(n - k)`.
///
/// Saddle-point form: Stirling errors plus deviance terms, all of moderate
/// magnitude. Differences of large log-factorials would cap the relative
/// accuracy near 1e-10 at n = 1e5; this form keeps it at a few ulps.
fn log_binomial_pmf(n: u64, k: u64, rho: f64) -> f64 {
    debug_assert!(k <= n);
    if rho == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if rho == 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return n as f64 * (-rho).ln_1p();
    }
    if k == n {
        return n as f64 * rho.ln();
    }
    let (nf, kf) = (n as f64, k as f64);
    let lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k)
        - binomial_deviance(kf, nf * rho)
        - binomial_deviance(nf - kf, nf * (1.0 - rho));
    let lf = LN_2PI + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

/// Binomial probability mass `Q_rho(k | n)`, evaluated in log space so it
/// stays accurate for `n` up to at least 1e5.
pub fn binomial_pmf(n: u64, k: u64, rho: CombinedError) -> Result<f64, DomainError> {
    if k > n {
        return Err(DomainError::BinomialCount { n, k });
    }
    Ok(log_binomial_pmf(n, k, rho.value()).exp())
}

/// Log-sum-exp accumulated from the smallest term up.
fn log_sum_exp(terms: &mut Vec<f64>) -> f64 {
    terms.retain(|t| t.is_finite());
    if terms.is_empty() {
        return f64::NEG_INFINITY;
    }
    terms.sort_by(|a, b| a.partial_cmp(b).expect("log terms are never NaN"));
    let max = *terms.last().expect("nonempty");
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Natural log of the majority-vote error probability.
///
/// Finite-precision-safe companion of [`exact_error_probability`]: the
/// probability itself underflows near `e^{-745}`, the log never does.
pub fn log_error_probability(l: SensorCount, rho: CombinedError) -> f64 {
    let n = l.value();
    let rho = rho.value();
    if rho == 0.0 {
        return f64::NEG_INFINITY;
    }
    // floor(n/2) + 1 starts the strict-majority tail for both parities.
    let first = n / 2 + 1;
    let mut terms: Vec<f64> = (first..=n).map(|k| log_binomial_pmf(n, k, rho)).collect();
    if n.is_multiple_of(2) {
        terms.push(log_binomial_pmf(n, n / 2, rho) - std::f64::consts::LN_2);
    }
    log_sum_exp(&mut terms)
}

/// Majority-vote error probability with fair-coin tie resolution.
///
/// Monotone nonincreasing along odd `L` for fixed `rho < 1/2`; an even count
/// never beats the preceding odd one, and `L = 2` degenerates to `L = 1`
/// exactly.
pub fn exact_error_probability(l: SensorCount, rho: CombinedError) -> f64 {
    log_error_probability(l, rho).exp()
}

/// Scan a rate grid at fixed capacity and noise, returning the grid rate
/// with the smallest exact error probability together with that probability.
/// Ties go to the larger rate.
pub fn finite_optimal_rate(
    capacity: u32,
    noise: NoiseLevel,
    r_grid: &[RateLevel],
) -> Result<(RateLevel, f64), DomainError> {
    if r_grid.is_empty() {
        return Err(DomainError::Grid("rate grid must be nonempty"));
    }
    let mut best: Option<(RateLevel, f64)> = None;
    for &r in r_grid {
        let system = FiniteSystem::new(capacity, r, noise)?;
        let err = exact_error_probability(system.sensors, system.rho);
        best = match best {
            Some((_, e)) if err > e => best,
            Some((rb, e)) if err == e && r.value() < rb.value() => Some((rb, e)),
            _ => Some((r, err)),
        };
    }
    Ok(best.expect("grid is nonempty"))
}

/// Least-squares slope of `-ln(exact error)` against the capacity, an
/// empirical estimate of the exponential decay rate that converges to the
/// asymptotic value as the capacities grow.
pub fn empirical_decay_rate(
    noise: NoiseLevel,
    rate: RateLevel,
    capacities: &[u32],
) -> Result<f64, DomainError> {
    if capacities.len() < 2 {
        return Err(DomainError::Grid("need at least two capacities"));
    }
    if capacities.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DomainError::Grid("capacities must be strictly increasing"));
    }
    if capacities[0] < 10 {
        return Err(DomainError::Grid("capacities must all be at least 10"));
    }
    let rho = rho_of_rate(noise, rate);
    if rho.value() == 0.0 {
        return Err(DomainError::DegenerateRho(rho.value()));
    }
    let points: Vec<(f64, f64)> = capacities
        .iter()
        .map(|&c| {
            let l = sensor_count(c, rate)?;
            Ok((f64::from(c), -log_error_probability(l, rho)))
        })
        .collect::<Result<_, DomainError>>()?;
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in &points {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::distortion_rate;
    use crate::ratefn::decay_rate_exact;
    use proptest::prelude::*;

    fn p(v: f64) -> NoiseLevel {
        NoiseLevel::new(v).unwrap()
    }

    fn r(v: f64) -> RateLevel {
        RateLevel::new(v).unwrap()
    }

    fn rho(v: f64) -> CombinedError {
        CombinedError::new(v).unwrap()
    }

    fn l(v: u64) -> SensorCount {
        SensorCount::new(v).unwrap()
    }

    #[test]
    fn sensor_count_basics() {
        assert_eq!(sensor_count(50, r(1.0)).unwrap().value(), 50);
        assert_eq!(sensor_count(50, r(0.5)).unwrap().value(), 100);
        assert_eq!(sensor_count(50, r(0.3)).unwrap().value(), 166);
    }

    #[test]
    fn sensor_count_snaps_float_boundaries() {
        // 49 / 0.07 and 7 / 0.07 both land just below the exact integer.
        assert_eq!(sensor_count(49, r(0.07)).unwrap().value(), 700);
        assert_eq!(sensor_count(7, r(0.07)).unwrap().value(), 100);
        assert_eq!(sensor_count(50, r(0.1)).unwrap().value(), 500);
    }

    #[test]
    fn sensor_count_rejects_bad_inputs() {
        assert!(sensor_count(0, r(0.5)).is_err());
        assert!(sensor_count(5, r(0.0)).is_err());
    }

    #[test]
    fn finite_system_derives_consistently() {
        let sys = FiniteSystem::new(50, r(0.3), p(0.1)).unwrap();
        assert_eq!(sys.sensors.value(), 166);
        let lr = sys.sensors.value() as f64 * sys.rate.value();
        assert!(lr <= 50.0 + 1e-6);
        assert!((sys.sensors.value() + 1) as f64 * sys.rate.value() > 50.0);
        assert_eq!(sys.rho, rho_of_rate(p(0.1), r(0.3)));
    }

    #[test]
    fn pmf_hand_values() {
        assert!((binomial_pmf(2, 1, rho(0.5)).unwrap() - 0.5).abs() < 1e-15);
        assert!((binomial_pmf(3, 0, rho(0.1)).unwrap() - 0.729).abs() < 1e-12);
        assert!((binomial_pmf(10, 10, rho(0.1)).unwrap() - 1e-10).abs() < 1e-22);
        assert!(binomial_pmf(3, 4, rho(0.1)).is_err());
    }

    #[test]
    fn pmf_sums_to_one_at_large_n() {
        let q = rho(0.3);
        let total: f64 = (0..=100_000)
            .map(|k| binomial_pmf(100_000, k, q).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-10, "sum = {total}");
    }

    #[test]
    fn pmf_matches_stirling_asymptotic() {
        // Central term at rho = 1/2 approaches sqrt(2 / (pi L)).
        let v = binomial_pmf(100_000, 50_000, rho(0.5)).unwrap();
        let stirling = (2.0 / (std::f64::consts::PI * 1e5)).sqrt();
        assert!(((v - stirling) / stirling).abs() < 1e-3, "pmf {v} vs {stirling}");
    }

    #[test]
    fn error_probability_hand_values() {
        assert!((exact_error_probability(l(1), rho(0.1)) - 0.1).abs() < 1e-15);
        assert!((exact_error_probability(l(3), rho(0.1)) - 0.028).abs() < 1e-15);
    }

    #[test]
    fn two_sensors_degenerate_to_one() {
        // rho^2 + rho (1 - rho) = rho: the tie term cancels the pair gain.
        for &q in &[0.05, 0.1, 0.25, 0.4] {
            let one = exact_error_probability(l(1), rho(q));
            let two = exact_error_probability(l(2), rho(q));
            assert!((two - one).abs() < 1e-12, "L = 2 mismatch at rho = {q}");
            assert!((one - q).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_sum_identity() {
        // Error tail plus the symmetrically computed success mass is 1.
        for &(n, q) in &[(7_u64, 0.2), (8, 0.2), (101, 0.35), (100, 0.35)] {
            let err = exact_error_probability(l(n), rho(q));
            let last_success = if n % 2 == 1 { (n - 1) / 2 } else { n / 2 - 1 };
            let mut success: f64 = (0..=last_success)
                .map(|k| binomial_pmf(n, k, rho(q)).unwrap())
                .sum();
            if n % 2 == 0 {
                success += 0.5 * binomial_pmf(n, n / 2, rho(q)).unwrap();
            }
            assert!((err + success - 1.0).abs() < 1e-12, "identity at L = {n}");
        }
    }

    #[test]
    fn odd_counts_never_hurt() {
        for &q in &[0.05, 0.15, 0.25, 0.35, 0.45] {
            let mut prev = log_error_probability(l(1), rho(q));
            let mut n = 3;
            while n <= 1001 {
                let cur = log_error_probability(l(n), rho(q));
                assert!(cur <= prev + 1e-12, "odd-L increase at L = {n}, rho = {q}");
                prev = cur;
                n += 2;
            }
        }
    }

    #[test]
    fn even_counts_never_beat_preceding_odd() {
        for &q in &[0.1, 0.3, 0.45] {
            for k in 1..=50_u64 {
                let even = log_error_probability(l(2 * k), rho(q));
                let odd = log_error_probability(l(2 * k - 1), rho(q));
                assert!(even >= odd - 1e-12, "even-L win at L = {}", 2 * k);
            }
        }
    }

    #[test]
    fn finite_scan_single_choice() {
        let grid = [r(1.0)];
        let (best, err) = finite_optimal_rate(1, p(0.3), &grid).unwrap();
        assert_eq!(best.value(), 1.0);
        assert!((err - 0.3).abs() < 1e-15);
    }

    #[test]
    fn finite_scan_low_noise_prefers_full_rate() {
        let grid: Vec<RateLevel> = (1..=100).map(|i| r(i as f64 / 100.0)).collect();
        let (best, _) = finite_optimal_rate(50, p(0.01), &grid).unwrap();
        assert_eq!(best.value(), 1.0);
    }

    #[test]
    fn finite_scan_frozen_regression() {
        // Exhaustive evaluation of the C = 50, p = 0.15 scan at step 0.01,
        // frozen from an independent run.
        let grid: Vec<RateLevel> = (1..=100).map(|i| r(i as f64 / 100.0)).collect();
        let (best, err) = finite_optimal_rate(50, p(0.15), &grid).unwrap();
        assert!((best.value() - 0.60).abs() < 1e-12, "best R = {}", best.value());
        assert!(
            ((err - 1.2343333104196034e-9) / 1.2343333104196034e-9).abs() < 1e-6,
            "error = {err}"
        );
    }

    #[test]
    fn empirical_decay_rate_converges() {
        let caps: Vec<u32> = (501..=2001).step_by(2).collect();
        let slope = empirical_decay_rate(p(0.1), r(1.0), &caps).unwrap();
        let exact = decay_rate_exact(p(0.1), r(1.0)).unwrap().value();
        assert!(
            ((slope - exact) / exact).abs() < 0.02,
            "slope {slope} vs exact {exact}"
        );
    }

    #[test]
    fn empirical_decay_rate_noiseless_compressed() {
        let caps: Vec<u32> = (501..=2001).step_by(2).collect();
        let slope = empirical_decay_rate(p(0.0), r(0.5), &caps).unwrap();
        let exact = decay_rate_exact(p(0.0), r(0.5)).unwrap().value();
        assert!(
            ((slope - exact) / exact).abs() < 0.02,
            "slope {slope} vs exact {exact}"
        );
    }

    #[test]
    fn empirical_decay_rate_vanishes_at_pure_noise() {
        let caps: Vec<u32> = (11..=211).step_by(20).collect();
        let slope = empirical_decay_rate(p(0.499999), r(1.0), &caps).unwrap();
        assert!(slope.abs() < 1e-6, "slope = {slope}");
    }

    #[test]
    fn empirical_decay_rate_validates_input() {
        assert!(empirical_decay_rate(p(0.1), r(1.0), &[100]).is_err());
        assert!(empirical_decay_rate(p(0.1), r(1.0), &[100, 100]).is_err());
        assert!(empirical_decay_rate(p(0.1), r(1.0), &[5, 100]).is_err());
        assert!(matches!(
            empirical_decay_rate(p(0.0), r(1.0), &[100, 200]),
            Err(DomainError::DegenerateRho(_))
        ));
    }

    #[test]
    fn large_deviations_consistency_at_capacity_2000() {
        for &pv in &[0.05, 0.1, 0.2, 0.3] {
            let q = rho_of_rate(p(pv), r(1.0));
            let finite = -log_error_probability(l(2000), q) / 2000.0;
            let exact = decay_rate_exact(p(pv), r(1.0)).unwrap().value();
            assert!(
                ((finite - exact) / exact).abs() < 0.05,
                "gap at p = {pv}: {finite} vs {exact}"
            );
        }
    }

    #[test]
    fn distortion_feeds_scan_monotonically() {
        // Spot check that rate 0.9 yields the frozen distortion used in the
        // low-noise scan discussion.
        let d = distortion_rate(r(0.9)).value();
        assert!((d - 0.012986862055517785).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn pmf_is_a_probability(n in 1_u64..200, kf in 0.0_f64..=1.0, q in 0.0_f64..=0.5) {
            let k = (kf * n as f64).floor() as u64;
            let v = binomial_pmf(n, k.min(n), rho(q)).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn error_probability_bounded_by_half(n in 1_u64..400, q in 0.0_f64..=0.5) {
            let e = exact_error_probability(l(n), rho(q));
            prop_assert!(e >= 0.0);
            prop_assert!(e <= 0.5 + 1e-12);
        }
    }
}
