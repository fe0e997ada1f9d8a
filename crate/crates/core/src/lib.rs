//! Decay-rate analysis for capacity-constrained aggregation of noisy binary
//! sensors.
//!
//! A fleet of `L` independent sensors observes one uniform binary source,
//! each through its own crossover channel with noise level `p`, and each
//! lossily encodes its observations at a common rate `R` under the network
//! budget `L R <= C`. A central estimator takes the majority vote of the
//! reproduced symbols. Raising `R` buys cleaner reproductions but fewer
//! sensors; the interesting question is which rate makes the collective
//! error probability vanish fastest as the budget `C` grows.
//!
//! The crate computes that tradeoff along every route:
//!
//! * [`prob`]: binary entropy, the distortion-rate inversion, and the
//!   composed crossover `rho_p(R)` every other module consumes;
//! * [`ratefn`]: the exact decay rate of the error probability in `C`, its
//!   level-0 closed form, and a Gaussian-approximation alternative;
//! * [`optimizer`]: optimal and pessimistic rates, the two critical noise
//!   thresholds, and noise sweeps;
//! * [`finite`]: exact binomial error probabilities at concrete budgets,
//!   finite-capacity rate scans, and decay-rate regressions;
//! * [`monte_carlo`]: reproducible stochastic simulation of the whole
//!   pipeline for validating the exact formulas.

pub mod error;
pub mod finite;
pub mod monte_carlo;
pub mod optimizer;
pub mod prob;
pub mod ratefn;

pub use error::DomainError;
pub use finite::{
    binomial_pmf, empirical_decay_rate, exact_error_probability, finite_optimal_rate,
    log_error_probability, sensor_count, FiniteSystem, SensorCount,
};
pub use monte_carlo::{
    derive_stream_seed, empirical_rate_scan, estimate_error, simulate_trial, RateScan,
    RateScanRow, SimConfig, SimResult,
};
pub use optimizer::{
    critical_points, full_rate_locally_optimal, maximize_on_unit_interval, optimal_level,
    pessimistic_level, sweep_noise, Arm, Boundary, CriticalPoints, NoiseSweepRow, OptimalLevel,
    Tie, BOUNDARY_TOL,
};
pub use prob::{
    binary_entropy, combined_error, distortion_rate, rho_of_rate, CombinedError, Distortion,
    NoiseLevel, RateLevel,
};
pub use ratefn::{
    bernoulli_rate_function, decay_rate_exact, decay_rate_gaussian, decay_rate_level0,
    gaussian_tail_params, scaled_rate_function, DecayRate, GaussianApproxParams,
    RateFunctionPoint,
};
