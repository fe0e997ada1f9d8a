use thiserror::Error;

/// An argument fell outside the domain the model is defined on.
///
/// Every variant names the violated bound so that front ends can report it
/// verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("noise level p = {0} outside [0, 0.5)")]
    NoiseLevel(f64),
    #[error("code rate R = {0} outside [0, 1]")]
    RateLevel(f64),
    #[error("code rate R must be positive here; the R = 0 endpoint is served by the level-0 value")]
    ZeroRate,
    #[error("distortion D = {0} outside [0, 0.5]")]
    Distortion(f64),
    #[error("combined error rho = {0} outside [0, 0.5]")]
    CombinedError(f64),
    #[error("entropy argument {0} outside [0, 1]")]
    EntropyArgument(f64),
    #[error("sample mean z = {0} outside the open interval (0, 1)")]
    SampleMean(f64),
    #[error("rate function is degenerate at rho = {0} (all mass on one symbol)")]
    DegenerateRho(f64),
    #[error("capacity C = {0} must be at least 1")]
    Capacity(u32),
    #[error("sensor count L = {0} must be at least 1")]
    SensorCount(u64),
    #[error("binomial count k = {k} outside [0, {n}]")]
    BinomialCount { n: u64, k: u64 },
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("invalid grid: {0}")]
    Grid(&'static str),
}
