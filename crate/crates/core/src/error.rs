use thiserror::Error;

/// Errors surfaced by the library. Variants carry enough context to print a
/// one-line diagnostic and to pick an exit code in the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("evaluation-overflow: potential not finite at r = {r}")]
    EvaluationOverflow { r: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("out-of-domain: r = {r} is not above the validity floor {floor}")]
    OutOfDomain { r: f64, floor: f64 },

    #[error("turning-point-in-range: V(r)/k^2 >= 1 at r = {r}")]
    TurningPointInRange { r: f64 },

    #[error("hypergeometric-domain: series argument z = {z} outside |z| <= 0.9")]
    HypergeometricDomain { z: f64 },

    #[error("series-domain: {0}")]
    SeriesDomain(String),

    #[error("gamma-pole: log-gamma at a nonpositive integer")]
    GammaPole,

    #[error("integration-failure: step underflow near r = {r}")]
    IntegrationFailure { r: f64 },

    #[error("quadrature-failure: adaptive quadrature did not converge")]
    QuadratureFailure,

    #[error("degenerate-match: u and du both vanish at the matching radius r = {r}")]
    DegenerateMatch { r: f64 },

    #[error(
        "not-asymptotic: phase drift {drift} exceeds 1e-2 at r_match = {r_match}; enlarge r_match"
    )]
    NotAsymptotic { drift: f64, r_match: f64 },

    #[error("out-of-duality-domain: leading decay exponent a = {a} must lie in (0, 2)")]
    OutOfDualityDomain { a: f64 },

    #[error("not-rising: operation requires a rising potential")]
    NotRising,

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
