use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The grid does not resolve the requested bound states.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Inconsistent arguments (shapes, grids, normalization).
    #[error("usage error: {0}")]
    Usage(String),

    /// Adiabaticity or adiabatic frame requested where Δ = Ω = 0.
    #[error("singular point at t = {t} ns: detuning and coupling both vanish")]
    Singular { t: f64 },

    /// Fixed-step integration lost too much norm.
    #[error("accuracy error: norm drift {drift:.3e} exceeds {limit:.1e} (dt = {dt} ns)")]
    Accuracy { drift: f64, limit: f64, dt: f64 },

    /// The Euler-angle chart hit cos(2β) = 0.
    #[error(
        "Euler-angle coordinate singularity at t = {t} ns (beta = {beta}); \
         use direct state propagation instead"
    )]
    CoordinateSingularity { t: f64, beta: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
