//! Numerical tolerances and the desk-scale guard.

/// Tolerance for algebraic identities (trace, Hermiticity, channel identities).
pub const TOL_ALG: f64 = 1e-12;

/// Tolerance for entropic and spectral checks.
pub const TOL_NUM: f64 = 1e-9;

/// Default largest dense dimension any operation will materialize.
pub const DEFAULT_MAX_DIM: usize = 1 << 16;

/// Environment variable overriding [`DEFAULT_MAX_DIM`].
pub const MAX_DIM_ENV: &str = "EACQ_MAX_DIM";

/// Current scale guard: `EACQ_MAX_DIM` if set and parseable, else the default.
pub fn max_dim() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_DIM)
}

/// Refuse a dense object of dimension `dim` if it exceeds the guard.
pub fn check_dim(dim: usize) -> crate::Result<()> {
    let limit = max_dim();
    if dim > limit {
        return Err(crate::Error::Scale { dim, limit });
    }
    Ok(())
}
