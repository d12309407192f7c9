use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("densities are not moment equivalent (Δm0 = {dm0:e}, Δm1 = {dm1:e}); the loop would not close")]
    MomentMismatch { dm0: f64, dm1: f64 },

    #[error("path interval [{path_lo}, {path_hi}] does not cover functional support [{lo}, {hi}]")]
    DomainTooSmall {
        path_lo: f64,
        path_hi: f64,
        lo: f64,
        hi: f64,
    },

    #[error("functional has potential terms; no closed-form Weyl element")]
    NotLinearSector,

    #[error("boundary amplitude {amplitude:e} exceeds tail threshold {threshold:e}")]
    TailOverflow { amplitude: f64, threshold: f64 },

    #[error("propagation window [{t_i}, {t_f}] does not cover support [{lo}, {hi}]")]
    SupportNotCovered { t_i: f64, t_f: f64, lo: f64, hi: f64 },

    #[error("F1 (from t = {later_lo}) does not lie in the future of F2 (until t = {earlier_hi})")]
    OrderingViolation { later_lo: f64, earlier_hi: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, DynError>;
