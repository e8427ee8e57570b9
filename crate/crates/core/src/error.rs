use thiserror::Error;

/// Errors raised by the laboratory. Variants carry enough context to
/// locate the offending sample, radius or configuration knob.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("non-finite value {value} at node {node:?}")]
    NonFinite { node: Vec<usize>, value: f64 },
    #[error("profile does not cover radius {radius} (r_max = {r_max}) and has nonzero tail")]
    ProfileRange { radius: f64, r_max: f64 },
    #[error("not in homogeneous Sobolev space of order {s}: zero mode {zero_mode:e}")]
    NotInHomogeneous { s: f64, zero_mode: f64 },
    #[error("quadrature did not converge: estimate {estimate:e}, tolerance {tol:e}")]
    Quadrature { estimate: f64, tol: f64 },
    #[error("calibration residual {residual:e} exceeds {limit:e}")]
    Calibration { residual: f64, limit: f64 },
    #[error("target is flat at 0: γ″(0) = 0")]
    FlatTarget,
    #[error("range violation: max|v| = {max_abs} exceeds domain half-width {s0}")]
    Range { max_abs: f64, s0: f64 },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("resolution insufficient: {0}")]
    Resolution(String),
    #[error("admissibility failed: {0}")]
    Admissibility(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
