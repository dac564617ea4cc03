use thiserror::Error;

use crate::zeta::AdmissibilityReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("time {t} is outside [0, {duration}]")]
    TimeOutOfRange { t: f64, duration: f64 },

    #[error("invalid zeta series: {0}")]
    InvalidSeries(String),

    #[error("envelope must be strictly positive, got {value} at t = {t}")]
    InvalidEnvelope { t: f64, value: f64 },

    #[error("effective drive changes sign or vanishes near t = {t} (value {value})")]
    EnvelopeSign { t: f64, value: f64 },

    #[error("slope ratio |zeta'|/envelope = {ratio} >= 1 at t = {t}")]
    SqrtDomain { t: f64, ratio: f64 },

    #[error("zeta = {zeta} is within the guard of a cot/csc pole at t = {t}")]
    Divergence { t: f64, zeta: f64 },

    #[error("series is not admissible ({} violations)", .0.violations.len())]
    Inadmissible(Box<AdmissibilityReport>),

    #[error("matrix is not Hermitian (deviation {deviation:e}) at t = {t}")]
    NotHermitian { t: f64, deviation: f64 },

    #[error("unitarity defect {defect:e} exceeds {limit:e}")]
    NotUnitary { defect: f64, limit: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("no sign change in bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("admissibility lost at free coefficient = {value}: {reason}")]
    CalibrationDomain { value: f64, reason: String },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}
