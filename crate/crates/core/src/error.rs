use thiserror::Error;

use crate::harmonics::Band;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("normalized rise/fall time {0} is outside [0, 0.25)")]
    InvalidDelta(f64),

    #[error("normalized rise/fall time {0} exceeds 1/12, the limit for exact composite-waveform synthesis")]
    SynthesisDomain(f64),

    #[error("harmonic order must be at least 1, got {0}")]
    InvalidHarmonic(u32),

    #[error("harmonic {0} is not an odd order free of multiples of 3")]
    NotInUpsilon(u32),

    #[error("invalid sample count {count}: {reason}")]
    SampleCount { count: usize, reason: &'static str },

    #[error("expected {expected} delays, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("scan angle {0} deg is outside (0, 180)")]
    ScanAngle(f64),

    #[error("harmonic q={q} ({band}) is not present in the excitation set")]
    MissingHarmonic { q: u32, band: Band },

    #[error("invalid array configuration: {0}")]
    InvalidConfig(String),

    #[error("harmonic power sum did not reach relative tolerance {rel_tol:e} below q = {cap}")]
    ToleranceUnreachable { rel_tol: f64, cap: u64 },

    #[error("relative tolerance {0:e} outside (0, 1e-3]")]
    InvalidTolerance(f64),

    #[error("5th-harmonic target {0} dB is outside the achievable range (-60, -13.98)")]
    TargetOutOfRange(f64),

    #[error("root bracket failure: {0}")]
    Bracket(String),

    #[error("invalid sweep range: {0}")]
    InvalidRange(String),

    #[error("closed-form directivity needs spacing that is a multiple of half a wavelength and progressive delays ({0})")]
    ClosedFormUnavailable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case identifier, used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDelta(_) => "invalid_delta",
            Error::SynthesisDomain(_) => "synthesis_domain",
            Error::InvalidHarmonic(_) => "invalid_harmonic",
            Error::NotInUpsilon(_) => "not_in_upsilon",
            Error::SampleCount { .. } => "sample_count",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::ScanAngle(_) => "scan_angle",
            Error::MissingHarmonic { .. } => "missing_harmonic",
            Error::InvalidConfig(_) => "invalid_config",
            Error::ToleranceUnreachable { .. } => "tolerance_unreachable",
            Error::InvalidTolerance(_) => "invalid_tolerance",
            Error::TargetOutOfRange(_) => "target_out_of_range",
            Error::Bracket(_) => "bracket",
            Error::InvalidRange(_) => "invalid_range",
            Error::ClosedFormUnavailable(_) => "closed_form_unavailable",
        }
    }
}
