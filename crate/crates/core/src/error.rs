use thiserror::Error;

use crate::numerics::FxFormat;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("transform size {n} is not a power of two")]
    NotPowerOfTwo { n: usize },
    #[error("transform size {n} is too small (need at least {min})")]
    SizeTooSmall { n: usize, min: usize },
    #[error("input is empty")]
    Empty,
    #[error("invalid fixed-point format Q{int_bits}.{frac_bits} (need int_bits >= 1, frac_bits >= 1, total <= 64)")]
    InvalidFormat { int_bits: u32, frac_bits: u32 },
    #[error("fixed-point format mismatch: {left} vs {right}")]
    FormatMismatch { left: FxFormat, right: FxFormat },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("stage {stage} out of range 1..={stages}")]
    StageOutOfRange { stage: u32, stages: u32 },
    #[error("invalid size range {lo}..={hi}")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("processor has no loaded frame")]
    NotLoaded,
    #[error("a frame is already in progress (stage {stage})")]
    FrameInProgress { stage: u32 },
}
