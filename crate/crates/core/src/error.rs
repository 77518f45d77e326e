use thiserror::Error;

/// Errors raised by constellation, mapping, detection and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulation order {0} must be a power of two (>= 2 for PSK)")]
    InvalidOrder(usize),
    #[error("QAM order {0} must be a power of two >= 4")]
    InvalidQamOrder(usize),
    #[error("constellation is already rotated")]
    AlreadyRotated,
    #[error("transmit antenna count {nt} outside the supported range {min}..={max} for {context}")]
    AntennaCountRange {
        nt: usize,
        min: usize,
        max: usize,
        context: &'static str,
    },
    #[error("scheme requires the active-antenna count `na`")]
    MissingActiveCount,
    #[error("active-antenna count na={na} invalid for nt={nt} transmit antennas")]
    InvalidActiveCount { na: usize, nt: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bit block length mismatch: {0}")]
    BitLengthMismatch(String),
    #[error("TMLD candidate radius c={0} must be >= 1")]
    InvalidRadius(f64),
    #[error("overlap matrix fails positive semidefiniteness: d^H C d = {0}")]
    NotPositiveSemidefinite(f64),
    #[error("{0} requires a PSK or square-QAM constellation")]
    UnsupportedConstellation(&'static str),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
