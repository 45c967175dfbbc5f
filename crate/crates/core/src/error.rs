use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },

    #[error("buffer length {actual} does not match {width}x{height} (expected {expected})")]
    BufferLength {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no circular region found (fit ratios: {ratios:?})")]
    NoCircularRegion { ratios: Vec<f64> },

    #[error("refinement not possible: {0}")]
    RefinementNotPossible(&'static str),

    #[error("region boundary has {0} points, need at least 3")]
    BoundaryTooShort(usize),

    #[error("no center vote landed inside the accumulator after {0} draws")]
    NoVotes(u32),
}
