use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("unsupported magic number {0:?} (only binary P5 PGM is read)")]
    PgmMagic(String),

    #[error("malformed PGM header: {0}")]
    PgmHeader(String),

    #[error("truncated PGM payload: expected {expected} bytes, found {found}")]
    PgmTruncated { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("odd image dimensions {0}x{1}; an even size is required")]
    OddDimensions(usize, usize),

    #[error("scale count {scales} out of range 1..={max} for a {rows}x{cols} grid")]
    ScalesOutOfRange {
        scales: usize,
        max: usize,
        rows: usize,
        cols: usize,
    },

    #[error("band layout mismatch: expected {expected} planes, found {found}")]
    BandMismatch { expected: usize, found: usize },

    #[error("imaginary residue {0:e} exceeds tolerance; filter is not conjugate symmetric")]
    ImaginaryResidue(f64),

    #[error("grid {rows}x{cols} is smaller than the block extent {extent}")]
    GridTooSmall {
        rows: usize,
        cols: usize,
        extent: usize,
    },

    #[error("regularization parameter must be nonnegative, got {0}")]
    NegativeLambda(f64),

    #[error("no directional interpolator for angle {0}")]
    MissingInterpolator(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
