use std::io;

use thiserror::Error;

use crate::geometry::Voxel;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),

    #[error("coordinate {0} is outside the addressable voxel range")]
    OutOfRange(f64),

    #[error("segment has zero length")]
    DegenerateSegment,

    #[error("voxel {0} is already the end voxel; no candidates remain")]
    NoCandidates(Voxel),

    #[error("candidate walk exceeded its step bound of {0}")]
    WalkDidNotTerminate(usize),

    #[error("chains voxelize different segments")]
    ChainMismatch,

    #[error("batch contains no segments")]
    EmptyBatch,

    #[error("work item ({segment}, {step}) is outside the batch grid")]
    IndexOutOfRange { segment: usize, step: usize },

    #[error("batch output buffer overflow: {0}")]
    CapacityOverflow(String),

    #[error("invalid partition config: {0}")]
    InvalidConfig(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed voxel file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
