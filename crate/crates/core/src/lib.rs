//! Voxelization of 3D line segments.
//!
//! The [`parametric`] sampler is the production path; [`walk`] is an
//! independent nearest-candidate walk used to check it, and [`batch`] runs
//! the parametric sampler over many segments as a flat grid of independent
//! work items spread across threads.

pub mod batch;
pub mod chain;
pub mod error;
pub mod geometry;
pub mod io;
pub mod parametric;
pub mod walk;

pub use batch::{
    batch_preprocess, batch_voxelize, effective_item_count, kernel_work_item, BatchPlan,
    BatchResult, ItemCounts, PartitionConfig, PhaseTiming, SegmentPlan,
};
pub use chain::{check_chain, interior_violation, skippable_voxels, ChainDefect, VoxelChain};
pub use error::{Error, Result};
pub use geometry::{
    point_line_distance, round_point, segment_length, Line, Point3, Segment, Voxel,
};
pub use parametric::{chain_length_bounds, make_plan, voxelize_parametric, ParametricPlan};
pub use walk::{
    candidate_voxels, chains_equivalent, voxelize_walk, CandidateSet, ChainDifference,
    EquivalenceReport,
};
