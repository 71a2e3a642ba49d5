//! Parametric voxelization: sample `G_k = S + W·k` for `k = 0..=N` with
//! `W = (E - S) / N`, round every sample to its voxel and drop consecutive
//! repeats.

use crate::chain::{dedup_consecutive, VoxelChain};
use crate::error::Result;
use crate::geometry::{round_point, segment_length, Point3, Segment};

/// Step count and step vector for one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricPlan {
    pub step_count: u64,
    pub step_vector: Point3,
    start: Point3,
    end: Point3,
}

impl ParametricPlan {
    pub fn start(&self) -> Point3 {
        self.start
    }

    /// Sample `k` of the sequence. The last sample is the segment end itself
    /// so the chain always terminates in the end voxel.
    #[inline]
    pub fn sample(&self, k: u64) -> Point3 {
        if k == self.step_count {
            return if k == 0 { self.start } else { self.end };
        }
        let kf = k as f64;
        Point3::new(
            self.start.x + self.step_vector.x * kf,
            self.start.y + self.step_vector.y * kf,
            self.start.z + self.step_vector.z * kf,
        )
    }
}

fn same_voxel(a: Point3, b: Point3) -> bool {
    a.x.round() == b.x.round() && a.y.round() == b.y.round() && a.z.round() == b.z.round()
}

/// `N = int(|E - S|)`, raised to the largest per-axis displacement (rounded
/// up) so no step moves more than one voxel along any axis. Segments whose
/// endpoints fall in the same voxel get `N = 0`.
pub fn make_plan(seg: &Segment) -> ParametricPlan {
    let (start, end) = (seg.start(), seg.end());
    if same_voxel(start, end) {
        return ParametricPlan {
            step_count: 0,
            step_vector: Point3::ZERO,
            start,
            end,
        };
    }
    let delta = seg.direction();
    let euclidean = segment_length(seg).floor();
    let per_axis = delta.max_abs().ceil();
    let step_count = euclidean.max(per_axis).max(1.0) as u64;
    let n = step_count as f64;
    ParametricPlan {
        step_count,
        step_vector: Point3::new(delta.x / n, delta.y / n, delta.z / n),
        start,
        end,
    }
}

pub fn voxelize_parametric(seg: &Segment) -> Result<VoxelChain> {
    // Samples never leave the endpoints' bounding box, so checking the
    // endpoints covers every sample.
    round_point(seg.start())?;
    round_point(seg.end())?;
    let plan = make_plan(seg);
    let mut voxels = Vec::with_capacity(plan.step_count as usize + 1);
    for k in 0..=plan.step_count {
        voxels.push(round_point(plan.sample(k))?);
    }
    dedup_consecutive(&mut voxels);
    Ok(VoxelChain::from_parts(*seg, voxels))
}

/// `(min, max)` chain length: `min` is the Chebyshev span of the rounded
/// endpoints plus one, `max` is the planned step count plus one.
pub fn chain_length_bounds(seg: &Segment) -> (usize, usize) {
    let (s, e) = (seg.start(), seg.end());
    let span = (e.x.round() - s.x.round())
        .abs()
        .max((e.y.round() - s.y.round()).abs())
        .max((e.z.round() - s.z.round()).abs());
    let plan = make_plan(seg);
    (span as usize + 1, plan.step_count as usize + 1)
}
