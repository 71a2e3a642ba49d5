//! Reference voxelizer: walk voxel by voxel from the start voxel, each time
//! moving to whichever octant-directed neighbour lies nearest the line.
//!
//! This is slow compared to the parametric sampler and exists to check it.

use crate::chain::VoxelChain;
use crate::error::{Error, Result};
use crate::geometry::{round_point, Line, Point3, Segment, Voxel};

/// Distances closer than this are treated as equal when picking a candidate.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub origin: Voxel,
    pub candidates: Vec<Voxel>,
}

fn sign(v: f64) -> i32 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Non-zero step patterns in the octant of `direction`. Axes along which the
/// direction is zero never move, so the set has 7, 3 or 1 entries.
fn octant_steps(direction: Point3) -> Vec<Voxel> {
    let (sx, sy, sz) = (sign(direction.x), sign(direction.y), sign(direction.z));
    let mut steps = Vec::with_capacity(7);
    for dx in [0, sx] {
        for dy in [0, sy] {
            for dz in [0, sz] {
                let step = Voxel::new(dx, dy, dz);
                if step != Voxel::default() && !steps.contains(&step) {
                    steps.push(step);
                }
            }
        }
    }
    steps
}

pub fn candidate_voxels(current: Voxel, seg: &Segment) -> Result<CandidateSet> {
    if round_point(seg.end())? == current {
        return Err(Error::NoCandidates(current));
    }
    let candidates = octant_steps(seg.direction())
        .into_iter()
        .map(|step| {
            current
                .checked_add(step)
                .ok_or(Error::OutOfRange(f64::from(current.x)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CandidateSet {
        origin: current,
        candidates,
    })
}

/// True when `v` lies inside the axis-aligned box spanned by `a` and `b`.
fn within_box(v: Voxel, a: Voxel, b: Voxel) -> bool {
    let inside = |c: i32, lo: i32, hi: i32| c >= lo.min(hi) && c <= lo.max(hi);
    inside(v.x, a.x, b.x) && inside(v.y, a.y, b.y) && inside(v.z, a.z, b.z)
}

struct Scored {
    voxel: Voxel,
    distance: f64,
    projection: f64,
}

impl Scored {
    fn beats(&self, other: &Scored) -> bool {
        if self.distance < other.distance - TIE_TOLERANCE {
            return true;
        }
        if self.distance > other.distance + TIE_TOLERANCE {
            return false;
        }
        if self.projection != other.projection {
            return self.projection > other.projection;
        }
        self.voxel < other.voxel
    }
}

/// Candidate-walk voxelization. Each step picks the candidate whose centre
/// is nearest the line through the segment; near-ties go to the candidate
/// that advances furthest along the segment direction, then to the
/// lexicographically smallest voxel.
///
/// Only candidates that bring the walk one step closer to the end voxel in
/// Chebyshev distance, without passing it on any axis, are admissible. The
/// chain therefore has exactly `span + 1` voxels and every interior voxel
/// touches only its two chain neighbours.
pub fn voxelize_walk(seg: &Segment) -> Result<VoxelChain> {
    let start = round_point(seg.start())?;
    let end = round_point(seg.end())?;
    if start == end {
        return Ok(VoxelChain::from_parts(*seg, vec![start]));
    }

    let line = Line::through(seg)?;
    let direction = line.direction();
    let steps = octant_steps(direction);
    let span = |a: i32, b: i32| (b as i64 - a as i64).unsigned_abs() as usize;
    let bound = span(start.x, end.x) + span(start.y, end.y) + span(start.z, end.z) + 1;

    let mut voxels = Vec::with_capacity(bound);
    voxels.push(start);
    let mut current = start;
    while current != end {
        if voxels.len() >= bound {
            return Err(Error::WalkDidNotTerminate(bound));
        }
        let remaining = current.chebyshev(end);
        let mut best: Option<Scored> = None;
        for &step in &steps {
            let Some(candidate) = current.checked_add(step) else {
                continue;
            };
            if !within_box(candidate, start, end) || candidate.chebyshev(end) + 1 != remaining {
                continue;
            }
            let scored = Scored {
                voxel: candidate,
                distance: line.distance(candidate.center()),
                projection: step.center().dot(direction),
            };
            if best.as_ref().is_none_or(|b| scored.beats(b)) {
                best = Some(scored);
            }
        }
        let next = best.ok_or(Error::NoCandidates(current))?.voxel;
        voxels.push(next);
        current = next;
    }
    Ok(VoxelChain::from_parts(*seg, voxels))
}

/// One index at which two chains disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainDifference {
    pub index: usize,
    pub left: Option<Voxel>,
    pub right: Option<Voxel>,
    pub left_distance: Option<f64>,
    pub right_distance: Option<f64>,
}

impl ChainDifference {
    fn is_tie(&self, eps: f64) -> bool {
        match (self.left_distance, self.right_distance) {
            (Some(a), Some(b)) => (a - b).abs() <= eps,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub identical: bool,
    pub acceptable: bool,
    pub differences: Vec<ChainDifference>,
}

/// Compares two chains for the same segment index by index. Positions where
/// they differ are acceptable only if both voxels are equally far from the
/// line (within `eps`); a position present in only one chain never is.
pub fn chains_equivalent(a: &VoxelChain, b: &VoxelChain, eps: f64) -> Result<EquivalenceReport> {
    if a.source() != b.source() {
        return Err(Error::ChainMismatch);
    }
    let line = Line::through(a.source()).ok();
    let distance = |v: Option<Voxel>| -> Option<f64> {
        match (v, line) {
            (Some(v), Some(line)) => Some(line.distance(v.center())),
            (Some(_), None) => Some(0.0),
            (None, _) => None,
        }
    };

    let (va, vb) = (a.voxels(), b.voxels());
    let mut differences = Vec::new();
    for index in 0..va.len().max(vb.len()) {
        let left = va.get(index).copied();
        let right = vb.get(index).copied();
        if left != right {
            differences.push(ChainDifference {
                index,
                left,
                right,
                left_distance: distance(left),
                right_distance: distance(right),
            });
        }
    }
    let acceptable = differences.iter().all(|d| d.is_tie(eps));
    Ok(EquivalenceReport {
        identical: differences.is_empty(),
        acceptable,
        differences,
    })
}
