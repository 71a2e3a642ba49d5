//! Seeded test workloads: segments of an exact step count, and batches of
//! mixed lengths summing to a target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

use voxline_core::{make_plan, Point3, Segment};

use crate::error::{BenchError, Result};

/// Half-width of the cube that segment start points are drawn from.
const START_EXTENT: f64 = 1000.0;

/// How many random directions to try before falling back to the diagonal.
const DIRECTION_ATTEMPTS: usize = 64;

/// Description of the length distribution used by [`gen_arbitrary_batch`],
/// recorded in report metadata.
pub const ARBITRARY_LENGTH_DISTRIBUTION: &str =
    "log-uniform on [1, 2*mean], rescaled to the target total";

/// A segment whose parametric step count is exactly `target_voxels`.
///
/// The start point is uniform in a cube around the origin and the direction
/// uniform on the sphere; the end lies `target_voxels + 0.5` away. Directions
/// so close to an axis that the per-axis step bound would add a step are
/// redrawn.
pub fn gen_segment_of_length(target_voxels: u64, seed: u64) -> Segment {
    let target = target_voxels.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Point3::new(
        rng.random_range(-START_EXTENT..START_EXTENT),
        rng.random_range(-START_EXTENT..START_EXTENT),
        rng.random_range(-START_EXTENT..START_EXTENT),
    );
    let distance = target as f64 + 0.5;
    let build =
        |dir: Point3| Segment::new(start, start + dir * distance).expect("finite endpoints");

    for _ in 0..DIRECTION_ATTEMPTS {
        let dir: [f64; 3] = UnitSphere.sample(&mut rng);
        let seg = build(dir.into());
        if make_plan(&seg).step_count == target {
            return seg;
        }
    }
    let d = 1.0 / 3f64.sqrt();
    build(Point3::new(d, d, d))
}

/// `segment_count` segments whose step counts sum to exactly
/// `total_voxels_target`.
pub fn gen_arbitrary_batch(
    total_voxels_target: u64,
    segment_count: usize,
    seed: u64,
) -> Result<Vec<Segment>> {
    if segment_count == 0 || total_voxels_target < segment_count as u64 {
        return Err(BenchError::InfeasibleTarget {
            total: total_voxels_target,
            segments: segment_count,
        });
    }
    let lengths = arbitrary_lengths(total_voxels_target, segment_count, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5e97_0000_0001);
    Ok(lengths
        .into_iter()
        .map(|n| gen_segment_of_length(n, rng.random()))
        .collect())
}

/// Log-uniform lengths rescaled and then nudged by one voxel at a time so
/// they sum to `total` with every length at least one.
pub(crate) fn arbitrary_lengths(total: u64, count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = total as f64 / count as f64;
    let log_hi = (2.0 * mean).ln().max(0.0);
    let raw: Vec<f64> = (0..count)
        .map(|_| rng.random_range(0.0..=log_hi).exp())
        .collect();
    let scale = total as f64 / raw.iter().sum::<f64>();
    let mut lengths: Vec<u64> = raw
        .iter()
        .map(|l| ((l * scale).round() as u64).max(1))
        .collect();

    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| lengths[b].cmp(&lengths[a]).then(a.cmp(&b)));
    let mut sum: u64 = lengths.iter().sum();
    let mut cursor = 0;
    while sum != total {
        let i = order[cursor % count];
        if sum < total {
            lengths[i] += 1;
            sum += 1;
        } else if lengths[i] > 1 {
            lengths[i] -= 1;
            sum -= 1;
        }
        cursor += 1;
    }
    lengths
}
