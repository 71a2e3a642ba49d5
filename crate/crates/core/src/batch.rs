//! Batch voxelization laid out like a GPU kernel launch.
//!
//! Preprocessing computes every segment's step count `N_i` and step vector
//! `W_i`, the batch maximum `N_max`, and a disjoint output range per segment.
//! The kernel grid has `N_P x (N_max + 1)` work items; item `(i, k)` samples
//! segment `i` at step `k`, or does nothing when `k > N_i`. Segments are
//! grouped `group_size` at a time and groups are claimed by worker threads
//! from a shared atomic cursor. Items write straight into their own slot of
//! one preallocated buffer, which the assemble phase then cuts into chains.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use crate::chain::VoxelChain;
use crate::error::{Error, Result};
use crate::geometry::{round_point, Segment, Voxel};
use crate::parametric::{make_plan, ParametricPlan};

/// Work items per group when none is given: two 32-wide warps.
pub const DEFAULT_GROUP_SIZE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPlan {
    pub plan: ParametricPlan,
    /// First slot of this segment's `N_i + 1` voxels in the output buffer.
    pub output_offset: usize,
}

impl SegmentPlan {
    pub fn step_count(&self) -> u64 {
        self.plan.step_count
    }

    fn slots(&self) -> usize {
        self.plan.step_count as usize + 1
    }
}

#[derive(Debug, Clone)]
pub struct BatchPlan {
    segments: Vec<Segment>,
    per_segment: Vec<SegmentPlan>,
    max_steps: u64,
    total_voxel_capacity: usize,
    preprocess_time: Duration,
}

impl BatchPlan {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn per_segment(&self) -> &[SegmentPlan] {
        &self.per_segment
    }

    /// `N_P`.
    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// `N_max`.
    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    pub fn total_voxel_capacity(&self) -> usize {
        self.total_voxel_capacity
    }

    pub fn preprocess_time(&self) -> Duration {
        self.preprocess_time
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionConfig {
    pub group_size: usize,
    pub worker_count: usize,
}

impl PartitionConfig {
    pub fn new(group_size: usize, worker_count: usize) -> Result<Self> {
        let cfg = PartitionConfig {
            group_size,
            worker_count,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.group_size == 0 {
            return Err(Error::InvalidConfig("group size must be at least 1"));
        }
        if self.worker_count == 0 {
            return Err(Error::InvalidConfig("worker count must be at least 1"));
        }
        Ok(())
    }

    /// Number of groups needed to cover `segment_count` segments.
    pub fn group_count(&self, segment_count: usize) -> usize {
        segment_count.div_ceil(self.group_size)
    }
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            group_size: DEFAULT_GROUP_SIZE,
            worker_count: thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhaseTiming {
    pub preprocess: Duration,
    pub kernel: Duration,
    pub assemble: Duration,
}

impl PhaseTiming {
    pub fn total(&self) -> Duration {
        self.preprocess + self.kernel + self.assemble
    }
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    pub chains: Vec<VoxelChain>,
    pub total_voxels: usize,
    pub timing: PhaseTiming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ItemCounts {
    pub live: u64,
    pub redundant: u64,
}

pub fn batch_preprocess(segments: &[Segment]) -> Result<BatchPlan> {
    let started = Instant::now();
    if segments.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut per_segment = Vec::with_capacity(segments.len());
    let mut offset = 0usize;
    let mut max_steps = 0u64;
    for seg in segments {
        // Every sample lies between the endpoints, so the kernel cannot hit a
        // range error once both endpoints are addressable.
        round_point(seg.start())?;
        round_point(seg.end())?;
        let plan = make_plan(seg);
        max_steps = max_steps.max(plan.step_count);
        let entry = SegmentPlan {
            plan,
            output_offset: offset,
        };
        offset = offset
            .checked_add(entry.slots())
            .ok_or_else(|| Error::CapacityOverflow("total voxel count exceeds usize".into()))?;
        per_segment.push(entry);
    }
    Ok(BatchPlan {
        segments: segments.to_vec(),
        per_segment,
        max_steps,
        total_voxel_capacity: offset,
        preprocess_time: started.elapsed(),
    })
}

#[inline]
fn evaluate(entry: &SegmentPlan, k: u64) -> Result<Option<Voxel>> {
    if k > entry.plan.step_count {
        return Ok(None);
    }
    round_point(entry.plan.sample(k)).map(Some)
}

/// Kernel body for grid item `(segment_index, k)`: the rounded sample, or
/// `None` for a redundant item past the segment's own step count.
pub fn kernel_work_item(plan: &BatchPlan, segment_index: usize, k: u64) -> Result<Option<Voxel>> {
    let entry = plan
        .per_segment
        .get(segment_index)
        .filter(|_| k <= plan.max_steps)
        .ok_or(Error::IndexOutOfRange {
            segment: segment_index,
            step: k as usize,
        })?;
    evaluate(entry, k)
}

pub fn effective_item_count(plan: &BatchPlan) -> ItemCounts {
    let live: u64 = plan.per_segment.iter().map(|p| p.step_count() + 1).sum();
    let grid = plan.segment_count() as u64 * (plan.max_steps + 1);
    ItemCounts {
        live,
        redundant: grid - live,
    }
}

/// Hands each package to exactly one worker through a shared cursor.
fn run_groups<T, F>(packages: Vec<T>, workers: usize, work: F) -> Result<()>
where
    T: Send,
    F: Fn(usize, T) -> Result<()> + Sync,
{
    let workers = workers.min(packages.len()).max(1);
    if workers == 1 {
        for (g, package) in packages.into_iter().enumerate() {
            work(g, package)?;
        }
        return Ok(());
    }

    let slots: Vec<Mutex<Option<T>>> = packages.into_iter().map(|p| Mutex::new(Some(p))).collect();
    let cursor = AtomicUsize::new(0);
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| -> Result<()> {
                    loop {
                        let g = cursor.fetch_add(1, Ordering::Relaxed);
                        let Some(slot) = slots.get(g) else {
                            return Ok(());
                        };
                        let package = slot
                            .lock()
                            .map_err(|_| Error::CapacityOverflow("poisoned work slot".into()))?
                            .take()
                            .ok_or_else(|| {
                                Error::CapacityOverflow(format!("group {g} claimed twice"))
                            })?;
                        work(g, package)?;
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("batch worker panicked"))
            .collect::<Result<Vec<()>>>()
            .map(|_| ())
    })
}

/// Splits `buf` into consecutive pieces of the given lengths.
fn split_lengths<T>(mut buf: &mut [T], lengths: impl Iterator<Item = usize>) -> Vec<&mut [T]> {
    let mut pieces = Vec::new();
    for len in lengths {
        let (head, tail) = std::mem::take(&mut buf).split_at_mut(len);
        pieces.push(head);
        buf = tail;
    }
    pieces
}

pub fn batch_voxelize(plan: &BatchPlan, cfg: &PartitionConfig) -> Result<BatchResult> {
    cfg.validate()?;
    let group_size = cfg.group_size;
    let group_ranges: Vec<std::ops::Range<usize>> = (0..cfg.group_count(plan.segment_count()))
        .map(|g| g * group_size..((g + 1) * group_size).min(plan.segment_count()))
        .collect();
    let group_slots = |r: &std::ops::Range<usize>| -> usize {
        plan.per_segment[r.clone()]
            .iter()
            .map(SegmentPlan::slots)
            .sum()
    };

    // Kernel: every (segment, k) item of the grid, redundant ones included.
    let kernel_started = Instant::now();
    let mut buffer = vec![Voxel::default(); plan.total_voxel_capacity];
    {
        let pieces = split_lengths(&mut buffer, group_ranges.iter().map(group_slots));
        let max_steps = plan.max_steps;
        run_groups(pieces, cfg.worker_count, |g, out: &mut [Voxel]| {
            let range = group_ranges[g].clone();
            let base = plan.per_segment[range.start].output_offset;
            for entry in &plan.per_segment[range] {
                let local = entry.output_offset - base;
                for k in 0..=max_steps {
                    if let Some(voxel) = evaluate(entry, k)? {
                        let slot = out.get_mut(local + k as usize).ok_or_else(|| {
                            Error::CapacityOverflow(format!("item {k} past its segment's slots"))
                        })?;
                        *slot = voxel;
                    }
                }
            }
            Ok(())
        })?;
    }
    let kernel = kernel_started.elapsed();

    // Assemble: cut the buffer into per-segment chains, dropping repeats.
    let assemble_started = Instant::now();
    let mut chains: Vec<Option<VoxelChain>> = vec![None; plan.segment_count()];
    {
        let pieces = split_lengths(&mut chains, group_ranges.iter().map(|r| r.len()));
        let buffer = &buffer;
        run_groups(
            pieces,
            cfg.worker_count,
            |g, out: &mut [Option<VoxelChain>]| {
                for (slot, i) in out.iter_mut().zip(group_ranges[g].clone()) {
                    let entry = &plan.per_segment[i];
                    let raw = &buffer[entry.output_offset..entry.output_offset + entry.slots()];
                    let mut voxels = Vec::with_capacity(raw.len());
                    for &v in raw {
                        if voxels.last() != Some(&v) {
                            voxels.push(v);
                        }
                    }
                    *slot = Some(VoxelChain::from_parts(plan.segments[i], voxels));
                }
                Ok(())
            },
        )?;
    }
    let chains: Vec<VoxelChain> = chains
        .into_iter()
        .map(|c| c.ok_or_else(|| Error::CapacityOverflow("segment left unassembled".into())))
        .collect::<Result<_>>()?;
    let assemble = assemble_started.elapsed();

    let total_voxels = chains.iter().map(VoxelChain::len).sum();
    Ok(BatchResult {
        chains,
        total_voxels,
        timing: PhaseTiming {
            preprocess: plan.preprocess_time,
            kernel,
            assemble,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parametric::voxelize_parametric;

    fn seg(s: [f64; 3], e: [f64; 3]) -> Segment {
        Segment::from_coords(s, e).unwrap()
    }

    fn x5() -> Segment {
        seg([0.0; 3], [5.0, 0.0, 0.0])
    }

    fn diag() -> Segment {
        seg([0.0; 3], [3.0, 3.0, 3.0])
    }

    fn short() -> Segment {
        seg([0.0; 3], [2.0, 1.0, 0.0])
    }

    #[test]
    fn preprocess_examples() {
        let plan = batch_preprocess(&[x5(), diag()]).unwrap();
        let steps: Vec<u64> = plan.per_segment().iter().map(|p| p.step_count()).collect();
        let offsets: Vec<usize> = plan.per_segment().iter().map(|p| p.output_offset).collect();
        assert_eq!(steps, vec![5, 5]);
        assert_eq!(plan.max_steps(), 5);
        assert_eq!(offsets, vec![0, 6]);
        assert_eq!(plan.total_voxel_capacity(), 12);

        assert!(matches!(batch_preprocess(&[]), Err(Error::EmptyBatch)));

        let plan = batch_preprocess(&vec![x5(); 1024]).unwrap();
        assert_eq!(plan.max_steps(), 5);
        assert_eq!(plan.total_voxel_capacity(), 6144);
    }

    #[test]
    fn preprocess_rejects_unaddressable_segments() {
        let far = seg([0.0; 3], [1e10, 0.0, 0.0]);
        assert!(matches!(
            batch_preprocess(&[x5(), far]),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn kernel_item_examples() {
        let plan = batch_preprocess(&[x5(), short()]).unwrap();
        assert_eq!(plan.per_segment()[1].plan.step_vector.x, 1.0);
        assert_eq!(plan.per_segment()[1].plan.step_vector.y, 0.5);
        assert_eq!(
            kernel_work_item(&plan, 1, 2).unwrap(),
            Some(Voxel::new(2, 1, 0))
        );
        assert_eq!(kernel_work_item(&plan, 1, 5).unwrap(), None);
        assert_eq!(
            kernel_work_item(&plan, 0, 0).unwrap(),
            Some(Voxel::new(0, 0, 0))
        );
        assert!(matches!(
            kernel_work_item(&plan, 2, 0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            kernel_work_item(&plan, 0, 6),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn item_count_examples() {
        let uniform = batch_preprocess(&vec![diag(); 10]).unwrap();
        assert_eq!(effective_item_count(&uniform).redundant, 0);

        let mixed = batch_preprocess(&[x5(), short()]).unwrap();
        assert_eq!(
            effective_item_count(&mixed),
            ItemCounts {
                live: 9,
                redundant: 3
            }
        );

        let single = batch_preprocess(&[short()]).unwrap();
        assert_eq!(effective_item_count(&single).redundant, 0);
    }

    #[test]
    fn single_segment_matches_sequential() {
        let plan = batch_preprocess(&[x5()]).unwrap();
        for cfg in [
            PartitionConfig::new(1, 1).unwrap(),
            PartitionConfig::new(64, 4).unwrap(),
        ] {
            let result = batch_voxelize(&plan, &cfg).unwrap();
            assert_eq!(result.chains, vec![voxelize_parametric(&x5()).unwrap()]);
            assert_eq!(result.total_voxels, 6);
        }
    }

    #[test]
    fn scheduling_does_not_change_output() {
        let plan = batch_preprocess(&[x5(), short()]).unwrap();
        let a = batch_voxelize(&plan, &PartitionConfig::new(1, 1).unwrap()).unwrap();
        let b = batch_voxelize(&plan, &PartitionConfig::new(64, 8).unwrap()).unwrap();
        assert_eq!(a.chains, b.chains);
    }

    #[test]
    fn redundant_items_leave_no_voxels() {
        let plan = batch_preprocess(&[x5(), short()]).unwrap();
        assert_eq!(plan.max_steps(), 5);
        let result = batch_voxelize(&plan, &PartitionConfig::new(1, 2).unwrap()).unwrap();
        assert_eq!(
            result.chains[1].voxels(),
            &[
                Voxel::new(0, 0, 0),
                Voxel::new(1, 1, 0),
                Voxel::new(2, 1, 0)
            ]
        );
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(PartitionConfig::new(0, 1).is_err());
        assert!(PartitionConfig::new(1, 0).is_err());
        let plan = batch_preprocess(&[x5()]).unwrap();
        let bad = PartitionConfig {
            group_size: 0,
            worker_count: 1,
        };
        assert!(matches!(
            batch_voxelize(&plan, &bad),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn default_group_size_is_two_warps() {
        assert_eq!(PartitionConfig::default().group_size, 64);
        assert!(PartitionConfig::default().worker_count >= 1);
    }
}
