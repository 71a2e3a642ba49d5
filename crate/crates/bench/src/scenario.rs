//! The three experiment shapes: one segment of growing length, a fixed
//! number of equal-length segments, and a fixed number of mixed-length
//! segments with a given voxel total.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use voxline_core::{
    batch_preprocess, batch_voxelize, make_plan, voxelize_parametric, PartitionConfig, PhaseTiming,
    Segment, VoxelChain,
};

use crate::error::{BenchError, Result};
use crate::report::{compute_mvps, BenchRecord, Method, PhaseRecord};
use crate::workload::{gen_arbitrary_batch, gen_segment_of_length};

pub const SINGLE_LENGTHS: [u64; 10] = [
    1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000, 200_000, 500_000, 1_000_000,
];
pub const FIXED_LENGTHS: [u64; 8] = [20, 50, 100, 1_000, 2_000, 5_000, 10_000, 20_000];
pub const BATCH_SEGMENTS: usize = 1024;
pub const ARBITRARY_TOTAL: u64 = 10_000_000;
pub const DEFAULT_REPETITIONS: usize = 5;
pub const DEFAULT_WARMUP: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Single,
    FixedBatch,
    Arbitrary,
}

impl ScenarioKind {
    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::Single => "single",
            ScenarioKind::FixedBatch => "fixed-batch",
            ScenarioKind::Arbitrary => "arbitrary",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ScenarioKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(ScenarioKind::Single),
            "fixed-batch" => Ok(ScenarioKind::FixedBatch),
            "arbitrary" => Ok(ScenarioKind::Arbitrary),
            other => Err(BenchError::InvalidScenario(format!(
                "unknown scenario {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// Step counts per parameter point (single and fixed-batch).
    pub lengths: Vec<u64>,
    /// `N_P` for the batch scenarios.
    pub segment_count: usize,
    pub total_voxels_target: u64,
    pub seed: u64,
    pub repetitions: usize,
    pub warmup: usize,
}

impl Scenario {
    /// Desk-scale defaults for `kind`.
    pub fn desk_scale(kind: ScenarioKind, seed: u64) -> Self {
        let (lengths, segment_count) = match kind {
            ScenarioKind::Single => (SINGLE_LENGTHS.to_vec(), 1),
            ScenarioKind::FixedBatch => (FIXED_LENGTHS.to_vec(), BATCH_SEGMENTS),
            ScenarioKind::Arbitrary => (Vec::new(), BATCH_SEGMENTS),
        };
        Scenario {
            kind,
            lengths,
            segment_count,
            total_voxels_target: ARBITRARY_TOTAL,
            seed,
            repetitions: DEFAULT_REPETITIONS,
            warmup: DEFAULT_WARMUP,
        }
    }

    /// Multiplies every length and the voxel total by `factor`, keeping each
    /// at least one voxel per segment.
    pub fn scaled(mut self, factor: f64) -> Self {
        for l in &mut self.lengths {
            *l = ((*l as f64 * factor).round() as u64).max(1);
        }
        self.total_voxels_target = ((self.total_voxels_target as f64 * factor).round() as u64)
            .max(self.segment_count as u64);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(BenchError::InvalidScenario(msg.to_string()));
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1");
        }
        if self.segment_count == 0 {
            return bad("segment count must be at least 1");
        }
        match self.kind {
            ScenarioKind::Single | ScenarioKind::FixedBatch => {
                if self.lengths.is_empty() {
                    return bad("no lengths given");
                }
                if self.lengths.contains(&0) {
                    return bad("lengths must be at least 1");
                }
            }
            ScenarioKind::Arbitrary => {
                if self.total_voxels_target < self.segment_count as u64 {
                    return bad("voxel total smaller than segment count");
                }
            }
        }
        Ok(())
    }

    /// Parameter value and segment set for every measured point.
    pub fn workloads(&self) -> Result<Vec<(u64, Vec<Segment>)>> {
        self.validate()?;
        Ok(match self.kind {
            ScenarioKind::Single => self
                .lengths
                .iter()
                .map(|&l| (l, vec![gen_segment_of_length(l, self.seed)]))
                .collect(),
            ScenarioKind::FixedBatch => self
                .lengths
                .iter()
                .map(|&l| {
                    let segs = (0..self.segment_count as u64)
                        .map(|i| {
                            gen_segment_of_length(
                                l,
                                self.seed.wrapping_mul(1_000_003).wrapping_add(i),
                            )
                        })
                        .collect();
                    (l, segs)
                })
                .collect(),
            ScenarioKind::Arbitrary => vec![(
                self.total_voxels_target,
                gen_arbitrary_batch(self.total_voxels_target, self.segment_count, self.seed)?,
            )],
        })
    }
}

/// Median of the samples; the mean of the middle pair for even counts.
pub fn median(samples: &mut [Duration]) -> Duration {
    samples.sort();
    let n = samples.len();
    if n == 0 {
        return Duration::ZERO;
    }
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2
    }
}

fn run_sequential(segs: &[Segment]) -> Result<Vec<VoxelChain>> {
    Ok(segs
        .iter()
        .map(voxelize_parametric)
        .collect::<Result<_, _>>()?)
}

fn run_batch(segs: &[Segment], cfg: &PartitionConfig) -> Result<(Vec<VoxelChain>, PhaseTiming)> {
    let plan = batch_preprocess(segs)?;
    let result = batch_voxelize(&plan, cfg)?;
    Ok((result.chains, result.timing))
}

struct Measurement {
    median: Duration,
    emitted_voxels: u64,
    phases: Option<PhaseTiming>,
}

fn measure<F>(warmup: usize, repetitions: usize, mut run: F) -> Result<Measurement>
where
    F: FnMut() -> Result<(Vec<VoxelChain>, Option<PhaseTiming>)>,
{
    for _ in 0..warmup {
        black_box(run()?);
    }
    let mut times = Vec::with_capacity(repetitions);
    let mut phases = Vec::with_capacity(repetitions);
    let mut emitted_voxels = 0;
    for _ in 0..repetitions {
        let started = Instant::now();
        let (chains, timing) = black_box(run()?);
        times.push(started.elapsed());
        emitted_voxels = chains.iter().map(|c| c.len() as u64).sum();
        phases.extend(timing);
        drop(chains);
    }
    let phases = (!phases.is_empty()).then(|| {
        let pick =
            |f: fn(&PhaseTiming) -> Duration| median(&mut phases.iter().map(f).collect::<Vec<_>>());
        PhaseTiming {
            preprocess: pick(|t| t.preprocess),
            kernel: pick(|t| t.kernel),
            assemble: pick(|t| t.assemble),
        }
    });
    Ok(Measurement {
        median: median(&mut times),
        emitted_voxels,
        phases,
    })
}

/// Everything one scenario run produced.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub records: Vec<BenchRecord>,
    pub phases: Vec<PhaseRecord>,
}

fn to_ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Sum of step counts, the voxel length a workload was generated for.
pub fn workload_voxels(segs: &[Segment]) -> u64 {
    segs.iter().map(|s| make_plan(s).step_count).sum()
}

/// Runs every parameter point of `s` with both methods, returning one record
/// per (parameter, method). Timed regions include batch preprocessing.
///
/// `total_voxels` is the summed step count of the workload; the number of
/// distinct voxels written after deduplication goes in the phase records.
pub fn run_scenario_detailed(s: &Scenario, cfg: &PartitionConfig) -> Result<ScenarioRun> {
    let mut records = Vec::new();
    let mut phase_records = Vec::new();
    for (parameter, segs) in s.workloads()? {
        let total_voxels = workload_voxels(&segs);
        for method in [Method::Sequential, Method::Batch] {
            let m = match method {
                Method::Sequential => measure(s.warmup, s.repetitions, || {
                    Ok((run_sequential(&segs)?, None))
                })?,
                Method::Batch => measure(s.warmup, s.repetitions, || {
                    let (chains, timing) = run_batch(&segs, cfg)?;
                    Ok((chains, Some(timing)))
                })?,
            };
            let (workers, group_size) = match method {
                Method::Sequential => (1, 1),
                Method::Batch => (cfg.worker_count, cfg.group_size),
            };
            // A zero reading only happens below the clock's resolution.
            let median_ms = to_ms(m.median).max(1e-6);
            records.push(BenchRecord {
                scenario: s.kind.label().to_string(),
                parameter,
                method,
                workers,
                group_size,
                median_ms,
                total_voxels,
                mvps: compute_mvps(total_voxels, median_ms)?,
            });
            if let Some(p) = m.phases {
                phase_records.push(PhaseRecord {
                    parameter,
                    workers,
                    group_size,
                    preprocess_ms: to_ms(p.preprocess),
                    kernel_ms: to_ms(p.kernel),
                    assemble_ms: to_ms(p.assemble),
                    emitted_voxels: m.emitted_voxels,
                });
            }
        }
    }
    Ok(ScenarioRun {
        records,
        phases: phase_records,
    })
}

pub fn run_scenario(s: &Scenario, cfg: &PartitionConfig) -> Result<Vec<BenchRecord>> {
    Ok(run_scenario_detailed(s, cfg)?.records)
}
