use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use voxline_bench::{
    format_table, run_scenario_detailed, write_csv, write_json, BenchError, ReportMetadata,
    Scenario, ScenarioKind,
};
use voxline_core::io::{
    read_segments_csv, write_vox3, write_vox3_batch, write_xyz, write_xyz_batch,
};
use voxline_core::{
    batch_preprocess, batch_voxelize, voxelize_parametric, voxelize_walk, PartitionConfig, Point3,
    Segment,
};

const EXIT_BAD_INPUT: u8 = 2;
const EXIT_IO: u8 = 3;

/// Voxelize 3D line segments and benchmark the voxelizers.
#[derive(Debug, Parser)]
#[command(name = "voxline", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Voxelize a single segment.
    Voxelize {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        start: Point3,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        end: Point3,
        #[arg(long, value_enum, default_value_t = VoxelMethod::Parametric)]
        method: VoxelMethod,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Xyz)]
        format: Format,
    },
    /// Voxelize every segment of a CSV file with the batch engine.
    Batch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Xyz)]
        format: Format,
        /// Worker threads [default: hardware parallelism]
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = voxline_core::batch::DEFAULT_GROUP_SIZE)]
        group_size: usize,
    },
    /// Run a benchmark scenario and write CSV and JSON reports.
    Bench {
        #[arg(long, value_parser = parse_scenario)]
        scenario: ScenarioKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = voxline_bench::scenario::DEFAULT_REPETITIONS)]
        reps: usize,
        #[arg(long, default_value_t = voxline_bench::scenario::DEFAULT_WARMUP)]
        warmup: usize,
        /// Multiplier applied to the default parameter points
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        report_json: PathBuf,
        /// Worker threads [default: hardware parallelism]
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = voxline_core::batch::DEFAULT_GROUP_SIZE)]
        group_size: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VoxelMethod {
    Parametric,
    Walk,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Xyz,
    Vox3,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure {
            code: EXIT_BAD_INPUT,
            message: message.to_string(),
        }
    }

    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<voxline_core::Error> for Failure {
    fn from(err: voxline_core::Error) -> Self {
        match err {
            voxline_core::Error::Io(e) => Failure {
                code: EXIT_IO,
                message: e.to_string(),
            },
            other => Failure::input(other),
        }
    }
}

fn parse_point(s: &str) -> Result<Point3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z but got {s:?}"));
    }
    let mut xyz = [0.0; 3];
    for (slot, part) in xyz.iter_mut().zip(&parts) {
        let v: f64 = part
            .trim()
            .parse()
            .map_err(|_| format!("{part:?} is not a number"))?;
        if !v.is_finite() {
            return Err(format!("{part:?} is not finite"));
        }
        *slot = v;
    }
    Ok(xyz.into())
}

fn parse_scenario(s: &str) -> Result<ScenarioKind, String> {
    s.parse().map_err(|e: BenchError| e.to_string())
}

fn worker_count(requested: Option<usize>) -> usize {
    requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::io(path, e))
}

/// Runs `write` against a fresh file at `path`, mapping write errors to the
/// I/O exit status.
fn write_file<F>(path: &Path, write: F) -> Result<(), Failure>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), Failure>,
{
    let mut out = create(path)?;
    write(&mut out)?;
    out.flush().map_err(|e| Failure::io(path, e))
}

fn cmd_voxelize(
    start: Point3,
    end: Point3,
    method: VoxelMethod,
    out: &Path,
    format: Format,
) -> Result<(), Failure> {
    let seg = Segment::new(start, end)?;
    let chain = match method {
        VoxelMethod::Parametric => voxelize_parametric(&seg)?,
        VoxelMethod::Walk => voxelize_walk(&seg)?,
    };
    write_file(out, |w| {
        match format {
            Format::Xyz => write_xyz(w, chain.voxels()),
            Format::Vox3 => write_vox3(w, chain.voxels()),
        }
        .map_err(|e| Failure::io(out, e))
    })
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn cmd_batch(
    input: &Path,
    out: &Path,
    format: Format,
    workers: Option<usize>,
    group_size: usize,
) -> Result<(), Failure> {
    let file =
        File::open(input).map_err(|e| Failure::input(format!("{}: {e}", input.display())))?;
    let segments = read_segments_csv(BufReader::new(file)).map_err(|e| match e {
        voxline_core::Error::Io(e) => Failure::input(format!("{}: {e}", input.display())),
        other => Failure::input(format!("{}: {other}", input.display())),
    })?;
    let cfg = PartitionConfig::new(group_size, worker_count(workers))?;
    let plan = batch_preprocess(&segments)?;
    let result = batch_voxelize(&plan, &cfg)?;

    write_file(out, |w| {
        match format {
            Format::Xyz => write_xyz_batch(w, &result.chains),
            Format::Vox3 => write_vox3_batch(w, &result.chains),
        }
        .map_err(|e| Failure::io(out, e))
    })?;

    let t = &result.timing;
    eprintln!(
        "segments {}  voxels {}  workers {}  group_size {}",
        segments.len(),
        result.total_voxels,
        cfg.worker_count,
        cfg.group_size
    );
    eprintln!(
        "preprocess {:.3} ms  kernel {:.3} ms  assemble {:.3} ms  total {:.3} ms",
        ms(t.preprocess),
        ms(t.kernel),
        ms(t.assemble),
        ms(t.total())
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    kind: ScenarioKind,
    seed: u64,
    reps: usize,
    warmup: usize,
    scale: f64,
    report: &Path,
    report_json: &Path,
    workers: Option<usize>,
    group_size: usize,
) -> Result<(), Failure> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Failure::input(format!(
            "scale must be positive, got {scale}"
        )));
    }
    let mut scenario = Scenario::desk_scale(kind, seed).scaled(scale);
    scenario.repetitions = reps;
    scenario.warmup = warmup;
    let cfg = PartitionConfig::new(group_size, worker_count(workers))?;

    let run = run_scenario_detailed(&scenario, &cfg).map_err(|e| match e {
        BenchError::Io(e) => Failure {
            code: EXIT_IO,
            message: e.to_string(),
        },
        other => Failure::input(other),
    })?;

    write_file(report, |w| {
        write_csv(w, &run.records).map_err(|e| Failure::io(report, e))
    })?;
    let metadata = ReportMetadata::new(scenario);
    write_file(report_json, |w| {
        write_json(w, &metadata, &run.records, &run.phases).map_err(|e| Failure::io(report_json, e))
    })?;

    print!("{}", format_table(&run.records));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Voxelize {
            start,
            end,
            method,
            out,
            format,
        } => cmd_voxelize(start, end, method, &out, format),
        Command::Batch {
            input,
            out,
            format,
            workers,
            group_size,
        } => cmd_batch(&input, &out, format, workers, group_size),
        Command::Bench {
            scenario,
            seed,
            reps,
            warmup,
            scale,
            report,
            report_json,
            workers,
            group_size,
        } => cmd_bench(
            scenario,
            seed,
            reps,
            warmup,
            scale,
            &report,
            &report_json,
            workers,
            group_size,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(EXIT_BAD_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = writeln!(io::stderr(), "voxline: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
