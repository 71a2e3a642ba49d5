//! Workload generation, timed scenario runs and report writers for the
//! voxline voxelizers.

pub mod error;
pub mod report;
pub mod scenario;
pub mod workload;

pub use error::{BenchError, Result};
pub use report::{
    compute_mvps, format_table, read_csv, write_csv, write_json, BenchRecord, Method, PhaseRecord,
    ReportMetadata, CSV_HEADER,
};
pub use scenario::{
    median, run_scenario, run_scenario_detailed, workload_voxels, Scenario, ScenarioKind,
    ScenarioRun,
};
pub use workload::{gen_arbitrary_batch, gen_segment_of_length, ARBITRARY_LENGTH_DISTRIBUTION};
