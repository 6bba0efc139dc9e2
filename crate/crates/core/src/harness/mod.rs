//! Experiment definition, execution and reporting.
//!
//! A run writes `runs.jsonl` (one condensed record per run, streamed in job
//! order), then normalizes all runs in a second pass and writes `runs.csv`.
//! Reports are computed from `runs.jsonl` at any later time.

pub mod config;
pub mod execute;
pub mod matrix;
pub mod report;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, TransformEntry};
pub use execute::{execute, execute_collect, RunRecord};
pub use matrix::{checkpoints, expand_matrix, job_seed, Job};
pub use report::{
    ab_heatmap_table, emit_runs_csv, load_rows, relative_table, report_ab_heatmap,
    report_hv_over_time, report_relative_hv, rows_from_records, AbHeatmap, RelativeEntry, RunRow,
    Space, Table,
};

use crate::error::{Error, Result};

pub const RECORDS_FILE: &str = "runs.jsonl";
pub const RUNS_CSV: &str = "runs.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub jobs: usize,
    pub failed: usize,
}

/// Expands, executes and normalizes an experiment into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path, parallelism: usize) -> Result<RunSummary> {
    let jobs = expand_matrix(cfg)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let config_copy = out_dir.join("config.toml");
    std::fs::write(&config_copy, cfg.to_toml_string()?).map_err(|e| Error::io(&config_copy, e))?;
    let logs = cfg.write_logs.then(|| out_dir.join("logs"));
    let mut writer = execute::RecordWriter::create(&out_dir.join(RECORDS_FILE))?;
    let mut failed = 0;
    execute(&jobs, parallelism, logs.as_deref(), |r| {
        failed += usize::from(r.error.is_some());
        writer.write(&r)
    })?;
    writer.finish()?;
    let rows = load_rows(&out_dir.join(RECORDS_FILE))?;
    emit_runs_csv(&rows, &out_dir.join(RUNS_CSV))?;
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        jobs: jobs.len(),
        failed,
    })
}
