use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::{checkpoints, Job};
use crate::algorithms::{self, AlgorithmName, RunResult};
use crate::error::{Error, Result};
use crate::indicators::{ArchiveEntry, ParetoArchive};
use crate::instance::ProblemInstance;
use crate::Objectives;

/// What is kept of one run: enough to rebuild its archive at every
/// checkpoint once normalization boxes are known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub job: usize,
    pub descriptor: String,
    pub instance: ProblemInstance,
    pub algorithm: AlgorithmName,
    pub population: usize,
    pub budget: usize,
    pub seed: u64,
    pub repetition: usize,
    pub version: String,
    pub checkpoints: Vec<usize>,
    /// Archive insertions (original objectives) that survive until at least
    /// one checkpoint, in insertion order.
    pub history: Vec<ArchiveEntry>,
    /// Original objectives of the final population.
    pub final_population: Vec<Objectives>,
    pub error: Option<String>,
}

impl RunRecord {
    fn empty(job: &Job) -> Self {
        Self {
            job: job.id,
            descriptor: job.instance.descriptor(),
            instance: job.instance.clone(),
            algorithm: job.algo.name,
            population: job.algo.population,
            budget: job.algo.budget,
            seed: job.algo.seed,
            repetition: job.repetition,
            version: crate::VERSION.to_string(),
            checkpoints: checkpoints(job.algo.population, job.algo.budget),
            history: Vec::new(),
            final_population: Vec::new(),
            error: None,
        }
    }

    /// Archive contents after each checkpoint, replayed from the history.
    pub fn archives_at_checkpoints(&self) -> Result<Vec<Vec<Objectives>>> {
        let mut archive = ParetoArchive::new();
        let mut entries = self.history.iter().peekable();
        let mut out = Vec::with_capacity(self.checkpoints.len());
        for &c in &self.checkpoints {
            while let Some(e) = entries.next_if(|e| e.eval_index <= c as u64) {
                archive.insert(e.f, e.eval_index)?;
            }
            out.push(archive.points().collect());
        }
        Ok(out)
    }
}

/// Condenses a finished run into a record.
pub fn summarize(job: &Job, result: &RunResult) -> Result<RunRecord> {
    let mut rec = RunRecord::empty(job);
    let mut archive = ParetoArchive::new();
    let mut alive = HashSet::new();
    let mut next = rec.checkpoints.iter().peekable();
    for e in &result.log {
        archive.insert(e.f_original, e.eval_index)?;
        if next.next_if(|&&c| c as u64 == e.eval_index).is_some() {
            alive.extend(archive.entries().iter().map(|a| a.eval_index));
        }
    }
    rec.history = archive
        .history()
        .iter()
        .filter(|e| alive.contains(&e.eval_index))
        .copied()
        .collect();
    rec.final_population = result.final_population.iter().map(|i| i.f_original).collect();
    Ok(rec)
}

/// Writes one line per evaluation: `eval_index,x...,f_seen1,f_seen2,f_orig1,f_orig2`.
pub fn write_run_log(path: &Path, result: &RunResult) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let d = result.log.first().map_or(0, |r| r.x_seen.len());
    let mut header = vec!["eval_index".to_string()];
    header.extend((1..=d).map(|i| format!("x{i}")));
    header.extend(["f_seen1", "f_seen2", "f_orig1", "f_orig2"].map(String::from));
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for r in &result.log {
        let mut line = r.eval_index.to_string();
        for v in r.x_seen.iter().chain(&r.f_seen).chain(&r.f_original) {
            line.push(',');
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}

fn run_job<F>(job: &Job, runner: &F, logs: Option<&Path>) -> RunRecord
where
    F: Fn(&Job) -> Result<RunResult>,
{
    let attempt = || -> Result<RunRecord> {
        let result = runner(job)?;
        if let Some(dir) = logs {
            write_run_log(&dir.join(format!("job-{:06}.csv", job.id)), &result)?;
        }
        summarize(job, &result)
    };
    attempt().unwrap_or_else(|e| RunRecord {
        error: Some(e.to_string()),
        ..RunRecord::empty(job)
    })
}

/// Runs `jobs` on `parallelism` threads and hands records to `sink` in job
/// order. A failing job yields a record carrying its error.
pub fn execute<S>(jobs: &[Job], parallelism: usize, logs: Option<&Path>, sink: S) -> Result<()>
where
    S: FnMut(RunRecord) -> Result<()>,
{
    execute_with(jobs, parallelism, logs, |j| algorithms::run(&j.instance, &j.algo), sink)
}

pub(crate) fn execute_with<F, S>(
    jobs: &[Job],
    parallelism: usize,
    logs: Option<&Path>,
    runner: F,
    mut sink: S,
) -> Result<()>
where
    F: Fn(&Job) -> Result<RunResult> + Sync,
    S: FnMut(RunRecord) -> Result<()>,
{
    if parallelism == 0 {
        return Err(Error::Config("parallelism must be at least 1".into()));
    }
    if let Some(dir) = logs {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    for chunk in jobs.chunks(parallelism * 4) {
        let records: Vec<RunRecord> =
            pool.install(|| chunk.par_iter().map(|j| run_job(j, &runner, logs)).collect());
        for r in records {
            sink(r)?;
        }
    }
    Ok(())
}

/// Runs all jobs and keeps the records in memory.
pub fn execute_collect(jobs: &[Job], parallelism: usize) -> Result<Vec<RunRecord>> {
    let mut out = Vec::with_capacity(jobs.len());
    execute(jobs, parallelism, None, |r| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}

/// Streams records into a line-delimited JSON file.
pub struct RecordWriter {
    path: std::path::PathBuf,
    out: BufWriter<File>,
}

impl RecordWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    pub fn write(&mut self, rec: &RunRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, rec).map_err(|e| Error::Format {
            path: self.path.clone(),
            message: e.to_string(),
        })?;
        writeln!(self.out).map_err(|e| Error::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Calls `f` on every record of a line-delimited JSON file.
pub fn for_each_record<F>(path: &Path, mut f: F) -> Result<()>
where
    F: FnMut(RunRecord) -> Result<()>,
{
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: format!("line {}: {e}", n + 1),
        })?;
        f(rec)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AlgoConfig;
    use crate::indicators::nondominated;

    fn job(id: usize, name: AlgorithmName, seed: u64) -> Job {
        Job {
            id,
            instance: ProblemInstance::base("dtlz2-d2".parse().unwrap()),
            algo: AlgoConfig::new(name, 10, 300, seed),
            repetition: 0,
        }
    }

    #[test]
    fn pruned_history_replays_every_checkpoint() {
        for name in AlgorithmName::ALL {
            let j = job(0, name, 5);
            let result = algorithms::run(&j.instance, &j.algo).unwrap();
            let rec = summarize(&j, &result).unwrap();
            assert!(rec.history.len() <= result.log.len());
            let replayed = rec.archives_at_checkpoints().unwrap();
            for (c, got) in rec.checkpoints.iter().zip(replayed) {
                let seen: Vec<Objectives> = result.log[..*c].iter().map(|e| e.f_original).collect();
                let mut want = nondominated(&seen);
                let mut got = got;
                want.sort_by(|a, b| a.partial_cmp(b).unwrap());
                got.sort_by(|a, b| a.partial_cmp(b).unwrap());
                assert_eq!(got, want, "{name} at {c}");
            }
        }
    }

    #[test]
    fn failures_become_error_records() {
        let jobs: Vec<Job> = (0..6).map(|i| job(i, AlgorithmName::RandomSearch, i as u64)).collect();
        let mut got = Vec::new();
        execute_with(
            &jobs,
            2,
            None,
            |j| {
                if j.id == 3 {
                    Err(Error::Numeric("injected".into()))
                } else {
                    algorithms::run(&j.instance, &j.algo)
                }
            },
            |r| {
                got.push(r);
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(got.iter().map(|r| r.job).collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
        assert!(got[3].error.as_deref().unwrap().contains("injected"));
        assert!(got.iter().filter(|r| r.error.is_none()).all(|r| !r.history.is_empty()));
    }

    #[test]
    fn records_roundtrip_through_jsonl_and_logs() {
        let dir = tempfile::tempdir().unwrap();
        let jobs: Vec<Job> = (0..3).map(|i| job(i, AlgorithmName::Nsga2, i as u64)).collect();
        let path = dir.path().join("runs.jsonl");
        let mut w = RecordWriter::create(&path).unwrap();
        let mut kept = Vec::new();
        execute(&jobs, 1, Some(&dir.path().join("logs")), |r| {
            w.write(&r)?;
            kept.push(r);
            Ok(())
        })
        .unwrap();
        w.finish().unwrap();
        let mut read = Vec::new();
        for_each_record(&path, |r| {
            read.push(r);
            Ok(())
        })
        .unwrap();
        assert_eq!(read, kept);
        let log = std::fs::read_to_string(dir.path().join("logs/job-000001.csv")).unwrap();
        let lines: Vec<&str> = log.lines().collect();
        assert_eq!(lines.len(), 301);
        assert_eq!(lines[0], "eval_index,x1,x2,f_seen1,f_seen2,f_orig1,f_orig2");
        assert!(lines[1].starts_with("1,"));
    }
}
