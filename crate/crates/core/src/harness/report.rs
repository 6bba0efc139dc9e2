use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::execute::{for_each_record, RunRecord};
use crate::algorithms::AlgorithmName;
use crate::error::{Error, Result};
use crate::indicators::{normalized_hv, relative_hv, ExtremeTracker, NormalizationBox};
use crate::instance::ProblemInstance;
use crate::problems::{ProblemId, Suite};
use crate::transforms::{TransformKind, TransformSpec};

/// Marker written wherever a value cannot be computed.
pub const GAP: &str = "NA";

/// Pools every run's archive per base problem and derives the boxes.
#[derive(Debug, Default)]
pub struct BoxBuilder {
    pools: BTreeMap<ProblemId, ExtremeTracker>,
}

impl BoxBuilder {
    pub fn add(&mut self, rec: &RunRecord) {
        let pool = self.pools.entry(rec.instance.problem()).or_default();
        for e in &rec.history {
            pool.add(e.f);
        }
    }

    /// Box per problem, or the reason it is degenerate.
    pub fn finish(self) -> BTreeMap<ProblemId, std::result::Result<NormalizationBox, String>> {
        self.pools
            .into_iter()
            .map(|(p, pool)| (p, pool.finish().map_err(|e| e.to_string())))
            .collect()
    }
}

/// One run with its normalized indicators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub job: usize,
    pub descriptor: String,
    #[serde(skip)]
    pub instance: ProblemInstance,
    pub algorithm: AlgorithmName,
    pub population: usize,
    pub seed: u64,
    pub repetition: usize,
    pub version: String,
    pub final_archive_hv: Option<f64>,
    pub final_pop_hv: Option<f64>,
    pub checkpoint_evals: Vec<usize>,
    pub checkpoint_hvs: Vec<f64>,
    pub error: Option<String>,
}

impl RunRow {
    pub fn problem(&self) -> ProblemId {
        self.instance.problem()
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Normalizes one record against its problem's box.
pub fn row_from_record(
    rec: &RunRecord,
    norm: Option<&std::result::Result<NormalizationBox, String>>,
) -> RunRow {
    let mut row = RunRow {
        job: rec.job,
        descriptor: rec.descriptor.clone(),
        instance: rec.instance.clone(),
        algorithm: rec.algorithm,
        population: rec.population,
        seed: rec.seed,
        repetition: rec.repetition,
        version: rec.version.clone(),
        final_archive_hv: None,
        final_pop_hv: None,
        checkpoint_evals: rec.checkpoints.clone(),
        checkpoint_hvs: Vec::new(),
        error: rec.error.clone(),
    };
    if row.error.is_some() {
        return row;
    }
    let norm = match norm {
        Some(Ok(b)) => b,
        Some(Err(reason)) => {
            row.error = Some(reason.clone());
            return row;
        }
        None => {
            row.error = Some("no normalization box".into());
            return row;
        }
    };
    match rec.archives_at_checkpoints() {
        Ok(archives) => {
            row.checkpoint_hvs = archives.iter().map(|a| normalized_hv(a, norm)).collect();
            row.final_archive_hv = row.checkpoint_hvs.last().copied();
            row.final_pop_hv = Some(normalized_hv(&rec.final_population, norm));
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Two-pass normalization of in-memory records.
pub fn rows_from_records(records: &[RunRecord]) -> Result<Vec<RunRow>> {
    let mut boxes = BoxBuilder::default();
    for r in records {
        boxes.add(r);
    }
    let boxes = boxes.finish();
    Ok(records
        .iter()
        .map(|r| row_from_record(r, boxes.get(&r.instance.problem())))
        .collect())
}

/// Two-pass normalization streamed from a `runs.jsonl` file.
pub fn load_rows(path: &Path) -> Result<Vec<RunRow>> {
    let mut boxes = BoxBuilder::default();
    for_each_record(path, |r| {
        boxes.add(&r);
        Ok(())
    })?;
    let boxes = boxes.finish();
    let mut rows = Vec::new();
    for_each_record(path, |r| {
        rows.push(row_from_record(&r, boxes.get(&r.instance.problem())));
        Ok(())
    })?;
    rows.sort_by_key(|r| r.job);
    Ok(rows)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

/// A small CSV-ready table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Report(e.to_string());
        w.write_record(&self.columns).map_err(err)?;
        for r in &self.rows {
            w.write_record(r).map_err(err)?;
        }
        w.flush().map_err(|e| Error::Report(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Report(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn has_gaps(&self) -> bool {
        self.rows.iter().flatten().any(|c| c == GAP)
    }
}

/// Per-run table: the fixed columns first, then version and error.
pub fn runs_table(rows: &[RunRow]) -> Table {
    let mut t = Table::new(&[
        "instance",
        "algorithm",
        "population",
        "seed",
        "final_archive_hv",
        "final_pop_hv",
        "checkpoint_evals",
        "checkpoint_hvs",
        "version",
        "error",
    ]);
    for r in rows {
        t.rows.push(vec![
            r.descriptor.clone(),
            r.algorithm.to_string(),
            r.population.to_string(),
            r.seed.to_string(),
            fmt_opt(r.final_archive_hv),
            fmt_opt(r.final_pop_hv),
            join(&r.checkpoint_evals),
            join(&r.checkpoint_hvs),
            r.version.clone(),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    t
}

pub fn emit_runs_csv(rows: &[RunRow], path: &Path) -> Result<()> {
    runs_table(rows).save(path)
}

/// Which space a Beta-CDF grid was applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Search,
    Objective,
}

impl std::str::FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "search" => Ok(Space::Search),
            "objective" => Ok(Space::Objective),
            _ => Err(Error::Config(format!("unknown space {s:?}"))),
        }
    }
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Space::Search => "search",
            Space::Objective => "objective",
        })
    }
}

/// Beta-CDF parameters of an instance in `space`, with the untransformed
/// instance standing at `(1, 1)`.
fn grid_cell(inst: &ProblemInstance, space: Space) -> Option<(f64, f64)> {
    let (own, other) = match space {
        Space::Search => (inst.search(), inst.objective()),
        Space::Objective => (inst.objective(), inst.search()),
    };
    if other.kind() != TransformKind::Identity {
        return None;
    }
    match own {
        TransformSpec::Identity => Some((1.0, 1.0)),
        TransformSpec::BetaCdf(p) => Some((p.alpha(), p.beta())),
        TransformSpec::SpheredRotation(_) => None,
    }
}

/// Mean final archive HV per `(α, β)` cell; `None` marks a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct AbHeatmap {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub means: Vec<Vec<Option<f64>>>,
}

impl AbHeatmap {
    pub fn get(&self, alpha: f64, beta: f64) -> Option<f64> {
        let i = self.alphas.iter().position(|&a| a == alpha)?;
        let j = self.betas.iter().position(|&b| b == beta)?;
        self.means[i][j]
    }
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn report_ab_heatmap(
    rows: &[RunRow],
    problem: ProblemId,
    algorithm: AlgorithmName,
    population: usize,
    space: Space,
) -> Result<AbHeatmap> {
    let mut cells: BTreeMap<(u64, u64), Vec<f64>> = BTreeMap::new();
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut any_beta = false;
    for r in rows {
        if r.problem() != problem || r.algorithm != algorithm || r.population != population {
            continue;
        }
        let Some((a, b)) = grid_cell(&r.instance, space) else {
            continue;
        };
        any_beta |= (a, b) != (1.0, 1.0);
        alphas.push(a);
        betas.push(b);
        let cell = cells.entry((a.to_bits(), b.to_bits())).or_default();
        if let (true, Some(hv)) = (r.ok(), r.final_archive_hv) {
            cell.push(hv);
        }
    }
    if !any_beta {
        return Err(Error::Report(format!(
            "no {space}-space Beta-CDF runs for {problem} {algorithm} population {population}"
        )));
    }
    let alphas = sorted_unique(alphas);
    let betas = sorted_unique(betas);
    let means = alphas
        .iter()
        .map(|a| {
            betas
                .iter()
                .map(|b| {
                    cells
                        .get(&(a.to_bits(), b.to_bits()))
                        .and_then(|v| mean(v.iter().copied()))
                })
                .collect()
        })
        .collect();
    Ok(AbHeatmap {
        alphas,
        betas,
        means,
    })
}

/// All heatmaps present in `rows` as one table, one line per α row.
pub fn ab_heatmap_table(
    rows: &[RunRow],
    problem: Option<ProblemId>,
    algorithm: Option<AlgorithmName>,
    population: Option<usize>,
    space: Space,
) -> Result<Table> {
    let mut keys: Vec<(ProblemId, AlgorithmName, usize)> = rows
        .iter()
        .filter(|r| problem.is_none_or(|p| r.problem() == p))
        .filter(|r| algorithm.is_none_or(|a| r.algorithm == a))
        .filter(|r| population.is_none_or(|n| r.population == n))
        .filter(|r| grid_cell(&r.instance, space).is_some_and(|c| c != (1.0, 1.0)))
        .map(|r| (r.problem(), r.algorithm, r.population))
        .collect();
    keys.sort();
    keys.dedup();
    if keys.is_empty() {
        return Err(Error::Report(format!("no {space}-space Beta-CDF grid in the results")));
    }
    let maps = keys
        .iter()
        .map(|&(p, a, n)| report_ab_heatmap(rows, p, a, n, space))
        .collect::<Result<Vec<_>>>()?;
    let betas = sorted_unique(maps.iter().flat_map(|m| m.betas.clone()).collect());
    let mut columns = vec!["problem", "algorithm", "population", "space", "alpha"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    columns.extend(betas.iter().map(|b| format!("beta={b}")));
    let mut t = Table {
        columns,
        rows: Vec::new(),
    };
    for ((p, a, n), m) in keys.iter().zip(&maps) {
        for &alpha in &m.alphas {
            let mut line = vec![p.to_string(), a.to_string(), n.to_string(), space.to_string(), alpha.to_string()];
            line.extend(
                betas
                    .iter()
                    .map(|&b| m.get(alpha, b).map_or(GAP.to_string(), |v| v.to_string())),
            );
            t.rows.push(line);
        }
    }
    Ok(t)
}

/// Transformation family used to group relative hypervolumes.
pub fn family(inst: &ProblemInstance) -> &'static str {
    match (inst.search().kind(), inst.objective().kind()) {
        (TransformKind::Identity, TransformKind::Identity) => "identity",
        (TransformKind::BetaCdf, TransformKind::Identity) => "beta-cdf-search",
        (TransformKind::Identity, TransformKind::BetaCdf) => "beta-cdf-objective",
        (TransformKind::SpheredRotation, TransformKind::Identity) => "sphered-rotation",
        _ => "combined",
    }
}

/// One cell of the relative hypervolume table.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeEntry {
    pub suite: Suite,
    pub dim: usize,
    /// An algorithm name, or `ea-aggregate` for the mean over the
    /// evolutionary algorithms.
    pub algorithm: String,
    pub population: usize,
    pub family: &'static str,
    pub value: Option<f64>,
    pub problems: usize,
    pub note: String,
}

/// Relative final-population hypervolume. Each run is divided by the mean of
/// the base instance's runs with the same problem, algorithm and population;
/// ratios are averaged per instance, then per problem, then per suite.
pub fn report_relative_hv(rows: &[RunRow]) -> Result<Vec<RelativeEntry>> {
    type Config = (ProblemId, AlgorithmName, usize);
    let mut base: BTreeMap<Config, Vec<f64>> = BTreeMap::new();
    let mut configs: Vec<Config> = Vec::new();
    for r in rows {
        configs.push((r.problem(), r.algorithm, r.population));
        if family(&r.instance) == "identity" {
            let e = base.entry((r.problem(), r.algorithm, r.population)).or_default();
            if let (true, Some(hv)) = (r.ok(), r.final_pop_hv) {
                e.push(hv);
            }
        }
    }
    configs.sort();
    configs.dedup();
    let missing: Vec<String> = configs
        .iter()
        .filter(|c| !base.contains_key(c))
        .map(|(p, a, n)| format!("{p}/{a}/{n}"))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Report(format!(
            "no base (identity) runs for {}",
            missing.join(", ")
        )));
    }
    // ratios per (config, family, instance)
    let mut per_instance: BTreeMap<(Config, &'static str, String), Vec<f64>> = BTreeMap::new();
    let mut degenerate: BTreeMap<(Config, &'static str), String> = BTreeMap::new();
    for r in rows {
        let cfg = (r.problem(), r.algorithm, r.population);
        let fam = family(&r.instance);
        let entry = per_instance.entry((cfg, fam, r.descriptor.clone())).or_default();
        let Some(base_mean) = mean(base[&cfg].iter().copied()) else {
            degenerate.insert((cfg, fam), format!("{}: all base runs failed", cfg.0));
            continue;
        };
        let (true, Some(hv)) = (r.ok(), r.final_pop_hv) else {
            continue;
        };
        match relative_hv(hv, base_mean) {
            Ok(v) => entry.push(v),
            Err(e) => {
                degenerate.insert((cfg, fam), format!("{}: {e}", cfg.0));
            }
        }
    }
    // instance means -> problem means
    let mut per_problem: BTreeMap<(Config, &'static str), Vec<f64>> = BTreeMap::new();
    for ((cfg, fam, _), ratios) in &per_instance {
        if degenerate.contains_key(&(*cfg, *fam)) {
            continue;
        }
        if let Some(m) = mean(ratios.iter().copied()) {
            per_problem.entry((*cfg, *fam)).or_default().push(m);
        }
    }
    // problem means -> suite means
    type Key = (Suite, usize, String, usize, &'static str);
    let mut per_suite: BTreeMap<Key, (Vec<f64>, Vec<String>)> = BTreeMap::new();
    for ((p, a, n), fam) in per_instance.keys().map(|(c, f, _)| (*c, *f)) {
        let key = (p.suite(), p.dim(), a.to_string(), n, fam);
        let slot = per_suite.entry(key).or_default();
        if let Some(reason) = degenerate.get(&((p, a, n), fam)) {
            if !slot.1.contains(reason) {
                slot.1.push(reason.clone());
            }
        }
    }
    for (((p, a, n), fam), means) in &per_problem {
        let key = (p.suite(), p.dim(), a.to_string(), *n, *fam);
        if let Some(m) = mean(means.iter().copied()) {
            per_suite.entry(key).or_default().0.push(m);
        }
    }
    let mut out: Vec<RelativeEntry> = per_suite
        .into_iter()
        .map(|((suite, dim, algorithm, population, family), (vals, notes))| RelativeEntry {
            suite,
            dim,
            algorithm,
            population,
            family,
            value: mean(vals.iter().copied()),
            problems: vals.len(),
            note: notes.join("; "),
        })
        .collect();
    // equal-weight mean over the evolutionary algorithms
    let mut ea: BTreeMap<(Suite, usize, usize, &'static str), Vec<f64>> = BTreeMap::new();
    for e in &out {
        if e.algorithm != AlgorithmName::RandomSearch.as_str() {
            let slot = ea.entry((e.suite, e.dim, e.population, e.family)).or_default();
            if let Some(v) = e.value {
                slot.push(v);
            }
        }
    }
    for ((suite, dim, population, family), vals) in ea {
        out.push(RelativeEntry {
            suite,
            dim,
            algorithm: "ea-aggregate".into(),
            population,
            family,
            value: mean(vals.iter().copied()),
            problems: 0,
            note: String::new(),
        });
    }
    out.sort_by(|a, b| {
        (a.suite, a.dim, a.population, a.family, &a.algorithm)
            .cmp(&(b.suite, b.dim, b.population, b.family, &b.algorithm))
    });
    Ok(out)
}

pub fn relative_table(entries: &[RelativeEntry]) -> Table {
    let mut t = Table::new(&[
        "suite",
        "dim",
        "algorithm",
        "population",
        "family",
        "relative_hv",
        "problems",
        "note",
    ]);
    for e in entries {
        t.rows.push(vec![
            e.suite.to_string(),
            e.dim.to_string(),
            e.algorithm.clone(),
            e.population.to_string(),
            e.family.to_string(),
            e.value.map_or(GAP.to_string(), |v| v.to_string()),
            e.problems.to_string(),
            e.note.clone(),
        ]);
    }
    t
}

/// Label of the transform that distinguishes an instance from its base:
/// `id` for the base itself, the single non-identity label, or the
/// `s:<label>__o:<label>` part when both spaces are transformed.
pub fn varied_label(inst: &ProblemInstance) -> String {
    let (s, o) = (inst.search(), inst.objective());
    match (s.kind(), o.kind()) {
        (TransformKind::Identity, TransformKind::Identity) => "id".into(),
        (_, TransformKind::Identity) => s.label(),
        (TransformKind::Identity, _) => o.label(),
        _ => format!("s:{}__o:{}", s.label(), o.label()),
    }
}

/// Whether `filter` names this instance: its full descriptor, the
/// `s:<label>__o:<label>` part, or its [`varied_label`].
fn matches_transform(r: &RunRow, filter: &str) -> bool {
    let tail = r.descriptor.split_once("__").map_or("", |(_, t)| t);
    r.descriptor == filter || tail == filter || varied_label(&r.instance) == filter
}

/// Long-format normalized archive HV at every checkpoint, per run and as a
/// mean per (instance, algorithm, population).
pub fn report_hv_over_time(
    rows: &[RunRow],
    problem: Option<ProblemId>,
    transform: Option<&str>,
    algorithm: Option<AlgorithmName>,
) -> Table {
    let mut t = Table::new(&[
        "instance",
        "algorithm",
        "population",
        "series",
        "seed",
        "eval",
        "hv",
    ]);
    let mut selected: Vec<&RunRow> = rows
        .iter()
        .filter(|r| problem.is_none_or(|p| r.problem() == p))
        .filter(|r| transform.is_none_or(|f| matches_transform(r, f)))
        .filter(|r| algorithm.is_none_or(|a| r.algorithm == a))
        .filter(|r| r.ok())
        .collect();
    selected.sort_by(|a, b| {
        (&a.descriptor, a.algorithm, a.population, a.repetition)
            .cmp(&(&b.descriptor, b.algorithm, b.population, b.repetition))
    });
    let mut start = 0;
    while start < selected.len() {
        let head = selected[start];
        let end = start
            + selected[start..]
                .iter()
                .take_while(|r| {
                    (&r.descriptor, r.algorithm, r.population)
                        == (&head.descriptor, head.algorithm, head.population)
                })
                .count();
        let group = &selected[start..end];
        let key = |series: String, seed: String, eval: usize, hv: f64| {
            vec![
                head.descriptor.clone(),
                head.algorithm.to_string(),
                head.population.to_string(),
                series,
                seed,
                eval.to_string(),
                hv.to_string(),
            ]
        };
        if group.iter().all(|r| r.checkpoint_evals == head.checkpoint_evals) {
            for (k, &eval) in head.checkpoint_evals.iter().enumerate() {
                let m = mean(group.iter().map(|r| r.checkpoint_hvs[k])).unwrap_or(f64::NAN);
                t.rows.push(key("mean".into(), String::new(), eval, m));
            }
        }
        for r in group {
            for (&eval, &hv) in r.checkpoint_evals.iter().zip(&r.checkpoint_hvs) {
                t.rows.push(key(format!("run{}", r.repetition), r.seed.to_string(), eval, hv));
            }
        }
        start = end;
    }
    t
}
