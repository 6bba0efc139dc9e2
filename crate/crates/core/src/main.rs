use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use moinst::algorithms::AlgorithmName;
use moinst::harness::{self, report, ExperimentConfig, Space};
use moinst::indicators::density_change;
use moinst::problems::{list_problems, native_bounds, ProblemId};
use moinst::transforms::TransformSpec;
use moinst::{Error, Result};

#[derive(Parser)]
#[command(name = "moinst", version, about = "Transformed bi-objective benchmark instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (overrides the config).
        #[arg(long)]
        parallel: Option<usize>,
        /// Output directory (overrides the config and $MOINST_OUT).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a table from the records of a finished run.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: ReportKind,
        #[arg(long)]
        problem: Option<ProblemId>,
        #[arg(long)]
        algo: Option<AlgorithmName>,
        #[arg(long)]
        population: Option<usize>,
        /// Space of the Beta-CDF grid for heatmaps.
        #[arg(long, default_value = "search")]
        space: Space,
        /// Instance descriptor or transform label for over-time curves.
        #[arg(long)]
        transform: Option<String>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wasserstein distance between pairwise distances before and after a
    /// transformation.
    Density {
        /// A label such as `beta-a0.5-b2`, `rot-angle0.785`, `rot-seed3`, or JSON.
        #[arg(long)]
        transform: String,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List available problems and transform syntax.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    AbHeatmap,
    Relative,
    OverTime,
    Runs,
}

fn emit(table: &report::Table, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => table.save(path),
        None => table.write_csv(std::io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            parallel,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = out.unwrap_or_else(|| cfg.resolved_output_dir());
            let threads = parallel
                .or(cfg.parallelism)
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if threads == 0 {
                return Err(Error::Config("--parallel must be at least 1".into()));
            }
            let summary = harness::run_experiment(&cfg, &out, threads)?;
            eprintln!(
                "{} runs ({} failed) written to {}",
                summary.jobs,
                summary.failed,
                summary.out_dir.display()
            );
        }
        Command::Report {
            input,
            kind,
            problem,
            algo,
            population,
            space,
            transform,
            out,
        } => {
            let rows = harness::load_rows(&input.join(harness::RECORDS_FILE))?;
            let table = match kind {
                ReportKind::AbHeatmap => {
                    harness::ab_heatmap_table(&rows, problem, algo, population, space)?
                }
                ReportKind::Relative => harness::relative_table(&harness::report_relative_hv(&rows)?),
                ReportKind::OverTime => {
                    harness::report_hv_over_time(&rows, problem, transform.as_deref(), algo)
                }
                ReportKind::Runs => report::runs_table(&rows),
            };
            emit(&table, out.as_ref())?;
        }
        Command::Density {
            transform,
            n,
            dim,
            seed,
        } => {
            let t = TransformSpec::parse(&transform, dim)?;
            println!("{}", density_change(&t, n, dim, seed)?);
        }
        Command::List => {
            let mut w = std::io::stdout().lock();
            let io = |e| Error::io("<stdout>", e);
            writeln!(w, "problem,dim,lower,upper").map_err(io)?;
            for p in list_problems() {
                let b = native_bounds(p);
                let fmt = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                writeln!(w, "{p},{},{},{}", p.dim(), fmt(&b.lower), fmt(&b.upper)).map_err(io)?;
            }
            writeln!(w).map_err(io)?;
            writeln!(w, "transforms: id | beta-a<alpha>-b<beta> | rot-seed<n> | rot-angle<radians>").map_err(io)?;
            writeln!(w, "algorithms: {}", AlgorithmName::ALL.map(|a| a.as_str()).join(" ")).map_err(io)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
