use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use landauer_cli::config::Scenario;
use landauer_cli::error::{CliError, CliResult};
use landauer_cli::record::{write_record_csv, write_sweep_csv};
use landauer_cli::{bundled, runner};
use landauer_core::verify::{self, CriterionReport};

#[derive(Parser)]
#[command(
    name = "landauer",
    version,
    about = "Entropy-production budgets for detectors in squeezed thermal fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario.
    Run(RunArgs),
    /// Evaluate every point of a scenario's sweep block.
    Sweep(RunArgs),
    /// Run the acceptance suite and print pass/fail per criterion.
    Verify(VerifyArgs),
    /// List the bundled scenarios.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Source {
    /// Scenario file.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    config: Option<PathBuf>,
    /// Bundled scenario name.
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides the scenario's seed field.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Comma-separated criterion numbers (all if omitted).
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn load(src: &Source, seed: Option<u64>) -> CliResult<Scenario> {
    let mut sc = match (&src.config, &src.scenario) {
        (Some(path), _) => Scenario::load(path)?,
        (None, Some(name)) => bundled::load(name)?,
        (None, None) => return Err(CliError::Config("pass --config or --scenario".into())),
    };
    if let Some(seed) = seed {
        sc.seed = seed;
    }
    Ok(sc)
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(mut w: Box<dyn Write>, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn run(args: &RunArgs) -> CliResult<bool> {
    let sc = load(&args.source, args.seed)?;
    let rec = runner::run_scenario(&sc)?;
    let w = output(args.out.as_deref())?;
    match args.format.unwrap_or(Format::Json) {
        Format::Json => write_json(w, &rec)?,
        Format::Csv => write_record_csv(w, &rec)?,
    }
    for warning in &rec.warnings {
        eprintln!("warning: {warning}");
    }
    for failure in &rec.failures {
        eprintln!("failed: {failure}");
    }
    Ok(rec.passed)
}

fn sweep(args: &RunArgs) -> CliResult<bool> {
    let sc = load(&args.source, args.seed)?;
    let rep = runner::run_sweep(&sc, args.jobs)?;
    let w = output(args.out.as_deref())?;
    match args.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(w, &rep)?,
        Format::Csv => write_sweep_csv(w, &rep)?,
    }
    let failed = rep.rows.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        eprintln!("{failed} of {} sweep points failed", rep.rows.len());
    }
    Ok(failed == 0)
}

#[derive(Serialize)]
struct ReportRow<'a> {
    id: u8,
    title: &'a str,
    passed: bool,
    detail: &'a str,
    elapsed_s: f64,
}

fn verify_suite(args: &VerifyArgs) -> CliResult<bool> {
    let ids: Vec<u8> = if args.only.is_empty() {
        (1..=11).collect()
    } else {
        args.only.clone()
    };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=11).contains(&i)) {
        return Err(CliError::Config(format!("no criterion {bad}")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let reports: Vec<CriterionReport> = pool.install(|| ids.par_iter().filter_map(|&i| verify::run_one(i, args.seed)).collect());
    for r in &reports {
        println!("{r}");
    }
    let rows: Vec<ReportRow> = reports
        .iter()
        .map(|r| ReportRow {
            id: r.id,
            title: r.title,
            passed: r.passed,
            detail: &r.detail,
            elapsed_s: r.elapsed.as_secs_f64(),
        })
        .collect();
    if let Some(path) = &args.out {
        let w = output(Some(path))?;
        match args.format {
            Format::Json => write_json(w, &rows)?,
            Format::Csv => {
                let mut wr = csv::Writer::from_writer(w);
                for row in &rows {
                    wr.serialize(row)?;
                }
                wr.flush()?;
            }
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", reports.len() - failed, reports.len());
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify_suite(a),
        Command::List => {
            for name in bundled::names() {
                println!("{name}");
            }
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
