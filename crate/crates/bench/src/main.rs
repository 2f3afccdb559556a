use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sg_bench::{expand, parse_sweep, run_all, write_csv, write_json, BenchError, Example, Method, ReferenceCache, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Runs the advection, driven oscillator and GPE examples with the
/// semi-global propagator or a Runge-Kutta reference and reports matvecs and
/// relative L2 errors.
#[derive(Debug, Parser)]
#[command(name = "sgbench", version)]
struct Cli {
    #[arg(long, value_enum)]
    example: Example,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, conflicts_with = "one_shot")]
    steps: Option<usize>,
    /// Single slab over [0, T] (semiglobal on advection only).
    #[arg(long)]
    one_shot: bool,
    #[arg(long, default_value_t = 7)]
    m: usize,
    /// Defaults to `m`.
    #[arg(long)]
    k: Option<usize>,
    /// Final time; defaults to the example's.
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
    /// RK45 tolerance (relative and absolute).
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Reject runs whose f_m expansions have a relative tail above this.
    #[arg(long)]
    tail_tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// e.g. 'steps=350,400,600' or 'steps=300,400;m=7,8'.
    #[arg(long)]
    sweep: Option<String>,
    /// Where reference solutions are cached.
    #[arg(long, env = "SGBENCH_CACHE", default_value = ".sgbench-cache")]
    cache_dir: PathBuf,
    /// Run sweep rows one after another.
    #[arg(long)]
    serial: bool,
}

fn configs(cli: &Cli) -> Result<Vec<RunConfig>, BenchError> {
    let mut base = RunConfig::new(cli.example, cli.method);
    base.steps = cli.steps;
    base.one_shot = cli.one_shot;
    base.m = cli.m;
    base.k = cli.k.unwrap_or(cli.m);
    base.t_final = cli.t_final.unwrap_or(cli.example.default_final_time());
    base.eps = cli.eps;
    base.tol = cli.tol;
    base.tail_tol = cli.tail_tol;
    match &cli.sweep {
        Some(text) => Ok(expand(&base, &parse_sweep(text)?, cli.k.is_none())),
        None => Ok(vec![base]),
    }
}

fn main_inner(cli: &Cli) -> Result<bool, BenchError> {
    let cfgs = configs(cli)?;
    let cache = ReferenceCache::new(&cli.cache_dir);
    let out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| BenchError::Config(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    let reports = run_all(&cfgs, &cache, !cli.serial)?;
    match cli.format {
        Format::Csv => write_csv(&reports, out)?,
        Format::Json => write_json(&reports, out)?,
    }
    for r in reports.iter().filter(|r| !r.ok()) {
        eprintln!("sgbench: {} {} steps={}: {}", r.method.name(), r.example.name(), r.steps, r.status);
    }
    Ok(reports.iter().all(|r| r.ok()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match main_inner(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("sgbench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
