use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ductflow_core::characteristics::Family;
use ductflow_core::config::{self, RunConfig};
use ductflow_core::diagnostics::claims_text;
use ductflow_core::pipeline;
use ductflow_core::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ABORT: u8 = 3;

#[derive(Parser)]
#[command(name = "ductflow", version, about = "Supersonic flow through divergent ducts near vacuum")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every hypothesis on the configured data.
    Validate {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the nu-sweep and write the output tree.
    Run {
        #[command(flatten)]
        setup: Setup,
        /// Run even when validation fails.
        #[arg(long)]
        force: bool,
    },
    /// Trace one characteristic through the snapshots of a run directory.
    Trace {
        run_dir: PathBuf,
        #[arg(long)]
        x0: f64,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// 1, 2 or particle.
        #[arg(long, default_value = "1")]
        family: String,
        #[arg(long)]
        interpolation: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Summarize a run directory.
    Report { run_dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Kv,
}

#[derive(Args)]
struct Setup {
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["experiment1", "experiment2"])]
    preset: Option<String>,
    /// Comma-separated nu values; replaces the sweep list.
    #[arg(long, value_delimiter = ',')]
    nu: Vec<f64>,
    #[arg(long)]
    dx: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Setup {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(p), _) => RunConfig::load(p)?,
            (None, Some(name)) => config::preset(name)?,
            (None, None) => return Err(Error::Usage("give --config PATH or --preset NAME".into())),
        };
        if !self.nu.is_empty() {
            cfg.sweep.nu = self.nu.clone();
        }
        if let Some(dx) = self.dx {
            cfg.grid.dx = Some(dx);
            cfg.grid.n_cells = None;
        }
        if let Some(c) = self.cfl {
            cfg.solver.cfl_ratio = c;
        }
        if let Some(t) = self.t_final {
            cfg.solver.t_final = t;
        }
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
        Ok(cfg)
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::SolverAbort { .. } => ExitCode::from(EXIT_ABORT),
        _ => ExitCode::from(EXIT_USAGE),
    }
}

fn validate(setup: &Setup, format: Format) -> Result<ExitCode, Error> {
    let cfg = setup.resolve()?;
    let mut ok = true;
    for nu in cfg.nu_values()? {
        let rep = pipeline::validate(&cfg, nu)?;
        ok &= rep.passed();
        match format {
            Format::Text => println!("nu = {nu}\n{}", rep.to_text()),
            Format::Kv => print!("nu={nu}\n{}", rep.to_key_value()),
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VALIDATION) })
}

fn run(setup: &Setup, force: bool) -> Result<ExitCode, Error> {
    let cfg = setup.resolve()?;
    let out = pipeline::run_sweep(&cfg, &cfg.output.dir, force)?;
    for (nu, rep) in &out.rejected {
        println!("validation failed for nu = {nu}\n{}", rep.to_text());
    }
    if out.runs.is_empty() {
        eprintln!("not running; pass --force to run anyway");
        return Ok(ExitCode::from(EXIT_VALIDATION));
    }
    for r in &out.runs {
        let last = r.record.last_valid();
        println!("== nu = {}: {} steps, t = {}", r.nu, r.record.steps, last.t());
        print!("{}", claims_text(&r.claims));
    }
    println!("output written to {}", out.out_dir.display());
    if let Some(r) = out.aborted() {
        let a = r.record.abort.as_ref().expect("aborted run");
        eprintln!("nu = {}: {}; last valid t = {}", r.nu, a.to_error(), r.record.last_valid().t());
        return Ok(ExitCode::from(EXIT_ABORT));
    }
    Ok(ExitCode::SUCCESS)
}

fn trace(dir: &Path, x0: f64, t0: f64, family: &str, interpolation: Option<&str>, tol: f64) -> Result<ExitCode, Error> {
    let family = Family::parse(family)?;
    let (c, path) = pipeline::trace_from_dir(dir, x0, t0, family, interpolation, tol)?;
    let r = &c.report;
    let end = c.trace.exit_point();
    println!("family {} from ({x0}, {t0}) to ({}, {}): {}", c.trace.family, end.x, end.t, c.trace.exit);
    println!("S increasing  {}", r.s_increasing);
    println!("R decreasing  {}", r.r_decreasing);
    println!("xi decreasing {}", r.xi_decreasing);
    println!("worst margin  {:e} at t = {}", r.worst, r.worst_at);
    println!("written to {}", path.display());
    Ok(if r.ok() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VALIDATION) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { setup, format } => validate(setup, *format),
        Command::Run { setup, force } => run(setup, *force),
        Command::Trace { run_dir, x0, t0, family, interpolation, tol } => {
            trace(run_dir, *x0, *t0, family, interpolation.as_deref(), *tol)
        }
        Command::Report { run_dir } => pipeline::report(run_dir).map(|text| {
            print!("{text}");
            ExitCode::SUCCESS
        }),
    };
    result.unwrap_or_else(|e| fail(&e))
}
