use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ofl_core::audit::{names, AuditLog};
use ofl_core::doubling::DetConfig;
use ofl_core::harness::{self, Family, GeneratorSpec, Grid, Mode, RunConfig};
use ofl_core::{Error, InstanceFile, Result};

/// Online non-metric facility location: generate, run, verify, sweep.
#[derive(Parser)]
#[command(name = "ofl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        nf: usize,
        #[arg(long)]
        nc: usize,
        #[arg(long)]
        na: usize,
        #[arg(long)]
        seed: u64,
        /// Edge probability per facility-client pair.
        #[arg(long)]
        density: Option<f64>,
        /// Output path, or `-` for stdout.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one algorithm online over the instance's requests.
    Run {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        instance: PathBuf,
        /// Check invariants and record violations in the report.
        #[arg(long)]
        audit: bool,
        /// Abort on the first invariant violation (implies --audit).
        #[arg(long)]
        strict: bool,
        /// Disable one named audit; repeatable.
        #[arg(long = "skip-audit", value_name = "NAME")]
        skip_audit: Vec<String>,
        /// Budget constant of the doubling algorithm.
        #[arg(long, default_value_t = ofl_core::doubling::DEFAULT_Q)]
        q: f64,
        /// Skip the offline optimum (and the ratios that need it).
        #[arg(long)]
        no_oracle: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact offline optimum by exhaustive search.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ratio sweep over a grid of generated instances; writes CSV.
    Sweep {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Frac,
    Int,
    Det,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Frac => Mode::Frac,
            ModeArg::Int => Mode::Int,
            ModeArg::Det => Mode::Det,
        }
    }
}

fn open_out(path: &Path) -> Result<Box<dyn Write>> {
    if path == Path::new("-") {
        Ok(Box::new(io::stdout().lock()))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

fn load(path: &Path) -> Result<InstanceFile> {
    InstanceFile::load(path).inspect_err(|_| eprintln!("cannot load instance {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = open_out(path)?;
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn audit_log(audit: bool, strict: bool, skip: &[String]) -> Result<AuditLog> {
    let mut log = match (audit, strict) {
        (_, true) => AuditLog::strict(),
        (true, false) => AuditLog::enabled(),
        (false, false) => AuditLog::disabled(),
    };
    for name in skip {
        if !names::ALL.contains(&name.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "unknown audit {name:?}; expected one of {}",
                names::ALL.join(", ")
            )));
        }
        log = log.skip(name);
    }
    Ok(log)
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen {
            family,
            nf,
            nc,
            na,
            seed,
            density,
            out,
        } => {
            let mut spec = GeneratorSpec::new(family, nf, nc, na, seed);
            if let Some(d) = density {
                spec.density = d;
            }
            write_text(&out, &harness::generate(&spec)?.to_json())
        }
        Command::Run {
            mode,
            instance,
            audit,
            strict,
            skip_audit,
            q,
            no_oracle,
            out,
        } => {
            let file = load(&instance)?;
            let config = RunConfig {
                mode: mode.into(),
                audit: audit_log(audit, strict, &skip_audit)?,
                det: DetConfig::new(q)?,
                oracle: !no_oracle,
            };
            let report = harness::run(&file, &config)?;
            if report.audit_failures() > 0 {
                log::warn!("{} audit violations recorded", report.audit_failures());
            }
            write_text(&out, &report.to_json())
        }
        Command::Oracle { instance, out } => {
            let file = load(&instance)?;
            write_text(&out, &harness::oracle_report(&file)?.to_json())
        }
        Command::Sweep { grid, out } => {
            let text = std::fs::read_to_string(&grid)
                .inspect_err(|_| eprintln!("cannot read grid {}", grid.display()))?;
            let grid = Grid::from_json(&text)?;
            let rows = harness::run_grid(&grid)?;
            log::info!("sweep finished: {} rows", rows.len());
            let mut w = open_out(&out)?;
            harness::write_csv(&rows, &mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::AuditFailure { .. } => 3,
        Error::SizeGuard { .. } => 4,
        Error::NegativeCost(_)
        | Error::DuplicateEdge { .. }
        | Error::DuplicateId(_)
        | Error::UnknownFacility(_)
        | Error::UnknownClient(_)
        | Error::TooSmall { .. }
        | Error::NotNormalized
        | Error::CostOutOfRange(_)
        | Error::ParseRational(_)
        | Error::DuplicateRequest(_)
        | Error::InvalidConfig(_)
        | Error::InvalidSpec(_)
        | Error::InfeasibleInstance(_)
        | Error::Json(_)
        | Error::Csv(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OFL_LOG", "warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
