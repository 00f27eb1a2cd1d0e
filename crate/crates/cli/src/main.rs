mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tfim_quench::spectrum::{Sector, ZeroMode};

use config::{Grid, Overrides, RunConfig, SuiteName, PRESETS};
use output::{write_tables, Format};

/// Exit status 1: a run failed a check or could not produce its result.
/// Exit status 2: bad arguments or an I/O problem.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl From<tfim_quench::Error> for CliError {
    fn from(e: tfim_quench::Error) -> Self {
        use tfim_quench::Error as E;
        match e {
            E::SeriesTooShort(_) | E::NoMinimum | E::SystemTooLarge { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "tfim-quench", version, about = "Quench dynamics of the transverse-field Ising chain")]
struct Cli {
    /// Worker threads for the time grid (defaults to all cores)
    #[arg(long, global = true, env = "TFIM_QUENCH_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state F_Q versus λ, its steepest rise λ_m and the p-index
    StaticScan {
        #[command(flatten)]
        run: RunArgs,
        /// Coupling grid, `start:stop:step` or a comma list
        #[arg(long)]
        lambda: Option<Grid>,
    },
    /// Time series of F_Q, the echo and their rate functions, with detected events
    Quench {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Long-time F_Q versus the final coupling
    SweepFinal {
        #[command(flatten)]
        run: RunArgs,
        /// Width of the averaging window ending at --t-max
        #[arg(long)]
        window: Option<f64>,
    },
    /// Compare the pipeline against the independent references
    OracleCheck {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        suite: Option<SuiteName>,
        #[arg(long, hide = true)]
        corrupt_kernel: Option<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Named configuration, one of fig1..fig8b
    #[arg(long)]
    preset: Option<String>,
    /// JSON run configuration
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Output file; sidecar tables are written next to it
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Print the resolved configuration as JSON and exit
    #[arg(long)]
    print_config: bool,
    /// Chain length(s), comma separated
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Initial coupling(s), comma separated
    #[arg(long, value_delimiter = ',')]
    lambda1: Option<Vec<f64>>,
    /// Final coupling(s), `start:stop:step` or a comma list
    #[arg(long)]
    lambda2: Option<Grid>,
    /// Momentum grid: integer or half-integer
    #[arg(long, value_parser = parse_sector)]
    sector: Option<Sector>,
    /// Unpaired momenta: include or exclude
    #[arg(long, value_parser = parse_zero_mode)]
    zero_mode: Option<ZeroMode>,
    /// Series end time (averaging end for sweep-final)
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
}

fn parse_sector(s: &str) -> Result<Sector, String> {
    match s {
        "integer" => Ok(Sector::Integer),
        "half-integer" => Ok(Sector::HalfInteger),
        _ => Err("expected integer or half-integer".into()),
    }
}

fn parse_zero_mode(s: &str) -> Result<ZeroMode, String> {
    match s {
        "include" => Ok(ZeroMode::Include),
        "exclude" => Ok(ZeroMode::Exclude),
        _ => Err("expected include or exclude".into()),
    }
}

fn resolve(command: &str, run: &RunArgs, ov: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = if let Some(path) = &run.config {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?
    } else if let Some(name) = &run.preset {
        config::preset(name)
            .ok_or_else(|| CliError::Usage(format!("unknown preset {name:?}; known: {}", PRESETS.join(", "))))?
    } else {
        config::default_for(command)
    };
    if !config::accepts(command, &cfg) {
        return Err(CliError::Usage(format!("configuration is for {}, not {command}", cfg.command())));
    }
    ov.apply(&mut cfg)?;
    Ok(cfg)
}

fn overrides(run: &RunArgs) -> Overrides {
    Overrides {
        n: run.n.clone(),
        lambda1: run.lambda1.clone(),
        lambda2: run.lambda2.clone(),
        sector: run.sector,
        zero_mode: run.zero_mode,
        t_max: run.t_max,
        dt: run.dt,
        ..Default::default()
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot set up {k} threads: {e}")))?;
    }
    let (name, run, cfg) = match &cli.command {
        Command::StaticScan { run, lambda } => {
            let ov = Overrides { lambda: lambda.clone(), ..overrides(run) };
            ("static-scan", run, resolve("static-scan", run, &ov)?)
        }
        Command::Quench { run } => ("quench", run, resolve("quench", run, &overrides(run))?),
        Command::SweepFinal { run, window } => {
            let ov = Overrides { window: *window, ..overrides(run) };
            ("sweep-final", run, resolve("sweep-final", run, &ov)?)
        }
        Command::OracleCheck { run, suite, corrupt_kernel } => {
            let mut cfg = resolve("oracle-check", run, &overrides(run))?;
            if let RunConfig::OracleCheck(c) = &mut cfg {
                if let Some(s) = suite {
                    c.suite = *s;
                }
                if let Some(off) = corrupt_kernel {
                    c.kernel_offset = *off;
                }
            }
            ("oracle-check", run, cfg)
        }
    };

    if run.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return Ok(());
    }

    if let RunConfig::OracleCheck(c) = &cfg {
        return oracle(&cfg, c, run);
    }

    let tables = commands::run(&cfg)?;
    let stem = run.preset.as_deref().unwrap_or(name);
    let out = run.out.clone().unwrap_or_else(|| PathBuf::from(format!("{stem}.{}", run.format.extension())));
    for path in write_tables(&tables, &cfg, &out, run.format)? {
        println!("wrote {}", path.display());
    }
    for t in &tables {
        for (k, v) in &t.summary {
            println!("{k} = {}", match v {
                output::Cell::F(x) => output::fmt_f64(*x),
                other => format!("{other:?}"),
            });
        }
    }
    Ok(())
}

fn oracle(cfg: &RunConfig, c: &config::OracleConfig, run: &RunArgs) -> Result<(), CliError> {
    let lines = commands::oracle_lines(c)?;
    for l in &lines {
        let tag = if l.pass { "ok  " } else { "FAIL" };
        println!("{tag} {:<58} max {:.3e} (tol {:.0e})  {}", l.name, l.max_deviation, l.tolerance, l.worst_case);
    }
    if let Some(out) = &run.out {
        write_tables(&[commands::oracle_table(&lines)], cfg, out, run.format)?;
    }
    let failed: Vec<String> =
        lines.iter().filter(|l| !l.pass).map(|l| format!("{} at {}", l.name, l.worst_case)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!("tolerance exceeded: {}", failed.join("; "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tfim-quench: {e}");
            ExitCode::from(e.code())
        }
    }
}
