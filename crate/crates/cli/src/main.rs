//! `varmass` — experiments on the restricted three-body problem in which all
//! masses share one time factor u(t), exchanging mass with a static medium.

// `!(x > 0.0)` is the NaN-rejecting form of the config guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{dispatch, CliError};
use config::{parse_points, parse_seed, MassLawSpec, RunConfig};
use varmass_core::primaries::FrameMode;

#[derive(Parser)]
#[command(
    name = "varmass",
    about = "Restricted three-body problem with a shared time-varying mass factor",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve equilibrium families and write JSON/CSV records.
    Equilibria(CommonArgs),
    /// Propagate the primaries and write the ephemeris CSV.
    Propagate(CommonArgs),
    /// Integrate a third-body trajectory from a point label or explicit seed.
    Simulate(CommonArgs),
    /// Check self-similar tracking of the requested points; exit 3 when any
    /// residual exceeds the threshold.
    Verify(CommonArgs),
    /// Grid sweep over nu and kappa producing the family atlas.
    Sweep(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Equilibria(_) => "equilibria",
            Command::Propagate(_) => "propagate",
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
            Command::Sweep(_) => "sweep",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Equilibria(a)
            | Command::Propagate(a)
            | Command::Simulate(a)
            | Command::Verify(a)
            | Command::Sweep(a) => a,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Mass parameter nu in (0, 1/2].
    #[arg(long)]
    nu: Option<f64>,
    /// Constraint constant kappa > 1; implies the kappa-constrained law.
    #[arg(long)]
    kappa: Option<f64>,
    /// Gravitational constant (normalized units).
    #[arg(long)]
    g: Option<f64>,
    /// Mass law, e.g. constant:u0=1 | linear:rate=0.1 | exponential:rate=0.02
    /// | mestschersky:alpha=0.01,beta=0.005,gamma=1 | kappa:kappa=2.
    #[arg(long = "mass-law")]
    mass_law: Option<String>,
    /// End of the integration span.
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Relative tolerance of the integrator.
    #[arg(long)]
    rtol: Option<f64>,
    /// Absolute tolerance of the integrator.
    #[arg(long)]
    atol: Option<f64>,
    /// Comma-separated point labels (L0-L11).
    #[arg(long)]
    points: Option<String>,
    /// Explicit similarity-coordinate seed xi,eta,zeta for simulate.
    #[arg(long)]
    seed: Option<String>,
    /// Frame mode: rotating | collinear.
    #[arg(long)]
    mode: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Also write SVG quick-look plots.
    #[arg(long)]
    svg: bool,
    /// Initial separation factor R(0).
    #[arg(long)]
    r0: Option<f64>,
    /// Initial separation rate R'(0).
    #[arg(long)]
    rdot0: Option<f64>,
    /// Verification threshold on the self-similarity residual.
    #[arg(long)]
    threshold: Option<f64>,
    /// Number of rows in emitted CSV tables.
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated nu values for sweep.
    #[arg(long = "nu-grid")]
    nu_grid: Option<String>,
    /// Comma-separated kappa values for sweep.
    #[arg(long = "kappa-grid")]
    kappa_grid: Option<String>,
}

fn effective_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            RunConfig::from_text(&text).map_err(CliError::Usage)?
        }
        None => RunConfig::default(),
    };
    if let Some(nu) = args.nu {
        config.nu = nu;
    }
    if let Some(g) = args.g {
        config.g = g;
    }
    if let Some(mode) = &args.mode {
        config.mode = match mode.as_str() {
            "rotating" => FrameMode::Rotating,
            "collinear" => FrameMode::Collinear,
            other => {
                return Err(CliError::Usage(format!(
                    "mode must be 'rotating' or 'collinear', got '{other}'"
                )))
            }
        };
    }
    if let Some(spec) = &args.mass_law {
        config.law = spec.parse().map_err(CliError::Usage)?;
    }
    if let Some(kappa) = args.kappa {
        if !(kappa > 1.0) {
            return Err(CliError::Usage(format!("kappa must exceed 1, got {kappa}")));
        }
        config.law = MassLawSpec::Kappa { kappa };
    }
    if let Some(t_end) = args.t_end {
        config.t_end = t_end;
    }
    if let Some(rtol) = args.rtol {
        config.rtol = rtol;
    }
    if let Some(atol) = args.atol {
        config.atol = atol;
    }
    if let Some(points) = &args.points {
        config.points = parse_points(points).map_err(CliError::Usage)?;
    }
    if let Some(seed) = &args.seed {
        config.seed = Some(parse_seed(seed).map_err(CliError::Usage)?);
    }
    if let Some(out) = &args.out {
        config.out = out.clone();
    }
    if args.svg {
        config.svg = true;
    }
    if let Some(r0) = args.r0 {
        config.r0 = r0;
    }
    if let Some(rdot0) = args.rdot0 {
        config.rdot0 = rdot0;
    }
    if let Some(threshold) = args.threshold {
        config.threshold = threshold;
    }
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    if let Some(grid) = &args.nu_grid {
        config.nu_grid = grid
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("invalid nu grid '{grid}'")))?;
    }
    if let Some(grid) = &args.kappa_grid {
        config.kappa_grid = grid
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Usage(format!("invalid kappa grid '{grid}'")))?;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = effective_config(cli.command.args())
        .and_then(|config| dispatch(cli.command.name(), &config));
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
