mod commands;
mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vortex3_core::VortexError;

#[derive(Parser, Debug)]
#[command(name = "vortex3", version, about = "Three point vortices: simulation, reduction, equilibria and phase portraits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the full N-vortex equations of motion.
    Simulate(SimulateArgs),
    /// Reduce a configuration to (X, Y, Z; Θ), optionally integrating the reduced flow.
    Reduce(ReduceArgs),
    /// List relative equilibria with their linear stability.
    Equilibria(EquilibriaArgs),
    /// Bifurcation scan along the symmetric line or a region grid over the parameter plane.
    Scan(ScanArgs),
    /// Sample a phase portrait with separatrices.
    Portrait(PortraitArgs),
    /// Self-similar collapse on the cone Θ = 0.
    Collapse(CollapseArgs),
    /// Reduction for vanishing total circulation.
    Zerocirc(ZerocircArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON parameter file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated circulations, decimals or p/q.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Integration tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// Positions as x1,y1;x2,y2;...
    #[arg(long, allow_hyphen_values = true)]
    positions: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Number of evenly spaced output samples; every accepted step when absent.
    #[arg(long)]
    samples: Option<usize>,
    /// Minimum pair distance before stopping.
    #[arg(long)]
    collision_floor: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    positions: Option<String>,
    /// Integrate the reduced flow up to this time.
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct EquilibriaArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    /// Γ = ((1−Γ₃)/2, (1−Γ₃)/2, Γ₃) for Γ₃ in the range.
    Symmetric,
    /// Region report on a square grid of the trilinear diagram.
    Region,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, value_enum, default_value = "symmetric")]
    axis: Axis,
    /// Comma-separated Θ values (only the first is used for a region grid).
    #[arg(long, allow_hyphen_values = true, default_value = "-1,1")]
    theta: String,
    /// start:stop:step; for a region grid it applies to both plane coordinates.
    #[arg(long, allow_hyphen_values = true, default_value = "-2.5:1.5:0.01")]
    range: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ProjectionArg {
    Sphere,
    Plane,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum PortraitFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Args, Debug)]
struct PortraitArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long, value_enum)]
    projection: Option<ProjectionArg>,
    /// Number of periodic orbits to seed.
    #[arg(long)]
    orbits: Option<usize>,
    #[arg(long)]
    no_separatrices: bool,
    /// Half-width of the plotted window for planar projections.
    #[arg(long)]
    zoom: Option<f64>,
    /// Separatrix launch offset relative to the surface scale.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Escape radius relative to the surface scale.
    #[arg(long)]
    escape: Option<f64>,
    /// Outputs to write; comma-separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    format: Vec<PortraitFormat>,
    /// Directory for curve CSVs, index.json and portrait.svg.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CollapseArgs {
    #[command(flatten)]
    common: Common,
    /// Initial polar angle of (X, Y).
    #[arg(long, allow_hyphen_values = true, default_value = "0.7853981633974483")]
    angle: String,
    /// Initial radius √(X²+Y²).
    #[arg(long, default_value = "1")]
    radius: String,
}

#[derive(Args, Debug)]
struct ZerocircArgs {
    #[command(flatten)]
    common: Common,
    /// Three-vortex configuration to reduce, x1,y1;x2,y2;x3,y3.
    #[arg(long, allow_hyphen_values = true)]
    positions: Option<String>,
    /// Reduced initial point X,Y.
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// A failure of the numerics rather than of the request.
#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<NumericalFailure>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<VortexError>() {
            return if e.is_numerical() { 2 } else { 1 };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Reduce(a) => commands::reduce(a),
        Command::Equilibria(a) => commands::equilibria(a),
        Command::Scan(a) => commands::scan(a),
        Command::Portrait(a) => commands::portrait(a),
        Command::Collapse(a) => commands::collapse(a),
        Command::Zerocirc(a) => commands::zerocirc(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
