mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "wamcyl",
    version,
    about = "Meshes, extracted nodes and approximation experiments on the cylinder"
)]
struct Cli {
    /// Worker threads; 1 gives single-threaded runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a mesh and write it as CSV.
    Gen {
        #[arg(long, value_enum)]
        mesh: MeshArg,
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Extract AFP or DLP nodes from a WAM.
    Extract {
        #[command(flatten)]
        sel: Selection,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Extract nodes and write the interpolatory cubature rule on them.
    Rule {
        #[command(flatten)]
        sel: Selection,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Lebesgue constants, condition numbers and least-squares norms.
    Metrics {
        #[command(flatten)]
        sel: Selection,
        /// Defaults to both methods.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[command(flatten)]
        control: ControlArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Interpolation, least-squares and cubature errors for test functions.
    Errors {
        #[command(flatten)]
        sel: Selection,
        /// Defaults to both methods.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Repeat or comma-separate; defaults to f1..f6.
        #[arg(long, value_enum, value_delimiter = ',')]
        function: Vec<FunctionArg>,
        #[command(flatten)]
        control: ControlArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Recompute one of the reference tables.
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        table: u8,
        /// Include degrees above 20.
        #[arg(long)]
        slow: bool,
        #[arg(long, default_value_t = wamcyl::extract::DEFAULT_ORTHO_STEPS)]
        ortho_steps: usize,
        #[command(flatten)]
        control: ControlArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
struct Selection {
    #[arg(long, value_enum)]
    mesh: MeshArg,
    /// A degree, a range `a..b` (inclusive), or a comma list.
    #[arg(long, value_parser = parse_degrees)]
    degree: Degrees,
    #[arg(long, default_value_t = wamcyl::extract::DEFAULT_ORTHO_STEPS)]
    ortho_steps: usize,
}

#[derive(Debug, Args)]
struct ControlArgs {
    /// Control-mesh degree multiplier, replacing the default schedule.
    #[arg(long)]
    control_mult: Option<usize>,
}

#[derive(Debug, Args)]
struct OutArgs {
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeshArg {
    Wam1,
    Wam2,
    Disk,
    Padua,
    Cheb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Afp,
    Dlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FunctionArg {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    Const1,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Degrees(Vec<usize>);

fn parse_degrees(s: &str) -> Result<Degrees, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("'{t}' is not a degree"))
    };
    let list = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    Ok(Degrees(list))
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
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let numerical = e
                .downcast_ref::<wamcyl::Error>()
                .is_some_and(wamcyl::Error::is_numerical);
            ExitCode::from(if numerical { 2 } else { 1 })
        }
    }
}
