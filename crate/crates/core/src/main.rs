use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use crooked_tiling::commands::{self, Outcome, TileOptions, EXIT_INPUT, TOL_ENV};

/// Crooked fundamental domains for affine Schottky groups.
#[derive(Parser, Debug)]
#[command(name = "crooked", version)]
struct Cli {
    /// Numerical tolerance; overrides the CROOKED_TOL environment variable.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the pairing, disjointness and width of a configuration.
    Validate { config: PathBuf },
    /// Draw the tiling sliced by a horizontal plane as SVG.
    Tile {
        config: PathBuf,
        /// Height of the slicing plane.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        plane: f64,
        /// Largest word length of the drawn tiles.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// xmin xmax ymin ymax in slice coordinates.
        #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["XMIN", "XMAX", "YMIN", "YMAX"])]
        viewport: Option<Vec<f64>>,
        /// Image width in pixels.
        #[arg(long, default_value_t = 800.0)]
        width: f64,
        /// Output file; the SVG goes to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find the tile containing a point.
    Locate {
        config: PathBuf,
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"], required_unless_present = "random")]
        point: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Locate this many seeded random points instead and summarise.
        #[arg(long, conflicts_with = "point")]
        random: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run the property suite.
    Verify {
        config: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also write the separation rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Outcome {
    let env = std::env::var(TOL_ENV).ok();
    let tol = match commands::resolve_tol(cli.tol, env.as_deref()) {
        Ok(t) => t,
        Err(e) => {
            return Outcome {
                code: EXIT_INPUT,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    };
    match cli.command {
        Command::Validate { config } => commands::validate(&config, tol),
        Command::Tile { config, plane, depth, viewport, width, out } => {
            let mut opts = TileOptions { plane, depth, width, out, ..TileOptions::default() };
            if let Some(v) = viewport {
                opts.viewport = [v[0], v[1], v[2], v[3]];
            }
            commands::tile(&config, &opts, tol)
        }
        Command::Locate { config, point, max_steps, random, seed } => match (random, point) {
            (Some(n), _) => commands::locate_batch(&config, n, seed, max_steps, tol),
            (None, Some(p)) => commands::locate(&config, [p[0], p[1], p[2]], max_steps, tol),
            (None, None) => unreachable!("clap requires --point or --random"),
        },
        Command::Verify { config, samples, seed, csv } => commands::verify(&config, samples, seed, tol, csv.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let outcome = run(cli);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
