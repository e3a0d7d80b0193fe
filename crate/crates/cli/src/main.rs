use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use omega_cli::commands::{self, Source, SweepArgs};
use omega_cli::plot::PlotOptions;
use omega_cli::{exit, presets, CliError};

#[derive(Parser)]
#[command(name = "omega", version, about = "Run stochastic min-max game experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SourceArgs {
    /// TOML configuration file.
    #[arg(long, value_name = "PATH")]
    config: Vec<PathBuf>,
    /// Built-in configuration (see `omega presets`).
    #[arg(long, value_name = "NAME")]
    preset: Vec<String>,
    /// Override a key after parsing, e.g. `run.steps=1000`. Repeatable; the last one wins.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed for both the game and the run.
    #[arg(long)]
    seed: Option<u64>,
}

impl SourceArgs {
    fn source(self) -> Source {
        Source {
            configs: self.config,
            presets: self.preset,
            overrides: self.overrides,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its trajectory CSV.
    Run {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Sweep one parameter; each --config/--preset becomes a column.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        /// beta, eta, kind (each with optional x./y. prefix), batch_size, kappa_a, kappa_b, kappa_c.
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
        /// Step at which distances are reported; defaults to the configured steps.
        #[arg(long)]
        at_step: Option<usize>,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Solve for the Nash equilibrium of the averaged game.
    Nash {
        #[command(flatten)]
        source: SourceArgs,
        /// Explicit samples as JSON instead of a generated game.
        #[arg(long, value_name = "PATH")]
        game_json: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Tabulate trajectory CSVs at one step.
    Table {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        at_step: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Draw trajectory CSVs as an SVG line chart.
    Plot {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        log_y: bool,
        /// Trailing moving-average window over logged records.
        #[arg(long, default_value_t = 1)]
        smooth: usize,
        #[arg(long)]
        title: Option<String>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// List the built-in presets.
    Presets,
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let stdout = &mut std::io::stdout().lock();
    let stderr = &mut std::io::stderr();
    match command {
        Command::Run { source, out } => commands::run(&source.source(), out.as_deref(), stdout, stderr),
        Command::Sweep {
            source,
            axis,
            values,
            at_step,
            jobs,
            out,
        } => commands::sweep(
            &source.source(),
            &SweepArgs {
                axis: &axis,
                values: &values,
                at_step,
                jobs,
            },
            out.as_deref(),
            stdout,
        ),
        Command::Nash { source, game_json, out } => {
            commands::nash(&source.source(), game_json.as_deref(), out.as_deref(), stdout)
        }
        Command::Table { files, at_step, out } => commands::table(&files, at_step, out.as_deref(), stdout),
        Command::Plot {
            files,
            log_y,
            smooth,
            title,
            out,
        } => commands::plot(
            &files,
            &PlotOptions { log_y, title, smooth },
            out.as_deref(),
            stdout,
            stderr,
        ),
        Command::Presets => {
            for name in presets::names() {
                let _ = writeln!(stdout, "{name}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
