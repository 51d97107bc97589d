use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cyclab::runner::{self, ExperimentConfig, FlagArgs, RunError};

/// Batch runner for the cyclicity experiments.
#[derive(Parser)]
#[command(name = "lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config, or from flags.
    Run(RunArgs),
    /// List the named sets, functions and schedules.
    Presets {
        /// Print the catalogue as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Config file; omit to build the config from flags.
    config: Option<PathBuf>,
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Schedule such as 1e-1:1e-6:x10.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    delta_prime: Option<f64>,
    /// Output directory; overrides the config's output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_threads() -> Result<(), RunError> {
    if let Ok(v) = std::env::var("LAB_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| RunError::Config(format!("LAB_THREADS={v:?} is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RunError::Io(e.to_string()))?;
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<(), RunError> {
    init_threads()?;
    let config = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => runner::config_from_flags(&FlagArgs {
            experiment: args.experiment,
            preset: args.preset,
            depth: args.depth,
            gamma: args.gamma,
            p: args.p,
            beta: args.beta,
            eps: args.eps,
            grid: args.grid,
            delta_prime: args.delta_prime,
        })?,
    };
    let manifest = runner::run(&config, args.out.as_deref())?;
    println!("{}", serde_json::to_string_pretty(&manifest).expect("manifest serializes"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets { json } => {
            let presets = runner::list_presets();
            if json {
                println!("{}", serde_json::to_string_pretty(&presets).expect("catalogue serializes"));
            } else {
                for p in presets {
                    println!("{:<18} {:<9} {}", p.name, p.kind, p.description);
                    println!("{:<18} {:<9} parameters: {}", "", "", p.parameters);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => match run(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("lab: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
