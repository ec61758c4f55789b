use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ssb_lab::config::ExperimentConfig;
use ssb_lab::presets::{preset, PRESETS};
use ssb_lab::run::{exit_status, EXIT_CONFIG};
use ssb_lab::{load_config, run, seed_from_env, RunOptions};

#[derive(Parser)]
#[command(
    name = "ssb-lab",
    version,
    about = "Run spontaneous symmetry breaking experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a named preset.
    Run {
        /// Path to a JSON config.
        #[arg(required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Name of a built-in preset (see `ssb-lab presets`).
        #[arg(long)]
        preset: Option<String>,
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: logical cores).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        /// Skip SVG plots.
        #[arg(long)]
        no_svg: bool,
    },
    /// Check a config file without running it.
    Validate { config: PathBuf },
    /// List the built-in presets.
    Presets,
}

fn resolve(config: Option<PathBuf>, name: Option<String>) -> Result<ExperimentConfig, String> {
    match (config, name) {
        (Some(path), _) => load_config(&path).map_err(|e| e.to_string()),
        (None, Some(name)) => preset(&name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            format!("unknown preset `{name}`; available: {}", names.join(", "))
        }),
        (None, None) => Err("a config path or --preset is required".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for (name, description) in PRESETS {
                println!("{name:<12} {description}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load_config(&config) {
            Ok(c) => {
                println!("{}: valid {} config", config.display(), c.kind().name());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Run {
            config,
            preset,
            out,
            jobs,
            no_svg,
        } => {
            let config = match resolve(config, preset) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let seed = match seed_from_env() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let opts = RunOptions {
                out,
                jobs: jobs.map(|j| j as usize),
                no_svg,
                seed,
            };
            let result = run(&config, &opts);
            match &result {
                Ok(outcome) => {
                    for t in &outcome.manifest.tasks {
                        match &t.error {
                            None => {
                                eprintln!("  {:<28} ok      {:>9.3} s", t.label, t.wall_seconds)
                            }
                            Some(e) => eprintln!("  {:<28} FAILED  {e}", t.label),
                        }
                    }
                    println!(
                        "wrote {} files to {}",
                        outcome.manifest.outputs.len() + 1,
                        outcome.out_dir.display()
                    );
                    if outcome.failed() {
                        eprintln!("error: some tasks failed; partial outputs written");
                    }
                }
                Err(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(exit_status(&result))
        }
    }
}
