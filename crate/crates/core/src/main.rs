use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rydberg_mis::config::ExperimentConfig;
use rydberg_mis::experiment;
use rydberg_mis::graph::Graph;
use rydberg_mis::{Error, Result};

#[derive(Parser)]
#[command(name = "rydberg-mis", version, about = "Adiabatic MIS experiments on Rydberg blockade graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Config file (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set graphs=50`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate schedules on a random unit-disk ensemble.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: u64,
    },
    /// Optimize knot paths on a random unit-disk ensemble.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: u64,
    },
    /// Dual graph of a graph file, written as DOT.
    Dual {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gap of the projected drive over the schedule.
    Gap {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Graph file; defaults to a generated ensemble member.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Shot bound and measurement budget.
    Budget {
        #[arg(long, default_value_t = 0.02)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        eta: f64,
        #[arg(long, default_value_t = 10)]
        params: usize,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 597)]
        steps: u64,
        #[arg(long, default_value_t = 10_000)]
        shots_per_step: u64,
        #[arg(long)]
        json: bool,
    },
}

fn load(common: &Common, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::parse(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    for o in &common.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(s) = seed {
        cfg.seed = Some(s);
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, seed } => {
            let cfg = load(&common, Some(seed))?;
            let run = experiment::cmd_run(&cfg)?;
            for &c in &run.schedules {
                let s = experiment::Stats::of(&run.p_mis(c).unwrap_or_default());
                println!("{:<20} P_MIS {:.4} ± {:.4}", c.label(), s.mean, s.std);
            }
        }
        Command::Optimize { common, seed } => {
            let cfg = load(&common, Some(seed))?;
            let (_, summaries) = experiment::cmd_optimize(&cfg)?;
            for s in summaries {
                println!(
                    "{:<5} success {:.3} mean S {:.1} capped {:.3}",
                    s.optimizer.label(),
                    s.success_rate,
                    s.mean_steps,
                    s.cap_fraction
                );
            }
        }
        Command::Dual { graph, out } => {
            let (dot, stats) = experiment::cmd_dual(&std::fs::read_to_string(graph)?)?;
            match out {
                Some(path) => std::fs::write(path, dot)?,
                None => print!("{dot}"),
            }
            eprintln!("{}", stats.line());
        }
        Command::Gap { common, seed, graph } => {
            let cfg = load(&common, seed)?;
            let g = graph
                .map(|p| -> Result<Graph> { Graph::from_text(&std::fs::read_to_string(p)?) })
                .transpose()?;
            let (_, s) = experiment::cmd_gap(&cfg, g)?;
            println!("{}", serde_json::to_string_pretty(&s)?);
        }
        Command::Budget {
            epsilon,
            eta,
            params,
            shots,
            steps,
            shots_per_step,
            json,
        } => {
            let (text, report) = experiment::cmd_budget(epsilon, eta, params, shots, steps, shots_per_step)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(code(&e))
        }
    }
}

fn code(e: &Error) -> u8 {
    e.exit_code() as u8
}
