//! Finite-difference gradient ascent on the knots of a piecewise-linear
//! path for one graph, using the PK result as the target.
//!
//! cargo run --release --example optimize_path -- [sgd|adam] [steps]

use rydberg_mis::config::ExperimentConfig;
use rydberg_mis::engine::{run_schedule, EvolveConfig};
use rydberg_mis::experiment::{generate_ensemble, initial_knots};
use rydberg_mis::optimizer::{optimize_path, OptimizerKind};

fn main() -> rydberg_mis::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind = OptimizerKind::parse(&args.next().unwrap_or_else(|| "sgd".into()))?;
    let steps = args.next().and_then(|s| s.parse().ok()).unwrap_or(30);

    let cfg = ExperimentConfig {
        graphs: 1,
        ..Default::default()
    };
    let g = &generate_ensemble(&cfg, 11)?[0];
    let evolve = EvolveConfig::with_steps(500);
    let reference = run_schedule(g, 0, &cfg.schedule(cfg.reference)?, &evolve)?.p_mis;
    let init = initial_knots(&cfg)?;
    let mut oc = cfg.opt_config(kind, 1);
    oc.max_steps = steps;
    oc.evolve = evolve;

    let trace = optimize_path(g, &init, &oc, reference)?;
    println!("{} from {:.3}, target {:.3}", kind.label(), trace.initial_objective, trace.target);
    for r in &trace.records {
        println!("step {:3}  P_MIS {:.4}  best {:.4}  |grad| {:.2e}", r.step, r.objective, r.best_so_far, r.gradient_norm);
    }
    println!("reached: {} after {} steps", trace.reached, trace.steps);
    Ok(())
}
