//! How many shots a P_MIS estimate needs, and what a gradient campaign
//! costs in measurements.
//!
//! cargo run --example measurement_budget

use rydberg_mis::metrology::{budget_report, chernoff_shots};

fn main() -> rydberg_mis::Result<()> {
    for eps in [0.05, 0.02, 0.01] {
        println!("ε = {eps:<5} η = 0.05  ->  {} shots", chernoff_shots(eps, 0.05)?);
    }
    let r = budget_report(0.02, 0.05, 10, 10_000, 597, 10_000)?;
    println!("one step with {} parameters: {} shots", r.parameters, r.per_step_cost);
    println!("{} steps at {} shots each: {} (~{:e})", r.steps, r.shots_per_step, r.saved, r.saved_class);
    Ok(())
}
