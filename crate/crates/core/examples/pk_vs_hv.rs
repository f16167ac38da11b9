//! PK schedules against the piecewise-linear unoptimized path on a handful
//! of random seven-atom unit-disk graphs.
//!
//! cargo run --release --example pk_vs_hv -- [graphs]

use rydberg_mis::config::{ExperimentConfig, ScheduleChoice};
use rydberg_mis::experiment::{run_ensemble, Stats};

fn main() -> rydberg_mis::Result<()> {
    let graphs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let cfg = ExperimentConfig {
        graphs,
        schedules: ScheduleChoice::ALL.to_vec(),
        ..Default::default()
    };
    let run = run_ensemble(&cfg, 1)?;

    println!("{graphs} graphs, {} vertices on a {}x{} grid", cfg.vertices, cfg.width, cfg.height);
    for &c in &cfg.schedules {
        let mis = Stats::of(&run.p_mis(c).unwrap());
        let is = Stats::of(&run.p_is(c).unwrap());
        println!(
            "{:<22} P_MIS {:.3} ± {:.3}   P_IS {:.3} ± {:.3}",
            c.label(),
            mis.mean,
            mis.std,
            is.mean,
            is.std
        );
    }
    Ok(())
}
