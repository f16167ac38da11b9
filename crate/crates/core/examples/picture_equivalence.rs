//! The same PK evolution computed in the laboratory picture and in the
//! rotating frame, compared at every recorded time.
//!
//! cargo run --release --example picture_equivalence

use rydberg_mis::engine::*;
use rydberg_mis::graph::Graph;
use rydberg_mis::operators::{FrameKind, FrameRates};
use rydberg_mis::schedule::pk_full;

fn main() -> rydberg_mis::Result<()> {
    let rates = FrameRates::for_duration(1.5, -11.0);
    let g = Graph::unweighted(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])?;
    let v0 = 2.0 * std::f64::consts::PI * 13.0;
    let cfg = EvolveConfig {
        steps: 4000,
        integrator: Integrator::Magnus4,
        record_points: 10,
        ..Default::default()
    };

    let lab_graph = g.with_uniform_interaction(v0)?;
    let psi_s = StateVector::ground(4, Picture::Schroedinger)?;
    let psi_i = frame_map(&psi_s, 0.0, &rates, FrameKind::Full, FrameDirection::ToInteraction)?;
    let lab = evolve_schroedinger(&lab_graph, &pk_full(rates.omega_theta, rates.omega_phi)?, &cfg, &psi_s)?;
    let rot = evolve_interaction(&g, &rates, FrameKind::Full, Interaction::Uniform(v0), &cfg, &psi_i)?;

    println!("{:>8} {:>12}", "t", "mismatch");
    for ((t, a), (_, b)) in lab.trajectory.iter().zip(&rot.trajectory) {
        let mapped = frame_map(a, *t, &rates, FrameKind::Full, FrameDirection::ToInteraction)?;
        println!("{t:>8.3} {:>12.3e}", mapped.distance(b));
    }
    Ok(())
}
