//! Readout errors on a simulated PK run: the exact and first-order
//! depletion of P_MIS, checked against sampled shots.
//!
//! cargo run --release --example readout_error

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rydberg_mis::engine::*;
use rydberg_mis::graph::{generate_unit_disk, maximum_independent_sets, UnitDiskParams};
use rydberg_mis::metrology::*;
use rydberg_mis::operators::FrameRates;
use rydberg_mis::schedule::pk_simplified;

fn main() -> rydberg_mis::Result<()> {
    let rates = FrameRates::for_duration(1.5, -11.0);
    let g = generate_unit_disk(7, &UnitDiskParams::new(4, 4), 5)?;
    let s = pk_simplified(rates.omega_theta, rates.omega_phi)?;
    let psi = evolve_schroedinger(&g, &s, &EvolveConfig::default(), &StateVector::ground(7, Picture::Schroedinger)?)?.state;
    let obs = observables(&psi, &g)?;
    let mis = maximum_independent_sets(&g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    println!("{:>6} {:>8} {:>8} {:>8}", "p_e", "exact", "first", "shots");
    for p in [0.0, 0.005, 0.01, 0.02, 0.05] {
        let e = distribution_to_error_input(&obs.distribution, &g, p)?;
        let counts = sample_shots(&psi, 20_000, p, &mut rng)?;
        println!(
            "{p:>6} {:>8.4} {:>8.4} {:>8.4}",
            pmis_with_error(&e),
            pmis_first_order(&e),
            counts.p_mis(&mis)
        );
    }
    Ok(())
}
