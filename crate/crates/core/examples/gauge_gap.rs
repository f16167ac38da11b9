//! Single-spin gap of the frame Hamiltonian and the gap of the gauge matrix
//! along the path followed from the empty set.
//!
//! cargo run --release --example gauge_gap

use rydberg_mis::graph::{enumerate_independent_sets, generate_unit_disk, UnitDiskParams};
use rydberg_mis::operators::{min_gap_delta, FrameKind, FrameRates};

fn main() -> rydberg_mis::Result<()> {
    let rates = FrameRates::for_duration(1.5, -11.0);
    let g = generate_unit_disk(7, &UnitDiskParams::new(4, 4), 3)?;
    let basis = enumerate_independent_sets(&g)?;
    let grid: Vec<f64> = (0..=300).map(|k| rates.total_time() * k as f64 / 300.0).collect();
    let report = min_gap_delta(&rates, FrameKind::Full, &basis, &grid)?;

    println!("{} independent sets", basis.len());
    for &(t, gap) in report.samples.iter().step_by(30) {
        println!("t = {t:.3}  ΔE = {:7.3}  followed gap = {gap:7.3}", rates.h1_gap(t));
    }
    println!("δ = {:.4} (gap {:.3} rad/μs at t = {:.3})", report.delta, report.min_gap, report.at_time);
    Ok(())
}
