mod common;

use common::*;
use rand::Rng;
use rydberg_mis::engine::*;
use rydberg_mis::graph::*;
use rydberg_mis::operators::*;
use rydberg_mis::schedule::*;

fn standard_rates() -> FrameRates {
    FrameRates::for_duration(1.5, -11.0)
}

fn recorded(steps: usize, integrator: Integrator) -> EvolveConfig {
    EvolveConfig {
        steps,
        integrator,
        record_points: 50,
        ..Default::default()
    }
}

#[test]
fn pictures_agree_on_small_graphs() {
    let r = standard_rates();
    let mut rng = rng(23);
    for n in 2..5 {
        let g = random_connected(n, 0.6, &mut rng);
        let err = picture_mismatch(&g, 40.0, &r, &recorded(2000, Integrator::Magnus4));
        assert!(err < 1e-7, "n = {n}: {err}");
    }
}

#[test]
fn magnus_converges_at_fourth_order() {
    let g = five_vertex();
    let r = standard_rates();
    let s = pk_full(r.omega_theta, r.omega_phi).unwrap();
    let psi0 = StateVector::ground(5, Picture::Schroedinger).unwrap();
    let run = |steps| {
        evolve_schroedinger(
            &g.with_uniform_interaction(30.0).unwrap(),
            &s,
            &EvolveConfig {
                steps,
                integrator: Integrator::Magnus4,
                ..Default::default()
            },
            &psi0,
        )
        .unwrap()
        .state
    };
    let (a, b, c) = (run(200), run(400), run(800));
    let ratio = a.distance(&b) / b.distance(&c);
    assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
}

#[test]
fn single_spin_rabi_formula() {
    // constant Ω, Δ: P_1(t) = Ω²/(Ω² + Δ²) sin²(√(Ω² + Δ²) t / 2)
    let g = Graph::edgeless(1).unwrap();
    let (om, de, t) = (9.0, 4.0, 0.83);
    let path = KnotPath::new(t, vec![de, de], vec![om, om], KnotBoundary::Free).unwrap();
    let s = knots_to_schedule(path).unwrap();
    let psi0 = StateVector::ground(1, Picture::Schroedinger).unwrap();
    let ev = evolve_schroedinger(&g, &s, &EvolveConfig::with_steps(10), &psi0).unwrap();
    let w = (om * om + de * de).sqrt();
    let expect = om * om / (w * w) * (0.5 * w * t).sin().powi(2);
    assert!((ev.state.probabilities()[1] - expect).abs() < 1e-12);
}

#[test]
fn norm_and_energy_are_conserved() {
    let mut rng = rng(29);
    let g = generate_unit_disk(6, &UnitDiskParams::new(3, 3), 4).unwrap();
    let (om, ph, de) = (rng.gen_range(5.0..20.0), 0.0, rng.gen_range(-20.0..20.0));
    let path = KnotPath::new(0.7, vec![de, de], vec![om, om], KnotBoundary::Free).unwrap();
    let s = knots_to_schedule(path).unwrap();
    let h = build_h1_controls(om, ph, de, 6).unwrap().into_matrix() + build_h2(&g).unwrap().into_matrix();
    let energy = |psi: &StateVector| {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        v.dotc(&(&h * &v)).re
    };
    let psi0 = StateVector::ground(6, Picture::Schroedinger).unwrap();
    let ev = evolve_schroedinger(&g, &s, &recorded(500, Integrator::Midpoint), &psi0).unwrap();
    let e0 = energy(&psi0);
    for (_, psi) in &ev.trajectory {
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        assert!((energy(psi) - e0).abs() < 1e-8 * (1.0 + e0.abs()));
    }
    assert!(ev.diagnostics.norm_drift < 1e-12);
}

#[test]
fn runs_are_deterministic_and_self_converged() {
    let g = generate_unit_disk(7, &UnitDiskParams::new(4, 4), 9).unwrap();
    let r = standard_rates();
    let s = pk_simplified_with(r.omega_theta, r.omega_phi, false).unwrap();
    let a = run_schedule(&g, 0, &s, &EvolveConfig::default()).unwrap();
    let b = run_schedule(&g, 0, &s, &EvolveConfig::default()).unwrap();
    assert_eq!(a, b);
    let fine = run_schedule(&g, 0, &s, &EvolveConfig::with_steps(4000)).unwrap();
    assert!((a.p_mis - fine.p_mis).abs() < 1e-5);

    let auto = EvolveConfig {
        steps: 250,
        tolerance: Some(1e-4),
        max_refinements: 6,
        ..Default::default()
    };
    let c = run_schedule(&g, 0, &s, &auto).unwrap();
    assert!(c.diagnostics.self_convergence.unwrap() <= 1e-4);
    assert!((c.p_mis - fine.p_mis).abs() < 1e-3);
}

#[test]
fn edgeless_graphs_end_in_the_full_set() {
    let r = standard_rates();
    let cfg = EvolveConfig::default();
    let zero_phase = pk_simplified_with(r.omega_theta, r.omega_phi, false).unwrap();
    let single = run_schedule(&Graph::edgeless(1).unwrap(), 0, &zero_phase, &cfg).unwrap().p_mis;
    for n in 1..=3 {
        let g = Graph::edgeless(n).unwrap();
        for s in [pk_full(r.omega_theta, r.omega_phi).unwrap(), pk_simplified(r.omega_theta, r.omega_phi).unwrap()] {
            let res = run_schedule(&g, 0, &s, &cfg).unwrap();
            assert!((res.p_mis - 1.0).abs() < 1e-6, "n = {n} {:?}: {}", s.kind(), res.p_mis);
        }
        // without the phase the spins still move independently
        let res = run_schedule(&g, 0, &zero_phase, &cfg).unwrap();
        assert!((res.p_mis - single.powi(n as i32)).abs() < 1e-9);
    }
    assert!(single < 1.0 - 1e-4);
}

#[test]
fn blockade_limit_matches_reduced_dynamics() {
    let g = generate_unit_disk(7, &UnitDiskParams::new(4, 4), 21).unwrap();
    let r = standard_rates();
    let basis = enumerate_independent_sets(&g).unwrap();
    let mis = maximum_independent_sets(&g).unwrap();
    let cfg = EvolveConfig::default();
    let reduced = evolve_reduced(&basis, &r, FrameKind::Full, &cfg).unwrap();
    let red = observables_with(&reduced, &basis, &mis).unwrap();
    assert!((red.p_is - 1.0).abs() < 1e-12);
    let full = run_schedule(&g, 0, &pk_full(r.omega_theta, r.omega_phi).unwrap(), &cfg).unwrap();
    assert!((red.p_mis - full.p_mis).abs() < 0.02, "{} vs {}", red.p_mis, full.p_mis);
}

#[test]
fn sampled_shots_match_probabilities() {
    let g = eight_vertex();
    let r = standard_rates();
    let res = run_schedule(&g, 0, &pk_simplified(r.omega_theta, r.omega_phi).unwrap(), &EvolveConfig::default())
        .unwrap();
    let psi0 = StateVector::ground(8, Picture::Schroedinger).unwrap();
    let s = pk_simplified(r.omega_theta, r.omega_phi).unwrap();
    let state = evolve_schroedinger(&g, &s, &EvolveConfig::default(), &psi0).unwrap().state;
    let mis = maximum_independent_sets(&g).unwrap();
    let shots = 20_000u64;
    for (seed, p_e) in [(1u64, 0.0), (2, 0.02)] {
        let counts = sample_shots(&state, shots, p_e, &mut rng(seed)).unwrap();
        assert_eq!(counts.total(), shots);
        let p = rydberg_mis::metrology::pmis_by_transitions(&res.distribution, 8, &mis, p_e).unwrap();
        let sigma = (p * (1.0 - p) / shots as f64).sqrt().max(1e-4);
        assert!((counts.p_mis(&mis) - p).abs() < 3.0 * sigma, "p_e {p_e}: {} vs {p}", counts.p_mis(&mis));
    }
    assert!(sample_shots(&state, 0, 0.0, &mut rng(0)).is_err());
    assert!(sample_shots(&state, 10, 0.5, &mut rng(0)).is_err());
}
