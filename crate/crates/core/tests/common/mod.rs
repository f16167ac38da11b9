#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rydberg_mis::graph::{Bitstring, Graph};

/// Five vertices `x1..x5` (bit 0 = `x1`) with a single maximum set `{x1,x3,x5}`.
pub fn five_vertex() -> Graph {
    Graph::unweighted(5, &[(0, 1), (1, 2), (0, 3), (3, 4), (3, 1), (4, 1)]).unwrap()
}

/// Eight vertices, twelve edges; `{2,4,6}` (1-based) is a maximum set.
pub fn eight_vertex() -> Graph {
    let one_based = [(1, 2), (2, 3), (1, 4), (2, 5), (3, 6), (4, 5), (6, 5), (4, 7), (5, 7), (8, 5), (8, 6), (7, 8)];
    let edges: Vec<(usize, usize)> = one_based.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    Graph::unweighted(8, &edges).unwrap()
}

pub fn bits(one_based: &[usize]) -> Bitstring {
    Bitstring::from_vertices(&one_based.iter().map(|v| v - 1).collect::<Vec<_>>())
}

/// Erdős–Rényi graph with unit strengths.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::unweighted(n, &edges).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independence by scanning the edge list.
pub fn naive_independent(g: &Graph, s: u32) -> bool {
    g.edges().all(|(a, b, _)| s & (1 << a) == 0 || s & (1 << b) == 0)
}

/// Eigenvalues of a Hermitian matrix through its real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, which doubles every eigenvalue.
pub fn oracle_eigenvalues(m: &nalgebra::DMatrix<num_complex::Complex64>) -> Vec<f64> {
    let d = m.nrows();
    let real = nalgebra::DMatrix::from_fn(2 * d, 2 * d, |r, c| {
        let z = m[(r % d, c % d)];
        match (r < d, c < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut v: Vec<f64> = nalgebra::SymmetricEigen::new(real).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().step_by(2).collect()
}

pub fn max_abs_diff(a: &nalgebra::DMatrix<num_complex::Complex64>, b: &nalgebra::DMatrix<num_complex::Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest `||Φ_I(t) - U(t) Φ_S(t)||` over recorded times when both pictures
/// evolve the same PK problem with every edge at strength `v0`.
pub fn picture_mismatch(
    g: &Graph,
    v0: f64,
    rates: &rydberg_mis::operators::FrameRates,
    cfg: &rydberg_mis::engine::EvolveConfig,
) -> f64 {
    use rydberg_mis::engine::*;
    use rydberg_mis::operators::FrameKind;
    let lab_graph = g.with_uniform_interaction(v0).unwrap();
    let s = rydberg_mis::schedule::pk_full(rates.omega_theta, rates.omega_phi).unwrap();
    let psi_s = StateVector::ground(g.n(), Picture::Schroedinger).unwrap();
    let psi_i = frame_map(&psi_s, 0.0, rates, FrameKind::Full, FrameDirection::ToInteraction).unwrap();
    let lab = evolve_schroedinger(&lab_graph, &s, cfg, &psi_s).unwrap();
    let rot = evolve_interaction(g, rates, FrameKind::Full, Interaction::Uniform(v0), cfg, &psi_i).unwrap();
    assert_eq!(lab.trajectory.len(), rot.trajectory.len());
    lab.trajectory
        .iter()
        .zip(&rot.trajectory)
        .map(|((t, a), (_, b))| {
            frame_map(a, *t, rates, FrameKind::Full, FrameDirection::ToInteraction)
                .unwrap()
                .distance(b)
        })
        .fold(0.0, f64::max)
}

/// Random connected graph on `n` vertices.
pub fn random_connected(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    loop {
        let g = random_graph(n, p, rng);
        if g.is_connected() {
            return g;
        }
    }
}

/// Post-readout MIS probability by pushing the distribution through the
/// full `2^n x 2^n` flip channel and summing the mass on maximum sets.
pub fn channel_oracle(dist: &[f64], n: usize, mis: &rydberg_mis::graph::MaximumSets, p: f64) -> f64 {
    let dim = 1usize << n;
    let mut out = vec![0.0; dim];
    for (s, &ps) in dist.iter().enumerate() {
        for (r, o) in out.iter_mut().enumerate() {
            let d = (s ^ r).count_ones() as i32;
            *o += ps * p.powi(d) * (1.0 - p).powi(n as i32 - d);
        }
    }
    mis.sets.iter().map(|m| out[m.0 as usize]).sum()
}

pub fn random_distribution(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut d: Vec<f64> = (0..1usize << n).map(|_| rng.gen::<f64>().powi(3)).collect();
    let total: f64 = d.iter().sum();
    d.iter_mut().for_each(|x| *x /= total);
    d
}
