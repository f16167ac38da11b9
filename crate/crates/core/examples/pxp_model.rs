//! A blockaded chain: the transverse drive projected onto the independent
//! sets of a path graph. Prints the spectrum and the revival of the Néel
//! state under it.
//!
//! cargo run --release --example pxp_model -- [length]

use num_complex::Complex64;
use rydberg_mis::graph::{enumerate_independent_sets, Bitstring, Graph};
use rydberg_mis::operators::pxp_hamiltonian;

fn main() -> rydberg_mis::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let basis = enumerate_independent_sets(&Graph::path(n)?)?;
    let h = pxp_hamiltonian(2.0, &basis);
    let e = h.eigenvalues();
    println!("chain of {n}: {} constrained states (a Fibonacci number)", basis.len());
    println!("lowest {:.4}, highest {:.4}", e[0], e[e.len() - 1]);

    // |1010...> under exp(-iHt)
    let neel = Bitstring::from_vertices(&(0..n).step_by(2).collect::<Vec<_>>());
    let start = basis.index_of(neel).unwrap();
    let eig = h.matrix.clone().symmetric_eigen();
    let overlaps: Vec<Complex64> = (0..basis.len()).map(|k| eig.eigenvectors[(start, k)].conj()).collect();
    for step in 0..=10 {
        let t = 0.5 * step as f64;
        let amp: Complex64 = (0..basis.len())
            .map(|k| overlaps[k].norm_sqr() * Complex64::from_polar(1.0, -eig.eigenvalues[k] * t))
            .sum();
        println!("t = {t:4.1}  return probability {:.4}", amp.norm_sqr());
    }
    Ok(())
}
