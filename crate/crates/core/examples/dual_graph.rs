//! Independent sets of a small graph and the dual graph linking sets one
//! flip apart, printed as DOT.
//!
//! cargo run --example dual_graph

use rydberg_mis::graph::{dual_graph, maximum_independent_sets, Graph};

fn main() -> rydberg_mis::Result<()> {
    // x1..x5, bit 0 is x1
    let g = Graph::unweighted(5, &[(0, 1), (1, 2), (0, 3), (3, 4), (3, 1), (4, 1)])?;
    let dual = dual_graph(&g)?;
    let mis = maximum_independent_sets(&g)?;

    println!("{} independent sets, {} dual edges", dual.vertex_count(), dual.edge_count());
    for s in &mis.sets {
        println!("maximum set {} (size {})", s.to_string_n(5), mis.size);
    }
    print!("{}", dual.to_dot());
    Ok(())
}
