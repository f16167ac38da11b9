mod common;

use common::*;
use rydberg_mis::graph::*;

#[test]
fn five_vertex_graph_sets_and_dual() {
    let g = five_vertex();
    let basis = enumerate_independent_sets(&g).unwrap();
    assert_eq!(basis.len(), 11);
    let mis = maximum_independent_sets(&g).unwrap();
    assert_eq!(mis.size, 3);
    assert_eq!(mis.sets, vec![Bitstring::parse("10101").unwrap()]);

    // the drawn dual: empty set, five singletons, four pairs, one triple
    let label = |s: &str| basis.index_of(Bitstring::parse(s).unwrap()).unwrap();
    let drawn = [
        ("00000", "10000"),
        ("00000", "01000"),
        ("00000", "00100"),
        ("00000", "00010"),
        ("00000", "00001"),
        ("10000", "10100"),
        ("10000", "10001"),
        ("00100", "10100"),
        ("00100", "00110"),
        ("00100", "00101"),
        ("00010", "00110"),
        ("00001", "10001"),
        ("00001", "00101"),
        ("10101", "10100"),
        ("10101", "10001"),
        ("10101", "00101"),
    ];
    let mut expected: Vec<(usize, usize)> = drawn
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (label(a), label(b));
            (x.min(y), x.max(y))
        })
        .collect();
    expected.sort();
    let dual = dual_graph(&g).unwrap();
    assert_eq!(dual.vertex_count(), 11);
    assert_eq!(dual.edges, expected);
}

#[test]
fn eight_vertex_graph() {
    let g = eight_vertex();
    assert_eq!(g.edge_count(), 12);
    assert!(is_independent(&g, bits(&[2, 4, 6])));
    assert!(!is_independent(&g, bits(&[1, 2])));
    assert!(is_independent(&g, Bitstring::EMPTY));

    let brute: Vec<u32> = (0..256u32).filter(|&s| naive_independent(&g, s)).collect();
    let basis = enumerate_independent_sets(&g).unwrap();
    assert_eq!(basis.states().iter().map(|s| s.0).collect::<Vec<_>>(), brute);

    let best = brute.iter().map(|s| s.count_ones()).max().unwrap();
    let brute_mis: Vec<u32> = brute.iter().copied().filter(|s| s.count_ones() == best).collect();
    let mis = maximum_independent_sets(&g).unwrap();
    assert_eq!(mis.size, 3);
    assert_eq!(mis.sets.iter().map(|s| s.0).collect::<Vec<_>>(), brute_mis);
    assert!(mis.contains(bits(&[2, 4, 6])));
}

#[test]
fn hamming_examples() {
    let p = |s| Bitstring::parse(s).unwrap();
    assert_eq!(hamming_distance(p("00000"), p("01000")), 1);
    assert_eq!(hamming_distance(p("00000"), p("10101")), 3);
    assert_eq!(hamming_distance(p("10101"), p("10101")), 0);
}

#[test]
fn trivial_graphs() {
    assert_eq!(enumerate_independent_sets(&Graph::edgeless(3).unwrap()).unwrap().len(), 8);
    let one = dual_graph(&Graph::edgeless(1).unwrap()).unwrap();
    assert_eq!((one.vertex_count(), one.edges.clone()), (2, vec![(0, 1)]));
    assert!(matches!(
        enumerate_independent_sets(&Graph::edgeless(25).unwrap()),
        Err(rydberg_mis::Error::Capacity { .. })
    ));
}

#[test]
fn random_graphs_match_brute_force() {
    let mut r = rng(17);
    for trial in 0..60 {
        let n = 1 + trial % 12;
        let g = random_graph(n, 0.35, &mut r);
        let brute: Vec<u32> = (0..1u32 << n).filter(|&s| naive_independent(&g, s)).collect();
        let basis = enumerate_independent_sets(&g).unwrap();
        assert_eq!(basis.states().iter().map(|s| s.0).collect::<Vec<_>>(), brute);

        // downward closed
        for s in basis.states() {
            for v in s.vertices() {
                assert!(basis.contains(s.flip(v)));
            }
        }
        let best = brute.iter().map(|s| s.count_ones()).max().unwrap();
        let mis = maximum_independent_sets(&g).unwrap();
        assert_eq!(mis.size, best);
        let expected: Vec<u32> = brute.iter().copied().filter(|s| s.count_ones() == best).collect();
        assert_eq!(mis.sets.iter().map(|s| s.0).collect::<Vec<_>>(), expected);
        assert!(basis.states().iter().all(|s| s.count() <= mis.size));

        let dual = dual_graph(&g).unwrap();
        assert_eq!(dual.degree(0), n, "empty set touches every singleton");
        let states = basis.states();
        for a in 0..states.len() {
            for b in a + 1..states.len() {
                assert_eq!(dual.has_edge(a, b), hamming_distance(states[a], states[b]) == 1);
            }
        }
    }
}

#[test]
fn unit_disk_edges_rederived_from_positions() {
    let params = UnitDiskParams::new(4, 4);
    for seed in 0..40 {
        let g = generate_unit_disk(7, &params, seed).unwrap();
        assert!(g.is_connected());
        let pos = g.positions().unwrap();
        for a in 0..7 {
            for b in a + 1..7 {
                let d2 = (pos[a][0] - pos[b][0]).powi(2) + (pos[a][1] - pos[b][1]).powi(2);
                let expected = if (d2 - 1.0).abs() < 1e-9 {
                    Some(params.v_nn)
                } else if (d2 - 2.0).abs() < 1e-9 {
                    Some(params.v_nnn)
                } else {
                    None
                };
                assert_eq!(g.interaction(a, b), expected);
            }
        }
    }
    let g = generate_unit_disk(7, &params, 42).unwrap();
    assert_eq!(g, generate_unit_disk(7, &params, 42).unwrap());
    let pair = generate_unit_disk(2, &UnitDiskParams::new(2, 1), 3).unwrap();
    assert_eq!(pair.edges().collect::<Vec<_>>(), vec![(0, 1, params.v_nn)]);
    assert_eq!(generate_unit_disk(1, &params, 0).unwrap().edge_count(), 0);
    assert!(generate_unit_disk(17, &params, 0).is_err());
}

#[test]
fn text_and_dot_round_trip() {
    let g = generate_unit_disk(6, &UnitDiskParams::new(3, 3), 5).unwrap();
    assert_eq!(Graph::from_text(&g.to_text()).unwrap(), g);
    let dot = dual_graph(&five_vertex()).unwrap().to_dot();
    assert!(dot.contains("\"10101\""));
    assert_eq!(dot.matches("--").count(), 16);
}
