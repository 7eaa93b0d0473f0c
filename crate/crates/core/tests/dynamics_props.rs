//! Cross-checks between the three dynamics views: single-orbit walks,
//! whole functional graphs, and extension-field periodic points.

use std::collections::HashMap;

use proptest::prelude::*;
use trapmaps::dynamics::{
    build_graph, iterate_k, orbit, periodic_points_ext, point_index, point_of_index,
};
use trapmaps::modfield::ExtField;
use trapmaps::poly::{BuiltinMap, Point, PolyMap, Polynomial};

/// Walks successors naively, returning (tail, cycle) for one start index.
fn brute_orbit(successor: &[u32], start: u32) -> (u64, u64) {
    let mut seen: HashMap<u32, u64> = HashMap::new();
    let mut cur = start;
    let mut step = 0u64;
    loop {
        if let Some(&first) = seen.get(&cur) {
            return (first, step - first);
        }
        seen.insert(cur, step);
        cur = successor[cur as usize];
        step += 1;
    }
}

fn graph_invariants(map: &PolyMap, p: u64) {
    let g = build_graph(map, p).unwrap();
    let succ = g.successor();
    let size = g.size() as usize;
    assert_eq!(succ.len(), size);

    let mut on_cycle = vec![false; size];
    for cycle in g.cycles() {
        // a cycle is listed from its smallest index and closes up
        assert!(!cycle.is_empty());
        assert_eq!(cycle[0], *cycle.iter().min().unwrap());
        for (i, &node) in cycle.iter().enumerate() {
            assert_eq!(succ[node as usize], cycle[(i + 1) % cycle.len()]);
            on_cycle[node as usize] = true;
        }
    }
    // cycles are reported in ascending order of their smallest node
    for w in g.cycles().windows(2) {
        assert!(w[0][0] < w[1][0]);
    }

    for i in 0..size {
        let depth = g.tail_depth()[i];
        let next = succ[i] as usize;
        if on_cycle[i] {
            assert_eq!(depth, 0, "cycle node {i} must have depth 0");
            assert!(on_cycle[next]);
        } else {
            assert_eq!(
                g.tail_depth()[next],
                depth - 1,
                "depth must fall by one along the tail at {i}"
            );
        }
        assert_eq!(
            g.basin_id()[i],
            g.basin_id()[next],
            "basins are closed under the map"
        );
        // brute-force agreement
        let (tail, cycle_len) = brute_orbit(succ, i as u32);
        assert_eq!(tail, depth as u64, "tail of node {i}");
        assert_eq!(
            cycle_len,
            g.cycles()[g.basin_id()[i] as usize].len() as u64,
            "cycle through node {i}"
        );
    }

    let summary = g.summary();
    assert_eq!(summary.basin_sizes.iter().sum::<u64>(), g.size());
    let mut spectrum: Vec<u64> = g.cycles().iter().map(|c| c.len() as u64).collect();
    spectrum.sort_unstable();
    assert_eq!(summary.cycle_spectrum, spectrum);
    assert_eq!(
        summary.max_tail_depth,
        g.tail_depth().iter().copied().max().unwrap_or(0) as u64
    );
}

#[test]
fn builtin_graphs_satisfy_structural_invariants() {
    for builtin in BuiltinMap::ALL {
        for p in [2u64, 3, 5, 7, 11, 13, 17] {
            graph_invariants(&builtin.map(), p);
        }
    }
}

#[test]
fn orbit_agrees_with_graph_for_every_point() {
    for builtin in BuiltinMap::ALL {
        let map = builtin.map();
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let g = build_graph(&map, p).unwrap();
            let origin_cycle = g.cycles().iter().position(|c| c.as_slice() == [0u32]);
            for i in 0..g.size() {
                let start = g.point_at(i).unwrap();
                let s = orbit(&map, &start, p * p).unwrap();
                assert_eq!(
                    s.tail_length,
                    g.tail_depth()[i as usize] as u64,
                    "{} p={p} i={i}",
                    builtin.name()
                );
                let basin = g.basin_id()[i as usize] as usize;
                assert_eq!(s.cycle_length, g.cycles()[basin].len() as u64);
                // the origin is fixed for every builtin, so an orbit reaches it
                // exactly when its basin is the origin's own cycle
                let expect_origin = (origin_cycle == Some(basin))
                    .then_some(g.tail_depth()[i as usize] as u64);
                assert_eq!(s.steps_to_origin, expect_origin);
            }
        }
    }
}

#[test]
fn periodic_points_over_prime_field_are_the_cycle_nodes() {
    for builtin in BuiltinMap::ALL {
        let map = builtin.map();
        for p in [3u64, 5, 7] {
            let g = build_graph(&map, p).unwrap();
            let field = ExtField::new(p, 1, None).unwrap();
            let periodic = periodic_points_ext(&map, &field).unwrap();
            let cycle_count: usize = g.cycles().iter().map(Vec::len).sum();
            assert_eq!(periodic.len(), cycle_count, "{} p={p}", builtin.name());
            // each reported period equals the length of the matching graph cycle
            for (point, period) in periodic {
                let coords: Vec<u64> =
                    point.iter().map(|e| field.value(e).unwrap()).collect();
                let idx = g.index_of(&Point::new(coords, p)).unwrap();
                let basin = g.basin_id()[idx as usize] as usize;
                assert_eq!(g.tail_depth()[idx as usize], 0);
                assert_eq!(period, g.cycles()[basin].len() as u64);
            }
        }
    }
}

fn arb_map() -> impl Strategy<Value = PolyMap> {
    let term = (prop::collection::vec(0u32..=3, 2), -3i64..=3);
    let poly = prop::collection::vec(term, 0..5)
        .prop_map(|terms| Polynomial::new(2, terms).unwrap());
    prop::collection::vec(poly, 2)
        .prop_map(|components| PolyMap::new(components, None).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Random polynomial maps still produce graphs whose peeled structure
    /// matches a naive per-point walk.
    #[test]
    fn random_maps_satisfy_graph_invariants(
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        map in arb_map(),
    ) {
        graph_invariants(&map, p);
    }

    #[test]
    fn iteration_composes(
        builtin in prop::sample::select(BuiltinMap::ALL.to_vec()),
        p in prop::sample::select(vec![3u64, 7, 31, 97]),
        x in any::<u64>(),
        y in any::<u64>(),
        a in 0u64..40,
        b in 0u64..40,
    ) {
        let map = builtin.map();
        let start = Point::new(vec![x, y], p);
        let direct = iterate_k(&map, &start, a + b).unwrap();
        let staged = iterate_k(&map, &iterate_k(&map, &start, a).unwrap(), b).unwrap();
        prop_assert_eq!(direct, staged);
    }

    #[test]
    fn point_indexing_round_trips(
        p in prop::sample::select(vec![2u64, 3, 13, 97]),
        n in 1usize..=3,
        raw in prop::collection::vec(any::<u64>(), 3),
    ) {
        let point = Point::new(raw[..n].to_vec(), p);
        let idx = point_index(&point);
        prop_assert!(idx < p.pow(n as u32));
        let back = point_of_index(idx, p, n).unwrap();
        prop_assert_eq!(point, back);
    }
}

#[test]
fn moving_origin_is_detected() {
    // constant shift: (x, y) -> (y + 1, x); the origin is not fixed
    let comps = vec![
        trapmaps::poly::parse("y + 1", 2).unwrap(),
        trapmaps::poly::parse("x", 2).unwrap(),
    ];
    let map = PolyMap::new(comps, None).unwrap();
    let g = build_graph(&map, 5).unwrap();
    let origin = Point::origin(2, 5);
    assert!(matches!(
        g.nilpotency_index(&origin),
        Err(trapmaps::Error::TargetNotFixed)
    ));
}

#[test]
fn permutation_map_has_no_tails() {
    // (x, y) -> (y, x) is an involution: every point lies on a cycle
    let comps = vec![
        trapmaps::poly::parse("y", 2).unwrap(),
        trapmaps::poly::parse("x", 2).unwrap(),
    ];
    let map = PolyMap::new(comps, None).unwrap();
    for p in [2u64, 3, 5, 7] {
        let g = build_graph(&map, p).unwrap();
        assert_eq!(g.max_tail_depth(), 0);
        let ones = g.cycles().iter().filter(|c| c.len() == 1).count() as u64;
        let twos = g.cycles().iter().filter(|c| c.len() == 2).count() as u64;
        assert_eq!(ones, p, "diagonal points are fixed");
        assert_eq!(twos, p * (p - 1) / 2);
    }
}
