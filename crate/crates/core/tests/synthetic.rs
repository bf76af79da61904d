mod common;

use std::collections::HashMap;

use common::{floyd_warshall, naive_delta};
use hyperoracle::exact::{bfs, estimate_diameter};
use hyperoracle::graph::{flat_grid, hyper_grid};
use hyperoracle::hyperbolicity::estimate_delta;
use hyperoracle::{Graph, GraphStats, HalfHops, NodeId};

fn golden(name: &str) -> HashMap<String, String> {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (k, v) = l.split_once('=').unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn triangles_on(g: &Graph, u: NodeId, v: NodeId) -> usize {
    g.neighbors(u).iter().filter(|&&w| g.has_edge(v, w)).count()
}

#[test]
fn hyper_grid_is_a_triangulated_disk() {
    for rings in 1..=6 {
        let g = hyper_grid(rings).unwrap();
        let level = bfs(&g, 0).unwrap().dist;
        assert_eq!(*level.iter().max().unwrap() as usize, rings);
        let outer = |v: NodeId| level[v as usize] as usize == rings;
        for v in g.nodes() {
            if !outer(v) {
                assert_eq!(g.degree(v), 7, "rings={rings} node {v}");
            } else {
                assert!(g.degree(v) < 7 && g.degree(v) >= 3);
            }
        }
        let mut corners = 0;
        for (u, v) in g.edges() {
            let t = triangles_on(&g, u, v);
            corners += t;
            if outer(u) && outer(v) {
                assert_eq!(t, 1, "boundary edge {u}-{v}");
            } else {
                assert_eq!(t, 2, "interior edge {u}-{v}");
            }
        }
        // every face is a triangle: Euler's formula for a disk, V - E + F = 1
        let faces = corners / 3;
        assert_eq!(g.n() as i64 - g.m() as i64 + faces as i64, 1, "rings={rings}");
    }
}

#[test]
fn hyper_grid_sampled_delta_is_small() {
    let g = hyper_grid(7).unwrap();
    for seed in 0..3 {
        let est = estimate_delta(&g, 200, 2_000_000, seed).unwrap();
        assert!(est.max_delta <= HalfHops::from_doubled(3), "seed {seed}: {est}");
    }
}

#[test]
fn flat_grid_table_numbers() {
    let g = flat_grid(100).unwrap();
    let stats = GraphStats::of(&g);
    assert_eq!((stats.n, stats.m), (10_000, 19_800));
    assert_eq!(format!("{:.2}", stats.avg_degree), "3.96");
    assert_eq!(stats.max_degree, 4);
    assert_eq!(estimate_diameter(&g, 2).unwrap(), 198);
    assert_eq!(bfs(&g, 0).unwrap().farthest().1, 198);
}

#[test]
fn hyper_grid_at_table_scale() {
    let g = hyper_grid(9).unwrap();
    assert_eq!(g.n(), 29_261);
    assert_eq!(estimate_diameter(&g, 4).unwrap(), 18);
}

#[test]
fn flat_grid_delta_matches_golden_file() {
    let want = golden("flat_grid_10_delta.txt");
    let est = estimate_delta(&flat_grid(10).unwrap(), 100, 10_000_000, 0).unwrap();
    assert_eq!(est.max_delta, HalfHops::parse(&want["max_delta"]).unwrap());
    assert_eq!(est.quadruples_evaluated.to_string(), want["quadruples"]);
    assert_eq!(format!("{:.6}", est.mean_delta), want["mean_delta"]);
}

#[test]
fn golden_delta_agrees_with_naive_enumeration() {
    let want = golden("flat_grid_10_delta.txt");
    let g = flat_grid(10).unwrap();
    let nodes: Vec<usize> = (0..g.n()).collect();
    let (max, sum, count) = naive_delta(&floyd_warshall(&g), &nodes);
    assert_eq!(HalfHops::from_doubled(max), HalfHops::parse(&want["max_delta"]).unwrap());
    assert_eq!(count.to_string(), want["quadruples"]);
    assert_eq!(format!("{:.6}", sum as f64 / 2.0 / count as f64), want["mean_delta"]);
}
