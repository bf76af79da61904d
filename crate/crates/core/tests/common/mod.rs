//! Independent reference implementations and graph generators for tests.
//!
//! Nothing here calls into the crate's distance or hyperbolicity code.

#![allow(dead_code)]

use hyperoracle::{Graph, NodeId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const INF: u32 = u32::MAX;

/// Floyd–Warshall over the adjacency matrix.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (u, v) in g.edges() {
        d[u as usize][v as usize] = 1;
        d[v as usize][u as usize] = 1;
    }
    for k in 0..n {
        let via = d[k].clone();
        for row in d.iter_mut() {
            let dik = row[k];
            if dik == INF {
                continue;
            }
            for (dij, &dkj) in row.iter_mut().zip(&via) {
                if dkj != INF && dik + dkj < *dij {
                    *dij = dik + dkj;
                }
            }
        }
    }
    d
}

/// Largest `L - M` (doubled delta) over all quadruples of `nodes`, plus the sum and count.
pub fn naive_delta(d: &[Vec<u32>], nodes: &[usize]) -> (u64, u64, u64) {
    let (mut max, mut sum, mut count) = (0u64, 0u64, 0u64);
    let k = nodes.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for e in c + 1..k {
                    let (w, x, y, z) = (nodes[a], nodes[b], nodes[c], nodes[e]);
                    let mut s = [
                        d[w][x] as u64 + d[y][z] as u64,
                        d[w][y] as u64 + d[x][z] as u64,
                        d[w][z] as u64 + d[x][y] as u64,
                    ];
                    s.sort_unstable();
                    let gap = s[2] - s[1];
                    max = max.max(gap);
                    sum += gap;
                    count += 1;
                }
            }
        }
    }
    (max, sum, count)
}

pub fn graph(n: usize, edges: &[(NodeId, NodeId)]) -> Graph {
    Graph::from_edges(n, edges.iter().copied()).unwrap().0
}

pub fn cycle(n: usize) -> Graph {
    graph(n, &(0..n as NodeId).map(|i| (i, (i + 1) % n as NodeId)).collect::<Vec<_>>())
}

/// Uniformly relabeled random recursive tree.
pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut labels: Vec<NodeId> = (0..n as NodeId).collect();
    labels.shuffle(rng);
    let edges: Vec<_> = (1..n).map(|i| (labels[i], labels[rng.gen_range(0..i)])).collect();
    graph(n, &edges)
}

/// Random tree plus `extra` random chords; connected by construction.
pub fn random_connected(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut labels: Vec<NodeId> = (0..n as NodeId).collect();
    labels.shuffle(rng);
    let mut edges: Vec<_> = (1..n).map(|i| (labels[i], labels[rng.gen_range(0..i)])).collect();
    for _ in 0..extra {
        let u = rng.gen_range(0..n) as NodeId;
        let v = rng.gen_range(0..n) as NodeId;
        edges.push((u, v));
    }
    graph(n, &edges)
}

/// Names one member of the small random family.
#[derive(Debug, Clone)]
pub struct Case {
    pub label: String,
    pub graph: Graph,
}

/// 50 connected graphs with 8 to 200 nodes: trees, near-trees, sparse,
/// medium and dense chord counts.
pub fn small_family() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
    (0..50)
        .map(|i| {
            let n = 8 + (i * 53) % 193;
            let (kind, extra) = match i % 5 {
                0 => ("tree", 0),
                1 => ("near-tree", 1 + n / 20),
                2 => ("sparse", n / 2),
                3 => ("medium", 2 * n),
                _ => ("dense", n * n / 10),
            };
            let graph = if extra == 0 { random_tree(n, &mut rng) } else { random_connected(n, extra, &mut rng) };
            Case { label: format!("#{i} {kind} n={n} m={}", graph.m()), graph }
        })
        .collect()
}

/// Synthetic co-authorship graph: papers are cliques of 2 to 8 authors, each
/// seat filled by a new author with probability `p_new` (while fewer than
/// `n_target` exist) and otherwise by an existing author chosen in proportion
/// to their paper count. Stops once `m_target` distinct edges exist.
pub fn collaboration_graph(n_target: usize, m_target: usize, p_new: f64, seed: u64) -> Graph {
    use std::collections::HashSet;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seats: Vec<NodeId> = vec![0, 1];
    let mut authors = 2usize;
    let mut edges: HashSet<(NodeId, NodeId)> = HashSet::from([(0, 1)]);
    let mut team: Vec<NodeId> = Vec::new();
    while edges.len() < m_target {
        let size = rng.gen_range(2..=8);
        team.clear();
        while team.len() < size {
            let a = if authors < n_target && rng.gen_bool(p_new) {
                authors += 1;
                (authors - 1) as NodeId
            } else {
                seats[rng.gen_range(0..seats.len())]
            };
            if !team.contains(&a) {
                team.push(a);
            }
        }
        for (i, &a) in team.iter().enumerate() {
            seats.push(a);
            for &b in &team[i + 1..] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }
    let mut list: Vec<_> = edges.into_iter().collect();
    list.sort_unstable();
    graph(authors, &list)
}
