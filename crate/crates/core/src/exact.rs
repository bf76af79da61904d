//! Exact hop distances: single-source BFS, all-pairs tables, seeded pair
//! sampling with ground truth, and double-sweep diameter lower bounds.

use std::io::{BufRead, Write};

use log::warn;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphStats, NodeId};

/// Distance of a node in another component.
pub const UNREACHED: u32 = u32::MAX;

/// Default number of targets drawn per BFS source in [`sample_pairs`].
pub const DEFAULT_PAIRS_PER_SOURCE: usize = 64;

/// Default node cap for [`exact_all_pairs`].
pub const DEFAULT_ALL_PAIRS_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceVector {
    pub source: NodeId,
    pub dist: Vec<u32>,
}

impl DistanceVector {
    /// Largest finite distance and the smallest node attaining it.
    pub fn farthest(&self) -> (NodeId, u32) {
        farthest(&self.dist)
    }
}

fn farthest(dist: &[u32]) -> (NodeId, u32) {
    let mut best = (0, 0);
    for (v, &d) in dist.iter().enumerate() {
        if d != UNREACHED && d > best.1 {
            best = (v as NodeId, d);
        }
    }
    best
}

/// BFS into caller-provided buffers. `dist` is fully overwritten; returns the
/// number of reached nodes.
pub(crate) fn bfs_fill(g: &Graph, source: NodeId, dist: &mut [u32], queue: &mut Vec<NodeId>) -> usize {
    dist.fill(UNREACHED);
    queue.clear();
    dist[source as usize] = 0;
    queue.push(source);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        let next = dist[v as usize] + 1;
        for &w in g.neighbors(v) {
            if dist[w as usize] == UNREACHED {
                dist[w as usize] = next;
                queue.push(w);
            }
        }
    }
    queue.len()
}

pub fn bfs(g: &Graph, source: NodeId) -> Result<DistanceVector> {
    g.check_node(source)?;
    let mut dist = vec![UNREACHED; g.n()];
    bfs_fill(g, source, &mut dist, &mut Vec::with_capacity(g.n()));
    Ok(DistanceVector { source, dist })
}

/// Dense `n × n` table of exact hop distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceTable {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: NodeId, y: NodeId) -> u32 {
        self.dist[x as usize * self.n + y as usize]
    }

    pub fn row(&self, x: NodeId) -> &[u32] {
        &self.dist[x as usize * self.n..(x as usize + 1) * self.n]
    }

    /// Largest finite entry.
    pub fn max_finite(&self) -> u32 {
        self.dist.iter().copied().filter(|&d| d != UNREACHED).max().unwrap_or(0)
    }
}

/// All-pairs distances by one BFS per node; refuses graphs above `cap` nodes.
pub fn exact_all_pairs(g: &Graph, cap: usize) -> Result<DistanceTable> {
    let n = g.n();
    if n > cap {
        return Err(Error::CapExceeded { what: "all-pairs node count", value: n, cap });
    }
    let mut dist = vec![UNREACHED; n * n];
    if n > 0 {
        dist.par_chunks_mut(n).enumerate().for_each_init(
            || Vec::with_capacity(n),
            |queue, (x, row)| {
                bfs_fill(g, x as NodeId, row, queue);
            },
        );
    }
    Ok(DistanceTable { n, dist })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampledPair {
    pub x: NodeId,
    pub y: NodeId,
    pub dist: u32,
}

/// Node pairs with exact ground-truth distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSample {
    pub pairs: Vec<SampledPair>,
    pub seed: u64,
}

impl PairSample {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// CSV with a `# seed=` comment line, then `x,y,dG`.
    pub fn write_csv<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "# seed={}", self.seed)?;
        writeln!(sink, "x,y,dG")?;
        for p in &self.pairs {
            writeln!(sink, "{},{},{}", p.x, p.y, p.dist)?;
        }
        sink.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(source: R) -> Result<PairSample> {
        let mut seed = 0;
        let mut pairs = Vec::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let body = line.trim();
            if let Some(comment) = body.strip_prefix('#') {
                if let Some(s) = comment.trim().strip_prefix("seed=") {
                    seed =
                        s.trim().parse().map_err(|_| Error::Parse { line: idx + 1, msg: format!("bad seed {s:?}") })?;
                }
                continue;
            }
            if body.is_empty() || body == "x,y,dG" {
                continue;
            }
            let fields: Vec<&str> = body.split(',').map(str::trim).collect();
            let parse = |s: &str| {
                s.parse::<u32>().map_err(|_| Error::Parse { line: idx + 1, msg: format!("malformed field {s:?}") })
            };
            if fields.len() != 3 {
                return Err(Error::Parse { line: idx + 1, msg: "expected x,y,dG".into() });
            }
            pairs.push(SampledPair { x: parse(fields[0])?, y: parse(fields[1])?, dist: parse(fields[2])? });
        }
        Ok(PairSample { pairs, seed })
    }
}

/// Seeded node pairs with ground truth, `DEFAULT_PAIRS_PER_SOURCE` per BFS.
pub fn sample_pairs(g: &Graph, count: usize, seed: u64) -> Result<PairSample> {
    sample_pairs_with(g, count, seed, DEFAULT_PAIRS_PER_SOURCE)
}

/// Draws `count` pairs of distinct nodes: distinct sources uniformly, one BFS
/// per source, then distinct targets per source. Requests covering all
/// `n(n-1)/2` pairs (or more) enumerate every unordered pair instead.
///
/// The output depends only on `g`, `count`, `seed` and `per_source`, never on
/// thread scheduling.
pub fn sample_pairs_with(g: &Graph, count: usize, seed: u64, per_source: usize) -> Result<PairSample> {
    if count == 0 {
        return Err(Error::InvalidArgument("pair count must be positive".into()));
    }
    if per_source == 0 {
        return Err(Error::InvalidArgument("pairs per source must be positive".into()));
    }
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two nodes to sample pairs".into()));
    }
    let total = n * (n - 1) / 2;
    if count >= total {
        if count > total {
            warn!("requested {count} pairs but only {total} exist; using all of them");
        }
        return all_pairs_sample(g, seed);
    }

    let per = per_source.max(count.div_ceil(n)).min(n - 1);
    let num_sources = count.div_ceil(per);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sources = index::sample(&mut rng, n, num_sources).into_vec();
    let jobs: Vec<(NodeId, u64, usize)> = sources
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let take = if i + 1 == num_sources { count - per * (num_sources - 1) } else { per };
            (s as NodeId, rng.gen::<u64>(), take)
        })
        .collect();

    let chunks: Vec<Result<Vec<SampledPair>>> = jobs
        .par_iter()
        .map_init(
            || (vec![UNREACHED; n], Vec::with_capacity(n)),
            |(dist, queue), &(src, sub_seed, take)| {
                bfs_fill(g, src, dist, queue);
                let mut sub = ChaCha8Rng::seed_from_u64(sub_seed);
                index::sample(&mut sub, n - 1, take)
                    .into_iter()
                    .map(|t| {
                        let y = if t >= src as usize { t + 1 } else { t } as NodeId;
                        let d = dist[y as usize];
                        if d == UNREACHED {
                            return Err(disconnected(g, src, dist));
                        }
                        Ok(SampledPair { x: src, y, dist: d })
                    })
                    .collect()
            },
        )
        .collect();
    let mut pairs = Vec::with_capacity(count);
    for chunk in chunks {
        pairs.extend(chunk?);
    }
    Ok(PairSample { pairs, seed })
}

fn disconnected(g: &Graph, root: NodeId, dist: &[u32]) -> Error {
    Error::Disconnected { root, reached: dist.iter().filter(|&&d| d != UNREACHED).count(), n: g.n() }
}

fn all_pairs_sample(g: &Graph, seed: u64) -> Result<PairSample> {
    let n = g.n();
    let rows: Vec<Result<Vec<SampledPair>>> = (0..n as NodeId)
        .into_par_iter()
        .map_init(
            || (vec![UNREACHED; n], Vec::with_capacity(n)),
            |(dist, queue), x| {
                bfs_fill(g, x, dist, queue);
                ((x + 1)..n as NodeId)
                    .map(|y| match dist[y as usize] {
                        UNREACHED => Err(disconnected(g, x, dist)),
                        d => Ok(SampledPair { x, y, dist: d }),
                    })
                    .collect()
            },
        )
        .collect();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for row in rows {
        pairs.extend(row?);
    }
    Ok(PairSample { pairs, seed })
}

/// Diameter lower bound from repeated double sweeps.
///
/// The first sweep starts at the highest-degree node; each later sweep starts
/// where the previous one ended. Exact on trees. Only the component of the
/// start node is explored.
pub fn estimate_diameter(g: &Graph, sweeps: usize) -> Result<u32> {
    if sweeps == 0 {
        return Err(Error::InvalidArgument("at least one sweep is required".into()));
    }
    if g.n() == 0 {
        return Ok(0);
    }
    let mut dist = vec![UNREACHED; g.n()];
    let mut queue = Vec::with_capacity(g.n());
    let mut start = GraphStats::of(g).max_degree_node;
    let mut best = 0;
    for _ in 0..sweeps {
        bfs_fill(g, start, &mut dist, &mut queue);
        let (a, ecc_start) = farthest(&dist);
        bfs_fill(g, a, &mut dist, &mut queue);
        let (b, ecc_a) = farthest(&dist);
        best = best.max(ecc_start).max(ecc_a);
        start = b;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::flat_grid;

    fn graph(n: usize, edges: &[(NodeId, NodeId)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap().0
    }

    fn path(n: usize) -> Graph {
        graph(n, &(0..n as NodeId - 1).map(|i| (i, i + 1)).collect::<Vec<_>>())
    }

    fn cycle(n: usize) -> Graph {
        graph(n, &(0..n as NodeId).map(|i| (i, (i + 1) % n as NodeId)).collect::<Vec<_>>())
    }

    #[test]
    fn bfs_on_path() {
        assert_eq!(bfs(&path(3), 0).unwrap().dist, vec![0, 1, 2]);
        assert!(matches!(bfs(&path(3), 3), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn bfs_marks_other_components() {
        let g = graph(5, &[(0, 1), (1, 2), (3, 4)]);
        let d = bfs(&g, 0).unwrap();
        assert_eq!(d.dist[3], UNREACHED);
        assert_eq!(d.dist[4], UNREACHED);
        assert_eq!(d.farthest(), (2, 2));
    }

    #[test]
    fn grid_corner_eccentricity() {
        let g = flat_grid(100).unwrap();
        assert_eq!(bfs(&g, 0).unwrap().farthest(), (9999, 198));
    }

    #[test]
    fn all_pairs_small_cases() {
        let c4 = exact_all_pairs(&cycle(4), DEFAULT_ALL_PAIRS_CAP).unwrap();
        assert_eq!(c4.get(0, 2), 2);
        assert_eq!(c4.get(1, 3), 2);
        assert_eq!(c4.get(0, 1), 1);
        assert_eq!(c4.get(3, 0), 1);

        let g5 = exact_all_pairs(&flat_grid(5).unwrap(), DEFAULT_ALL_PAIRS_CAP).unwrap();
        assert_eq!(g5.max_finite(), 8);
        for x in 0..25 {
            assert_eq!(g5.get(x, x), 0);
            for y in 0..25 {
                assert_eq!(g5.get(x, y), g5.get(y, x));
            }
        }
    }

    #[test]
    fn all_pairs_refuses_above_cap() {
        assert!(matches!(exact_all_pairs(&path(10), 9), Err(Error::CapExceeded { value: 10, cap: 9, .. })));
    }

    #[test]
    fn triangle_sample_is_every_pair() {
        let tri = cycle(3);
        for count in [3, 10] {
            let s = sample_pairs(&tri, count, 1).unwrap();
            assert_eq!(s.len(), 3);
            assert!(s.pairs.iter().all(|p| p.dist == 1 && p.x != p.y));
        }
        assert!(sample_pairs(&tri, 0, 1).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let g = flat_grid(20).unwrap();
        let a = sample_pairs(&g, 1000, 42).unwrap();
        let b = sample_pairs(&g, 1000, 42).unwrap();
        let c = sample_pairs(&g, 1000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 1000);
    }

    #[test]
    fn sampled_pairs_are_distinct_per_source_and_exact() {
        let g = flat_grid(12).unwrap();
        let table = exact_all_pairs(&g, DEFAULT_ALL_PAIRS_CAP).unwrap();
        let s = sample_pairs_with(&g, 500, 9, 16).unwrap();
        assert_eq!(s.len(), 500);
        let mut seen = std::collections::HashSet::new();
        for p in &s.pairs {
            assert_ne!(p.x, p.y);
            assert_eq!(p.dist, table.get(p.x, p.y));
            assert!(seen.insert((p.x, p.y)), "repeat within a source");
        }
    }

    #[test]
    fn sampling_disconnected_graph_fails() {
        let g = graph(40, &(0..19).map(|i| (i, i + 1)).chain((20..39).map(|i| (i, i + 1))).collect::<Vec<_>>());
        assert!(matches!(sample_pairs(&g, 50, 3), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn csv_round_trip() {
        let s = sample_pairs(&flat_grid(5).unwrap(), 20, 5).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"# seed=5\nx,y,dG\n"));
        assert_eq!(PairSample::read_csv(&buf[..]).unwrap(), s);
        assert!(PairSample::read_csv("1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(estimate_diameter(&path(5), 1).unwrap(), 4);
        assert_eq!(estimate_diameter(&cycle(4), 1).unwrap(), 2);
        assert_eq!(estimate_diameter(&flat_grid(100).unwrap(), 1).unwrap(), 198);
        assert!(estimate_diameter(&path(5), 0).is_err());
    }
}
