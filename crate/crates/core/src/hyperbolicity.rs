//! Four-point (Gromov) hyperbolicity estimates in the hop metric.
//!
//! For nodes `w, x, y, z` the three opposite-pair sums are sorted
//! `S <= M <= L`; the quadruple contributes `(L - M) / 2`. The graph constant
//! is the maximum over all quadruples. Exhaustive evaluation is quartic, so
//! [`estimate_delta`] works on a sampled node set and optionally samples
//! quadruples too.

use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{bfs_fill, DistanceTable, UNREACHED};
use crate::graph::{Graph, NodeId};
use crate::half::HalfHops;

/// Doubled four-point value `L - M` of one quadruple, from its six distances.
#[inline]
fn doubled_gap(d_wx: u32, d_yz: u32, d_xy: u32, d_wz: u32, d_xz: u32, d_wy: u32) -> u64 {
    let a = d_wx as u64 + d_yz as u64;
    let b = d_xy as u64 + d_wz as u64;
    let c = d_xz as u64 + d_wy as u64;
    let largest = a.max(b).max(c);
    let middle = a.min(b).max(a.max(b).min(c));
    largest - middle
}

/// `(L - M) / 2` for one quadruple, from its six pairwise distances.
pub fn four_point_delta(d_wx: u32, d_yz: u32, d_xy: u32, d_wz: u32, d_xz: u32, d_wy: u32) -> Result<HalfHops> {
    if [d_wx, d_yz, d_xy, d_wz, d_xz, d_wy].contains(&UNREACHED) {
        return Err(Error::InvalidArgument("four-point condition needs finite distances".into()));
    }
    Ok(HalfHops::from_doubled(doubled_gap(d_wx, d_yz, d_xy, d_wz, d_xz, d_wy)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaEstimate {
    pub max_delta: HalfHops,
    pub mean_delta: f64,
    pub quadruples_evaluated: u64,
    pub sample_node_count: usize,
    pub seed: u64,
}

impl DeltaEstimate {
    pub const CSV_HEADER: &'static str = "max_delta,mean_delta,quadruples,nodes,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.6},{},{},{}",
            self.max_delta, self.mean_delta, self.quadruples_evaluated, self.sample_node_count, self.seed
        )
    }
}

impl fmt::Display for DeltaEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.csv_row())
    }
}

/// Running max and exact doubled sum.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    max: u64,
    sum: u64,
    count: u64,
}

impl Tally {
    #[inline]
    fn add(&mut self, gap: u64) {
        self.max = self.max.max(gap);
        self.sum += gap;
        self.count += 1;
    }

    fn merge(self, other: Tally) -> Tally {
        Tally { max: self.max.max(other.max), sum: self.sum + other.sum, count: self.count + other.count }
    }
}

/// Pairwise distances among a node subset.
struct SampleMetric {
    k: usize,
    dist: Vec<u32>,
}

impl SampleMetric {
    fn from_graph(g: &Graph, nodes: &[NodeId]) -> Result<SampleMetric> {
        let k = nodes.len();
        let n = g.n();
        let rows: Vec<Vec<u32>> = nodes
            .par_iter()
            .map_init(
                || (vec![UNREACHED; n], Vec::with_capacity(n)),
                |(dist, queue), &src| {
                    bfs_fill(g, src, dist, queue);
                    nodes.iter().map(|&t| dist[t as usize]).collect()
                },
            )
            .collect();
        let dist: Vec<u32> = rows.into_iter().flatten().collect();
        if let Some(pos) = dist.iter().position(|&d| d == UNREACHED) {
            return Err(Error::Disconnected { root: nodes[pos / k], reached: 0, n });
        }
        Ok(SampleMetric { k, dist })
    }

    fn from_table(table: &DistanceTable) -> Result<SampleMetric> {
        let k = table.n();
        let dist: Vec<u32> = (0..k as NodeId).flat_map(|x| table.row(x).iter().copied()).collect();
        if dist.contains(&UNREACHED) {
            return Err(Error::InvalidArgument("distance table spans several components".into()));
        }
        Ok(SampleMetric { k, dist })
    }

    #[inline]
    fn d(&self, a: usize, b: usize) -> u32 {
        self.dist[a * self.k + b]
    }

    #[inline]
    fn gap(&self, w: usize, x: usize, y: usize, z: usize) -> u64 {
        doubled_gap(self.d(w, x), self.d(y, z), self.d(x, y), self.d(w, z), self.d(x, z), self.d(w, y))
    }

    /// Every 4-subset once.
    fn exhaustive(&self) -> Tally {
        let k = self.k;
        (0..k)
            .into_par_iter()
            .map(|w| {
                let mut t = Tally::default();
                for x in w + 1..k {
                    for y in x + 1..k {
                        for z in y + 1..k {
                            t.add(self.gap(w, x, y, z));
                        }
                    }
                }
                t
            })
            .reduce(Tally::default, Tally::merge)
    }

    /// `count` independent uniformly random 4-subsets.
    fn sampled(&self, count: u64, rng: &mut ChaCha8Rng) -> Tally {
        const CHUNK: u64 = 1 << 16;
        let chunks = count.div_ceil(CHUNK);
        let seeds: Vec<u64> = (0..chunks).map(|_| rng.gen()).collect();
        seeds
            .par_iter()
            .enumerate()
            .map(|(i, &seed)| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let todo = CHUNK.min(count - i as u64 * CHUNK);
                let mut t = Tally::default();
                for _ in 0..todo {
                    let q = index::sample(&mut r, self.k, 4);
                    t.add(self.gap(q.index(0), q.index(1), q.index(2), q.index(3)));
                }
                t
            })
            .reduce(Tally::default, Tally::merge)
    }
}

fn choose4(k: usize) -> u128 {
    if k < 4 {
        return 0;
    }
    let k = k as u128;
    k * (k - 1) * (k - 2) * (k - 3) / 24
}

fn finish(t: Tally, nodes: usize, seed: u64) -> DeltaEstimate {
    DeltaEstimate {
        max_delta: HalfHops::from_doubled(t.max),
        mean_delta: if t.count == 0 { 0.0 } else { t.sum as f64 / (2.0 * t.count as f64) },
        quadruples_evaluated: t.count,
        sample_node_count: nodes,
        seed,
    }
}

/// Samples `node_sample` distinct nodes (clamped to `n`), measures their
/// pairwise distances by BFS, and evaluates every quadruple among them when
/// there are at most `max_quadruples`, otherwise `max_quadruples` random ones.
pub fn estimate_delta(g: &Graph, node_sample: usize, max_quadruples: u64, seed: u64) -> Result<DeltaEstimate> {
    if node_sample < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 sample nodes, got {node_sample}")));
    }
    if g.n() < 4 {
        return Err(Error::InvalidArgument("graph has fewer than 4 nodes".into()));
    }
    let k = node_sample.min(g.n());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<NodeId> = if k == g.n() {
        g.nodes().collect()
    } else {
        index::sample(&mut rng, g.n(), k).into_iter().map(|v| v as NodeId).collect()
    };
    nodes.sort_unstable();
    let metric = SampleMetric::from_graph(g, &nodes)?;
    let tally = if choose4(k) <= max_quadruples as u128 {
        metric.exhaustive()
    } else {
        metric.sampled(max_quadruples, &mut rng)
    };
    Ok(finish(tally, k, seed))
}

/// Exact constant over every quadruple of a precomputed table.
pub fn exact_delta(table: &DistanceTable) -> Result<DeltaEstimate> {
    let metric = SampleMetric::from_table(table)?;
    Ok(finish(metric.exhaustive(), table.n(), 0))
}
