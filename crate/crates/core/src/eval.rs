//! Distortion of distance estimates against exact ground truth.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{bfs, DistanceTable, PairSample};
use crate::graph::{Graph, NodeId};
use crate::half::HalfHops;
use crate::tree::TreeOracle;

/// Pairs per partial sum. Fixed so aggregation does not depend on thread count.
const CHUNK: usize = 4096;

/// Anything that estimates hop distances between nodes `0..node_count()`.
pub trait DistanceEstimator: Sync {
    fn node_count(&self) -> usize;
    fn estimate(&self, x: NodeId, y: NodeId) -> HalfHops;
}

impl DistanceEstimator for TreeOracle {
    fn node_count(&self) -> usize {
        self.n()
    }

    fn estimate(&self, x: NodeId, y: NodeId) -> HalfHops {
        self.query(x, y)
    }
}

/// Exact distances from a precomputed table.
impl DistanceEstimator for DistanceTable {
    fn node_count(&self) -> usize {
        self.n()
    }

    fn estimate(&self, x: NodeId, y: NodeId) -> HalfHops {
        HalfHops::from_hops(self.get(x, y) as u64)
    }
}

/// Exact distances by one BFS per query. Only useful as a self-check.
pub struct BfsOracle<'g> {
    g: &'g Graph,
}

impl<'g> BfsOracle<'g> {
    pub fn new(g: &'g Graph) -> Self {
        BfsOracle { g }
    }
}

impl DistanceEstimator for BfsOracle<'_> {
    fn node_count(&self) -> usize {
        self.g.n()
    }

    fn estimate(&self, x: NodeId, y: NodeId) -> HalfHops {
        let d = bfs(self.g, x).expect("node ids are checked by evaluate");
        HalfHops::from_hops(d.dist[y as usize] as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistortionRecord {
    pub x: NodeId,
    pub y: NodeId,
    pub dist: u32,
    pub estimate: HalfHops,
}

impl DistortionRecord {
    /// `dG - dA` in half hops; negative when the estimate is too large.
    pub fn additive_doubled(&self) -> i64 {
        2 * self.dist as i64 - self.estimate.doubled() as i64
    }

    pub fn additive(&self) -> f64 {
        self.additive_doubled() as f64 / 2.0
    }

    pub fn absolute(&self) -> f64 {
        self.additive_doubled().unsigned_abs() as f64 / 2.0
    }

    pub fn multiplicative(&self) -> f64 {
        self.absolute() / self.dist as f64
    }
}

/// Distortion statistics for one true distance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorBucket {
    pub dist: u32,
    pub count: u64,
    pub sum_additive_doubled: i64,
    pub sum_absolute_doubled: u64,
    pub sum_multiplicative: f64,
    pub max_absolute: HalfHops,
}

impl ErrorBucket {
    pub fn mean_additive(&self) -> f64 {
        self.sum_additive_doubled as f64 / (2 * self.count) as f64
    }

    pub fn mean_absolute(&self) -> f64 {
        self.sum_absolute_doubled as f64 / (2 * self.count) as f64
    }

    pub fn mean_multiplicative(&self) -> f64 {
        self.sum_multiplicative / self.count as f64
    }

    fn add(&mut self, r: &DistortionRecord) {
        let a = r.additive_doubled();
        self.count += 1;
        self.sum_additive_doubled += a;
        self.sum_absolute_doubled += a.unsigned_abs();
        self.sum_multiplicative += r.multiplicative();
        self.max_absolute = self.max_absolute.max(HalfHops::from_doubled(a.unsigned_abs()));
    }

    fn merge(&mut self, other: &ErrorBucket) {
        self.count += other.count;
        self.sum_additive_doubled += other.sum_additive_doubled;
        self.sum_absolute_doubled += other.sum_absolute_doubled;
        self.sum_multiplicative += other.sum_multiplicative;
        self.max_absolute = self.max_absolute.max(other.max_absolute);
    }
}

/// Distortion bucketed by true distance, plus pair-weighted global means.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorProfile {
    pub buckets: Vec<ErrorBucket>,
    /// Sum over pairs of the squared doubled absolute error, for the standard error.
    sum_sq_absolute_doubled: u128,
}

impl ErrorProfile {
    pub const CSV_HEADER: &'static str = "dG,count,mean_additive,mean_absolute,mean_multiplicative,max_absolute";

    pub fn pairs(&self) -> u64 {
        self.buckets.iter().map(|b| b.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs() == 0
    }

    pub fn bucket(&self, dist: u32) -> Option<&ErrorBucket> {
        self.buckets.iter().find(|b| b.dist == dist)
    }

    pub fn mean_additive(&self) -> f64 {
        self.buckets.iter().map(|b| b.sum_additive_doubled).sum::<i64>() as f64 / (2 * self.pairs()) as f64
    }

    pub fn mean_absolute(&self) -> f64 {
        self.buckets.iter().map(|b| b.sum_absolute_doubled).sum::<u64>() as f64 / (2 * self.pairs()) as f64
    }

    pub fn mean_multiplicative(&self) -> f64 {
        self.buckets.iter().map(|b| b.sum_multiplicative).sum::<f64>() / self.pairs() as f64
    }

    pub fn max_absolute(&self) -> HalfHops {
        self.buckets.iter().map(|b| b.max_absolute).max().unwrap_or(HalfHops::ZERO)
    }

    /// Standard error of the global mean absolute error.
    pub fn stderr_absolute(&self) -> f64 {
        let n = self.pairs() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let mean = self.mean_absolute();
        let mean_sq = self.sum_sq_absolute_doubled as f64 / 4.0 / n;
        let var = ((mean_sq - mean * mean) * n / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }

    fn add(&mut self, r: &DistortionRecord) {
        let a = r.additive_doubled().unsigned_abs() as u128;
        self.sum_sq_absolute_doubled += a * a;
        match self.buckets.binary_search_by_key(&r.dist, |b| b.dist) {
            Ok(i) => self.buckets[i].add(r),
            Err(i) => {
                let mut b = ErrorBucket { dist: r.dist, ..ErrorBucket::default() };
                b.add(r);
                self.buckets.insert(i, b);
            }
        }
    }

    fn merge(mut self, other: &ErrorProfile) -> ErrorProfile {
        let mut all: BTreeMap<u32, ErrorBucket> = self.buckets.drain(..).map(|b| (b.dist, b)).collect();
        for b in &other.buckets {
            all.entry(b.dist).or_insert_with(|| ErrorBucket { dist: b.dist, ..ErrorBucket::default() }).merge(b);
        }
        ErrorProfile {
            buckets: all.into_values().collect(),
            sum_sq_absolute_doubled: self.sum_sq_absolute_doubled + other.sum_sq_absolute_doubled,
        }
    }
}

fn check_inputs(g: &Graph, oracle: &dyn DistanceEstimator, pairs: &PairSample) -> Result<()> {
    if oracle.node_count() != g.n() {
        return Err(Error::SizeMismatch { oracle: oracle.node_count(), graph: g.n() });
    }
    for p in &pairs.pairs {
        g.check_node(p.x)?;
        g.check_node(p.y)?;
        if p.x == p.y || p.dist == 0 {
            return Err(Error::InvalidArgument(format!("pair ({}, {}) is not two distinct nodes", p.x, p.y)));
        }
    }
    Ok(())
}

/// Queries every pair and returns one record per pair, in pair order.
pub fn distortion_records<O: DistanceEstimator>(
    g: &Graph,
    oracle: &O,
    pairs: &PairSample,
) -> Result<Vec<DistortionRecord>> {
    check_inputs(g, oracle, pairs)?;
    Ok(pairs
        .pairs
        .par_iter()
        .map(|p| DistortionRecord { x: p.x, y: p.y, dist: p.dist, estimate: oracle.estimate(p.x, p.y) })
        .collect())
}

/// Queries every pair and aggregates distortion by true distance.
///
/// Pairs are split into fixed-size chunks whose partial sums are merged in
/// chunk order, so results are identical for any number of threads.
pub fn evaluate<O: DistanceEstimator>(g: &Graph, oracle: &O, pairs: &PairSample) -> Result<ErrorProfile> {
    check_inputs(g, oracle, pairs)?;
    let partials: Vec<ErrorProfile> = pairs
        .pairs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut p = ErrorProfile::default();
            for s in chunk {
                p.add(&DistortionRecord { x: s.x, y: s.y, dist: s.dist, estimate: oracle.estimate(s.x, s.y) });
            }
            p
        })
        .collect();
    Ok(partials.iter().fold(ErrorProfile::default(), |acc, p| acc.merge(p)))
}

/// Writes the per-bucket CSV and returns the number of bytes written.
///
/// A non-empty profile is preceded by a comment line with the pair-weighted
/// global means.
pub fn emit_profile_csv<W: Write>(p: &ErrorProfile, mut sink: W) -> Result<u64> {
    let mut out = String::new();
    if !p.is_empty() {
        out.push_str(&format!(
            "# pair-weighted: pairs={} mean_additive={:.6} mean_absolute={:.6} mean_multiplicative={:.6} stderr_absolute={:.6}\n",
            p.pairs(),
            p.mean_additive(),
            p.mean_absolute(),
            p.mean_multiplicative(),
            p.stderr_absolute()
        ));
    }
    out.push_str(ErrorProfile::CSV_HEADER);
    out.push('\n');
    for b in &p.buckets {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{}\n",
            b.dist,
            b.count,
            b.mean_additive(),
            b.mean_absolute(),
            b.mean_multiplicative(),
            b.max_absolute
        ));
    }
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(out.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_all_pairs, sample_pairs, SampledPair};
    use crate::graph::flat_grid;
    use crate::tree::{Expansion, TreeKind};

    #[test]
    fn self_check_has_no_error() {
        let g = flat_grid(8).unwrap();
        let pairs = sample_pairs(&g, 500, 3).unwrap();
        for profile in [
            evaluate(&g, &BfsOracle::new(&g), &pairs).unwrap(),
            evaluate(&g, &exact_all_pairs(&g, 100).unwrap(), &pairs).unwrap(),
        ] {
            assert_eq!(profile.pairs(), 500);
            assert_eq!(profile.mean_absolute(), 0.0);
            assert_eq!(profile.stderr_absolute(), 0.0);
            assert!(profile.buckets.iter().all(|b| b.max_absolute == HalfHops::ZERO && b.mean_multiplicative() == 0.0));
        }
    }

    #[test]
    fn record_arithmetic() {
        let r = DistortionRecord { x: 0, y: 1, dist: 4, estimate: HalfHops::from_doubled(11) };
        assert_eq!(r.additive(), -1.5);
        assert_eq!(r.absolute(), 1.5);
        assert_eq!(r.multiplicative(), 0.375);
    }

    #[test]
    fn buckets_and_csv() {
        let g = flat_grid(3).unwrap();
        let o = TreeOracle::from_roots(&g, TreeKind::HyperBfs, &[0], Expansion::default()).unwrap();
        let pairs = PairSample {
            pairs: vec![
                SampledPair { x: 1, y: 3, dist: 2 },
                SampledPair { x: 0, y: 1, dist: 1 },
                SampledPair { x: 4, y: 5, dist: 1 },
            ],
            seed: 0,
        };
        let p = evaluate(&g, &o, &pairs).unwrap();
        assert_eq!(p.buckets.iter().map(|b| (b.dist, b.count)).collect::<Vec<_>>(), vec![(1, 2), (2, 1)]);
        let mut out = Vec::new();
        let written = emit_profile_csv(&p, &mut out).unwrap();
        assert_eq!(written as usize, out.len());
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# pair-weighted: pairs=3"));
        assert_eq!(lines[1], ErrorProfile::CSV_HEADER);
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn empty_profile_is_header_only() {
        let mut out = Vec::new();
        emit_profile_csv(&ErrorProfile::default(), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), format!("{}\n", ErrorProfile::CSV_HEADER));
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let g = flat_grid(3).unwrap();
        let o = TreeOracle::from_roots(&flat_grid(4).unwrap(), TreeKind::Gromov, &[0], Expansion::default()).unwrap();
        let pairs = PairSample { pairs: vec![], seed: 0 };
        assert!(matches!(evaluate(&g, &o, &pairs), Err(Error::SizeMismatch { oracle: 16, graph: 9 })));
    }

    #[test]
    fn chunked_aggregation_matches_sequential() {
        let g = flat_grid(20).unwrap();
        let o = TreeOracle::from_roots(&g, TreeKind::Steiner, &[0, 210], Expansion::default()).unwrap();
        let pairs = sample_pairs(&g, 3 * CHUNK + 17, 9).unwrap();
        let p = evaluate(&g, &o, &pairs).unwrap();
        let records = distortion_records(&g, &o, &pairs).unwrap();
        let mut seq = ErrorProfile::default();
        for chunk in records.chunks(CHUNK) {
            let mut part = ErrorProfile::default();
            chunk.iter().for_each(|r| part.add(r));
            seq = seq.merge(&part);
        }
        assert_eq!(p, seq);
        assert_eq!(p.pairs(), pairs.len() as u64);
    }
}
