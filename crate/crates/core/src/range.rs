//! Distance intervals from a Hyper BFS oracle and a Gromov oracle.
//!
//! For a pair `(x, y)` the interval is
//!
//! ```text
//! lower = max over Gromov trees of d_GT(x, y)
//! upper = min( min over Hyper BFS trees of d_H(x, y),
//!              min over Gromov trees of d_GT(x, y) + ceil(2 * delta * log n) )
//! ```
//!
//! The lower bound always holds. The upper bound holds when `delta` is at
//! least the graph's hyperbolicity constant; with a sampled `delta`
//! containment is only statistical, which is why reports count failures.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::PairSample;
use crate::graph::NodeId;
use crate::half::HalfHops;
use crate::tree::{TreeKind, TreeOracle};

/// Default number of Hyper BFS trees in a range oracle.
pub const DEFAULT_HYPER_TREES: usize = 10;
/// Default number of Gromov trees in a range oracle.
pub const DEFAULT_GROMOV_TREES: usize = 20;

/// Logarithm used in the additive term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Two,
    Natural,
}

impl LogBase {
    fn log(self, n: usize) -> f64 {
        match self {
            LogBase::Two => (n as f64).log2(),
            LogBase::Natural => (n as f64).ln(),
        }
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" | "log2" => Ok(LogBase::Two),
            "e" | "ln" => Ok(LogBase::Natural),
            other => Err(Error::InvalidArgument(format!("unknown log base {other:?}"))),
        }
    }
}

/// `ceil(2 * delta * log n)` in whole hops.
pub fn additive_term(delta: HalfHops, n: usize, base: LogBase) -> u64 {
    if n < 2 || delta == HalfHops::ZERO {
        return 0;
    }
    (delta.doubled() as f64 * base.log(n)).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceRange {
    pub lower: u64,
    pub upper: u64,
}

impl DistanceRange {
    /// `upper - lower`; negative only if `delta` was too small.
    pub fn width(&self) -> i64 {
        self.upper as i64 - self.lower as i64
    }

    pub fn contains(&self, d: u64) -> bool {
        self.lower <= d && d <= self.upper
    }
}

impl fmt::Display for DistanceRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

#[derive(Debug, Clone)]
pub struct RangeOracle {
    hyper: TreeOracle,
    gromov: TreeOracle,
    delta: HalfHops,
    base: LogBase,
    additive: u64,
}

impl RangeOracle {
    pub fn new(hyper: TreeOracle, gromov: TreeOracle, delta: HalfHops, base: LogBase) -> Result<RangeOracle> {
        if hyper.kind() != TreeKind::HyperBfs {
            return Err(Error::InvalidArgument(format!("upper-bound oracle must be hyperbfs, got {}", hyper.kind())));
        }
        if gromov.kind() != TreeKind::Gromov {
            return Err(Error::InvalidArgument(format!("lower-bound oracle must be gromov, got {}", gromov.kind())));
        }
        if hyper.n() != gromov.n() {
            return Err(Error::SizeMismatch { oracle: gromov.n(), graph: hyper.n() });
        }
        let additive = additive_term(delta, hyper.n(), base);
        Ok(RangeOracle { hyper, gromov, delta, base, additive })
    }

    pub fn n(&self) -> usize {
        self.hyper.n()
    }

    pub fn delta(&self) -> HalfHops {
        self.delta
    }

    pub fn log_base(&self) -> LogBase {
        self.base
    }

    /// The additive slack `ceil(2 * delta * log n)` in hops.
    pub fn additive(&self) -> u64 {
        self.additive
    }

    pub fn hyper(&self) -> &TreeOracle {
        &self.hyper
    }

    pub fn gromov(&self) -> &TreeOracle {
        &self.gromov
    }

    pub fn range_query(&self, x: NodeId, y: NodeId) -> DistanceRange {
        let (g_min, g_max) = self.gromov.min_max(x, y);
        let h_min = self.hyper.query(x, y).floor_hops();
        DistanceRange { lower: g_max.floor_hops(), upper: h_min.min(g_min.floor_hops() + self.additive) }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RangeBucket {
    pub dist: u32,
    pub pairs: u64,
    pub sum_lower: u64,
    pub sum_upper: u64,
    pub sum_width: i64,
}

impl RangeBucket {
    pub fn mean_lower(&self) -> f64 {
        self.sum_lower as f64 / self.pairs as f64
    }

    pub fn mean_upper(&self) -> f64 {
        self.sum_upper as f64 / self.pairs as f64
    }

    pub fn mean_width(&self) -> f64 {
        self.sum_width as f64 / self.pairs as f64
    }
}

/// Interval widths bucketed by true distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeReport {
    pub buckets: Vec<RangeBucket>,
    pub pairs: u64,
    /// Pairs whose true distance fell outside the interval.
    pub containment_failures: u64,
    /// Pairs with `upper - lower` above the additive term.
    pub width_violations: u64,
    pub max_width: i64,
    pub delta: HalfHops,
    pub additive: u64,
}

impl RangeReport {
    pub const CSV_HEADER: &'static str = "dG,mean_lower,mean_upper,mean_width,pairs";

    pub fn write_csv<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "{}", Self::CSV_HEADER)?;
        for b in &self.buckets {
            writeln!(sink, "{},{:.6},{:.6},{:.6},{}", b.dist, b.mean_lower(), b.mean_upper(), b.mean_width(), b.pairs)?;
        }
        sink.flush()?;
        Ok(())
    }
}

pub fn range_width_report(oracle: &RangeOracle, pairs: &PairSample) -> Result<RangeReport> {
    let n = oracle.n();
    for p in &pairs.pairs {
        for v in [p.x, p.y] {
            if v as usize >= n {
                return Err(Error::NodeOutOfRange { node: v as u64, n });
            }
        }
    }
    let ranges: Vec<DistanceRange> = pairs.pairs.par_iter().map(|p| oracle.range_query(p.x, p.y)).collect();

    let mut buckets: BTreeMap<u32, RangeBucket> = BTreeMap::new();
    let mut report = RangeReport {
        buckets: Vec::new(),
        pairs: pairs.len() as u64,
        containment_failures: 0,
        width_violations: 0,
        max_width: 0,
        delta: oracle.delta,
        additive: oracle.additive,
    };
    for (p, r) in pairs.pairs.iter().zip(&ranges) {
        let b = buckets.entry(p.dist).or_insert_with(|| RangeBucket { dist: p.dist, ..RangeBucket::default() });
        b.pairs += 1;
        b.sum_lower += r.lower;
        b.sum_upper += r.upper;
        b.sum_width += r.width();
        if !r.contains(p.dist as u64) {
            report.containment_failures += 1;
        }
        if r.width() > oracle.additive as i64 {
            report.width_violations += 1;
        }
        report.max_width = report.max_width.max(r.width());
    }
    report.buckets = buckets.into_values().collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_all_pairs, SampledPair};
    use crate::graph::{flat_grid, Graph};
    use crate::tree::Expansion;

    fn oracle(g: &Graph, roots_h: &[NodeId], roots_g: &[NodeId], delta: HalfHops) -> RangeOracle {
        let h = TreeOracle::from_roots(g, TreeKind::HyperBfs, roots_h, Expansion::default()).unwrap();
        let gr = TreeOracle::from_roots(g, TreeKind::Gromov, roots_g, Expansion::default()).unwrap();
        RangeOracle::new(h, gr, delta, LogBase::Two).unwrap()
    }

    #[test]
    fn additive_term_rounds_up_once() {
        assert_eq!(additive_term(HalfHops::from_hops(1), 1024, LogBase::Two), 20);
        assert_eq!(additive_term(HalfHops::from_doubled(1), 1000, LogBase::Two), 10);
        assert_eq!(additive_term(HalfHops::ZERO, 1000, LogBase::Two), 0);
        assert_eq!(additive_term(HalfHops::from_hops(1), 100, LogBase::Natural), 10);
    }

    #[test]
    fn shared_root_gives_zero_width() {
        let g = flat_grid(6).unwrap();
        let o = oracle(&g, &[14], &[14], HalfHops::from_hops(3));
        let d = exact_all_pairs(&g, 100).unwrap();
        for y in g.nodes() {
            let r = o.range_query(14, y);
            assert_eq!((r.lower, r.upper), (d.get(14, y) as u64, d.get(14, y) as u64));
        }
        assert_eq!(o.range_query(5, 5), DistanceRange { lower: 0, upper: 0 });
    }

    #[test]
    fn zero_delta_understates_the_upper_bound_on_a_triangle() {
        // a triangle is 0-hyperbolic, yet its Gromov tree contracts the two
        // non-root nodes, so d_GT + 0 falls below d_G
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap().0;
        let o = oracle(&g, &[0], &[0], HalfHops::ZERO);
        let r = o.range_query(1, 2);
        assert_eq!((r.lower, r.upper), (0, 0));
        assert!(!r.contains(1));
    }

    #[test]
    fn report_buckets_and_csv() {
        let g = flat_grid(4).unwrap();
        let o = oracle(&g, &[5, 10], &[5, 10, 0], HalfHops::from_hops(2));
        let pairs = PairSample {
            pairs: vec![
                SampledPair { x: 0, y: 1, dist: 1 },
                SampledPair { x: 0, y: 15, dist: 6 },
                SampledPair { x: 3, y: 12, dist: 6 },
            ],
            seed: 0,
        };
        let rep = range_width_report(&o, &pairs).unwrap();
        assert_eq!(rep.buckets.iter().map(|b| (b.dist, b.pairs)).collect::<Vec<_>>(), vec![(1, 1), (6, 2)]);
        assert_eq!(rep.containment_failures, 0);
        assert_eq!(rep.width_violations, 0);
        let mut out = Vec::new();
        rep.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("dG,mean_lower,mean_upper,mean_width,pairs\n1,"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn kinds_are_checked() {
        let g = flat_grid(3).unwrap();
        let h = TreeOracle::from_roots(&g, TreeKind::HyperBfs, &[0], Expansion::default()).unwrap();
        assert!(RangeOracle::new(h.clone(), h, HalfHops::ZERO, LogBase::Two).is_err());
    }
}
