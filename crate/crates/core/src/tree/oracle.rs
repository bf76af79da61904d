use std::fmt;
use std::io::{BufReader, BufWriter, Read, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::{
    build_gromov_tree, build_hyper_bfs, build_steiner_tree, degree_ordering, increasing_degree_ordering, select_roots,
    ContractionTree, RootStrategy, SpanningTree, SteinerTree,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::half::HalfHops;

/// Trees per oracle unless configured otherwise.
pub const DEFAULT_TREE_COUNT: usize = 10;

const ORACLE_MAGIC: &[u8; 4] = b"HOTR";
const ORACLE_VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeKind {
    HyperBfs,
    Gromov,
    Steiner,
}

impl TreeKind {
    fn code(self) -> u8 {
        match self {
            TreeKind::HyperBfs => 0,
            TreeKind::Gromov => 1,
            TreeKind::Steiner => 2,
        }
    }

    fn from_code(code: u8) -> Result<TreeKind> {
        match code {
            0 => Ok(TreeKind::HyperBfs),
            1 => Ok(TreeKind::Gromov),
            2 => Ok(TreeKind::Steiner),
            other => Err(Error::Format(format!("unknown tree kind {other}"))),
        }
    }
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeKind::HyperBfs => "hyperbfs",
            TreeKind::Gromov => "gromov",
            TreeKind::Steiner => "steiner",
        })
    }
}

impl FromStr for TreeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperbfs" => Ok(TreeKind::HyperBfs),
            "gromov" => Ok(TreeKind::Gromov),
            "steiner" => Ok(TreeKind::Steiner),
            other => Err(Error::InvalidArgument(format!("unknown tree kind {other:?}"))),
        }
    }
}

/// Expansion order among siblings of a Hyper BFS tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Expansion {
    #[default]
    DegreeDescending,
    /// Reverse order, for the expansion-order ablation.
    DegreeAscending,
}

impl FromStr for Expansion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dec" | "degree" => Ok(Expansion::DegreeDescending),
            "inc" => Ok(Expansion::DegreeAscending),
            other => Err(Error::InvalidArgument(format!("unknown expansion order {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub kind: TreeKind,
    pub k: usize,
    pub strategy: RootStrategy,
    pub expansion: Expansion,
    pub seed: u64,
}

impl OracleConfig {
    pub fn new(kind: TreeKind) -> Self {
        OracleConfig {
            kind,
            k: DEFAULT_TREE_COUNT,
            strategy: RootStrategy::Degree,
            expansion: Expansion::DegreeDescending,
            seed: 0,
        }
    }
}

/// How an oracle was built. Not persisted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildMeta {
    pub strategy: RootStrategy,
    pub expansion: Expansion,
    pub seed: u64,
    pub build_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trees {
    HyperBfs(Vec<SpanningTree>),
    Gromov(Vec<ContractionTree>),
    Steiner(Vec<SteinerTree>),
}

/// A collection of trees with distinct roots answering distance queries.
///
/// Hyper BFS and Steiner oracles answer with the minimum over their trees;
/// Gromov oracles with the maximum, since every contraction tree is a lower
/// bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeOracle {
    n: usize,
    trees: Trees,
    meta: Option<BuildMeta>,
}

impl TreeOracle {
    /// Selects roots with `config.strategy` and builds one tree per root, in parallel.
    pub fn build(g: &Graph, config: &OracleConfig) -> Result<TreeOracle> {
        let started = Instant::now();
        let roots = select_roots(g, config.strategy, config.k, config.seed)?;
        let mut oracle = TreeOracle::from_roots(g, config.kind, &roots, config.expansion)?;
        oracle.meta = Some(BuildMeta {
            strategy: config.strategy,
            expansion: config.expansion,
            seed: config.seed,
            build_time: started.elapsed(),
        });
        Ok(oracle)
    }

    pub fn from_roots(g: &Graph, kind: TreeKind, roots: &[NodeId], expansion: Expansion) -> Result<TreeOracle> {
        if roots.is_empty() {
            return Err(Error::InvalidArgument("an oracle needs at least one tree".into()));
        }
        let mut seen = vec![false; g.n()];
        for &r in roots {
            g.check_node(r)?;
            if std::mem::replace(&mut seen[r as usize], true) {
                return Err(Error::InvalidArgument(format!("root {r} given twice")));
            }
        }
        let trees = match kind {
            TreeKind::HyperBfs => {
                let order = match expansion {
                    Expansion::DegreeDescending => degree_ordering(g),
                    Expansion::DegreeAscending => increasing_degree_ordering(g),
                };
                Trees::HyperBfs(roots.par_iter().map(|&r| build_hyper_bfs(g, &order, Some(r))).collect::<Result<_>>()?)
            }
            TreeKind::Gromov => {
                Trees::Gromov(roots.par_iter().map(|&r| build_gromov_tree(g, r)).collect::<Result<_>>()?)
            }
            TreeKind::Steiner => {
                Trees::Steiner(roots.par_iter().map(|&r| build_steiner_tree(g, r)).collect::<Result<_>>()?)
            }
        };
        Ok(TreeOracle { n: g.n(), trees, meta: None })
    }

    pub fn kind(&self) -> TreeKind {
        match self.trees {
            Trees::HyperBfs(_) => TreeKind::HyperBfs,
            Trees::Gromov(_) => TreeKind::Gromov,
            Trees::Steiner(_) => TreeKind::Steiner,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        match &self.trees {
            Trees::HyperBfs(t) => t.len(),
            Trees::Gromov(t) => t.len(),
            Trees::Steiner(t) => t.len(),
        }
    }

    pub fn trees(&self) -> &Trees {
        &self.trees
    }

    pub fn meta(&self) -> Option<&BuildMeta> {
        self.meta.as_ref()
    }

    pub fn roots(&self) -> Vec<NodeId> {
        match &self.trees {
            Trees::HyperBfs(t) => t.iter().map(SpanningTree::root).collect(),
            Trees::Gromov(t) => t.iter().map(ContractionTree::root).collect(),
            Trees::Steiner(t) => t.iter().map(SteinerTree::root).collect(),
        }
    }

    /// The same oracle restricted to its first `k` trees.
    pub fn truncated(&self, k: usize) -> Result<TreeOracle> {
        if k == 0 || k > self.k() {
            return Err(Error::InvalidArgument(format!("cannot keep {k} of {} trees", self.k())));
        }
        let trees = match &self.trees {
            Trees::HyperBfs(t) => Trees::HyperBfs(t[..k].to_vec()),
            Trees::Gromov(t) => Trees::Gromov(t[..k].to_vec()),
            Trees::Steiner(t) => Trees::Steiner(t[..k].to_vec()),
        };
        Ok(TreeOracle { n: self.n, trees, meta: self.meta.clone() })
    }

    /// Distance estimate between two nodes (both must be `< n`).
    pub fn query(&self, x: NodeId, y: NodeId) -> HalfHops {
        match &self.trees {
            Trees::HyperBfs(t) => HalfHops::from_hops(t.iter().map(|t| t.distance(x, y)).min().unwrap_or(0) as u64),
            Trees::Gromov(t) => HalfHops::from_hops(t.iter().map(|t| t.distance(x, y)).max().unwrap_or(0) as u64),
            Trees::Steiner(t) => t.iter().map(|t| t.distance(x, y)).min().unwrap_or(HalfHops::ZERO),
        }
    }

    /// Like [`query`](Self::query) but checks node ids.
    pub fn checked_query(&self, x: NodeId, y: NodeId) -> Result<HalfHops> {
        for v in [x, y] {
            if v as usize >= self.n {
                return Err(Error::NodeOutOfRange { node: v as u64, n: self.n });
            }
        }
        Ok(self.query(x, y))
    }

    /// Smallest and largest per-tree distance.
    pub fn min_max(&self, x: NodeId, y: NodeId) -> (HalfHops, HalfHops) {
        fn fold(it: impl Iterator<Item = HalfHops>) -> (HalfHops, HalfHops) {
            it.fold((HalfHops::from_doubled(u64::MAX), HalfHops::ZERO), |(lo, hi), d| (lo.min(d), hi.max(d)))
        }
        match &self.trees {
            Trees::HyperBfs(t) => fold(t.iter().map(|t| HalfHops::from_hops(t.distance(x, y) as u64))),
            Trees::Gromov(t) => fold(t.iter().map(|t| HalfHops::from_hops(t.distance(x, y) as u64))),
            Trees::Steiner(t) => fold(t.iter().map(|t| t.distance(x, y))),
        }
    }

    /// Per-tree distances in tree order.
    pub fn tree_distances(&self, x: NodeId, y: NodeId) -> Vec<HalfHops> {
        match &self.trees {
            Trees::HyperBfs(t) => t.iter().map(|t| HalfHops::from_hops(t.distance(x, y) as u64)).collect(),
            Trees::Gromov(t) => t.iter().map(|t| HalfHops::from_hops(t.distance(x, y) as u64)).collect(),
            Trees::Steiner(t) => t.iter().map(|t| t.distance(x, y)).collect(),
        }
    }

    /// Writes the little-endian binary form:
    ///
    /// ```text
    /// "HOTR" | version u8 | kind u8 | k u32 | n u32
    /// per tree, Hyper BFS: root | parent[n] | depth[n]
    /// per tree, Gromov:    root | S | supernode_of[n] | parent[S] | depth[S]
    /// per tree, Steiner:   root | N | parent[N] | depth[N] | weight[N] (u8, half hops, 0 at the root)
    /// ```
    ///
    /// All integers are u32 unless noted. Build metadata is not stored.
    pub fn save<W: Write>(&self, sink: W) -> Result<()> {
        let mut out = BufWriter::new(sink);
        out.write_all(ORACLE_MAGIC)?;
        out.write_all(&[ORACLE_VERSION, self.kind().code()])?;
        write_u32(&mut out, self.k() as u32)?;
        write_u32(&mut out, self.n as u32)?;
        match &self.trees {
            Trees::HyperBfs(ts) => {
                for t in ts {
                    write_u32(&mut out, t.root())?;
                    write_u32s(&mut out, t.parents())?;
                    write_u32s(&mut out, t.depths())?;
                }
            }
            Trees::Gromov(ts) => {
                for t in ts {
                    write_u32(&mut out, t.root())?;
                    write_u32(&mut out, t.supernode_count() as u32)?;
                    write_u32s(&mut out, t.supernodes())?;
                    write_u32s(&mut out, t.tree().parents())?;
                    write_u32s(&mut out, t.tree().depths())?;
                }
            }
            Trees::Steiner(ts) => {
                for t in ts {
                    write_u32(&mut out, t.root())?;
                    write_u32(&mut out, t.tree().len() as u32)?;
                    write_u32s(&mut out, t.tree().parents())?;
                    write_u32s(&mut out, t.tree().depths())?;
                    out.write_all(t.weights())?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn load<R: Read>(source: R) -> Result<TreeOracle> {
        let mut src = BufReader::new(source);
        let header = read_bytes(&mut src, 6, "header")?;
        if &header[..4] != ORACLE_MAGIC {
            return Err(Error::Format("not an oracle file (bad magic)".into()));
        }
        if header[4] != ORACLE_VERSION {
            return Err(Error::Format(format!("unsupported oracle version {}", header[4])));
        }
        let kind = TreeKind::from_code(header[5])?;
        let k = read_u32(&mut src)? as usize;
        let n = read_u32(&mut src)? as usize;
        if k == 0 {
            return Err(Error::Format("oracle holds no trees".into()));
        }
        let trees = match kind {
            TreeKind::HyperBfs => {
                let mut ts = Vec::with_capacity(k.min(1024));
                for _ in 0..k {
                    let root = read_u32(&mut src)?;
                    let parent = read_u32s(&mut src, n)?;
                    let depth = read_u32s(&mut src, n)?;
                    ts.push(SpanningTree::from_parts(root, parent, depth)?);
                }
                Trees::HyperBfs(ts)
            }
            TreeKind::Gromov => {
                let mut ts = Vec::with_capacity(k.min(1024));
                for _ in 0..k {
                    let root = read_u32(&mut src)?;
                    let s = read_u32(&mut src)? as usize;
                    let supernode_of = read_u32s(&mut src, n)?;
                    let parent = read_u32s(&mut src, s)?;
                    let depth = read_u32s(&mut src, s)?;
                    let root_super = *supernode_of
                        .get(root as usize)
                        .ok_or_else(|| Error::Format(format!("root {root} out of range")))?;
                    let tree = SpanningTree::from_parts(root_super, parent, depth)?;
                    ts.push(ContractionTree::from_parts(root, supernode_of, tree)?);
                }
                Trees::Gromov(ts)
            }
            TreeKind::Steiner => {
                let mut ts = Vec::with_capacity(k.min(1024));
                for _ in 0..k {
                    let root = read_u32(&mut src)?;
                    let total = read_u32(&mut src)? as usize;
                    let parent = read_u32s(&mut src, total)?;
                    let depth = read_u32s(&mut src, total)?;
                    let weight = read_bytes(&mut src, total, "weights")?;
                    let tree = SpanningTree::from_parts(root, parent, depth)?;
                    ts.push(SteinerTree::from_parts(n, tree, weight)?);
                }
                Trees::Steiner(ts)
            }
        };
        let mut trailing = [0u8; 1];
        if src.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after last tree".into()));
        }
        let oracle = TreeOracle { n, trees, meta: None };
        let mut roots = oracle.roots();
        roots.sort_unstable();
        if roots.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Format("duplicate tree roots".into()));
        }
        Ok(oracle)
    }
}

fn write_u32<W: Write>(out: &mut W, v: u32) -> Result<()> {
    out.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_u32s<W: Write>(out: &mut W, vs: &[u32]) -> Result<()> {
    for &v in vs {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_bytes<R: Read>(src: &mut R, len: usize, what: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    src.take(len as u64).read_to_end(&mut buf)?;
    if buf.len() != len {
        return Err(Error::Format(format!("truncated {what}")));
    }
    Ok(buf)
}

fn read_u32<R: Read>(src: &mut R) -> Result<u32> {
    let b = read_bytes(src, 4, "integer")?;
    Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
}

fn read_u32s<R: Read>(src: &mut R, count: usize) -> Result<Vec<u32>> {
    let bytes = read_bytes(src, count * 4, "array")?;
    Ok(bytes.chunks_exact(4).map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect())
}
