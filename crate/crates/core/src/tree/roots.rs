use std::fmt;
use std::str::FromStr;

use log::warn;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::degree_ordering;
use crate::error::{Error, Result};
use crate::exact::{bfs_fill, UNREACHED};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootStrategy {
    /// Highest degree first.
    Degree,
    /// Midpoints of double-sweep diametral paths from random starts.
    Closeness,
    /// Random, farthest from it, one closeness root, then highest degree.
    Diverse,
    /// Uniform without replacement.
    Random,
}

impl RootStrategy {
    pub fn code(self) -> u8 {
        match self {
            RootStrategy::Degree => 0,
            RootStrategy::Closeness => 1,
            RootStrategy::Diverse => 2,
            RootStrategy::Random => 3,
        }
    }
}

impl fmt::Display for RootStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootStrategy::Degree => "degree",
            RootStrategy::Closeness => "closeness",
            RootStrategy::Diverse => "diverse",
            RootStrategy::Random => "random",
        })
    }
}

impl FromStr for RootStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree" => Ok(RootStrategy::Degree),
            "closeness" => Ok(RootStrategy::Closeness),
            "diverse" => Ok(RootStrategy::Diverse),
            "random" => Ok(RootStrategy::Random),
            other => Err(Error::InvalidArgument(format!("unknown root strategy {other:?}"))),
        }
    }
}

struct Sweeper<'g> {
    g: &'g Graph,
    dist: Vec<u32>,
    queue: Vec<NodeId>,
}

impl<'g> Sweeper<'g> {
    fn new(g: &'g Graph) -> Self {
        Sweeper { g, dist: vec![UNREACHED; g.n()], queue: Vec::with_capacity(g.n()) }
    }

    /// Farthest node from `src` (smallest id among ties) and its distance.
    fn farthest(&mut self, src: NodeId) -> (NodeId, u32) {
        bfs_fill(self.g, src, &mut self.dist, &mut self.queue);
        let mut best = (src, 0);
        for (v, &d) in self.dist.iter().enumerate() {
            if d != UNREACHED && d > best.1 {
                best = (v as NodeId, d);
            }
        }
        best
    }

    fn closeness_from(&mut self, u: NodeId) -> NodeId {
        let (m_u, _) = self.farthest(u);
        let (far, d) = self.farthest(m_u);
        // walk toward `far` using distances measured from it
        bfs_fill(self.g, far, &mut self.dist, &mut self.queue);
        let mut cur = m_u;
        for _ in 0..d / 2 {
            let here = self.dist[cur as usize];
            cur = *self
                .g
                .neighbors(cur)
                .iter()
                .find(|&&w| self.dist[w as usize] + 1 == here)
                .expect("a shortest-path neighbor exists");
        }
        cur
    }
}

/// Approximate closeness center: random `u`, farthest `m_u` from it, farthest
/// `m'` from `m_u`, then the node `⌊d/2⌋` steps from `m_u` along a shortest
/// path to `m'` (always stepping to the smallest-id neighbor closer to `m'`).
pub fn closeness_root(g: &Graph, seed: u64) -> Result<NodeId> {
    if g.n() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = rng.gen_range(0..g.n()) as NodeId;
    Ok(Sweeper::new(g).closeness_from(u))
}

/// `k` distinct roots chosen by `strategy`, deterministic in `seed`.
pub fn select_roots(g: &Graph, strategy: RootStrategy, k: usize, seed: u64) -> Result<Vec<NodeId>> {
    let n = g.n();
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one root".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("{k} roots requested from {n} nodes")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = Picked::new(n, k);
    match strategy {
        RootStrategy::Degree => {}
        RootStrategy::Random => {
            for v in index::sample(&mut rng, n, k) {
                picked.push(v as NodeId);
            }
        }
        RootStrategy::Closeness => {
            let mut sweeper = Sweeper::new(g);
            let max_attempts = 4 * k + 16;
            let mut attempts = 0;
            while !picked.full() && attempts < max_attempts {
                let u = rng.gen_range(0..n) as NodeId;
                picked.push(sweeper.closeness_from(u));
                attempts += 1;
            }
            if !picked.full() {
                warn!(
                    "closeness sweeps found only {} distinct roots in {attempts} attempts; padding by degree",
                    picked.len()
                );
            }
        }
        RootStrategy::Diverse => {
            let mut sweeper = Sweeper::new(g);
            let first = rng.gen_range(0..n) as NodeId;
            picked.push(first);
            if !picked.full() {
                picked.push(sweeper.farthest(first).0);
            }
            if !picked.full() {
                let u = rng.gen_range(0..n) as NodeId;
                picked.push(sweeper.closeness_from(u));
            }
        }
    }
    if !picked.full() {
        for &v in degree_ordering(g).order() {
            if picked.full() {
                break;
            }
            picked.push(v);
        }
    }
    Ok(picked.roots)
}

struct Picked {
    roots: Vec<NodeId>,
    seen: Vec<bool>,
    k: usize,
}

impl Picked {
    fn new(n: usize, k: usize) -> Self {
        Picked { roots: Vec::with_capacity(k), seen: vec![false; n], k }
    }

    fn push(&mut self, v: NodeId) {
        if !self.full() && !self.seen[v as usize] {
            self.seen[v as usize] = true;
            self.roots.push(v);
        }
    }

    fn full(&self) -> bool {
        self.roots.len() == self.k
    }

    fn len(&self) -> usize {
        self.roots.len()
    }
}
