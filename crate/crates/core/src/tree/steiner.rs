use super::{Levels, SpanningTree};
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::half::HalfHops;

/// Tree over the original nodes plus one Steiner point per connected
/// component of every BFS level's induced subgraph.
///
/// Ids `0..n` are the original nodes and `n..` the Steiner points. Edge
/// weights are kept in half hops; `weight[v]` is the weight of the edge from
/// `v` to its parent (0 at the root).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerTree {
    original: usize,
    tree: SpanningTree,
    weight: Vec<u8>,
}

impl SteinerTree {
    pub(crate) fn from_parts(original: usize, tree: SpanningTree, weight: Vec<u8>) -> Result<SteinerTree> {
        if weight.len() != tree.len() {
            return Err(Error::Format("weight array length differs from node count".into()));
        }
        if original > tree.len() || tree.root() as usize >= original {
            return Err(Error::Format("Steiner tree root must be an original node".into()));
        }
        let root = tree.root() as usize;
        if weight.iter().enumerate().any(|(v, &w)| (w == 0) != (v == root)) {
            return Err(Error::Format("edge weights must be positive below the root".into()));
        }
        Ok(SteinerTree { original, tree, weight })
    }

    pub fn root(&self) -> NodeId {
        self.tree.root()
    }

    pub fn original_count(&self) -> usize {
        self.original
    }

    pub fn steiner_count(&self) -> usize {
        self.tree.len() - self.original
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn weights(&self) -> &[u8] {
        &self.weight
    }

    /// Weighted tree distance; half-integral in general, integral between
    /// original nodes.
    pub fn distance(&self, x: NodeId, y: NodeId) -> HalfHops {
        let t = &self.tree;
        let (mut a, mut b) = (x, y);
        let mut doubled = 0u64;
        while t.depth(a) > t.depth(b) {
            doubled += self.weight[a as usize] as u64;
            a = t.parent(a);
        }
        while t.depth(b) > t.depth(a) {
            doubled += self.weight[b as usize] as u64;
            b = t.parent(b);
        }
        while a != b {
            doubled += self.weight[a as usize] as u64 + self.weight[b as usize] as u64;
            a = t.parent(a);
            b = t.parent(b);
        }
        HalfHops::from_doubled(doubled)
    }
}

/// Builds the Steiner tree rooted at `root`.
///
/// For each level `i > 0`, every connected component `C` of the subgraph
/// induced on that level gets a Steiner point joined to each member and to
/// the smallest-id node of level `i - 1` adjacent to some member, all with
/// weight 1/2.
pub fn build_steiner_tree(g: &Graph, root: NodeId) -> Result<SteinerTree> {
    let levels = Levels::from_root(g, root)?;
    let n = g.n();
    let level_of = |v: NodeId| levels.dist[v as usize] as usize;

    let mut sets = DisjointSets::new(n);
    for (u, v) in g.edges() {
        if level_of(u) == level_of(v) {
            sets.union(u, v);
        }
    }

    let mut parent: Vec<NodeId> = vec![NodeId::MAX; n];
    let mut depth: Vec<u32> = vec![0; n];
    parent[root as usize] = root;
    let mut steiner_of_class = vec![NodeId::MAX; n];
    for i in 1..=levels.deepest() {
        for &u in levels.level(i) {
            let class = sets.find(u) as usize;
            if steiner_of_class[class] == NodeId::MAX {
                steiner_of_class[class] = parent.len() as NodeId;
                parent.push(NodeId::MAX);
                depth.push(2 * i as u32 - 1);
            }
            let s = steiner_of_class[class];
            parent[u as usize] = s;
            depth[u as usize] = 2 * i as u32;
            if let Some(&w) = g.neighbors(u).iter().find(|&&w| level_of(w) + 1 == i) {
                let slot = &mut parent[s as usize];
                *slot = (*slot).min(w);
            }
        }
    }
    let mut weight = vec![1u8; parent.len()];
    weight[root as usize] = 0;
    let tree = SpanningTree { root, parent, depth };
    Ok(SteinerTree { original: n, tree, weight })
}
