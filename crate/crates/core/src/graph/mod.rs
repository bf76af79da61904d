//! Immutable undirected hop-metric graphs in compressed adjacency form.

mod generate;
mod io;

use std::fmt;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};

pub use generate::{flat_grid, hyper_grid};
pub use io::{
    load_edge_list, read_binary, read_graph_file, write_binary, write_edge_list, LoadOptions, LoadedGraph,
    NormalizationReport, Relabel,
};

/// Dense node index in `[0, n)`.
pub type NodeId = u32;

/// Undirected graph with sorted, symmetric, loop-free adjacency slices.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<u64>,
    neighbors: Vec<NodeId>,
}

impl Graph {
    /// Builds a normalized graph over `n` nodes. Self-loops and repeated edges
    /// are dropped; both orientations of an edge collapse to one edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<(Graph, NormalizationReport)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if n > NodeId::MAX as usize {
            return Err(Error::CapExceeded { what: "node count", value: n, cap: NodeId::MAX as usize });
        }
        let mut report = NormalizationReport::default();
        let mut arcs: Vec<(NodeId, NodeId)> = Vec::new();
        let mut raw = 0usize;
        for (u, v) in edges {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(Error::NodeOutOfRange { node: x as u64, n });
                }
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            raw += 1;
            arcs.push((u, v));
            arcs.push((v, u));
        }
        arcs.sort_unstable();
        arcs.dedup();
        report.duplicate_edges = raw - arcs.len() / 2;

        let mut offsets = vec![0u64; n + 1];
        for &(u, _) in &arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = arcs.into_iter().map(|(_, v)| v).collect();
        Ok((Graph { offsets, neighbors }, report))
    }

    /// Wraps raw arrays after checking every structural invariant.
    pub fn from_csr(offsets: Vec<u64>, neighbors: Vec<NodeId>) -> Result<Graph> {
        let g = Graph { offsets, neighbors };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Format(msg));
        if self.offsets.is_empty() || self.offsets[0] != 0 {
            return bad("offsets must start at 0".into());
        }
        if *self.offsets.last().unwrap() != self.neighbors.len() as u64 {
            return bad("last offset must equal neighbor array length".into());
        }
        if !self.neighbors.len().is_multiple_of(2) {
            return bad("neighbor array length must be even".into());
        }
        let n = self.n();
        for u in 0..n {
            if self.offsets[u] > self.offsets[u + 1] {
                return bad(format!("offsets decrease at node {u}"));
            }
        }
        for u in 0..n as NodeId {
            let adj = self.neighbors(u);
            for (i, &v) in adj.iter().enumerate() {
                if v as usize >= n {
                    return bad(format!("neighbor {v} of node {u} out of range"));
                }
                if v == u {
                    return bad(format!("self-loop at node {u}"));
                }
                if i > 0 && adj[i - 1] >= v {
                    return bad(format!("adjacency of node {u} not strictly ascending"));
                }
                if self.neighbors(v).binary_search(&u).is_err() {
                    return bad(format!("edge {u}-{v} missing its reverse"));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let lo = self.offsets[v as usize] as usize;
        let hi = self.offsets[v as usize + 1] as usize;
        &self.neighbors[lo..hi]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn neighbor_array(&self) -> &[NodeId] {
        &self.neighbors
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.n() as NodeId
    }

    /// Every undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| self.neighbors(u).iter().copied().filter(move |&v| u < v).map(move |v| (u, v)))
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.n() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: v as u64, n: self.n() })
        }
    }

    /// Connected component label per node; labels are the smallest node id of
    /// each component.
    pub fn component_labels(&self) -> Vec<NodeId> {
        let mut sets = DisjointSets::new(self.n());
        for (u, v) in self.edges() {
            sets.union(u, v);
        }
        let mut label = vec![NodeId::MAX; self.n()];
        let mut labels = vec![0; self.n()];
        for v in self.nodes() {
            let r = sets.find(v) as usize;
            if label[r] == NodeId::MAX {
                label[r] = v;
            }
            labels[v as usize] = label[r];
        }
        labels
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels().iter().all(|&c| c == 0)
    }

    /// Subgraph induced on `nodes`, which must be strictly ascending. Node `i`
    /// of the result is `nodes[i]`.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Graph {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let mut new_id = vec![NodeId::MAX; self.n()];
        for (i, &v) in nodes.iter().enumerate() {
            new_id[v as usize] = i as NodeId;
        }
        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for &v in nodes {
            // ascending old ids map to ascending new ids, so slices stay sorted
            neighbors.extend(self.neighbors(v).iter().map(|&w| new_id[w as usize]).filter(|&w| w != NodeId::MAX));
            offsets.push(neighbors.len() as u64);
        }
        Graph { offsets, neighbors }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n()).field("m", &self.m()).finish()
    }
}

/// Induced subgraph on the largest connected component, plus the old id of
/// every new node. Equal-size components resolve to the one holding the
/// smallest id.
pub fn largest_component(g: &Graph) -> (Graph, Vec<NodeId>) {
    let labels = g.component_labels();
    let mut sizes = vec![0usize; g.n()];
    for &l in &labels {
        sizes[l as usize] += 1;
    }
    let mut best = 0;
    for (label, &size) in sizes.iter().enumerate() {
        if size > sizes[best] {
            best = label;
        }
    }
    let keep: Vec<NodeId> = g.nodes().filter(|&v| labels[v as usize] as usize == best).collect();
    if keep.len() == g.n() {
        return (g.clone(), keep);
    }
    (g.induced_subgraph(&keep), keep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub max_degree_node: NodeId,
}

impl GraphStats {
    pub fn of(g: &Graph) -> GraphStats {
        let mut max_degree = 0;
        let mut max_degree_node = 0;
        for v in g.nodes() {
            if g.degree(v) > max_degree {
                max_degree = g.degree(v);
                max_degree_node = v;
            }
        }
        let avg_degree = if g.n() == 0 { 0.0 } else { 2.0 * g.m() as f64 / g.n() as f64 };
        GraphStats { n: g.n(), m: g.m(), avg_degree, max_degree, max_degree_node }
    }
}

impl fmt::Display for GraphStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} m={} avg_degree={:.2} max_degree={} max_degree_node={}",
            self.n, self.m, self.avg_degree, self.max_degree, self.max_degree_node
        )
    }
}
