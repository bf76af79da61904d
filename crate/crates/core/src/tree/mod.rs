//! Tree approximations of a graph and distance queries against them.

mod gromov;
mod hyper_bfs;
mod oracle;
mod roots;
mod steiner;

use crate::error::{Error, Result};
use crate::exact::{bfs_fill, UNREACHED};
use crate::graph::{Graph, NodeId};

pub use gromov::{build_gromov_tree, ContractionTree};
pub use hyper_bfs::build_hyper_bfs;
pub use oracle::{BuildMeta, Expansion, OracleConfig, TreeKind, TreeOracle, Trees, DEFAULT_TREE_COUNT};
pub use roots::{closeness_root, select_roots, RootStrategy};
pub use steiner::{build_steiner_tree, SteinerTree};

/// Rooted tree stored as parent and depth arrays.
///
/// `parent[root] == root`; every other node's depth is its parent's plus one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    root: NodeId,
    parent: Vec<NodeId>,
    depth: Vec<u32>,
}

impl SpanningTree {
    /// Checks the parent/depth invariants, which also rules out cycles.
    pub fn from_parts(root: NodeId, parent: Vec<NodeId>, depth: Vec<u32>) -> Result<SpanningTree> {
        let len = parent.len();
        let bad = |msg: String| Err(Error::Format(msg));
        if depth.len() != len {
            return bad(format!("parent has {len} entries but depth has {}", depth.len()));
        }
        if root as usize >= len {
            return bad(format!("root {root} outside tree of {len} nodes"));
        }
        if parent[root as usize] != root || depth[root as usize] != 0 {
            return bad("root must be its own parent at depth 0".into());
        }
        for v in 0..len {
            if v == root as usize {
                continue;
            }
            let p = parent[v] as usize;
            if p >= len {
                return bad(format!("parent {p} of node {v} out of range"));
            }
            if depth[v] == 0 || depth[v] != depth[p].wrapping_add(1) {
                return bad(format!("depth of node {v} inconsistent with its parent"));
            }
        }
        Ok(SpanningTree { root, parent, depth })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    #[inline]
    pub fn parent(&self, v: NodeId) -> NodeId {
        self.parent[v as usize]
    }

    #[inline]
    pub fn depth(&self, v: NodeId) -> u32 {
        self.depth[v as usize]
    }

    pub fn parents(&self) -> &[NodeId] {
        &self.parent
    }

    pub fn depths(&self) -> &[u32] {
        &self.depth
    }

    pub fn height(&self) -> u32 {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Lowest common ancestor by lifting the deeper node, then walking both
    /// up in lockstep. O(height).
    pub fn lca(&self, x: NodeId, y: NodeId) -> NodeId {
        let (mut a, mut b) = (x, y);
        let (mut da, mut db) = (self.depth(a), self.depth(b));
        while da > db {
            a = self.parent(a);
            da -= 1;
        }
        while db > da {
            b = self.parent(b);
            db -= 1;
        }
        while a != b {
            a = self.parent(a);
            b = self.parent(b);
        }
        a
    }

    /// Hop distance between two nodes along the tree.
    pub fn distance(&self, x: NodeId, y: NodeId) -> u32 {
        self.depth(x) + self.depth(y) - 2 * self.depth(self.lca(x, y))
    }
}

/// Hop distance in `t` between `x` and `y`.
pub fn tree_distance(t: &SpanningTree, x: NodeId, y: NodeId) -> u32 {
    t.distance(x, y)
}

/// Priority order over nodes; rank 0 is expanded first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOrdering {
    rank: Vec<u32>,
    order: Vec<NodeId>,
}

impl VertexOrdering {
    /// `order[i]` is the node with rank `i`; must be a permutation of `0..n`.
    pub fn from_order(order: Vec<NodeId>) -> Result<VertexOrdering> {
        let mut rank = vec![u32::MAX; order.len()];
        for (i, &v) in order.iter().enumerate() {
            match rank.get_mut(v as usize) {
                Some(r) if *r == u32::MAX => *r = i as u32,
                _ => return Err(Error::InvalidArgument(format!("ordering is not a permutation at {v}"))),
            }
        }
        Ok(VertexOrdering { rank, order })
    }

    #[inline]
    pub fn rank(&self, v: NodeId) -> u32 {
        self.rank[v as usize]
    }

    pub fn first(&self) -> Option<NodeId> {
        self.order.first().copied()
    }

    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Degree descending, ties by ascending id.
pub fn degree_ordering(g: &Graph) -> VertexOrdering {
    let mut order: Vec<NodeId> = g.nodes().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    VertexOrdering::from_order(order).expect("sorted node list is a permutation")
}

/// Degree ascending, ties by ascending id. Used for the expansion-order ablation.
pub fn increasing_degree_ordering(g: &Graph) -> VertexOrdering {
    let mut order: Vec<NodeId> = g.nodes().collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    VertexOrdering::from_order(order).expect("sorted node list is a permutation")
}

/// BFS levels from a root: `nodes[start[i]..start[i + 1]]` are the nodes at
/// distance `i`, ascending by id.
pub(crate) struct Levels {
    pub dist: Vec<u32>,
    pub nodes: Vec<NodeId>,
    pub start: Vec<usize>,
}

impl Levels {
    pub fn from_root(g: &Graph, root: NodeId) -> Result<Levels> {
        g.check_node(root)?;
        let n = g.n();
        let mut dist = vec![UNREACHED; n];
        let reached = bfs_fill(g, root, &mut dist, &mut Vec::with_capacity(n));
        if reached != n {
            return Err(Error::Disconnected { root, reached, n });
        }
        let depth = dist.iter().copied().max().unwrap_or(0) as usize;
        let mut start = vec![0usize; depth + 2];
        for &d in &dist {
            start[d as usize + 1] += 1;
        }
        for i in 0..=depth {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut nodes = vec![0; n];
        for v in g.nodes() {
            let d = dist[v as usize] as usize;
            nodes[fill[d]] = v;
            fill[d] += 1;
        }
        Ok(Levels { dist, nodes, start })
    }

    /// Index of the deepest level.
    pub fn deepest(&self) -> usize {
        self.start.len() - 2
    }

    pub fn level(&self, i: usize) -> &[NodeId] {
        &self.nodes[self.start[i]..self.start[i + 1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(NodeId, NodeId)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap().0
    }

    #[test]
    fn distances_in_a_hand_built_tree() {
        //      0
        //     / \
        //    1   2
        //   / \
        //  3   4
        let t = SpanningTree::from_parts(0, vec![0, 0, 0, 1, 1], vec![0, 1, 1, 2, 2]).unwrap();
        assert_eq!(t.distance(3, 3), 0);
        assert_eq!(t.distance(0, 4), 2);
        assert_eq!(t.distance(3, 4), 2);
        assert_eq!(t.distance(3, 2), 3);
        assert_eq!(t.lca(3, 4), 1);
        assert_eq!(t.height(), 2);
    }

    #[test]
    fn from_parts_rejects_broken_trees() {
        assert!(SpanningTree::from_parts(0, vec![0, 2, 1], vec![0, 1, 1]).is_err());
        assert!(SpanningTree::from_parts(0, vec![1, 0], vec![0, 1]).is_err());
        assert!(SpanningTree::from_parts(0, vec![0, 5], vec![0, 1]).is_err());
        assert!(SpanningTree::from_parts(3, vec![0], vec![0]).is_err());
    }

    #[test]
    fn degree_ordering_puts_star_center_first() {
        let star = graph(5, &[(2, 0), (2, 1), (2, 3), (2, 4)]);
        let o = degree_ordering(&star);
        assert_eq!(o.first(), Some(2));
        assert_eq!(o.order(), &[2, 0, 1, 3, 4]);
        assert_eq!(increasing_degree_ordering(&star).order(), &[0, 1, 3, 4, 2]);
    }

    #[test]
    fn regular_graph_orders_by_id() {
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(degree_ordering(&c5).order(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn ordering_must_be_a_permutation() {
        assert!(VertexOrdering::from_order(vec![0, 0]).is_err());
        assert!(VertexOrdering::from_order(vec![0, 2]).is_err());
        let o = VertexOrdering::from_order(vec![2, 0, 1]).unwrap();
        assert_eq!((o.rank(2), o.rank(0), o.rank(1)), (0, 1, 2));
    }

    #[test]
    fn levels_group_by_distance() {
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let l = Levels::from_root(&c4, 0).unwrap();
        assert_eq!(l.deepest(), 2);
        assert_eq!(l.level(0), &[0]);
        assert_eq!(l.level(1), &[1, 3]);
        assert_eq!(l.level(2), &[2]);
    }
}
