use super::{Levels, SpanningTree};
use crate::dsu::DisjointSets;
use crate::error::Result;
use crate::graph::{Graph, NodeId};

/// Layering-partition contraction tree.
///
/// Nodes of one BFS level that are connected outside the ball of the
/// previous level collapse into one supernode. Tree distances never exceed
/// graph distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionTree {
    root: NodeId,
    supernode_of: Vec<u32>,
    tree: SpanningTree,
}

impl ContractionTree {
    pub(crate) fn from_parts(root: NodeId, supernode_of: Vec<u32>, tree: SpanningTree) -> Result<ContractionTree> {
        use crate::error::Error;
        if root as usize >= supernode_of.len() {
            return Err(Error::Format(format!("root {root} out of range")));
        }
        if supernode_of.iter().any(|&s| s as usize >= tree.len()) {
            return Err(Error::Format("supernode id out of range".into()));
        }
        if supernode_of[root as usize] != tree.root() {
            return Err(Error::Format("root does not map to the root supernode".into()));
        }
        Ok(ContractionTree { root, supernode_of, tree })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    #[inline]
    pub fn supernode_of(&self, v: NodeId) -> u32 {
        self.supernode_of[v as usize]
    }

    pub fn supernodes(&self) -> &[u32] {
        &self.supernode_of
    }

    pub fn supernode_count(&self) -> usize {
        self.tree.len()
    }

    /// Tree over supernodes; a supernode's depth is its BFS level.
    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn node_count(&self) -> usize {
        self.supernode_of.len()
    }

    pub fn distance(&self, x: NodeId, y: NodeId) -> u32 {
        self.tree.distance(self.supernode_of(x), self.supernode_of(y))
    }
}

/// Builds the contraction tree bottom-up in time linear in `m`.
///
/// Working from the deepest level up, level `i` is partitioned by a
/// union-find that joins (a) endpoints of edges inside level `i` and (b) all
/// level-`i` neighbors of each already-final level-`i + 1` class. A level-`i`
/// class's parent is the class of the smallest-id level-`i - 1` node adjacent
/// to any of its members.
pub fn build_gromov_tree(g: &Graph, root: NodeId) -> Result<ContractionTree> {
    let levels = Levels::from_root(g, root)?;
    let n = g.n();
    let deepest = levels.deepest();
    let level_of = |v: NodeId| levels.dist[v as usize] as usize;

    let mut sets = DisjointSets::new(n);
    // first level-i neighbor seen for each level-(i+1) class representative
    let mut anchor = vec![NodeId::MAX; n];
    for i in (1..=deepest).rev() {
        for &u in levels.level(i) {
            for &w in g.neighbors(u) {
                if w > u && level_of(w) == i {
                    sets.union(u, w);
                }
            }
        }
        if i < deepest {
            for &u in levels.level(i + 1) {
                let class = sets.find(u) as usize;
                for &w in g.neighbors(u) {
                    if level_of(w) == i {
                        match anchor[class] {
                            NodeId::MAX => anchor[class] = w,
                            a => {
                                sets.union(a, w);
                            }
                        }
                    }
                }
            }
        }
    }
    drop(anchor);

    let mut supernode_of = vec![u32::MAX; n];
    let mut id_of_class = vec![u32::MAX; n];
    let mut parent: Vec<u32> = Vec::new();
    let mut depth: Vec<u32> = Vec::new();
    let mut attach: Vec<NodeId> = Vec::new();
    for i in 0..=deepest {
        for &u in levels.level(i) {
            let class = sets.find(u) as usize;
            if id_of_class[class] == u32::MAX {
                id_of_class[class] = parent.len() as u32;
                parent.push(u32::MAX);
                depth.push(i as u32);
                attach.push(NodeId::MAX);
            }
            let s = id_of_class[class];
            supernode_of[u as usize] = s;
            if i > 0 {
                // neighbors are sorted, so the first one a level up is the smallest
                if let Some(&w) = g.neighbors(u).iter().find(|&&w| level_of(w) + 1 == i) {
                    let slot = &mut attach[s as usize];
                    *slot = (*slot).min(w);
                }
            }
        }
    }
    let root_super = supernode_of[root as usize];
    for s in 0..parent.len() {
        parent[s] = if s as u32 == root_super { root_super } else { supernode_of[attach[s] as usize] };
    }
    let tree = SpanningTree { root: root_super, parent, depth };
    Ok(ContractionTree { root, supernode_of, tree })
}
