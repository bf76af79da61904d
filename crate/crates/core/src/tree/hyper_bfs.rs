use super::{SpanningTree, VertexOrdering};
use crate::error::{Error, Result};
use crate::exact::UNREACHED;
use crate::graph::{Graph, NodeId};

/// BFS spanning tree expanded in `order`.
///
/// The queue is plain FIFO. When a node is dequeued its unvisited neighbors
/// are enqueued in rank order and attached to it immediately. Without an
/// explicit root the first node of `order` is used.
pub fn build_hyper_bfs(g: &Graph, order: &VertexOrdering, root: Option<NodeId>) -> Result<SpanningTree> {
    let n = g.n();
    if order.len() != n {
        return Err(Error::SizeMismatch { oracle: order.len(), graph: n });
    }
    let root = match root {
        Some(r) => {
            g.check_node(r)?;
            r
        }
        None => order.first().ok_or(Error::EmptyInput)?,
    };

    let mut parent = vec![NodeId::MAX; n];
    let mut depth = vec![UNREACHED; n];
    let mut queue: Vec<NodeId> = Vec::with_capacity(n);
    let mut fresh: Vec<NodeId> = Vec::new();
    parent[root as usize] = root;
    depth[root as usize] = 0;
    queue.push(root);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        fresh.clear();
        fresh.extend(g.neighbors(v).iter().copied().filter(|&w| depth[w as usize] == UNREACHED));
        fresh.sort_unstable_by_key(|&w| order.rank(w));
        let next = depth[v as usize] + 1;
        for &w in &fresh {
            parent[w as usize] = v;
            depth[w as usize] = next;
            queue.push(w);
        }
    }
    if queue.len() != n {
        return Err(Error::Disconnected { root, reached: queue.len(), n });
    }
    Ok(SpanningTree { root, parent, depth })
}
