use super::{Graph, NodeId};
use crate::error::{Error, Result};

/// `k × k` square lattice; node `r * k + c` sits at row `r`, column `c`.
pub fn flat_grid(k: usize) -> Result<Graph> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("grid side must be at least 2, got {k}")));
    }
    let id = |r: usize, c: usize| (r * k + c) as NodeId;
    let mut edges = Vec::with_capacity(2 * k * (k - 1));
    for r in 0..k {
        for c in 0..k {
            if c + 1 < k {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < k {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Ok(Graph::from_edges(k * k, edges)?.0)
}

const HYPER_DEGREE: usize = 7;

/// Combinatorial {3,7} triangulation grown ring by ring around node 0.
///
/// Every ring is a cycle. Each node of ring `i` receives exactly the number of
/// edges into ring `i + 1` that brings it to degree 7; consecutive ring-`i`
/// nodes share one outer neighbor, which closes the triangle between them.
/// Nodes are numbered ring by ring.
pub fn hyper_grid(rings: usize) -> Result<Graph> {
    if rings < 1 {
        return Err(Error::InvalidArgument("hypergrid needs at least one ring".into()));
    }
    let mut degree: Vec<usize> = vec![0; HYPER_DEGREE + 1];
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    fn add(edges: &mut Vec<(NodeId, NodeId)>, degree: &mut [usize], u: NodeId, v: NodeId) {
        edges.push((u, v));
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }

    let mut ring: Vec<NodeId> = (1..=HYPER_DEGREE as NodeId).collect();
    for j in 0..ring.len() {
        add(&mut edges, &mut degree, 0, ring[j]);
        add(&mut edges, &mut degree, ring[j], ring[(j + 1) % ring.len()]);
    }

    for _ in 1..rings {
        let budget: Vec<usize> = ring.iter().map(|&v| HYPER_DEGREE - degree[v as usize]).collect();
        let outer_len: usize = budget.iter().map(|b| b - 1).sum();
        let first = degree.len() as NodeId;
        degree.resize(degree.len() + outer_len, 0);
        let outer: Vec<NodeId> = (first..first + outer_len as NodeId).collect();

        let mut pos = 0;
        for (&v, &b) in ring.iter().zip(&budget) {
            for t in 0..b {
                add(&mut edges, &mut degree, v, outer[(pos + t) % outer_len]);
            }
            pos += b - 1;
        }
        for t in 0..outer_len {
            add(&mut edges, &mut degree, outer[t], outer[(t + 1) % outer_len]);
        }
        ring = outer;
    }
    Ok(Graph::from_edges(degree.len(), edges)?.0)
}
