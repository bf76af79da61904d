//! Tree-based shortest-path distance oracles for large undirected graphs.
//!
//! The crate builds three families of tree approximations of a hop-metric
//! graph and answers distance queries against them:
//!
//! - **Hyper BFS** spanning trees rooted at high-degree nodes, expanded in
//!   degree order. Tree distances never underestimate graph distances.
//! - **Gromov** contraction trees obtained from the layering partition of a
//!   BFS. Tree distances never overestimate graph distances.
//! - **Steiner** trees with one half-weight Steiner point per connected
//!   component of every BFS level.
//!
//! Around these sit exact BFS ground truth ([`exact`]), sampled four-point
//! hyperbolicity estimation ([`hyperbolicity`]), guaranteed distance ranges
//! ([`range`]) and a distortion evaluation harness ([`eval`]).

pub mod dsu;
pub mod error;
pub mod eval;
pub mod exact;
pub mod graph;
pub mod half;
pub mod hyperbolicity;
pub mod range;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{Graph, GraphStats, NodeId};
pub use half::HalfHops;
