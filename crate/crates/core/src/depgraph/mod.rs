//! Session dependency graphs, acyclicity, the `⤳` relation and
//! transparency.

mod dot;
mod graph;
mod transparency;

pub use dot::to_dot;
pub use graph::{build_graph, DepGraph, Edge, Node};
pub use transparency::{
    find_cyclic_subterm, is_transparent, subterm_graphs, CyclicSubterm, Transparency,
};
