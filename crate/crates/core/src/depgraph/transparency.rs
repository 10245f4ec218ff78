use crate::congruence::maximal_parallel_subterms;
use crate::syntax::{Process, ServiceEnv};
use crate::typing::{check, TypeError};

use super::graph::{build_graph, build_shape, DepGraph, Edge};

/// Verdict of the transparency check.
#[derive(Clone, Debug)]
pub enum Transparency {
    NotWellTyped(TypeError),
    Transparent,
    /// `subterm` is a maximal parallel sub-term whose graph has `cycle`.
    NotTransparent {
        subterm: Process,
        graph: DepGraph,
        cycle: Vec<Edge>,
    },
}

impl Transparency {
    pub fn is_transparent(&self) -> bool {
        matches!(self, Transparency::Transparent)
    }
}

/// A cyclic sub-term found by [`find_cyclic_subterm`].
#[derive(Clone, Debug)]
pub struct CyclicSubterm {
    pub subterm: Process,
    pub graph: DepGraph,
    pub cycle: Vec<Edge>,
}

/// Type-checks `p`, then checks that the graph of every maximal parallel
/// sub-term of its normal form is acyclic.
pub fn is_transparent(g: &ServiceEnv, p: &Process) -> Transparency {
    if let Err(e) = check(g, p) {
        return Transparency::NotWellTyped(e);
    }
    match find_cyclic_subterm(p) {
        None => Transparency::Transparent,
        Some(CyclicSubterm {
            subterm,
            graph,
            cycle,
        }) => Transparency::NotTransparent {
            subterm,
            graph,
            cycle,
        },
    }
}

/// The graph-only half of the transparency check: the first maximal
/// parallel sub-term whose graph contains a cycle.
pub fn find_cyclic_subterm(p: &Process) -> Option<CyclicSubterm> {
    let subterm = maximal_parallel_subterms(p)
        .into_iter()
        .find(|s| !build_shape(s).is_acyclic())?;
    let graph = build_graph(&subterm);
    let cycle = graph.find_cycle().expect("same shape as the cyclic one");
    Some(CyclicSubterm {
        subterm,
        graph,
        cycle,
    })
}

/// Graphs of all maximal parallel sub-terms, outermost first.
pub fn subterm_graphs(p: &Process) -> Vec<(Process, DepGraph)> {
    maximal_parallel_subterms(p)
        .into_iter()
        .map(|s| {
            let g = build_graph(&s);
            (s, g)
        })
        .collect()
}
