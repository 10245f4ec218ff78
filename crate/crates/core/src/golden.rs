//! Bundled example programs with their expected analysis results.

use crate::depgraph::{build_graph, is_transparent};
use crate::progress::{check_progress, ProgressVerdict};
use crate::surface::{parse_source, SourceFile};
use crate::typing::check;

/// Depth used when checking progress of the bundled programs.
pub const SELFTEST_DEPTH: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectedProgress {
    Certificate,
    Counterexample,
}

#[derive(Clone, Copy, Debug)]
pub struct Golden {
    pub name: &'static str,
    pub source: &'static str,
    /// Node and edge count of the top-level dependency graph.
    pub graph: (usize, usize),
    pub transparent: bool,
    pub progress: ExpectedProgress,
}

macro_rules! golden {
    ($($name:literal => $graph:expr, $transparent:expr, $progress:ident;)*) => {
        &[$(Golden {
            name: $name,
            source: include_str!(concat!("../programs/", $name, ".spi")),
            graph: $graph,
            transparent: $transparent,
            progress: ExpectedProgress::$progress,
        }),*]
    };
}

pub const PROGRAMS: &[Golden] = golden![
    "intro_path" => (3, 2), true, Certificate;
    "free_cycle" => (2, 2), false, Counterexample;
    "restricted_cycle" => (2, 2), false, Counterexample;
    "cycle_under_service" => (1, 0), false, Certificate;
    "buyer_seller" => (3, 0), true, Certificate;
    "after_ship" => (3, 2), true, Certificate;
    "branch_orderings" => (3, 0), true, Certificate;
    "deferred_payment" => (2, 0), true, Certificate;
    "delegation_move" => (3, 2), true, Certificate;
    "self_delegation" => (2, 2), false, Counterexample;
    "looping_request" => (4, 2), false, Counterexample;
];

/// Parses the bundled program called `name`.
///
/// # Panics
/// If `name` is unknown or the bundled source does not parse.
pub fn load(name: &str) -> SourceFile {
    let g = PROGRAMS
        .iter()
        .find(|g| g.name == name)
        .unwrap_or_else(|| panic!("no bundled program `{name}`"));
    parse_source(g.source).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Outcome of re-analysing one bundled program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfCheck {
    pub name: &'static str,
    /// Mismatches against the expected results; empty when the program passes.
    pub mismatches: Vec<String>,
}

impl SelfCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Type-checks every bundled program and compares its graph, transparency
/// and progress verdict with the expected ones.
pub fn selftest() -> Vec<SelfCheck> {
    PROGRAMS.iter().map(run_one).collect()
}

fn run_one(g: &Golden) -> SelfCheck {
    let mut mismatches = Vec::new();
    let f = match parse_source(g.source) {
        Ok(f) => f,
        Err(e) => {
            return SelfCheck {
                name: g.name,
                mismatches: vec![format!("parse: {e}")],
            }
        }
    };
    if let Err(e) = check(&f.env, &f.process) {
        mismatches.push(format!("type error: {e}"));
    }
    let graph = build_graph(&f.process);
    let shape = (graph.node_count(), graph.edge_count());
    if shape != g.graph {
        mismatches.push(format!(
            "graph has {shape:?} nodes and edges, expected {:?}",
            g.graph
        ));
    }
    let transparent = is_transparent(&f.env, &f.process).is_transparent();
    if transparent != g.transparent {
        mismatches.push(format!(
            "transparent is {transparent}, expected {}",
            g.transparent
        ));
    }
    let progress = match check_progress(&f.env, &f.process, SELFTEST_DEPTH, 4096) {
        Ok(ProgressVerdict::Certificate(_)) => Some(ExpectedProgress::Certificate),
        Ok(ProgressVerdict::Counterexample(_)) => Some(ExpectedProgress::Counterexample),
        _ => None,
    };
    if progress != Some(g.progress) {
        mismatches.push(format!(
            "progress is {progress:?}, expected {:?}",
            g.progress
        ));
    }
    SelfCheck {
        name: g.name,
        mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_program_matches_its_expectations() {
        for c in selftest() {
            assert!(c.passed(), "{}: {:?}", c.name, c.mismatches);
        }
    }
}
