use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use spi_core::congruence::is_program;
use spi_core::depgraph::{
    build_graph, is_transparent, subterm_graphs, to_dot, DepGraph, Edge, Transparency,
};
use spi_core::golden;
use spi_core::progress::{check_progress, inhabit as inhabit_type, ProgressVerdict};
use spi_core::semantics::{explore_all, explore_seeded, redexes};
use spi_core::surface::{
    parse_source, parse_type, print_process, print_service_env, print_session_env, print_sort,
    print_type, ParseError, SourceFile,
};
use spi_core::syntax::{Chan, Entry, ServiceEnv, SessionEnv};
use spi_core::typing::TypeError;

/// Errors that stop a command before it reaches a verdict.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("bad type: {0}")]
    Type(ParseError),
}

/// A verdict with its exit code, human-readable text and JSON payload.
pub struct Outcome {
    pub verdict: &'static str,
    pub exit: u8,
    pub text: String,
    pub data: Value,
}

impl Outcome {
    fn positive(verdict: &'static str, text: String, data: Value) -> Self {
        Outcome {
            verdict,
            exit: 0,
            text,
            data,
        }
    }

    fn negative(verdict: &'static str, text: String, data: Value) -> Self {
        Outcome {
            verdict,
            exit: 1,
            text,
            data,
        }
    }

    fn ill_typed(e: &TypeError) -> Self {
        Outcome::negative(
            "ill-typed",
            format!("ill-typed: {e}\n"),
            json!({"rule": e.rule, "message": e.message, "subterm": e.subterm}),
        )
    }
}

fn load(path: &Path) -> Result<SourceFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_source(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn session_env_json(d: &SessionEnv) -> Value {
    d.iter()
        .map(|(k, e)| {
            let ty = match e {
                Entry::Bottom => "⊥".to_owned(),
                Entry::Type(t) => print_type(t),
            };
            (k.to_string(), Value::String(ty))
        })
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn service_env_json(g: &ServiceEnv) -> Value {
    g.iter()
        .map(|(a, s)| (a.to_string(), Value::String(print_sort(s))))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

pub fn check(path: &Path) -> Result<Outcome, CliError> {
    let f = load(path)?;
    Ok(match spi_core::typing::check(&f.env, &f.process) {
        Ok(delta) => {
            let program = is_program(&f.process);
            let mut text = format!("well-typed\nΔ = {}\n", print_session_env(&delta));
            if program {
                text.push_str("program: no free session channels\n");
            }
            Outcome::positive(
                "well-typed",
                text,
                json!({"delta": session_env_json(&delta), "program": program}),
            )
        }
        Err(e) => Outcome::ill_typed(&e),
    })
}

fn edge_text(e: &Edge) -> String {
    format!("thread {} -- thread {} on {}", e.a + 1, e.b + 1, e.chan)
}

fn graph_json(subterm: &str, g: &DepGraph) -> Value {
    json!({
        "subterm": subterm,
        "acyclic": g.is_acyclic(),
        "nodes": g.nodes.iter().map(|n| json!({
            "thread": n.id + 1,
            "text": n.text,
            "labels": n.labels.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "edges": g.edges.iter().map(|e| json!({
            "a": e.a + 1,
            "b": e.b + 1,
            "chan": e.chan.to_string(),
        })).collect::<Vec<_>>(),
    })
}

fn graph_text(out: &mut String, index: usize, subterm: &str, g: &DepGraph) {
    let shape = if g.is_acyclic() { "acyclic" } else { "cyclic" };
    let _ = writeln!(
        out,
        "graph {index}: {} nodes, {} edges, {shape}\n  sub-term: {subterm}",
        g.node_count(),
        g.edge_count()
    );
    for n in &g.nodes {
        let labels: Vec<String> = n.labels.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(
            out,
            "  thread {} {{{}}}: {}",
            n.id + 1,
            labels.join(", "),
            n.text
        );
    }
    for e in &g.edges {
        let _ = writeln!(out, "  {}", edge_text(e));
    }
}

pub fn graph(path: &Path, dot: Option<&Path>, all_subterms: bool) -> Result<Outcome, CliError> {
    let f = load(path)?;
    let graphs: Vec<(String, DepGraph)> = if all_subterms {
        subterm_graphs(&f.process)
            .into_iter()
            .map(|(s, g)| (print_process(&s), g))
            .collect()
    } else {
        vec![(print_process(&f.process), build_graph(&f.process))]
    };
    let mut text = String::new();
    for (i, (s, g)) in graphs.iter().enumerate() {
        graph_text(&mut text, i + 1, s, g);
    }
    if let Some(out) = dot {
        let rendered = to_dot(&graphs.iter().map(|(_, g)| g.clone()).collect::<Vec<_>>());
        if out == Path::new("-") {
            text = rendered;
        } else {
            std::fs::write(out, rendered).map_err(|source| CliError::Write {
                path: out.to_owned(),
                source,
            })?;
        }
    }
    let acyclic = graphs.iter().all(|(_, g)| g.is_acyclic());
    let data = json!({"graphs": graphs.iter().map(|(s, g)| graph_json(s, g)).collect::<Vec<_>>()});
    Ok(Outcome::positive(
        if acyclic { "acyclic" } else { "cyclic" },
        text,
        data,
    ))
}

pub fn transparent(path: &Path) -> Result<Outcome, CliError> {
    let f = load(path)?;
    Ok(match is_transparent(&f.env, &f.process) {
        Transparency::Transparent => {
            Outcome::positive("transparent", "Transparent\n".into(), json!({}))
        }
        Transparency::NotTransparent {
            subterm,
            graph,
            cycle,
        } => {
            let shown = print_process(&subterm);
            let edges: Vec<String> = cycle.iter().map(edge_text).collect();
            Outcome::negative(
                "not-transparent",
                format!(
                    "Not transparent\n  sub-term: {shown}\n  cycle: {}\n",
                    edges.join("; ")
                ),
                json!({
                    "subterm": shown,
                    "cycle": cycle.iter().map(|e| json!({"a": e.a + 1, "b": e.b + 1, "chan": e.chan.to_string()})).collect::<Vec<_>>(),
                    "graph": graph_json(&shown, &graph),
                }),
            )
        }
        Transparency::NotWellTyped(e) => Outcome::ill_typed(&e),
    })
}

/// Follows one seeded trace, or explores everything when `seed` is `None`.
pub fn run(path: &Path, steps: usize, seed: Option<u64>) -> Result<Outcome, CliError> {
    let f = load(path)?;
    Ok(match seed {
        Some(seed) => {
            let trace = explore_seeded(&f.process, steps, seed);
            let stuck = redexes(&trace.last).is_empty();
            let mut text = trace.to_string();
            let _ = writeln!(
                text,
                "{} after {} steps",
                if stuck { "irreducible" } else { "stopped" },
                trace.len()
            );
            Outcome::positive(
                if stuck { "irreducible" } else { "step-limit" },
                text,
                json!({
                    "seed": seed,
                    "steps": trace.records(),
                    "final": trace.last.to_string(),
                }),
            )
        }
        None => {
            let ex = explore_all(&f.process, steps);
            let mut text = String::new();
            for (i, s) in ex.states.iter().enumerate() {
                let from = match &s.parent {
                    Some((p, r)) => format!(" <- {p} [{r}]"),
                    None => String::new(),
                };
                let _ = writeln!(text, "{i} (depth {}{from}): {}", s.depth, s.process);
            }
            let stuck: Vec<usize> = (0..ex.states.len())
                .filter(|&i| ex.states[i].out_degree == 0)
                .collect();
            let _ = writeln!(
                text,
                "{} states, {} irreducible",
                ex.states.len(),
                stuck.len()
            );
            Outcome::positive(
                "explored",
                text,
                json!({
                    "depth": steps,
                    "truncated": ex.truncated,
                    "states": ex.states.iter().map(|s| json!({
                        "depth": s.depth,
                        "parent": s.parent.as_ref().map(|(p, _)| p),
                        "rule": s.parent.as_ref().map(|(_, r)| r.rule),
                        "process": s.process.to_string(),
                    })).collect::<Vec<_>>(),
                    "irreducible": stuck,
                }),
            )
        }
    })
}

pub fn inhabit(ty: &str, chan: &str) -> Result<Outcome, CliError> {
    let ty = parse_type(ty).map_err(CliError::Type)?;
    let (p, ext) = inhabit_type(&ty, &Chan::free(chan));
    let shown = print_process(&p);
    let mut text = format!("{shown}\n");
    if !ext.is_empty() {
        let _ = writeln!(text, "env {}", print_service_env(&ext));
    }
    Ok(Outcome::positive(
        "inhabited",
        text,
        json!({"process": shown, "services": service_env_json(&ext)}),
    ))
}

pub fn progress(path: &Path, depth: usize, subset_budget: usize) -> Result<Outcome, CliError> {
    let f = load(path)?;
    let verdict = match check_progress(&f.env, &f.process, depth, subset_budget) {
        Ok(v) => v,
        Err(e) => return Ok(Outcome::ill_typed(&e)),
    };
    let data = serde_json::to_value(&verdict).expect("verdicts serialize");
    Ok(match verdict {
        ProgressVerdict::Certificate(c) => Outcome::positive(
            "certificate",
            format!(
                "certificate: depth {}, {} states, {} sub-terms unblocked by partners\n",
                c.depth, c.states, c.partners
            ),
            data,
        ),
        ProgressVerdict::Counterexample(c) => {
            let mut text = format!(
                "counterexample: {:?} at state {} (depth {})\n  state: {}\n  sub-term: {}\n",
                c.failed, c.at.state_index, c.at.depth, c.at.state, c.at.subterm
            );
            if let Some(q) = &c.partner {
                let _ = writeln!(text, "  partner: {q}");
            }
            Outcome::negative("counterexample", text, data)
        }
        ProgressVerdict::Inconclusive(i) => Outcome::negative(
            "inconclusive",
            format!(
                "inconclusive after {} states: {:?}\n",
                i.checked.states, i.reason
            ),
            data,
        ),
    })
}

pub fn selftest() -> Outcome {
    let results = golden::selftest();
    let mut text = String::new();
    for r in &results {
        if r.passed() {
            let _ = writeln!(text, "PASS {}", r.name);
        } else {
            let _ = writeln!(text, "FAIL {}: {}", r.name, r.mismatches.join("; "));
        }
    }
    let data = json!({"programs": results.iter().map(|r| json!({"name": r.name, "mismatches": r.mismatches})).collect::<Vec<_>>()});
    if results.iter().all(|r| r.passed()) {
        Outcome::positive("pass", text, data)
    } else {
        Outcome::negative("fail", text, data)
    }
}
