use std::fmt::Write;

use super::graph::DepGraph;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n")
}

/// Renders graphs in DOT, one `graph` block per entry. Nodes are listed by
/// id and edges by endpoints, then channel, so the output is deterministic.
pub fn to_dot(graphs: &[DepGraph]) -> String {
    let mut out = String::new();
    for (i, g) in graphs.iter().enumerate() {
        let _ = writeln!(out, "graph S{i} {{");
        for n in &g.nodes {
            let labels: Vec<String> = n.labels.iter().map(|k| k.to_string()).collect();
            let label = format!("thread {}: {}\n{{{}}}", n.id + 1, n.text, labels.join(", "));
            let _ = writeln!(out, "  n{} [label=\"{}\"];", n.id, escape(&label));
        }
        let mut edges = g.edges.clone();
        edges.sort_by(|x, y| (x.a, x.b, x.chan.text()).cmp(&(y.a, y.b, y.chan.text())));
        for e in &edges {
            let _ = writeln!(
                out,
                "  n{} -- n{} [label=\"{}\"];",
                e.a,
                e.b,
                escape(e.chan.text())
            );
        }
        out.push_str("}\n");
    }
    out
}
