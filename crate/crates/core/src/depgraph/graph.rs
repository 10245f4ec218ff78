use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::surface::print_process;
use crate::syntax::{Chan, Process};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    /// Position of the thread among the top-level prefixes, left to right.
    pub id: usize,
    pub text: String,
    pub labels: BTreeSet<Chan>,
}

/// An unoriented edge `a -- b` on `chan`, stored with `a < b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub chan: Chan,
}

/// A session dependency graph: one node per thread, one edge per channel
/// shared by a pair of threads.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DepGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

/// Builds the graph inductively: a prefix is a node labelled by its free
/// session channels, a restriction removes its channel from all labels, and a
/// parallel composition joins two graphs with an edge per shared label.
pub fn build_graph(p: &Process) -> DepGraph {
    build_with(p, true)
}

/// As [`build_graph`] with empty node texts, for callers that only need
/// the shape.
pub(crate) fn build_shape(p: &Process) -> DepGraph {
    build_with(p, false)
}

fn build_with(p: &Process, text: bool) -> DepGraph {
    let mut g = DepGraph::default();
    build(p, text, &mut g);
    g.edges.sort();
    g
}

type Occurrences = HashMap<Chan, Vec<usize>>;

fn build(p: &Process, text: bool, g: &mut DepGraph) -> Occurrences {
    match p {
        Process::Inact => Occurrences::new(),
        Process::Par(l, r) => {
            let left = build(l, text, g);
            let right = build(r, text, g);
            let (mut big, small) = if left.len() >= right.len() {
                (left, right)
            } else {
                (right, left)
            };
            for (k, ns) in small {
                let slot = big.entry(k.clone()).or_default();
                for &a in slot.iter() {
                    for &b in &ns {
                        g.edges.push(Edge {
                            a: a.min(b),
                            b: a.max(b),
                            chan: k.clone(),
                        });
                    }
                }
                slot.extend(ns);
            }
            big
        }
        Process::Restrict(k, body) => {
            let mut occ = build(body, text, g);
            if let Some(ns) = occ.remove(k) {
                for n in ns {
                    g.nodes[n].labels.remove(k);
                }
            }
            occ
        }
        _ => {
            let id = g.nodes.len();
            let labels = p.free_session_channels();
            let occ = labels.iter().map(|k| (k.clone(), vec![id])).collect();
            g.nodes.push(Node {
                id,
                text: if text {
                    print_process(p)
                } else {
                    String::new()
                },
                labels,
            });
            occ
        }
    }
}

impl DepGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `None` if the graph is a forest; otherwise the edges of one cycle.
    /// Two parallel edges form a cycle of length two.
    pub fn find_cycle(&self) -> Option<Vec<Edge>> {
        let mut uf = UnionFind::new(self.nodes.len());
        let mut forest: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if !uf.union(e.a, e.b) {
                let mut cycle: Vec<Edge> = forest_path(&forest, e.a, e.b)
                    .into_iter()
                    .map(|j| self.edges[j].clone())
                    .collect();
                cycle.push(e.clone());
                return Some(cycle);
            }
            forest[e.a].push((e.b, i));
            forest[e.b].push((e.a, i));
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// `k ⤳ k2`: some node labelled `k` is connected to some node labelled
    /// `k2`. `None` when either channel labels no node.
    pub fn leads_to(&self, k: &Chan, k2: &Chan) -> Option<bool> {
        let starts: Vec<usize> = self.labelled(k).collect();
        let targets: BTreeSet<usize> = self.labelled(k2).collect();
        if starts.is_empty() || targets.is_empty() {
            return None;
        }
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut queue: VecDeque<usize> = starts.into_iter().collect();
        for &s in &queue {
            seen[s] = true;
        }
        while let Some(n) = queue.pop_front() {
            if targets.contains(&n) {
                return Some(true);
            }
            for &m in &adj[n] {
                if !seen[m] {
                    seen[m] = true;
                    queue.push_back(m);
                }
            }
        }
        Some(false)
    }

    fn labelled<'a>(&'a self, k: &'a Chan) -> impl Iterator<Item = usize> + 'a {
        self.nodes
            .iter()
            .filter(move |n| n.labels.contains(k))
            .map(|n| n.id)
    }

    /// Channels labelling at least one node.
    pub fn channels(&self) -> BTreeSet<Chan> {
        self.nodes
            .iter()
            .flat_map(|n| n.labels.iter().cloned())
            .collect()
    }
}

/// Edge indices on the forest path from `from` to `to`.
fn forest_path(forest: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; forest.len()];
    let mut seen = vec![false; forest.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(n) = queue.pop_front() {
        if n == to {
            break;
        }
        for &(m, e) in &forest[n] {
            if !seen[m] {
                seen[m] = true;
                prev[m] = Some((n, e));
                queue.push_back(m);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while let Some((p, e)) = prev[cur] {
        path.push(e);
        cur = p;
    }
    path.reverse();
    path
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if they were already one.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}
