use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::reduce::{contract, redexes_of, Redex};
use super::trace::Trace;
use crate::congruence::{canonical_key, normal_form, normalize};
use crate::syntax::Process;

/// A reachable state, with the step that first reached it.
#[derive(Clone, Debug)]
pub struct State {
    pub process: Process,
    pub depth: usize,
    pub parent: Option<(usize, Redex)>,
    /// Number of enabled redexes; zero for stuck or terminated states.
    pub out_degree: usize,
}

#[derive(Clone, Debug)]
pub struct Exploration {
    pub states: Vec<State>,
    /// True when `max_states` cut the search short.
    pub truncated: bool,
}

impl Exploration {
    /// The states with no enabled redex.
    pub fn irreducible(&self) -> impl Iterator<Item = &State> {
        self.states.iter().filter(|s| s.out_degree == 0)
    }

    /// The steps from the initial state to state `idx`.
    pub fn path_to(&self, idx: usize) -> Trace {
        let mut rev = Vec::new();
        let mut cur = idx;
        while let Some((parent, r)) = &self.states[cur].parent {
            rev.push((self.states[*parent].process.clone(), r.clone()));
            cur = *parent;
        }
        rev.reverse();
        Trace {
            steps: rev,
            last: self.states[idx].process.clone(),
        }
    }
}

/// Breadth-first exploration of every state reachable in at most `depth`
/// steps, deduplicated up to structural congruence and alpha-renaming.
pub fn explore_all(p: &Process, depth: usize) -> Exploration {
    explore_bounded(p, depth, usize::MAX)
}

/// As [`explore_all`], stopping once `max_states` states are known.
pub fn explore_bounded(p: &Process, depth: usize, max_states: usize) -> Exploration {
    let start = normal_form(p);
    let mut seen = HashMap::new();
    seen.insert(canonical_key(&start), 0usize);
    let mut states = vec![State {
        process: start,
        depth: 0,
        parent: None,
        out_degree: 0,
    }];
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;
    while let Some(idx) = queue.pop_front() {
        let n = normalize(&states[idx].process);
        let rs = redexes_of(&n);
        states[idx].out_degree = rs.len();
        if states[idx].depth >= depth {
            continue;
        }
        for r in rs {
            let next = normal_form(&contract(n.clone(), &r));
            let key = canonical_key(&next);
            if seen.contains_key(&key) {
                continue;
            }
            if states.len() >= max_states {
                truncated = true;
                continue;
            }
            seen.insert(key, states.len());
            queue.push_back(states.len());
            states.push(State {
                process: next,
                depth: states[idx].depth + 1,
                parent: Some((idx, r)),
                out_degree: 0,
            });
        }
    }
    Exploration { states, truncated }
}

/// One run of at most `steps` reductions, choosing among enabled redexes
/// uniformly with a seeded generator.
pub fn explore_seeded(p: &Process, steps: usize, seed: u64) -> Trace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = normal_form(p);
    let mut trace = Vec::new();
    for _ in 0..steps {
        let n = normalize(&cur);
        let rs = redexes_of(&n);
        if rs.is_empty() {
            break;
        }
        let r = rs[rng.gen_range(0..rs.len())].clone();
        let next = normal_form(&contract(n, &r));
        trace.push((cur, r));
        cur = next;
    }
    Trace {
        steps: trace,
        last: cur,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_process;

    #[test]
    fn interleavings_are_deduplicated() {
        let p = parse_process("sessions k, h; k?(x).0 | k!(1).0 | h?(y).0 | h!(2).0").unwrap();
        let ex = explore_all(&p, 5);
        assert_eq!(ex.states.len(), 4);
        assert_eq!(ex.irreducible().count(), 1);
        assert_eq!(ex.path_to(3).steps.len(), 2);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let p = parse_process("sessions k, h; k?(x).0 | k!(1).0 | h?(y).0 | h!(2).0").unwrap();
        let a = explore_seeded(&p, 10, 7);
        let b = explore_seeded(&p, 10, 7);
        assert_eq!(a.steps.len(), 2);
        assert_eq!(
            a.steps.iter().map(|(_, r)| r.clone()).collect::<Vec<_>>(),
            b.steps.iter().map(|(_, r)| r.clone()).collect::<Vec<_>>()
        );
        assert_eq!(a.last, Process::Inact);
    }

    #[test]
    fn replication_is_bounded_by_depth() {
        let p = parse_process("env a : <end>; *a(k).a<k>.0 | a<k>.0").unwrap();
        let ex = explore_bounded(&p, 3, 100);
        assert!(ex.states.iter().all(|s| s.depth <= 3));
        assert!(!ex.truncated);
    }
}
