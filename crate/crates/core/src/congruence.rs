//! Structural congruence: normal forms, maximal parallel sub-terms, the
//! live-channel predicate and canonical state keys.

use std::collections::BTreeSet;

use crate::syntax::{alpha_key, alpha_key_opaque, Chan, Process};

/// A term of shape `(ν k̃)(γ1 | … | γn)` with every continuation itself in
/// normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normal {
    pub restricted: Vec<Chan>,
    pub threads: Vec<Process>,
}

impl Normal {
    pub fn to_process(&self) -> Process {
        self.clone().into_process()
    }

    pub fn into_process(self) -> Process {
        Process::restrict_all(&self.restricted, Process::par_all(self.threads))
    }
}

/// Flattens parallel composition, drops `0`, hoists restrictions (renaming
/// them when hoisting would capture) and erases unused restrictions.
/// Continuations are normalized recursively.
pub fn normalize(p: &Process) -> Normal {
    let mut n = Normal {
        restricted: Vec::new(),
        threads: Vec::new(),
    };
    let mut outer = Outer { root: p, fsc: None };
    let mut hoisted = BTreeSet::new();
    flatten(p, &mut outer, &mut hoisted, &mut n);
    if n.restricted.is_empty() {
        return n;
    }
    let used: BTreeSet<Chan> = n
        .threads
        .iter()
        .flat_map(|t| t.free_session_channels())
        .collect();
    n.restricted.retain(|k| used.contains(k));
    n
}

/// Free channels of the whole group, computed on first use.
struct Outer<'a> {
    root: &'a Process,
    fsc: Option<BTreeSet<Chan>>,
}

impl Outer<'_> {
    fn contains(&mut self, k: &Chan) -> bool {
        let root = self.root;
        self.fsc
            .get_or_insert_with(|| root.free_session_channels())
            .contains(k)
    }
}

fn flatten(p: &Process, outer: &mut Outer<'_>, hoisted: &mut BTreeSet<Chan>, n: &mut Normal) {
    match p {
        Process::Inact => {}
        Process::Par(l, r) => {
            flatten(l, outer, hoisted, n);
            flatten(r, outer, hoisted, n);
        }
        Process::Restrict(k, body) => {
            if outer.contains(k) || hoisted.contains(k) {
                let fresh = k.refresh();
                let body = body.rename_chan(k, &fresh);
                hoisted.insert(fresh.clone());
                n.restricted.push(fresh);
                flatten(&body, outer, hoisted, n);
            } else {
                hoisted.insert(k.clone());
                n.restricted.push(k.clone());
                flatten(body, outer, hoisted, n);
            }
        }
        _ => n.threads.push(normalize_thread(p)),
    }
}

fn normalize_thread(p: &Process) -> Process {
    match p {
        Process::Branch { chan, arms } => Process::Branch {
            chan: chan.clone(),
            arms: arms
                .iter()
                .map(|(l, a)| (l.clone(), normal_form(a)))
                .collect(),
        },
        Process::Cond { guard, then, other } => {
            Process::cond(guard.clone(), normal_form(then), normal_form(other))
        }
        _ => with_body(p, normal_form(body_of(p))),
    }
}

fn body_of(p: &Process) -> &Process {
    match p {
        Process::RepServ { body, .. }
        | Process::Serv { body, .. }
        | Process::Request { body, .. }
        | Process::Input { body, .. }
        | Process::Output { body, .. }
        | Process::InputS { body, .. }
        | Process::Delegate { body, .. }
        | Process::Select { body, .. } => body,
        _ => unreachable!("single-continuation prefix expected"),
    }
}

fn with_body(p: &Process, new_body: Process) -> Process {
    let body = Box::new(new_body);
    match p {
        Process::RepServ { service, chan, .. } => Process::RepServ {
            service: service.clone(),
            chan: chan.clone(),
            body,
        },
        Process::Serv { service, chan, .. } => Process::Serv {
            service: service.clone(),
            chan: chan.clone(),
            body,
        },
        Process::Request { service, chan, .. } => Process::Request {
            service: service.clone(),
            chan: chan.clone(),
            body,
        },
        Process::Input { chan, var, .. } => Process::Input {
            chan: chan.clone(),
            var: var.clone(),
            body,
        },
        Process::Output { chan, expr, .. } => Process::Output {
            chan: chan.clone(),
            expr: expr.clone(),
            body,
        },
        Process::InputS { chan, bound, .. } => Process::InputS {
            chan: chan.clone(),
            bound: bound.clone(),
            body,
        },
        Process::Delegate { chan, sent, .. } => Process::Delegate {
            chan: chan.clone(),
            sent: sent.clone(),
            body,
        },
        Process::Select { chan, label, .. } => Process::Select {
            chan: chan.clone(),
            label: label.clone(),
            body,
        },
        _ => unreachable!("single-continuation prefix expected"),
    }
}

pub fn normal_form(p: &Process) -> Process {
    normalize(p).into_process()
}

/// The top-level term and every nested parallel product (with at least two
/// threads) that is not an operand of an enclosing one, all in normal form.
pub fn maximal_parallel_subterms(p: &Process) -> Vec<Process> {
    let n = normalize(p);
    let mut out = vec![n.to_process()];
    for t in &n.threads {
        collect_nested(t, &mut out);
    }
    out
}

fn collect_nested(thread: &Process, out: &mut Vec<Process>) {
    for child in thread.children() {
        let mut inner = child;
        while let Process::Restrict(_, b) = inner {
            inner = b;
        }
        if let Process::Par(..) = inner {
            out.push(child.clone());
            let n = normalize(child);
            for t in &n.threads {
                collect_nested(t, out);
            }
        } else if inner.is_prefix() {
            collect_nested(inner, out);
        }
    }
}

/// True iff some session channel occurs outside the scope of every
/// `a(k)` / `*a(k)` prefix.
pub fn has_live_channels(p: &Process) -> bool {
    match p {
        Process::Inact => false,
        Process::Par(l, r) => has_live_channels(l) || has_live_channels(r),
        Process::Restrict(_, body) => has_live_channels(body),
        Process::RepServ { .. } | Process::Serv { .. } => false,
        Process::Cond { then, other, .. } => has_live_channels(then) || has_live_channels(other),
        _ => true,
    }
}

/// No free session channels and no session restriction anywhere in the
/// normal form.
pub fn is_program(p: &Process) -> bool {
    p.free_session_channels().is_empty() && !contains_restriction(&normal_form(p))
}

fn contains_restriction(p: &Process) -> bool {
    matches!(p, Process::Restrict(..)) || p.children().into_iter().any(contains_restriction)
}

/// A key identifying a term up to alpha-equivalence and reordering of
/// parallel threads and restrictions, used to deduplicate explored states.
pub fn canonical_key(p: &Process) -> String {
    alpha_key(&sort_groups(&normal_form(p)))
}

fn sort_groups(p: &Process) -> Process {
    let mut ks = Vec::new();
    let mut body = p;
    while let Process::Restrict(k, b) = body {
        ks.push(k.clone());
        body = b;
    }
    let mut threads = Vec::new();
    collect_threads(body, &mut threads);
    let opaque: BTreeSet<Chan> = ks.iter().cloned().collect();
    let mut keyed: Vec<(String, Process)> = threads
        .into_iter()
        .map(|t| {
            let t = sort_thread(t);
            (alpha_key_opaque(&t, &opaque), t)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let threads: Vec<Process> = keyed.into_iter().map(|(_, t)| t).collect();
    let mut order = Vec::new();
    for t in &threads {
        occurrences(t, &mut Vec::new(), &mut order);
    }
    let mut sorted_ks: Vec<Chan> = Vec::new();
    for k in order {
        if opaque.contains(&k) && !sorted_ks.contains(&k) {
            sorted_ks.push(k);
        }
    }
    Process::restrict_all(&sorted_ks, Process::par_all(threads))
}

fn collect_threads<'a>(p: &'a Process, out: &mut Vec<&'a Process>) {
    match p {
        Process::Par(l, r) => {
            collect_threads(l, out);
            collect_threads(r, out);
        }
        Process::Inact => {}
        _ => out.push(p),
    }
}

fn sort_thread(t: &Process) -> Process {
    match t {
        Process::Branch { chan, arms } => Process::Branch {
            chan: chan.clone(),
            arms: arms
                .iter()
                .map(|(l, a)| (l.clone(), sort_groups(a)))
                .collect(),
        },
        Process::Cond { guard, then, other } => {
            Process::cond(guard.clone(), sort_groups(then), sort_groups(other))
        }
        _ => with_body(t, sort_groups(body_of(t))),
    }
}

/// Free session channel occurrences in traversal order.
fn occurrences(p: &Process, bound: &mut Vec<Chan>, out: &mut Vec<Chan>) {
    let mut hit = |k: &Chan, bound: &Vec<Chan>| {
        if !bound.contains(k) {
            out.push(k.clone());
        }
    };
    match p {
        Process::Restrict(k, body)
        | Process::RepServ { chan: k, body, .. }
        | Process::Serv { chan: k, body, .. }
        | Process::Request { chan: k, body, .. } => {
            bound.push(k.clone());
            occurrences(body, bound, out);
            bound.pop();
        }
        Process::InputS {
            chan,
            bound: b,
            body,
        } => {
            hit(chan, bound);
            bound.push(b.clone());
            occurrences(body, bound, out);
            bound.pop();
        }
        Process::Delegate { chan, sent, body } => {
            hit(chan, bound);
            hit(sent, bound);
            occurrences(body, bound, out);
        }
        _ => {
            if let Some(k) = p.subject() {
                hit(k, bound);
            }
            for c in p.children() {
                occurrences(c, bound, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_process;
    use crate::syntax::{alpha_equivalent, Expr};

    #[test]
    fn unit_is_dropped() {
        let k = Chan::free("k");
        let p = Process::output(&k, Expr::int(1), Process::Inact);
        assert_eq!(normal_form(&Process::par(Process::Inact, p.clone())), p);
    }

    #[test]
    fn restriction_is_extruded() {
        let p = parse_process("sessions k; k!(1).0 | new s . s!(2).0").unwrap();
        let n = normalize(&p);
        assert_eq!(n.restricted.len(), 1);
        assert_eq!(n.threads.len(), 2);
        assert_eq!(n.restricted[0].text(), "s");
    }

    #[test]
    fn extrusion_renames_on_clash() {
        // The restricted `k` must not capture the free `k` on the left.
        let k = Chan::free("k");
        let one = |c: &Chan| Process::output(c, Expr::int(1), Process::Inact);
        let p = Process::par(one(&k), Process::restrict(&k, one(&k)));
        let n = normalize(&p);
        assert_eq!(n.restricted.len(), 1);
        assert_ne!(n.restricted[0], k);
        assert_eq!(
            n.to_process().free_session_channels(),
            p.free_session_channels()
        );
    }

    #[test]
    fn unused_restriction_is_erased() {
        let p = parse_process("new k . 0").unwrap();
        assert_eq!(normal_form(&p), Process::Inact);
    }

    #[test]
    fn normal_form_is_idempotent() {
        let p = parse_process(
            "sessions k; env a : <end>; (new s . (s!(1).0 | 0)) | (k?(x).(0 | new t . t!(x).0) | a(r).0)",
        )
        .unwrap();
        let n1 = normal_form(&p);
        assert!(alpha_equivalent(&normal_form(&n1), &n1));
    }

    #[test]
    fn maximal_subterms_of_serv_prefixed_cycle() {
        let p = parse_process(
            "env a : <end>; a(k).new k', k'' . (k'?(x).k''!(x).0 | k''?(x).k'!(x).0)",
        )
        .unwrap();
        let subs = maximal_parallel_subterms(&p);
        assert_eq!(subs.len(), 2);
        assert!(matches!(subs[1], Process::Restrict(..)));
    }

    #[test]
    fn single_prefix_has_one_subterm() {
        let p = parse_process("sessions k; k!(1).0").unwrap();
        assert_eq!(maximal_parallel_subterms(&p), vec![p]);
    }

    #[test]
    fn nested_products_flatten() {
        let p = parse_process("sessions k; k!(1).0 | (k!(2).0 | k!(3).0)").unwrap();
        let subs = maximal_parallel_subterms(&p);
        assert_eq!(subs.len(), 1);
        assert_eq!(normalize(&subs[0]).threads.len(), 3);
    }

    #[test]
    fn live_channels() {
        let serv = parse_process("env a : <![int].end>; a(k).k!(1).0").unwrap();
        assert!(!has_live_channels(&serv));
        let req = parse_process("env a : <![int].end>; a<k>.k?(x).0").unwrap();
        assert!(has_live_channels(&req));
        let eq3 = parse_process("new k', k'' . (k'?(x).k''!(x).0 | k''?(x).k'!(x).0)").unwrap();
        assert!(has_live_channels(&eq3));
    }

    #[test]
    fn canonical_key_ignores_thread_order() {
        let p = parse_process("sessions k; new s . (k!(1).0 | s!(2).0 | s?(x).0)").unwrap();
        let q = parse_process("sessions k; new t . (t?(y).0 | t!(2).0) | k!(1).0").unwrap();
        assert_eq!(canonical_key(&p), canonical_key(&q));
    }
}
