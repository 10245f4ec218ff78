use std::collections::BTreeSet;

use super::expr::{Expr, Value};
use super::names::{Chan, Label, Var};

/// Processes of the calculus.
///
/// Every prefix form is its own variant. Binders: `Restrict`, `RepServ`,
/// `Serv`, `Request` and `InputS` bind a session channel; `Input` binds a
/// variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Process {
    Inact,
    Par(Box<Process>, Box<Process>),
    Restrict(Chan, Box<Process>),
    /// `*a(k).P`
    RepServ {
        service: Var,
        chan: Chan,
        body: Box<Process>,
    },
    /// `a(k).P`
    Serv {
        service: Var,
        chan: Chan,
        body: Box<Process>,
    },
    /// `a<k>.P`
    Request {
        service: Var,
        chan: Chan,
        body: Box<Process>,
    },
    /// `k?(x).P`
    Input {
        chan: Chan,
        var: Var,
        body: Box<Process>,
    },
    /// `k!(e).P`
    Output {
        chan: Chan,
        expr: Expr,
        body: Box<Process>,
    },
    /// `k?((k')).P`
    InputS {
        chan: Chan,
        bound: Chan,
        body: Box<Process>,
    },
    /// `k!((k')).P`
    Delegate {
        chan: Chan,
        sent: Chan,
        body: Box<Process>,
    },
    /// `k >> { l1: P1, ... }`
    Branch {
        chan: Chan,
        arms: Vec<(Label, Process)>,
    },
    /// `k << l.P`
    Select {
        chan: Chan,
        label: Label,
        body: Box<Process>,
    },
    /// `if e then P else Q`
    Cond {
        guard: Expr,
        then: Box<Process>,
        other: Box<Process>,
    },
}

// Constructors. They take ownership of the continuation and clone names.
impl Process {
    pub fn par(l: Process, r: Process) -> Self {
        Process::Par(Box::new(l), Box::new(r))
    }

    /// Left-nested parallel composition of all components; `0` if empty.
    pub fn par_all(items: impl IntoIterator<Item = Process>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Process::Inact,
            Some(first) => it.fold(first, Process::par),
        }
    }

    pub fn restrict(k: &Chan, p: Process) -> Self {
        Process::Restrict(k.clone(), Box::new(p))
    }

    pub fn restrict_all<'a>(ks: impl IntoIterator<Item = &'a Chan>, p: Process) -> Self {
        let ks: Vec<&Chan> = ks.into_iter().collect();
        ks.into_iter()
            .rev()
            .fold(p, |acc, k| Process::restrict(k, acc))
    }

    pub fn rep_serv(a: &Var, k: &Chan, body: Process) -> Self {
        Process::RepServ {
            service: a.clone(),
            chan: k.clone(),
            body: Box::new(body),
        }
    }

    pub fn serv(a: &Var, k: &Chan, body: Process) -> Self {
        Process::Serv {
            service: a.clone(),
            chan: k.clone(),
            body: Box::new(body),
        }
    }

    pub fn request(a: &Var, k: &Chan, body: Process) -> Self {
        Process::Request {
            service: a.clone(),
            chan: k.clone(),
            body: Box::new(body),
        }
    }

    pub fn input(k: &Chan, x: &Var, body: Process) -> Self {
        Process::Input {
            chan: k.clone(),
            var: x.clone(),
            body: Box::new(body),
        }
    }

    pub fn output(k: &Chan, e: Expr, body: Process) -> Self {
        Process::Output {
            chan: k.clone(),
            expr: e,
            body: Box::new(body),
        }
    }

    pub fn input_s(k: &Chan, bound: &Chan, body: Process) -> Self {
        Process::InputS {
            chan: k.clone(),
            bound: bound.clone(),
            body: Box::new(body),
        }
    }

    pub fn delegate(k: &Chan, sent: &Chan, body: Process) -> Self {
        Process::Delegate {
            chan: k.clone(),
            sent: sent.clone(),
            body: Box::new(body),
        }
    }

    pub fn branch<L: AsRef<str>>(k: &Chan, arms: impl IntoIterator<Item = (L, Process)>) -> Self {
        Process::Branch {
            chan: k.clone(),
            arms: arms.into_iter().map(|(l, p)| (Label::new(l), p)).collect(),
        }
    }

    pub fn select(k: &Chan, l: impl AsRef<str>, body: Process) -> Self {
        Process::Select {
            chan: k.clone(),
            label: Label::new(l),
            body: Box::new(body),
        }
    }

    pub fn cond(guard: Expr, then: Process, other: Process) -> Self {
        Process::Cond {
            guard,
            then: Box::new(then),
            other: Box::new(other),
        }
    }
}

impl Process {
    /// True for the ten prefix forms (the threads of a parallel composition).
    pub fn is_prefix(&self) -> bool {
        !matches!(
            self,
            Process::Inact | Process::Par(..) | Process::Restrict(..)
        )
    }

    /// The session channel a prefix acts on, if it is an in-session action.
    pub fn subject(&self) -> Option<&Chan> {
        match self {
            Process::Input { chan, .. }
            | Process::Output { chan, .. }
            | Process::InputS { chan, .. }
            | Process::Delegate { chan, .. }
            | Process::Branch { chan, .. }
            | Process::Select { chan, .. } => Some(chan),
            _ => None,
        }
    }

    /// Immediate sub-processes (continuations, arms, branches of a conditional).
    pub fn children(&self) -> Vec<&Process> {
        match self {
            Process::Inact => vec![],
            Process::Par(l, r) => vec![l, r],
            Process::Restrict(_, p)
            | Process::RepServ { body: p, .. }
            | Process::Serv { body: p, .. }
            | Process::Request { body: p, .. }
            | Process::Input { body: p, .. }
            | Process::Output { body: p, .. }
            | Process::InputS { body: p, .. }
            | Process::Delegate { body: p, .. }
            | Process::Select { body: p, .. } => vec![p],
            Process::Branch { arms, .. } => arms.iter().map(|(_, p)| p).collect(),
            Process::Cond { then, other, .. } => vec![then, other],
        }
    }

    /// Number of AST nodes (expressions counted by their own size).
    pub fn size(&self) -> usize {
        let own = match self {
            Process::Output { expr, .. } => expr.size(),
            Process::Cond { guard, .. } => guard.size(),
            _ => 0,
        };
        1 + own
            + self
                .children()
                .into_iter()
                .map(Process::size)
                .sum::<usize>()
    }

    /// Free session channels.
    pub fn free_session_channels(&self) -> BTreeSet<Chan> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        fsc_into(self, &mut bound, &mut out);
        out
    }

    pub fn has_free_session(&self, k: &Chan) -> bool {
        match self {
            Process::Inact => false,
            Process::Par(l, r) => l.has_free_session(k) || r.has_free_session(k),
            Process::Restrict(b, p) => b != k && p.has_free_session(k),
            Process::RepServ { chan, body, .. }
            | Process::Serv { chan, body, .. }
            | Process::Request { chan, body, .. } => chan != k && body.has_free_session(k),
            Process::Input { chan, body, .. }
            | Process::Output { chan, body, .. }
            | Process::Select { chan, body, .. } => chan == k || body.has_free_session(k),
            Process::InputS { chan, bound, body } => {
                chan == k || (bound != k && body.has_free_session(k))
            }
            Process::Delegate { chan, sent, body } => {
                chan == k || sent == k || body.has_free_session(k)
            }
            Process::Branch { chan, arms } => {
                chan == k || arms.iter().any(|(_, p)| p.has_free_session(k))
            }
            Process::Cond { then, other, .. } => {
                then.has_free_session(k) || other.has_free_session(k)
            }
        }
    }

    /// Free service names and variables (in service positions and expressions).
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        fv_into(self, &mut Vec::new(), &mut out);
        out
    }

    /// Capture-avoiding substitution of the value `v` for the variable `x`.
    pub fn substitute(&self, x: &Var, v: &Value) -> Process {
        subst_var(self, x, v)
    }

    /// Capture-avoiding renaming of the free session channel `from` to `to`.
    pub fn rename_chan(&self, from: &Chan, to: &Chan) -> Process {
        if from == to {
            return self.clone();
        }
        rename(self, from, to)
    }

    /// Gives every binder in the term a fresh identity, keeping display names.
    pub fn freshen(&self) -> Process {
        freshen(self)
    }
}

fn fsc_into(p: &Process, bound: &mut Vec<Chan>, out: &mut BTreeSet<Chan>) {
    let mut hit = |k: &Chan, bound: &Vec<Chan>| {
        if !bound.contains(k) {
            out.insert(k.clone());
        }
    };
    match p {
        Process::Inact => {}
        Process::Par(l, r) => {
            fsc_into(l, bound, out);
            fsc_into(r, bound, out);
        }
        Process::Restrict(k, body)
        | Process::RepServ { chan: k, body, .. }
        | Process::Serv { chan: k, body, .. }
        | Process::Request { chan: k, body, .. } => {
            bound.push(k.clone());
            fsc_into(body, bound, out);
            bound.pop();
        }
        Process::Input { chan, body, .. }
        | Process::Output { chan, body, .. }
        | Process::Select { chan, body, .. } => {
            hit(chan, bound);
            fsc_into(body, bound, out);
        }
        Process::InputS {
            chan,
            bound: b,
            body,
        } => {
            hit(chan, bound);
            bound.push(b.clone());
            fsc_into(body, bound, out);
            bound.pop();
        }
        Process::Delegate { chan, sent, body } => {
            hit(chan, bound);
            hit(sent, bound);
            fsc_into(body, bound, out);
        }
        Process::Branch { chan, arms } => {
            hit(chan, bound);
            for (_, a) in arms {
                fsc_into(a, bound, out);
            }
        }
        Process::Cond { then, other, .. } => {
            fsc_into(then, bound, out);
            fsc_into(other, bound, out);
        }
    }
}

fn fv_into(p: &Process, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    let mut add_expr = |e: &Expr, bound: &Vec<Var>| {
        let mut names = BTreeSet::new();
        e.names(&mut names);
        out.extend(names.into_iter().filter(|x| !bound.contains(x)));
    };
    match p {
        Process::Input { var, body, .. } => {
            bound.push(var.clone());
            fv_into(body, bound, out);
            bound.pop();
        }
        Process::RepServ { service, body, .. }
        | Process::Serv { service, body, .. }
        | Process::Request { service, body, .. } => {
            if !bound.contains(service) {
                out.insert(service.clone());
            }
            fv_into(body, bound, out);
        }
        Process::Output { expr, body, .. } => {
            add_expr(expr, bound);
            fv_into(body, bound, out);
        }
        Process::Cond { guard, then, other } => {
            add_expr(guard, bound);
            fv_into(then, bound, out);
            fv_into(other, bound, out);
        }
        _ => {
            for c in p.children() {
                fv_into(c, bound, out);
            }
        }
    }
}

fn map_children(p: &Process, mut f: impl FnMut(&Process) -> Process) -> Process {
    let b = |q: &Process, f: &mut dyn FnMut(&Process) -> Process| Box::new(f(q));
    match p {
        Process::Inact => Process::Inact,
        Process::Par(l, r) => Process::Par(b(l, &mut f), b(r, &mut f)),
        Process::Restrict(k, body) => Process::Restrict(k.clone(), b(body, &mut f)),
        Process::RepServ {
            service,
            chan,
            body,
        } => Process::RepServ {
            service: service.clone(),
            chan: chan.clone(),
            body: b(body, &mut f),
        },
        Process::Serv {
            service,
            chan,
            body,
        } => Process::Serv {
            service: service.clone(),
            chan: chan.clone(),
            body: b(body, &mut f),
        },
        Process::Request {
            service,
            chan,
            body,
        } => Process::Request {
            service: service.clone(),
            chan: chan.clone(),
            body: b(body, &mut f),
        },
        Process::Input { chan, var, body } => Process::Input {
            chan: chan.clone(),
            var: var.clone(),
            body: b(body, &mut f),
        },
        Process::Output { chan, expr, body } => Process::Output {
            chan: chan.clone(),
            expr: expr.clone(),
            body: b(body, &mut f),
        },
        Process::InputS { chan, bound, body } => Process::InputS {
            chan: chan.clone(),
            bound: bound.clone(),
            body: b(body, &mut f),
        },
        Process::Delegate { chan, sent, body } => Process::Delegate {
            chan: chan.clone(),
            sent: sent.clone(),
            body: b(body, &mut f),
        },
        Process::Branch { chan, arms } => Process::Branch {
            chan: chan.clone(),
            arms: arms.iter().map(|(l, a)| (l.clone(), f(a))).collect(),
        },
        Process::Select { chan, label, body } => Process::Select {
            chan: chan.clone(),
            label: label.clone(),
            body: b(body, &mut f),
        },
        Process::Cond { guard, then, other } => Process::Cond {
            guard: guard.clone(),
            then: b(then, &mut f),
            other: b(other, &mut f),
        },
    }
}

fn subst_var(p: &Process, x: &Var, v: &Value) -> Process {
    let swap = |s: &Var| -> Var {
        match v {
            Value::Service(a) if s == x => a.clone(),
            _ => s.clone(),
        }
    };
    match p {
        Process::Input { chan, var, body } => {
            if var == x {
                return p.clone();
            }
            // A service value equal to the binder would be captured.
            if let Value::Service(a) = v {
                if a == var && body.free_vars().contains(x) {
                    let fresh = var.refresh();
                    let renamed = subst_var(body, var, &Value::Service(fresh.clone()));
                    return Process::input(chan, &fresh, subst_var(&renamed, x, v));
                }
            }
            Process::input(chan, var, subst_var(body, x, v))
        }
        Process::RepServ {
            service,
            chan,
            body,
        } => Process::rep_serv(&swap(service), chan, subst_var(body, x, v)),
        Process::Serv {
            service,
            chan,
            body,
        } => Process::serv(&swap(service), chan, subst_var(body, x, v)),
        Process::Request {
            service,
            chan,
            body,
        } => Process::request(&swap(service), chan, subst_var(body, x, v)),
        Process::Output { chan, expr, body } => {
            Process::output(chan, expr.subst(x, v), subst_var(body, x, v))
        }
        Process::Cond { guard, then, other } => Process::cond(
            guard.subst(x, v),
            subst_var(then, x, v),
            subst_var(other, x, v),
        ),
        _ => map_children(p, |c| subst_var(c, x, v)),
    }
}

fn rename(p: &Process, from: &Chan, to: &Chan) -> Process {
    let sw = |k: &Chan| if k == from { to.clone() } else { k.clone() };
    // Handles a session binder `b` scoping over `body`: stop at shadowing,
    // freshen the binder if it would capture `to`.
    let under = |b: &Chan, body: &Process| -> (Chan, Process) {
        if b == from {
            return (b.clone(), body.clone());
        }
        if b == to && body.has_free_session(from) {
            let fresh = b.refresh();
            let body = rename(body, b, &fresh);
            return (fresh, rename(&body, from, to));
        }
        (b.clone(), rename(body, from, to))
    };
    match p {
        Process::Restrict(k, body) => {
            let (k, body) = under(k, body);
            Process::restrict(&k, body)
        }
        Process::RepServ {
            service,
            chan,
            body,
        } => {
            let (k, body) = under(chan, body);
            Process::rep_serv(service, &k, body)
        }
        Process::Serv {
            service,
            chan,
            body,
        } => {
            let (k, body) = under(chan, body);
            Process::serv(service, &k, body)
        }
        Process::Request {
            service,
            chan,
            body,
        } => {
            let (k, body) = under(chan, body);
            Process::request(service, &k, body)
        }
        Process::InputS { chan, bound, body } => {
            let (b, body) = under(bound, body);
            Process::input_s(&sw(chan), &b, body)
        }
        Process::Input { chan, var, body } => {
            Process::input(&sw(chan), var, rename(body, from, to))
        }
        Process::Output { chan, expr, body } => {
            Process::output(&sw(chan), expr.clone(), rename(body, from, to))
        }
        Process::Delegate { chan, sent, body } => {
            Process::delegate(&sw(chan), &sw(sent), rename(body, from, to))
        }
        Process::Select { chan, label, body } => Process::Select {
            chan: sw(chan),
            label: label.clone(),
            body: Box::new(rename(body, from, to)),
        },
        Process::Branch { chan, arms } => Process::Branch {
            chan: sw(chan),
            arms: arms
                .iter()
                .map(|(l, a)| (l.clone(), rename(a, from, to)))
                .collect(),
        },
        _ => map_children(p, |c| rename(c, from, to)),
    }
}

fn freshen(p: &Process) -> Process {
    let chan_binder = |k: &Chan, body: &Process| -> (Chan, Process) {
        let fresh = k.refresh();
        let body = freshen(body).rename_chan(k, &fresh);
        (fresh, body)
    };
    match p {
        Process::Restrict(k, body) => {
            let (k, body) = chan_binder(k, body);
            Process::restrict(&k, body)
        }
        Process::RepServ {
            service,
            chan,
            body,
        } => {
            let (k, body) = chan_binder(chan, body);
            Process::rep_serv(service, &k, body)
        }
        Process::Serv {
            service,
            chan,
            body,
        } => {
            let (k, body) = chan_binder(chan, body);
            Process::serv(service, &k, body)
        }
        Process::Request {
            service,
            chan,
            body,
        } => {
            let (k, body) = chan_binder(chan, body);
            Process::request(service, &k, body)
        }
        Process::InputS { chan, bound, body } => {
            let (b, body) = chan_binder(bound, body);
            Process::input_s(chan, &b, body)
        }
        Process::Input { chan, var, body } => {
            let fresh = var.refresh();
            Process::input(chan, &fresh, rename_var(&freshen(body), var, &fresh))
        }
        _ => map_children(p, freshen),
    }
}

/// Renames the variable `from` to a fresh `to`; `to` must not occur in `p`.
fn rename_var(p: &Process, from: &Var, to: &Var) -> Process {
    let sw = |s: &Var| if s == from { to.clone() } else { s.clone() };
    match p {
        Process::Input { var, .. } if var == from => p.clone(),
        Process::Input { chan, var, body } => Process::input(chan, var, rename_var(body, from, to)),
        Process::RepServ {
            service,
            chan,
            body,
        } => Process::rep_serv(&sw(service), chan, rename_var(body, from, to)),
        Process::Serv {
            service,
            chan,
            body,
        } => Process::serv(&sw(service), chan, rename_var(body, from, to)),
        Process::Request {
            service,
            chan,
            body,
        } => Process::request(&sw(service), chan, rename_var(body, from, to)),
        Process::Output { chan, expr, body } => {
            Process::output(chan, expr.rename(from, to), rename_var(body, from, to))
        }
        Process::Cond { guard, then, other } => Process::cond(
            guard.rename(from, to),
            rename_var(then, from, to),
            rename_var(other, from, to),
        ),
        _ => map_children(p, |c| rename_var(c, from, to)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fsc_of_inaction_is_empty() {
        assert!(Process::Inact.free_session_channels().is_empty());
    }

    #[test]
    fn fsc_of_intro_example() {
        let (k, k2) = (Chan::free("k"), Chan::free("k'"));
        let (x, y) = (Var::fresh("x"), Var::fresh("y"));
        let p = Process::par_all([
            Process::input(&k, &x, Process::output(&k2, Expr::var(&x), Process::Inact)),
            Process::output(&k, Expr::int(5), Process::Inact),
            Process::input(&k2, &y, Process::Inact),
        ]);
        let fsc: Vec<_> = p.free_session_channels().into_iter().collect();
        assert_eq!(fsc, vec![k, k2]);
    }

    #[test]
    fn fsc_respects_binders() {
        let (k, k2) = (Chan::fresh("k'"), Chan::fresh("k''"));
        let x = Var::fresh("x");
        let body = Process::par(
            Process::input(&k, &x, Process::output(&k2, Expr::var(&x), Process::Inact)),
            Process::input(&k2, &x, Process::output(&k, Expr::var(&x), Process::Inact)),
        );
        let p = Process::restrict_all([&k, &k2], body);
        assert!(p.free_session_channels().is_empty());
    }

    #[test]
    fn substitution_replaces_single_occurrence() {
        let k = Chan::free("k");
        let x = Var::free("x");
        let p = Process::output(&k, Expr::var(&x), Process::Inact);
        let q = p.substitute(&x, &Value::Int(5));
        assert_eq!(q, Process::output(&k, Expr::int(5), Process::Inact));
    }

    #[test]
    fn substitution_of_other_variable_is_noop() {
        let k = Chan::free("k");
        let (x, y) = (Var::free("x"), Var::free("y"));
        let p = Process::output(&k, Expr::var(&x), Process::Inact);
        assert_eq!(p.substitute(&y, &Value::Int(5)), p);
    }

    #[test]
    fn substitution_stops_at_shadowing_binder() {
        let k = Chan::free("k");
        let x = Var::free("x");
        let p = Process::input(&k, &x, Process::output(&k, Expr::var(&x), Process::Inact));
        assert_eq!(p.substitute(&x, &Value::Int(5)), p);
    }

    #[test]
    fn substitution_of_service_hits_service_positions() {
        let k = Chan::fresh("k");
        let x = Var::free("x");
        let b = Var::free("b");
        let p = Process::request(&x, &k, Process::Inact);
        assert_eq!(
            p.substitute(&x, &Value::Service(b.clone())),
            Process::request(&b, &k, Process::Inact)
        );
    }

    #[test]
    fn renaming_avoids_capture() {
        // (k!(1).0 | new k'. k'!(2).0)[k'/k] must not capture under new k'.
        let k = Chan::free("k");
        let k2 = Chan::free("k'");
        let p = Process::par(
            Process::output(&k, Expr::int(1), Process::Inact),
            Process::restrict(
                &k2,
                Process::output(
                    &k,
                    Expr::int(2),
                    Process::output(&k2, Expr::int(3), Process::Inact),
                ),
            ),
        );
        let q = p.rename_chan(&k, &k2);
        let fsc = q.free_session_channels();
        assert_eq!(fsc.into_iter().collect::<Vec<_>>(), vec![k2.clone()]);
        match q {
            Process::Par(_, r) => match *r {
                Process::Restrict(b, _) => assert_ne!(b, k2),
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn freshen_keeps_free_names() {
        let k = Chan::free("k");
        let a = Var::free("a");
        let b = Chan::fresh("t");
        let x = Var::fresh("x");
        let p = Process::par(
            Process::serv(
                &a,
                &b,
                Process::input(&b, &x, Process::output(&b, Expr::var(&x), Process::Inact)),
            ),
            Process::output(&k, Expr::int(1), Process::Inact),
        );
        let q = p.freshen();
        assert_ne!(p, q);
        assert_eq!(p.free_session_channels(), q.free_session_channels());
        assert_eq!(p.free_vars(), q.free_vars());
    }
}
