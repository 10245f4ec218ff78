use std::collections::BTreeSet;
use std::fmt::Write;

use super::expr::{Expr, Value};
use super::names::{Chan, Var};
use super::process::Process;

/// True iff `p` and `q` differ only in the identity of bound names.
///
/// Branch arms are compared as maps.
pub fn alpha_equivalent(p: &Process, q: &Process) -> bool {
    alpha_key(p) == alpha_key(q)
}

/// A string that is equal for two terms exactly when they are
/// alpha-equivalent: binders print as `$i`, numbered in traversal order.
pub fn alpha_key(p: &Process) -> String {
    alpha_key_opaque(p, &BTreeSet::new())
}

/// Like [`alpha_key`], printing the free channels in `opaque` as `~`.
pub fn alpha_key_opaque(p: &Process, opaque: &BTreeSet<Chan>) -> String {
    let mut k = Keyer {
        out: String::new(),
        chans: Vec::new(),
        vars: Vec::new(),
        next: 0,
        opaque,
    };
    k.process(p);
    k.out
}

struct Keyer<'a> {
    out: String,
    chans: Vec<(Chan, usize)>,
    vars: Vec<(Var, usize)>,
    next: usize,
    opaque: &'a BTreeSet<Chan>,
}

impl Keyer<'_> {
    fn chan(&mut self, k: &Chan) {
        if let Some((_, i)) = self.chans.iter().rev().find(|(c, _)| c == k) {
            let _ = write!(self.out, "${i}");
        } else if self.opaque.contains(k) {
            self.out.push('~');
        } else {
            let _ = write!(self.out, "{:?}", k);
        }
    }

    fn var(&mut self, x: &Var) {
        if let Some((_, i)) = self.vars.iter().rev().find(|(v, _)| v == x) {
            let _ = write!(self.out, "${i}");
        } else {
            let _ = write!(self.out, "{:?}", x);
        }
    }

    fn bind_chan(&mut self, k: &Chan) {
        let _ = write!(self.out, "${}", self.next);
        self.chans.push((k.clone(), self.next));
        self.next += 1;
    }

    fn bind_var(&mut self, x: &Var) {
        let _ = write!(self.out, "${}", self.next);
        self.vars.push((x.clone(), self.next));
        self.next += 1;
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Lit(Value::Int(n)) => {
                let _ = write!(self.out, "{n}");
            }
            Expr::Lit(Value::Bool(b)) => {
                let _ = write!(self.out, "{b}");
            }
            Expr::Lit(Value::Str(s)) => {
                let _ = write!(self.out, "{s:?}");
            }
            Expr::Lit(Value::Service(a)) => {
                self.out.push('@');
                self.var(a);
            }
            Expr::Var(x) => self.var(x),
            Expr::Not(e) => {
                self.out.push_str("!(");
                self.expr(e);
                self.out.push(')');
            }
            Expr::Bin(op, l, r) => {
                self.out.push('(');
                self.expr(l);
                self.out.push_str(op.symbol());
                self.expr(r);
                self.out.push(')');
            }
        }
    }

    fn scoped_chan(&mut self, tag: &str, k: &Chan, body: &Process) {
        self.out.push_str(tag);
        self.bind_chan(k);
        self.out.push('.');
        self.process(body);
        self.chans.pop();
    }

    fn process(&mut self, p: &Process) {
        match p {
            Process::Inact => self.out.push('0'),
            Process::Par(l, r) => {
                self.out.push('(');
                self.process(l);
                self.out.push('|');
                self.process(r);
                self.out.push(')');
            }
            Process::Restrict(k, body) => self.scoped_chan("new ", k, body),
            Process::RepServ {
                service,
                chan,
                body,
            } => {
                self.out.push('*');
                self.var(service);
                self.scoped_chan("()", chan, body);
            }
            Process::Serv {
                service,
                chan,
                body,
            } => {
                self.var(service);
                self.scoped_chan("()", chan, body);
            }
            Process::Request {
                service,
                chan,
                body,
            } => {
                self.var(service);
                self.scoped_chan("<>", chan, body);
            }
            Process::Input { chan, var, body } => {
                self.chan(chan);
                self.out.push('?');
                self.bind_var(var);
                self.out.push('.');
                self.process(body);
                self.vars.pop();
            }
            Process::Output { chan, expr, body } => {
                self.chan(chan);
                self.out.push_str("!(");
                self.expr(expr);
                self.out.push_str(").");
                self.process(body);
            }
            Process::InputS { chan, bound, body } => {
                self.chan(chan);
                self.scoped_chan("??", bound, body);
            }
            Process::Delegate { chan, sent, body } => {
                self.chan(chan);
                self.out.push_str("!!");
                self.chan(sent);
                self.out.push('.');
                self.process(body);
            }
            Process::Branch { chan, arms } => {
                self.chan(chan);
                self.out.push_str(">>{");
                let mut sorted: Vec<_> = arms.iter().collect();
                sorted.sort_by(|a, b| a.0.cmp(&b.0));
                for (l, a) in sorted {
                    let _ = write!(self.out, "{l}:");
                    self.process(a);
                    self.out.push(',');
                }
                self.out.push('}');
            }
            Process::Select { chan, label, body } => {
                self.chan(chan);
                let _ = write!(self.out, "<<{label}.");
                self.process(body);
            }
            Process::Cond { guard, then, other } => {
                self.out.push_str("if ");
                self.expr(guard);
                self.out.push_str(" then ");
                self.process(then);
                self.out.push_str(" else ");
                self.process(other);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renamed_service_binder_is_equivalent() {
        let a = Var::free("a");
        let (k, t) = (Chan::fresh("k"), Chan::fresh("t"));
        let p = Process::serv(&a, &k, Process::output(&k, Expr::int(1), Process::Inact));
        let q = Process::serv(&a, &t, Process::output(&t, Expr::int(1), Process::Inact));
        assert!(alpha_equivalent(&p, &q));
    }

    #[test]
    fn distinct_free_channels_differ() {
        let p = Process::output(&Chan::free("k"), Expr::int(1), Process::Inact);
        let q = Process::output(&Chan::free("k'"), Expr::int(1), Process::Inact);
        assert!(!alpha_equivalent(&p, &q));
    }

    #[test]
    fn renamed_restriction_is_equivalent() {
        let (k, s) = (Chan::fresh("k"), Chan::fresh("s"));
        let p = Process::restrict(&k, Process::output(&k, Expr::int(1), Process::Inact));
        let q = Process::restrict(&s, Process::output(&s, Expr::int(1), Process::Inact));
        assert!(alpha_equivalent(&p, &q));
    }

    #[test]
    fn arm_order_is_irrelevant() {
        let k = Chan::free("k");
        let p = Process::branch(&k, [("a", Process::Inact), ("b", Process::Inact)]);
        let q = Process::branch(&k, [("b", Process::Inact), ("a", Process::Inact)]);
        assert!(alpha_equivalent(&p, &q));
    }
}
