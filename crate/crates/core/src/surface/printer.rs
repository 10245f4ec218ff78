use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write};

use super::lexer::KEYWORDS;
use super::parser::SourceFile;
use crate::syntax::{
    BinOp, Chan, Entry, Expr, Name, Payload, Process, ServiceEnv, SessionEnv, SessionType, Sort,
    Value,
};

pub fn print_process(p: &Process) -> String {
    let mut pr = Printer::for_term(p);
    pr.par(p);
    pr.out
}

pub fn print_type(t: &SessionType) -> String {
    let mut s = String::new();
    write_type(&mut s, t);
    s
}

pub fn print_sort(s: &Sort) -> String {
    match s {
        Sort::Basic(b) => b.keyword().to_string(),
        Sort::Service(t) => format!("<{}>", print_type(t)),
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut pr = Printer::default();
    pr.expr(e, 0);
    pr.out
}

/// `{k: ![int].end, k': ⊥}`.
pub fn print_session_env(d: &SessionEnv) -> String {
    let items: Vec<String> = d
        .iter()
        .map(|(k, e)| match e {
            Entry::Bottom => format!("{k}: ⊥"),
            Entry::Type(t) => format!("{k}: {}", print_type(t)),
        })
        .collect();
    format!("{{{}}}", items.join(", "))
}

pub fn print_service_env(g: &ServiceEnv) -> String {
    let items: Vec<String> = g
        .iter()
        .map(|(a, s)| format!("{a} : {}", print_sort(s)))
        .collect();
    items.join("; ")
}

/// Prints a complete source file: a `sessions` header listing the free
/// session channels, the environment block and the process.
pub fn print_source(file: &SourceFile) -> String {
    let mut out = String::new();
    let mut sessions: BTreeSet<Chan> = file.sessions.iter().cloned().collect();
    sessions.extend(file.process.free_session_channels());
    if !sessions.is_empty() {
        let names: Vec<String> = sessions.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(out, "sessions {};", names.join(", "));
    }
    if !file.env.is_empty() {
        out.push_str("env\n");
        for (a, s) in file.env.iter() {
            let _ = writeln!(out, "  {a} : {};", print_sort(s));
        }
    }
    out.push_str(&print_process(&file.process));
    out.push('\n');
    out
}

fn write_type(out: &mut String, t: &SessionType) {
    match t {
        SessionType::End => out.push_str("end"),
        SessionType::In(p, a) | SessionType::Out(p, a) => {
            out.push(if matches!(t, SessionType::In(..)) {
                '?'
            } else {
                '!'
            });
            out.push('[');
            match &**p {
                Payload::Basic(b) => out.push_str(b.keyword()),
                Payload::Service(s) => {
                    out.push('<');
                    write_type(out, s);
                    out.push('>');
                }
                Payload::Session(s) => write_type(out, s),
            }
            out.push_str("].");
            write_type(out, a);
        }
        SessionType::Branch(arms) | SessionType::Select(arms) => {
            out.push_str(if matches!(t, SessionType::Branch(_)) {
                "&{"
            } else {
                "+{"
            });
            for (i, (l, a)) in arms.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{l}: ");
                write_type(out, a);
            }
            out.push('}');
        }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::from('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Display names are chosen so that reparsing resolves every occurrence to
/// the same binder: binders that would clash with a free name or with an
/// enclosing binder get a numeric suffix.
#[derive(Default)]
struct Printer {
    out: String,
    names: HashMap<Name, String>,
    taken: BTreeSet<String>,
    /// Binders in scope: display name and source text.
    scope: Vec<(String, String)>,
    in_scope: HashMap<String, usize>,
    same_text: HashMap<String, usize>,
}

impl Printer {
    fn for_term(p: &Process) -> Self {
        let mut pr = Printer::default();
        let mut free: BTreeMap<Name, ()> = BTreeMap::new();
        for k in p.free_session_channels() {
            free.insert(k.0, ());
        }
        for x in p.free_vars() {
            free.insert(x.0, ());
        }
        for name in free.into_keys() {
            let shown = pr.pick(name.text());
            pr.taken.insert(shown.clone());
            pr.names.insert(name, shown);
        }
        pr
    }

    fn pick(&self, text: &str) -> String {
        let clash = |s: &str| {
            self.taken.contains(s)
                || self.in_scope.get(s).is_some_and(|&n| n > 0)
                || KEYWORDS.contains(&s)
        };
        if !clash(text) {
            return text.to_string();
        }
        let base = text.trim_end_matches('\'');
        let primes = &text[base.len()..];
        let start = self.same_text.get(text).copied().unwrap_or(0).max(1);
        (start..)
            .map(|i| format!("{base}{i}{primes}"))
            .find(|s| !clash(s))
            .expect("unbounded search")
    }

    fn bind(&mut self, n: &Name) -> String {
        let shown = self.pick(n.text());
        self.names.insert(n.clone(), shown.clone());
        *self.in_scope.entry(shown.clone()).or_default() += 1;
        *self.same_text.entry(n.text().to_string()).or_default() += 1;
        self.scope.push((shown.clone(), n.text().to_string()));
        shown
    }

    fn unbind(&mut self) {
        if let Some((shown, text)) = self.scope.pop() {
            for (map, key) in [(&mut self.in_scope, shown), (&mut self.same_text, text)] {
                if let Some(n) = map.get_mut(&key) {
                    *n -= 1;
                }
            }
        }
    }

    fn name(&self, n: &Name) -> String {
        self.names
            .get(n)
            .cloned()
            .unwrap_or_else(|| n.text().to_string())
    }

    fn par(&mut self, p: &Process) {
        match p {
            Process::Par(l, r) => {
                self.par(l);
                self.out.push_str(" | ");
                self.unit(r);
            }
            _ => self.unit(p),
        }
    }

    fn cont(&mut self, p: &Process) {
        self.out.push('.');
        self.unit(p);
    }

    fn bound_cont(&mut self, n: &Name, close: &str, body: &Process) {
        let shown = self.bind(n);
        self.out.push_str(&shown);
        self.out.push_str(close);
        self.cont(body);
        self.unbind();
    }

    fn unit(&mut self, p: &Process) {
        match p {
            Process::Inact => self.out.push('0'),
            Process::Par(..) => {
                self.out.push('(');
                self.par(p);
                self.out.push(')');
            }
            Process::Restrict(..) => {
                let mut ks = Vec::new();
                let mut body = p;
                while let Process::Restrict(k, b) = body {
                    ks.push(k);
                    body = b;
                }
                let shown: Vec<String> = ks.iter().map(|k| self.bind(&k.0)).collect();
                let _ = write!(self.out, "new {} . ", shown.join(", "));
                self.unit(body);
                for _ in ks {
                    self.unbind();
                }
            }
            Process::RepServ {
                service,
                chan,
                body,
            } => {
                let _ = write!(self.out, "*{}(", self.name(&service.0));
                self.bound_cont(&chan.0, ")", body);
            }
            Process::Serv {
                service,
                chan,
                body,
            } => {
                let _ = write!(self.out, "{}(", self.name(&service.0));
                self.bound_cont(&chan.0, ")", body);
            }
            Process::Request {
                service,
                chan,
                body,
            } => {
                let _ = write!(self.out, "{}<", self.name(&service.0));
                self.bound_cont(&chan.0, ">", body);
            }
            Process::Input { chan, var, body } => {
                let _ = write!(self.out, "{}?(", self.name(&chan.0));
                self.bound_cont(&var.0, ")", body);
            }
            Process::Output { chan, expr, body } => {
                let _ = write!(self.out, "{}!(", self.name(&chan.0));
                self.expr(expr, 0);
                self.out.push(')');
                self.cont(body);
            }
            Process::InputS { chan, bound, body } => {
                let _ = write!(self.out, "{}?((", self.name(&chan.0));
                self.bound_cont(&bound.0, "))", body);
            }
            Process::Delegate { chan, sent, body } => {
                let _ = write!(
                    self.out,
                    "{}!(({}))",
                    self.name(&chan.0),
                    self.name(&sent.0)
                );
                self.cont(body);
            }
            Process::Branch { chan, arms } => {
                let _ = write!(self.out, "{} >> {{ ", self.name(&chan.0));
                for (i, (l, a)) in arms.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    let _ = write!(self.out, "{l}: ");
                    self.par(a);
                }
                self.out.push_str(" }");
            }
            Process::Select { chan, label, body } => {
                let _ = write!(self.out, "{} << {label}", self.name(&chan.0));
                self.cont(body);
            }
            Process::Cond { guard, then, other } => {
                self.out.push_str("if ");
                self.expr(guard, 0);
                self.out.push_str(" then ");
                self.unit(then);
                self.out.push_str(" else ");
                self.unit(other);
            }
        }
    }

    fn expr(&mut self, e: &Expr, ctx: u8) {
        match e {
            Expr::Lit(Value::Int(n)) => {
                let _ = write!(self.out, "{n}");
            }
            Expr::Lit(Value::Bool(b)) => {
                let _ = write!(self.out, "{b}");
            }
            Expr::Lit(Value::Str(s)) => self.out.push_str(&escape(s)),
            Expr::Lit(Value::Service(a)) | Expr::Var(a) => {
                let shown = self.name(&a.0);
                self.out.push_str(&shown);
            }
            Expr::Not(inner) => {
                let wrap = ctx > 5;
                if wrap {
                    self.out.push('(');
                }
                self.out.push_str("not ");
                self.expr(inner, 5);
                if wrap {
                    self.out.push(')');
                }
            }
            Expr::Bin(op, l, r) => {
                let level = op.level();
                let wrap = ctx > level;
                if wrap {
                    self.out.push('(');
                }
                let non_assoc = matches!(op, BinOp::Le | BinOp::Eq);
                self.expr(l, if non_assoc { level + 1 } else { level });
                let _ = write!(self.out, " {} ", op.symbol());
                self.expr(r, level + 1);
                if wrap {
                    self.out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_process(self))
    }
}

impl fmt::Display for SessionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_process;
    use crate::syntax::{alpha_equivalent, Var};

    #[test]
    fn inaction() {
        assert_eq!(print_process(&Process::Inact), "0");
    }

    #[test]
    fn output_round_trip() {
        let p = parse_process("sessions k; k!(5).0").unwrap();
        assert_eq!(print_process(&p), "k!(5).0");
    }

    #[test]
    fn right_nested_par_gets_parens() {
        let k = Chan::free("k");
        let o = |n| Process::output(&k, Expr::int(n), Process::Inact);
        let p = Process::par(o(1), Process::par(o(2), o(3)));
        assert_eq!(print_process(&p), "k!(1).0 | (k!(2).0 | k!(3).0)");
    }

    #[test]
    fn clashing_binder_is_renamed() {
        // k free, and a binder also displayed `k` capturing nothing it shouldn't.
        let k = Chan::free("k");
        let inner = Chan::fresh("k");
        let a = Var::free("a");
        let p = Process::par(
            Process::output(&k, Expr::int(1), Process::Inact),
            Process::serv(
                &a,
                &inner,
                Process::output(&inner, Expr::int(2), Process::Inact),
            ),
        );
        let shown = print_process(&p);
        assert_eq!(shown, "k!(1).0 | a(k1).k1!(2).0");
        let src = format!("sessions k; env a : <![int].end>; {shown}");
        assert!(alpha_equivalent(&parse_process(&src).unwrap(), &p));
    }

    #[test]
    fn expression_parens_are_minimal() {
        let e = Expr::bin(
            BinOp::Mul,
            Expr::bin(BinOp::Add, Expr::int(1), Expr::int(2)),
            Expr::bin(BinOp::Sub, Expr::int(3), Expr::int(-4)),
        );
        assert_eq!(print_expr(&e), "(1 + 2) * (3 - -4)");
        let e = Expr::bin(
            BinOp::Sub,
            Expr::bin(BinOp::Sub, Expr::int(1), Expr::int(2)),
            Expr::int(3),
        );
        assert_eq!(print_expr(&e), "1 - 2 - 3");
        let e = Expr::negate(Expr::bin(BinOp::And, Expr::bool(true), Expr::bool(false)));
        assert_eq!(print_expr(&e), "not (true && false)");
    }
}
