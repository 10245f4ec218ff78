use crate::syntax::{
    Basic, Chan, Expr, Payload, Process, ServiceEnv, SessionType, Sort, Var, RESERVED_PREFIX,
};

/// The canonical value of a basic sort.
pub fn canonical_value(b: Basic) -> Expr {
    match b {
        Basic::Int => Expr::int(1),
        Basic::Bool => Expr::bool(true),
        Basic::Str => Expr::str("1"),
    }
}

/// The canonical process using `k` exactly as `ty` prescribes, with the
/// services it introduces.
pub fn inhabit(ty: &SessionType, k: &Chan) -> (Process, ServiceEnv) {
    inhabit_avoiding(ty, k, &ServiceEnv::new())
}

/// As [`inhabit`], choosing introduced service names absent from `avoid`.
pub fn inhabit_avoiding(ty: &SessionType, k: &Chan, avoid: &ServiceEnv) -> (Process, ServiceEnv) {
    let mut b = Builder {
        avoid,
        ext: ServiceEnv::new(),
        next: 0,
    };
    let p = b.build(ty, k);
    (p, b.ext)
}

struct Builder<'a> {
    avoid: &'a ServiceEnv,
    ext: ServiceEnv,
    next: usize,
}

impl Builder<'_> {
    fn fresh_service(&mut self, ty: &SessionType) -> Var {
        loop {
            let a = Var::free(format!("{RESERVED_PREFIX}inh{}", self.next));
            self.next += 1;
            if !self.avoid.contains(&a) {
                self.ext
                    .insert(a.clone(), Sort::Service(ty.clone()))
                    .expect("reserved names are unique");
                return a;
            }
        }
    }

    fn build(&mut self, ty: &SessionType, k: &Chan) -> Process {
        match ty {
            SessionType::End => Process::Inact,
            SessionType::In(p, rest) => match &**p {
                Payload::Basic(_) | Payload::Service(_) => {
                    let x = Var::fresh("x");
                    Process::input(k, &x, self.build(rest, k))
                }
                Payload::Session(inner) => {
                    let bound = Chan::fresh(format!("{}'", k.text()));
                    let mine = self.build(rest, k);
                    let theirs = self.build(inner, &bound);
                    Process::input_s(k, &bound, Process::par(mine, theirs))
                }
            },
            SessionType::Out(p, rest) => match &**p {
                Payload::Basic(b) => Process::output(k, canonical_value(*b), self.build(rest, k)),
                Payload::Service(inner) => {
                    let a = self.fresh_service(inner);
                    let server_chan = Chan::fresh(format!("{}'", k.text()));
                    let server =
                        Process::rep_serv(&a, &server_chan, self.build(inner, &server_chan));
                    let mine = self.build(rest, k);
                    Process::output(k, Expr::service(&a), Process::par(mine, server))
                }
                Payload::Session(inner) => {
                    let sent = Chan::fresh(format!("{}'", k.text()));
                    let mine = Process::delegate(k, &sent, self.build(rest, k));
                    let other = self.build(&inner.dual(), &sent);
                    Process::restrict(&sent, Process::par(mine, other))
                }
            },
            SessionType::Branch(arms) => {
                let arms: Vec<_> = arms
                    .iter()
                    .map(|(l, a)| (l.as_str().to_string(), self.build(a, k)))
                    .collect();
                Process::branch(k, arms)
            }
            SessionType::Select(arms) => {
                let (l, a) = arms.iter().next().expect("choices are nonempty");
                Process::select(k, l.as_str(), self.build(a, k))
            }
        }
    }
}
