use std::collections::BTreeMap;
use std::rc::Rc;

use super::unify::{Dir, Mismatch, Pay, SortT, Ty, Unifier};
use super::{CheckOptions, TypeError};
use crate::syntax::{
    Basic, BinOp, Chan, Entry, Expr, Label, Process, ServiceEnv, SessionEnv, Value, Var,
};

#[derive(Clone, Debug)]
pub(crate) enum IEntry {
    Bottom,
    Ty(Ty),
}

pub(crate) type IDelta = BTreeMap<Chan, IEntry>;

pub(crate) struct Infer {
    pub(crate) u: Unifier,
    opts: CheckOptions,
    scope: Vec<(Var, SortT)>,
    globals: BTreeMap<Var, SortT>,
}

type TResult<T> = Result<T, TypeError>;

fn err(rule: &'static str, message: impl Into<String>, p: &Process) -> TypeError {
    TypeError::new(rule, message, p)
}

fn msg(d: Dir, pay: Pay, cont: Ty) -> IEntry {
    IEntry::Ty(Ty::Msg(d, Rc::new(pay), Rc::new(cont)))
}

impl Infer {
    pub(crate) fn new(opts: CheckOptions, g: &ServiceEnv) -> Self {
        Infer {
            u: Unifier::default(),
            opts,
            scope: Vec::new(),
            globals: g
                .iter()
                .map(|(x, s)| (x.clone(), SortT::from_sort(s)))
                .collect(),
        }
    }

    fn lookup(&self, x: &Var) -> Option<SortT> {
        self.scope
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, s)| s.clone())
            .or_else(|| self.globals.get(x).cloned())
    }

    pub(crate) fn expr(&mut self, e: &Expr) -> Result<SortT, String> {
        match e {
            Expr::Lit(Value::Int(_)) => Ok(SortT::Basic(Basic::Int)),
            Expr::Lit(Value::Bool(_)) => Ok(SortT::Basic(Basic::Bool)),
            Expr::Lit(Value::Str(_)) => Ok(SortT::Basic(Basic::Str)),
            Expr::Lit(Value::Service(x)) | Expr::Var(x) => {
                self.lookup(x).ok_or_else(|| format!("unbound name `{x}`"))
            }
            Expr::Not(inner) => {
                self.expect_sort(inner, Basic::Bool)?;
                Ok(SortT::Basic(Basic::Bool))
            }
            Expr::Bin(op, l, r) => {
                let (arg, res) = match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul => (Basic::Int, Basic::Int),
                    BinOp::Le | BinOp::Eq => (Basic::Int, Basic::Bool),
                    BinOp::And => (Basic::Bool, Basic::Bool),
                };
                self.expect_sort(l, arg)?;
                self.expect_sort(r, arg)?;
                Ok(SortT::Basic(res))
            }
        }
    }

    fn expect_sort(&mut self, e: &Expr, b: Basic) -> Result<(), String> {
        let s = self.expr(e)?;
        self.u
            .unify_sort(&s, &SortT::Basic(b))
            .map_err(|m| format!("`{e}` has sort {}, expected {}", m.left, b.keyword()))
    }

    /// Removes `k` from `d`: absent means `end`, `⊥` is an error.
    fn take(&mut self, d: &mut IDelta, k: &Chan, rule: &'static str, p: &Process) -> TResult<Ty> {
        match d.remove(k) {
            None => Ok(Ty::End),
            Some(IEntry::Ty(t)) => Ok(t),
            Some(IEntry::Bottom) => Err(err(
                rule,
                format!("session `{k}` is already complete in the continuation"),
                p,
            )),
        }
    }

    fn unify_at(
        &mut self,
        a: &Ty,
        b: &Ty,
        rule: &'static str,
        what: &str,
        p: &Process,
    ) -> TResult<()> {
        self.u.unify(a, b).map_err(|Mismatch { left, right }| {
            err(
                rule,
                format!("{what}: `{left}` is incompatible with `{right}`"),
                p,
            )
        })
    }

    pub(crate) fn process(&mut self, p: &Process) -> TResult<IDelta> {
        match p {
            Process::Inact => Ok(IDelta::new()),
            Process::Par(l, r) => {
                let dl = self.process(l)?;
                let dr = self.process(r)?;
                self.compose(dl, dr, p)
            }
            Process::Restrict(k, body) => {
                let mut d = self.process(body)?;
                if let Some(IEntry::Ty(t)) = d.remove(k) {
                    let what = format!("restricted session `{k}` has only one endpoint");
                    self.unify_at(&t, &Ty::End, "T-Res", &what, p)?;
                }
                Ok(d)
            }
            Process::RepServ {
                service,
                chan,
                body,
            } => self.service_body(service, chan, body, "T-RServ", false, p),
            Process::Serv {
                service,
                chan,
                body,
            } => {
                let relaxed = self.opts.standard_serv;
                self.service_body(service, chan, body, "T-Serv", relaxed, p)
            }
            Process::Request {
                service,
                chan,
                body,
            } => {
                let mut d = self.process(body)?;
                let alpha = self.take(&mut d, chan, "T-Req", p)?;
                let want = SortT::Service(alpha.dual());
                let have = self
                    .lookup(service)
                    .ok_or_else(|| err("T-Req", format!("unbound service `{service}`"), p))?;
                self.u.unify_sort(&have, &want).map_err(|m| {
                    err(
                        "T-Req",
                        format!(
                            "service `{service}` has sort {}, but the session expects {}",
                            m.left, m.right
                        ),
                        p,
                    )
                })?;
                Ok(d)
            }
            Process::Input { chan, var, body } => {
                let s = self.u.fresh_sort();
                self.scope.push((var.clone(), s.clone()));
                let d = self.process(body);
                self.scope.pop();
                let mut d = d?;
                let alpha = self.take(&mut d, chan, "T-In", p)?;
                d.insert(chan.clone(), msg(Dir::In, Pay::Sort(s), alpha));
                Ok(d)
            }
            Process::Output { chan, expr, body } => {
                let mut d = self.process(body)?;
                let s = self.expr(expr).map_err(|m| err("T-Out", m, p))?;
                let alpha = self.take(&mut d, chan, "T-Out", p)?;
                d.insert(chan.clone(), msg(Dir::Out, Pay::Sort(s), alpha));
                Ok(d)
            }
            Process::InputS { chan, bound, body } => {
                let mut d = self.process(body)?;
                let beta = self.take(&mut d, bound, "T-InS", p)?;
                let alpha = self.take(&mut d, chan, "T-InS", p)?;
                d.insert(chan.clone(), msg(Dir::In, Pay::Session(beta), alpha));
                Ok(d)
            }
            Process::Delegate { chan, sent, body } => {
                if chan == sent {
                    let m = format!("session `{chan}` cannot be sent over itself");
                    return Err(err("T-Del", m, p));
                }
                let mut d = self.process(body)?;
                let what = format!("delegated session `{sent}` is used after being sent");
                match d.remove(sent) {
                    None => {}
                    Some(IEntry::Bottom) => return Err(err("T-Del", what, p)),
                    Some(IEntry::Ty(t)) => self.unify_at(&t, &Ty::End, "T-Del", &what, p)?,
                }
                let alpha = self.take(&mut d, chan, "T-Del", p)?;
                let beta = self.u.fresh_ty();
                d.insert(
                    chan.clone(),
                    msg(Dir::Out, Pay::Session(beta.clone()), alpha),
                );
                d.insert(sent.clone(), IEntry::Ty(beta));
                Ok(d)
            }
            Process::Branch { chan, arms } => {
                let mut joined: Option<IDelta> = None;
                let mut types: BTreeMap<Label, Ty> = BTreeMap::new();
                for (l, arm) in arms {
                    let mut d = self.process(arm)?;
                    let alpha = self.take(&mut d, chan, "T-Bra", p)?;
                    if types.insert(l.clone(), alpha).is_some() {
                        return Err(err("T-Bra", format!("duplicate label `{l}`"), p));
                    }
                    joined = Some(match joined {
                        None => d,
                        Some(acc) => self.join(acc, d, "T-Bra", p)?,
                    });
                }
                let mut d =
                    joined.ok_or_else(|| err("T-Bra", "a branch needs at least one arm", p))?;
                d.insert(chan.clone(), IEntry::Ty(Ty::Choice(Dir::In, types, None)));
                Ok(d)
            }
            Process::Select { chan, label, body } => {
                let mut d = self.process(body)?;
                let alpha = self.take(&mut d, chan, "T-Sel", p)?;
                let row = self.u.fresh_row();
                let arms = [(label.clone(), alpha)].into();
                d.insert(chan.clone(), IEntry::Ty(Ty::Choice(Dir::Out, arms, row)));
                Ok(d)
            }
            Process::Cond { guard, then, other } => {
                self.expect_sort(guard, Basic::Bool)
                    .map_err(|m| err("T-Cond", m, p))?;
                let d1 = self.process(then)?;
                let d2 = self.process(other)?;
                self.join(d1, d2, "T-Cond", p)
            }
        }
    }

    fn service_body(
        &mut self,
        service: &Var,
        chan: &Chan,
        body: &Process,
        rule: &'static str,
        relaxed: bool,
        p: &Process,
    ) -> TResult<IDelta> {
        let mut d = self.process(body)?;
        let alpha = self.take(&mut d, chan, rule, p)?;
        let mut rest = IDelta::new();
        for (k, e) in d {
            let what = format!("body uses open session `{k}`");
            match e {
                IEntry::Ty(t) if !relaxed => self.unify_at(&t, &Ty::End, rule, &what, p)?,
                IEntry::Bottom if !relaxed => return Err(err(rule, what, p)),
                e => {
                    rest.insert(k, e);
                }
            }
        }
        let have = self
            .lookup(service)
            .ok_or_else(|| err(rule, format!("unbound service `{service}`"), p))?;
        self.u
            .unify_sort(&have, &SortT::Service(alpha))
            .map_err(|m| {
                err(
                    rule,
                    format!(
                        "service `{service}` has sort {}, but its body implements {}",
                        m.left, m.right
                    ),
                    p,
                )
            })?;
        Ok(rest)
    }

    pub(crate) fn compose(&mut self, mut d1: IDelta, d2: IDelta, p: &Process) -> TResult<IDelta> {
        for (k, e2) in d2 {
            match (d1.remove(&k), e2) {
                (None, e) => {
                    d1.insert(k, e);
                }
                (Some(IEntry::Ty(t1)), IEntry::Ty(t2)) => {
                    let what = format!("the two endpoints of `{k}` are not dual");
                    self.unify_at(&t1, &t2.dual(), "T-Par", &what, p)?;
                    d1.insert(k, IEntry::Bottom);
                }
                _ => {
                    let m = format!("session `{k}` is already complete and used again");
                    return Err(err("T-Par", m, p));
                }
            }
        }
        Ok(d1)
    }

    /// Agreement of branch environments, aligning `end` with `⊥`.
    fn join(
        &mut self,
        mut d1: IDelta,
        d2: IDelta,
        rule: &'static str,
        p: &Process,
    ) -> TResult<IDelta> {
        let mut out = IDelta::new();
        let what = |k: &Chan| format!("branches disagree on `{k}`");
        for (k, e2) in d2 {
            let merged = match (d1.remove(&k), e2) {
                (Some(IEntry::Bottom) | None, IEntry::Bottom) => IEntry::Bottom,
                (Some(IEntry::Bottom), IEntry::Ty(t)) | (Some(IEntry::Ty(t)), IEntry::Bottom) => {
                    self.unify_at(&t, &Ty::End, rule, &what(&k), p)?;
                    IEntry::Bottom
                }
                (Some(IEntry::Ty(t1)), IEntry::Ty(t2)) => {
                    self.unify_at(&t1, &t2, rule, &what(&k), p)?;
                    IEntry::Ty(t1)
                }
                (None, IEntry::Ty(t)) => {
                    self.unify_at(&t, &Ty::End, rule, &what(&k), p)?;
                    IEntry::Ty(t)
                }
            };
            out.insert(k, merged);
        }
        for (k, e1) in d1 {
            if let IEntry::Ty(t) = &e1 {
                self.unify_at(t, &Ty::End, rule, &what(&k), p)?;
            }
            out.insert(k, e1);
        }
        Ok(out)
    }

    pub(crate) fn zonk_delta(&mut self, d: &IDelta) -> SessionEnv {
        d.iter()
            .map(|(k, e)| {
                let e = match e {
                    IEntry::Bottom => Entry::Bottom,
                    IEntry::Ty(t) => Entry::Type(self.u.zonk(t)),
                };
                (k.clone(), e)
            })
            .collect()
    }
}
