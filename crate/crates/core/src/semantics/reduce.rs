use std::fmt;

use serde::Serialize;

use super::eval::eval_expr;
use crate::congruence::{normal_form, normalize, Normal};
use crate::syntax::{Chan, Label, Process, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RuleTag {
    RInit,
    Init,
    Com,
    Del,
    Sel,
    IfT,
    IfF,
}

/// An enabled reduction of a normal form. `threads` are positions among
/// its top-level threads: the service or receiving side first, then the
/// requesting or sending side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    pub rule: RuleTag,
    pub threads: Vec<usize>,
    pub label: Option<Label>,
    pub value: Option<Value>,
    pub delegated: Option<Chan>,
}

impl Redex {
    fn new(rule: RuleTag, threads: Vec<usize>) -> Self {
        Redex {
            rule,
            threads,
            label: None,
            value: None,
            delegated: None,
        }
    }
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.threads.iter().map(|t| (t + 1).to_string()).collect();
        write!(f, "{:?} on thread", self.rule)?;
        if ids.len() > 1 {
            f.write_str("s")?;
        }
        write!(f, " {}", ids.join(", "))?;
        if let Some(l) = &self.label {
            write!(f, " (label {l})")?;
        }
        if let Some(v) = &self.value {
            write!(f, " (value {})", crate::syntax::Expr::Lit(v.clone()))?;
        }
        if let Some(k) = &self.delegated {
            write!(f, " (channel {k})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("redex `{0}` is not enabled in this process")]
    Stale(String),
}

/// All enabled redexes of the normal form of `p`.
pub fn redexes(p: &Process) -> Vec<Redex> {
    redexes_of(&normalize(p))
}

pub(crate) fn redexes_of(n: &Normal) -> Vec<Redex> {
    let ts = &n.threads;
    let mut out = Vec::new();
    for (i, t) in ts.iter().enumerate() {
        if let Process::Cond { guard, .. } = t {
            match eval_expr(guard) {
                Ok(Value::Bool(true)) => out.push(Redex::new(RuleTag::IfT, vec![i])),
                Ok(Value::Bool(false)) => out.push(Redex::new(RuleTag::IfF, vec![i])),
                _ => {}
            }
            continue;
        }
        for (j, u) in ts.iter().enumerate() {
            if i != j {
                if let Some(r) = pair(t, u, i, j) {
                    out.push(r);
                }
            }
        }
    }
    out
}

fn pair(t: &Process, u: &Process, i: usize, j: usize) -> Option<Redex> {
    match (t, u) {
        (Process::RepServ { service: a, .. }, Process::Request { service: b, .. }) if a == b => {
            Some(Redex::new(RuleTag::RInit, vec![i, j]))
        }
        (Process::Serv { service: a, .. }, Process::Request { service: b, .. }) if a == b => {
            Some(Redex::new(RuleTag::Init, vec![i, j]))
        }
        (Process::Input { chan: k, .. }, Process::Output { chan: h, expr, .. }) if k == h => {
            let v = eval_expr(expr).ok()?;
            let mut r = Redex::new(RuleTag::Com, vec![i, j]);
            r.value = Some(v);
            Some(r)
        }
        (
            Process::InputS {
                chan: k,
                bound,
                body,
            },
            Process::Delegate { chan: h, sent, .. },
        ) if k == h => {
            // The receiver must be able to rename its binder to the sent name.
            if bound != sent && body.has_free_session(sent) {
                return None;
            }
            let mut r = Redex::new(RuleTag::Del, vec![i, j]);
            r.delegated = Some(sent.clone());
            Some(r)
        }
        (Process::Branch { chan: k, arms }, Process::Select { chan: h, label, .. })
            if k == h && arms.iter().any(|(l, _)| l == label) =>
        {
            let mut r = Redex::new(RuleTag::Sel, vec![i, j]);
            r.label = Some(label.clone());
            Some(r)
        }
        _ => None,
    }
}

/// Performs `r` on `p` and returns the normal form of the result.
pub fn step(p: &Process, r: &Redex) -> Result<Process, StepError> {
    let n = normalize(p);
    if !redexes_of(&n).contains(r) {
        return Err(StepError::Stale(r.to_string()));
    }
    Ok(normal_form(&contract(n, r)))
}

pub(crate) fn contract(mut n: Normal, r: &Redex) -> Process {
    let i = r.threads[0];
    match r.rule {
        RuleTag::IfT | RuleTag::IfF => {
            let Process::Cond { then, other, .. } = &n.threads[i] else {
                unreachable!("checked by redex enumeration")
            };
            n.threads[i] = if r.rule == RuleTag::IfT {
                (**then).clone()
            } else {
                (**other).clone()
            };
        }
        RuleTag::RInit | RuleTag::Init => {
            let j = r.threads[1];
            let (Process::RepServ {
                chan: ks, body: p, ..
            }
            | Process::Serv {
                chan: ks, body: p, ..
            }) = &n.threads[i]
            else {
                unreachable!("checked by redex enumeration")
            };
            let Process::Request {
                chan: kr, body: q, ..
            } = &n.threads[j]
            else {
                unreachable!("checked by redex enumeration")
            };
            let fresh = kr.refresh();
            let q2 = q.rename_chan(kr, &fresh);
            if r.rule == RuleTag::RInit {
                let p2 = p.freshen().rename_chan(ks, &fresh);
                n.threads[j] = Process::par(q2, p2);
            } else {
                let p2 = p.rename_chan(ks, &fresh);
                n.threads[i] = p2;
                n.threads[j] = q2;
            }
            n.restricted.push(fresh);
        }
        RuleTag::Com => {
            let j = r.threads[1];
            let (Process::Input { var, body: p, .. }, Process::Output { body: q, .. }) =
                (&n.threads[i], &n.threads[j])
            else {
                unreachable!("checked by redex enumeration")
            };
            let v = r.value.as_ref().expect("Com carries its value");
            let (p2, q2) = (p.substitute(var, v), (**q).clone());
            n.threads[i] = p2;
            n.threads[j] = q2;
        }
        RuleTag::Del => {
            let j = r.threads[1];
            let (Process::InputS { bound, body: p, .. }, Process::Delegate { sent, body: q, .. }) =
                (&n.threads[i], &n.threads[j])
            else {
                unreachable!("checked by redex enumeration")
            };
            let (p2, q2) = (p.rename_chan(bound, sent), (**q).clone());
            n.threads[i] = p2;
            n.threads[j] = q2;
        }
        RuleTag::Sel => {
            let j = r.threads[1];
            let (Process::Branch { arms, .. }, Process::Select { label, body: q, .. }) =
                (&n.threads[i], &n.threads[j])
            else {
                unreachable!("checked by redex enumeration")
            };
            let chosen = arms
                .iter()
                .find(|(l, _)| l == label)
                .map(|(_, a)| a.clone())
                .expect("checked by redex enumeration");
            let q2 = (**q).clone();
            n.threads[i] = chosen;
            n.threads[j] = q2;
        }
    }
    n.to_process()
}
