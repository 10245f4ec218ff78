use std::collections::BTreeSet;
use std::sync::Arc;

use super::names::Var;

/// Runtime values: basic literals and service names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(Arc<str>),
    Service(Var),
}

impl Value {
    pub fn str(s: impl AsRef<str>) -> Self {
        Value::Str(Arc::from(s.as_ref()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Le,
    Eq,
    And,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Le => "<=",
            BinOp::Eq => "==",
            BinOp::And => "&&",
        }
    }

    /// Binding strength; higher binds tighter.
    pub(crate) fn level(self) -> u8 {
        match self {
            BinOp::And => 1,
            BinOp::Le | BinOp::Eq => 2,
            BinOp::Add | BinOp::Sub => 3,
            BinOp::Mul => 4,
        }
    }
}

/// First-order expressions.
///
/// A free service name appears as `Lit(Value::Service(a))`; `Var` is reserved
/// for names bound by an input prefix (or declared in the environment at a
/// basic sort), and evaluating one is an error.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Value),
    Var(Var),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Self {
        Expr::Lit(Value::Int(n))
    }

    pub fn bool(b: bool) -> Self {
        Expr::Lit(Value::Bool(b))
    }

    pub fn str(s: impl AsRef<str>) -> Self {
        Expr::Lit(Value::str(s))
    }

    pub fn var(x: &Var) -> Self {
        Expr::Var(x.clone())
    }

    pub fn service(a: &Var) -> Self {
        Expr::Lit(Value::Service(a.clone()))
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn negate(e: Expr) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Not(e) => e.free_vars(out),
            Expr::Bin(_, l, r) => {
                l.free_vars(out);
                r.free_vars(out);
            }
        }
    }

    /// Service names and variables mentioned, including service literals.
    pub fn names(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Lit(Value::Service(a)) => {
                out.insert(a.clone());
            }
            Expr::Lit(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Not(e) => e.names(out),
            Expr::Bin(_, l, r) => {
                l.names(out);
                r.names(out);
            }
        }
    }

    pub fn mentions(&self, x: &Var) -> bool {
        match self {
            Expr::Lit(Value::Service(a)) => a == x,
            Expr::Lit(_) => false,
            Expr::Var(y) => y == x,
            Expr::Not(e) => e.mentions(x),
            Expr::Bin(_, l, r) => l.mentions(x) || r.mentions(x),
        }
    }

    pub fn subst(&self, x: &Var, v: &Value) -> Expr {
        match self {
            Expr::Var(y) if y == x => Expr::Lit(v.clone()),
            Expr::Lit(Value::Service(a)) if a == x => Expr::Lit(v.clone()),
            Expr::Lit(_) | Expr::Var(_) => self.clone(),
            Expr::Not(e) => Expr::negate(e.subst(x, v)),
            Expr::Bin(op, l, r) => Expr::bin(*op, l.subst(x, v), r.subst(x, v)),
        }
    }

    pub fn rename(&self, from: &Var, to: &Var) -> Expr {
        match self {
            Expr::Var(y) if y == from => Expr::Var(to.clone()),
            Expr::Lit(Value::Service(a)) if a == from => Expr::Lit(Value::Service(to.clone())),
            Expr::Lit(_) | Expr::Var(_) => self.clone(),
            Expr::Not(e) => Expr::negate(e.rename(from, to)),
            Expr::Bin(op, l, r) => Expr::bin(*op, l.rename(from, to), r.rename(from, to)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Lit(_) | Expr::Var(_) => 1,
            Expr::Not(e) => 1 + e.size(),
            Expr::Bin(_, l, r) => 1 + l.size() + r.size(),
        }
    }
}
