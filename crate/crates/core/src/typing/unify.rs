//! Type terms with unification variables.
//!
//! Type variables carry a polarity: `Var(v, true)` stands for the dual of
//! whatever `v` is bound to. Choice rows work the same way, so a select
//! with an open row can meet its dual branch.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::rc::Rc;

use crate::syntax::{Basic, Label, Payload, SessionType, Sort};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Dir {
    In,
    Out,
}

impl Dir {
    fn flip(self) -> Dir {
        match self {
            Dir::In => Dir::Out,
            Dir::Out => Dir::In,
        }
    }
}

pub(crate) type Row = Option<(u32, bool)>;

#[derive(Clone, Debug)]
pub(crate) enum Ty {
    Var(u32, bool),
    End,
    Msg(Dir, Rc<Pay>, Rc<Ty>),
    /// `In` is a branch, `Out` a select.
    Choice(Dir, BTreeMap<Label, Ty>, Row),
}

#[derive(Clone, Debug)]
pub(crate) enum Pay {
    Sort(SortT),
    Session(Ty),
}

#[derive(Clone, Debug)]
pub(crate) enum SortT {
    Basic(Basic),
    Service(Ty),
    Var(u32),
}

impl Ty {
    pub(crate) fn dual(&self) -> Ty {
        match self {
            Ty::Var(v, n) => Ty::Var(*v, !n),
            Ty::End => Ty::End,
            Ty::Msg(d, p, t) => Ty::Msg(d.flip(), p.clone(), Rc::new(t.dual())),
            Ty::Choice(d, arms, row) => Ty::Choice(
                d.flip(),
                arms.iter().map(|(l, t)| (l.clone(), t.dual())).collect(),
                row.map(|(r, n)| (r, !n)),
            ),
        }
    }

    pub(crate) fn from_session(t: &SessionType) -> Ty {
        match t {
            SessionType::End => Ty::End,
            SessionType::In(p, a) => Ty::Msg(
                Dir::In,
                Rc::new(Pay::from_payload(p)),
                Rc::new(Ty::from_session(a)),
            ),
            SessionType::Out(p, a) => Ty::Msg(
                Dir::Out,
                Rc::new(Pay::from_payload(p)),
                Rc::new(Ty::from_session(a)),
            ),
            SessionType::Branch(arms) => Ty::Choice(Dir::In, from_arms(arms), None),
            SessionType::Select(arms) => Ty::Choice(Dir::Out, from_arms(arms), None),
        }
    }
}

fn from_arms(arms: &BTreeMap<Label, SessionType>) -> BTreeMap<Label, Ty> {
    arms.iter()
        .map(|(l, t)| (l.clone(), Ty::from_session(t)))
        .collect()
}

impl Pay {
    fn from_payload(p: &Payload) -> Pay {
        match p {
            Payload::Basic(b) => Pay::Sort(SortT::Basic(*b)),
            Payload::Service(t) => Pay::Sort(SortT::Service(Ty::from_session(t))),
            Payload::Session(t) => Pay::Session(Ty::from_session(t)),
        }
    }
}

impl SortT {
    pub(crate) fn from_sort(s: &Sort) -> SortT {
        match s {
            Sort::Basic(b) => SortT::Basic(*b),
            Sort::Service(t) => SortT::Service(Ty::from_session(t)),
        }
    }
}

#[derive(Clone, Debug)]
struct RowBinding {
    arms: BTreeMap<Label, Ty>,
    tail: Row,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Mismatch {
    pub left: String,
    pub right: String,
}

/// Substitution state for type, row and sort variables.
#[derive(Default)]
pub(crate) struct Unifier {
    tys: Vec<Option<Ty>>,
    rows: Vec<Option<RowBinding>>,
    sorts: Vec<Option<SortT>>,
}

enum VarRef {
    Ty(u32),
    Row(u32),
    Sort(u32),
}

impl Unifier {
    pub(crate) fn fresh_ty(&mut self) -> Ty {
        self.tys.push(None);
        Ty::Var(self.tys.len() as u32 - 1, false)
    }

    pub(crate) fn fresh_row(&mut self) -> Row {
        self.rows.push(None);
        Some((self.rows.len() as u32 - 1, false))
    }

    pub(crate) fn fresh_sort(&mut self) -> SortT {
        self.sorts.push(None);
        SortT::Var(self.sorts.len() as u32 - 1)
    }

    /// Resolves the head of `t` (bound variables, bound rows).
    pub(crate) fn head(&self, t: &Ty) -> Ty {
        match t {
            Ty::Var(v, n) => match &self.tys[*v as usize] {
                Some(b) => {
                    let b = if *n { b.dual() } else { b.clone() };
                    self.head(&b)
                }
                None => t.clone(),
            },
            Ty::Choice(d, arms, row) => {
                let (arms, row) = self.expand_row(arms.clone(), *row);
                Ty::Choice(*d, arms, row)
            }
            _ => t.clone(),
        }
    }

    fn expand_row(
        &self,
        mut arms: BTreeMap<Label, Ty>,
        mut row: Row,
    ) -> (BTreeMap<Label, Ty>, Row) {
        while let Some((r, n)) = row {
            match &self.rows[r as usize] {
                Some(b) => {
                    for (l, t) in &b.arms {
                        arms.insert(l.clone(), if n { t.dual() } else { t.clone() });
                    }
                    row = b.tail.map(|(r2, n2)| (r2, n2 ^ n));
                }
                None => break,
            }
        }
        (arms, row)
    }

    fn sort_head(&self, s: &SortT) -> SortT {
        match s {
            SortT::Var(v) => match &self.sorts[*v as usize] {
                Some(b) => self.sort_head(b),
                None => s.clone(),
            },
            _ => s.clone(),
        }
    }

    fn occurs(&self, var: &VarRef, t: &Ty) -> bool {
        match self.head(t) {
            Ty::Var(v, _) => matches!(var, VarRef::Ty(w) if *w == v),
            Ty::End => false,
            Ty::Msg(_, p, t) => self.occurs_pay(var, &p) || self.occurs(var, &t),
            Ty::Choice(_, arms, row) => {
                matches!((var, row), (VarRef::Row(r), Some((r2, _))) if *r == r2)
                    || arms.values().any(|a| self.occurs(var, a))
            }
        }
    }

    fn occurs_pay(&self, var: &VarRef, p: &Pay) -> bool {
        match p {
            Pay::Session(t) => self.occurs(var, t),
            Pay::Sort(s) => self.occurs_sort(var, s),
        }
    }

    fn occurs_sort(&self, var: &VarRef, s: &SortT) -> bool {
        match self.sort_head(s) {
            SortT::Var(v) => matches!(var, VarRef::Sort(w) if *w == v),
            SortT::Basic(_) => false,
            SortT::Service(t) => self.occurs(var, &t),
        }
    }

    fn mismatch(&self, a: &Ty, b: &Ty) -> Mismatch {
        Mismatch {
            left: self.show(a),
            right: self.show(b),
        }
    }

    pub(crate) fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), Mismatch> {
        let (a, b) = (self.head(a), self.head(b));
        match (&a, &b) {
            (Ty::Var(v, n), Ty::Var(w, m)) if v == w => {
                if n != m {
                    // A variable equal to its own dual can only be `end`.
                    self.tys[*v as usize] = Some(Ty::End);
                }
                Ok(())
            }
            (Ty::Var(v, n), t) | (t, Ty::Var(v, n)) => {
                if self.occurs(&VarRef::Ty(*v), t) {
                    return Err(self.mismatch(&a, &b));
                }
                self.tys[*v as usize] = Some(if *n { t.dual() } else { t.clone() });
                Ok(())
            }
            (Ty::End, Ty::End) => Ok(()),
            (Ty::Msg(d1, p1, t1), Ty::Msg(d2, p2, t2)) if d1 == d2 => {
                self.unify_pay(p1, p2).map_err(|_| self.mismatch(&a, &b))?;
                self.unify(t1, t2)
            }
            (Ty::Choice(d1, arms1, row1), Ty::Choice(d2, arms2, row2)) if d1 == d2 => self
                .unify_choice(arms1, *row1, arms2, *row2)
                .map_err(|_| self.mismatch(&a, &b)),
            _ => Err(self.mismatch(&a, &b)),
        }
    }

    fn unify_choice(
        &mut self,
        arms1: &BTreeMap<Label, Ty>,
        row1: Row,
        arms2: &BTreeMap<Label, Ty>,
        row2: Row,
    ) -> Result<(), Mismatch> {
        let only1: BTreeMap<Label, Ty> = arms1
            .iter()
            .filter(|(l, _)| !arms2.contains_key(*l))
            .map(|(l, t)| (l.clone(), t.clone()))
            .collect();
        let only2: BTreeMap<Label, Ty> = arms2
            .iter()
            .filter(|(l, _)| !arms1.contains_key(*l))
            .map(|(l, t)| (l.clone(), t.clone()))
            .collect();
        let fail = || Mismatch {
            left: "choice".into(),
            right: "choice".into(),
        };
        match (row1, row2) {
            (Some((r1, n1)), Some((r2, n2))) if r1 == r2 => {
                if !only1.is_empty() || !only2.is_empty() {
                    return Err(fail());
                }
                if n1 != n2 {
                    self.rows[r1 as usize] = Some(RowBinding {
                        arms: BTreeMap::new(),
                        tail: None,
                    });
                }
            }
            (Some(r1), Some(r2)) => {
                let tail = self.fresh_row();
                self.bind_row(r1, only2, tail)?;
                self.bind_row(r2, only1, tail)?;
            }
            (Some(r1), None) => {
                if !only1.is_empty() {
                    return Err(fail());
                }
                self.bind_row(r1, only2, None)?;
            }
            (None, Some(r2)) => {
                if !only2.is_empty() {
                    return Err(fail());
                }
                self.bind_row(r2, only1, None)?;
            }
            (None, None) => {
                if !only1.is_empty() || !only2.is_empty() {
                    return Err(fail());
                }
            }
        }
        for (l, t1) in arms1 {
            if let Some(t2) = arms2.get(l) {
                self.unify(t1, t2)?;
            }
        }
        Ok(())
    }

    /// Binds the row `(r, n)` so that it expands to `arms` followed by `tail`.
    fn bind_row(
        &mut self,
        (r, n): (u32, bool),
        arms: BTreeMap<Label, Ty>,
        tail: Row,
    ) -> Result<(), Mismatch> {
        if arms.values().any(|t| self.occurs(&VarRef::Row(r), t)) {
            return Err(Mismatch {
                left: "row".into(),
                right: "recursive row".into(),
            });
        }
        let (arms, tail) = if n {
            (
                arms.iter().map(|(l, t)| (l.clone(), t.dual())).collect(),
                tail.map(|(t, m)| (t, !m)),
            )
        } else {
            (arms, tail)
        };
        self.rows[r as usize] = Some(RowBinding { arms, tail });
        Ok(())
    }

    pub(crate) fn unify_pay(&mut self, a: &Pay, b: &Pay) -> Result<(), Mismatch> {
        match (a, b) {
            (Pay::Sort(s1), Pay::Sort(s2)) => self.unify_sort(s1, s2),
            (Pay::Session(t1), Pay::Session(t2)) => self.unify(t1, t2),
            _ => Err(Mismatch {
                left: self.show_pay(a),
                right: self.show_pay(b),
            }),
        }
    }

    pub(crate) fn unify_sort(&mut self, a: &SortT, b: &SortT) -> Result<(), Mismatch> {
        let (a, b) = (self.sort_head(a), self.sort_head(b));
        match (&a, &b) {
            (SortT::Var(v), SortT::Var(w)) if v == w => Ok(()),
            (SortT::Var(v), s) | (s, SortT::Var(v)) => {
                if self.occurs_sort(&VarRef::Sort(*v), s) {
                    return Err(Mismatch {
                        left: self.show_sort(&a),
                        right: self.show_sort(&b),
                    });
                }
                self.sorts[*v as usize] = Some(s.clone());
                Ok(())
            }
            (SortT::Basic(x), SortT::Basic(y)) if x == y => Ok(()),
            (SortT::Service(t1), SortT::Service(t2)) => self.unify(t1, t2).map_err(|_| Mismatch {
                left: self.show_sort(&a),
                right: self.show_sort(&b),
            }),
            _ => Err(Mismatch {
                left: self.show_sort(&a),
                right: self.show_sort(&b),
            }),
        }
    }

    /// Reads back a closed type, defaulting unconstrained variables
    /// (type variables to `end`, rows to closed, sorts to `int`).
    pub(crate) fn zonk(&mut self, t: &Ty) -> SessionType {
        match self.head(t) {
            Ty::Var(v, _) => {
                self.tys[v as usize] = Some(Ty::End);
                SessionType::End
            }
            Ty::End => SessionType::End,
            Ty::Msg(d, p, t) => {
                let p = self.zonk_pay(&p);
                let t = self.zonk(&t);
                match d {
                    Dir::In => SessionType::input(p, t),
                    Dir::Out => SessionType::output(p, t),
                }
            }
            Ty::Choice(d, arms, row) => {
                if let Some((r, _)) = row {
                    self.rows[r as usize] = Some(RowBinding {
                        arms: BTreeMap::new(),
                        tail: None,
                    });
                }
                let arms = arms
                    .iter()
                    .map(|(l, a)| (l.clone(), self.zonk(a)))
                    .collect();
                match d {
                    Dir::In => SessionType::Branch(arms),
                    Dir::Out => SessionType::Select(arms),
                }
            }
        }
    }

    fn zonk_pay(&mut self, p: &Pay) -> Payload {
        match p {
            Pay::Session(t) => Payload::Session(self.zonk(t)),
            Pay::Sort(s) => match self.zonk_sort(s) {
                Sort::Basic(b) => Payload::Basic(b),
                Sort::Service(t) => Payload::Service(t),
            },
        }
    }

    pub(crate) fn zonk_sort(&mut self, s: &SortT) -> Sort {
        match self.sort_head(s) {
            SortT::Var(v) => {
                self.sorts[v as usize] = Some(SortT::Basic(Basic::Int));
                Sort::Basic(Basic::Int)
            }
            SortT::Basic(b) => Sort::Basic(b),
            SortT::Service(t) => Sort::Service(self.zonk(&t)),
        }
    }

    /// Renders a type for diagnostics; unbound variables print as `'tN`.
    pub(crate) fn show(&self, t: &Ty) -> String {
        let mut out = String::new();
        self.show_into(&mut out, t);
        out
    }

    fn show_into(&self, out: &mut String, t: &Ty) {
        match self.head(t) {
            Ty::Var(v, n) => {
                let _ = write!(out, "{}'t{v}", if n { "~" } else { "" });
            }
            Ty::End => out.push_str("end"),
            Ty::Msg(d, p, t) => {
                out.push(if d == Dir::In { '?' } else { '!' });
                out.push('[');
                out.push_str(&self.show_pay(&p));
                out.push_str("].");
                self.show_into(out, &t);
            }
            Ty::Choice(d, arms, row) => {
                out.push_str(if d == Dir::In { "&{" } else { "+{" });
                for (i, (l, a)) in arms.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{l}: ");
                    self.show_into(out, a);
                }
                if row.is_some() {
                    out.push_str(", ..");
                }
                out.push('}');
            }
        }
    }

    fn show_pay(&self, p: &Pay) -> String {
        match p {
            Pay::Session(t) => self.show(t),
            Pay::Sort(s) => self.show_sort(s),
        }
    }

    pub(crate) fn show_sort(&self, s: &SortT) -> String {
        match self.sort_head(s) {
            SortT::Var(v) => format!("'s{v}"),
            SortT::Basic(b) => b.keyword().to_string(),
            SortT::Service(t) => format!("<{}>", self.show(&t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_type;

    fn ty(s: &str) -> Ty {
        Ty::from_session(&parse_type(s).unwrap())
    }

    #[test]
    fn variable_against_its_dual_is_end() {
        let mut u = Unifier::default();
        let v = u.fresh_ty();
        u.unify(&v, &v.dual()).unwrap();
        assert_eq!(u.zonk(&v), SessionType::End);
    }

    #[test]
    fn open_select_meets_branch() {
        let mut u = Unifier::default();
        let row = u.fresh_row();
        let sel = Ty::Choice(Dir::Out, [(Label::new("ok"), Ty::End)].into(), row);
        let br = ty("&{ok: end, stop: end}");
        u.unify(&sel, &br.dual()).unwrap();
        assert_eq!(u.zonk(&sel), parse_type("+{ok: end, stop: end}").unwrap());
    }

    #[test]
    fn two_open_selects_merge() {
        let mut u = Unifier::default();
        let (r1, r2) = (u.fresh_row(), u.fresh_row());
        let a = Ty::Choice(Dir::Out, [(Label::new("a"), Ty::End)].into(), r1);
        let b = Ty::Choice(Dir::Out, [(Label::new("b"), Ty::End)].into(), r2);
        u.unify(&a, &b).unwrap();
        assert_eq!(u.zonk(&a), parse_type("+{a: end, b: end}").unwrap());
        assert_eq!(u.zonk(&b), parse_type("+{a: end, b: end}").unwrap());
    }

    #[test]
    fn occurs_check() {
        let mut u = Unifier::default();
        let v = u.fresh_ty();
        let t = Ty::Msg(
            Dir::In,
            Rc::new(Pay::Sort(SortT::Basic(Basic::Int))),
            Rc::new(v.clone()),
        );
        assert!(u.unify(&v, &t).is_err());
    }

    #[test]
    fn closed_choices_need_equal_labels() {
        let mut u = Unifier::default();
        assert!(u.unify(&ty("&{a: end}"), &ty("&{a: end, b: end}")).is_err());
    }

    #[test]
    fn sort_var_does_not_become_session_payload() {
        let mut u = Unifier::default();
        let s = u.fresh_sort();
        assert!(u.unify_pay(&Pay::Sort(s), &Pay::Session(Ty::End)).is_err());
    }
}
