//! The session type system: duality, environment composition and a
//! syntax-directed checker that synthesizes the minimal session environment.
//!
//! ```
//! use spi_core::surface::parse_source;
//! use spi_core::typing::check;
//!
//! let file = parse_source("sessions k; k!(5).0").unwrap();
//! let delta = check(&file.env, &file.process).unwrap();
//! assert_eq!(spi_core::surface::print_session_env(&delta), "{k: ![int].end}");
//! ```

mod infer;
mod unify;

use std::fmt;

use crate::surface::{print_process, print_type};
use crate::syntax::{Chan, Entry, Expr, Process, ServiceEnv, SessionEnv, SessionType, Sort};
use infer::{IEntry, Infer};
use unify::Ty;

pub use crate::congruence::is_program;

/// A violated typing rule, with the offending sub-term.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct TypeError {
    pub rule: &'static str,
    pub message: String,
    pub subterm: String,
}

const SUBTERM_WIDTH: usize = 120;

impl TypeError {
    pub(crate) fn new(rule: &'static str, message: impl Into<String>, p: &Process) -> Self {
        let mut subterm = print_process(p);
        if subterm.chars().count() > SUBTERM_WIDTH {
            subterm = subterm.chars().take(SUBTERM_WIDTH).collect::<String>() + " ...";
        }
        TypeError {
            rule,
            message: message.into(),
            subterm,
        }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} (in `{}`)", self.rule, self.message, self.subterm)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Lets a non-replicated service body use other open sessions, as in the
    /// usual session type systems.
    pub standard_serv: bool,
}

/// Synthesizes the minimal `Δ` with `Γ ⊢ p ▷ Δ`; `end` entries are omitted.
pub fn check(g: &ServiceEnv, p: &Process) -> Result<SessionEnv, TypeError> {
    check_with(CheckOptions::default(), g, p)
}

pub fn check_with(
    opts: CheckOptions,
    g: &ServiceEnv,
    p: &Process,
) -> Result<SessionEnv, TypeError> {
    let mut inf = Infer::new(opts, g);
    let d = inf.process(p)?;
    Ok(inf.zonk_delta(&d).without_end())
}

/// Checks `Γ ⊢ p ▷ expected`, where `expected` may fix types the synthesized
/// environment leaves open (payload sorts of unused inputs, for instance).
/// Entries of type `end` may be present or absent on either side.
pub fn check_against(g: &ServiceEnv, p: &Process, expected: &SessionEnv) -> Result<(), TypeError> {
    let mut inf = Infer::new(CheckOptions::default(), g);
    let mut d = inf.process(p)?;
    let mismatch = |k: &Chan, what: &str| TypeError::new("T-Check", format!("`{k}` {what}"), p);
    for (k, want) in expected.iter() {
        match (d.remove(k), want) {
            (Some(IEntry::Bottom), Entry::Bottom) | (None, Entry::Bottom) => {}
            (Some(IEntry::Ty(t)), Entry::Bottom)
            | (Some(IEntry::Ty(t)), Entry::Type(SessionType::End)) => {
                inf.u
                    .unify(&t, &Ty::End)
                    .map_err(|m| mismatch(k, &format!("has type {} instead of end", m.left)))?;
            }
            (Some(IEntry::Ty(t)), Entry::Type(a)) => {
                inf.u.unify(&t, &Ty::from_session(a)).map_err(|m| {
                    mismatch(
                        k,
                        &format!("has type {}, expected {}", m.left, print_type(a)),
                    )
                })?;
            }
            (None, Entry::Type(a)) => {
                if !a.is_end() {
                    return Err(mismatch(
                        k,
                        &format!("is unused, expected {}", print_type(a)),
                    ));
                }
            }
            (Some(IEntry::Bottom), Entry::Type(_)) => {
                return Err(mismatch(k, "is complete, expected an open session"));
            }
        }
    }
    for (k, e) in d {
        match e {
            IEntry::Bottom => return Err(mismatch(&k, "is complete but not expected")),
            IEntry::Ty(t) => {
                inf.u.unify(&t, &Ty::End).map_err(|m| {
                    mismatch(&k, &format!("has type {} but is not expected", m.left))
                })?;
            }
        }
    }
    Ok(())
}

/// `Γ ⊢ e : S`. Unconstrained sorts default to `int`.
pub fn type_expr(g: &ServiceEnv, e: &Expr) -> Result<Sort, TypeError> {
    let mut inf = Infer::new(CheckOptions::default(), g);
    match inf.expr(e) {
        Ok(s) => Ok(inf.u.zonk_sort(&s)),
        Err(message) => Err(TypeError {
            rule: "Expr",
            message,
            subterm: e.to_string(),
        }),
    }
}

pub fn dual(t: &SessionType) -> SessionType {
    t.dual()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ComposeError {
    #[error("`{chan}` has types {left} and {right}, which are not dual")]
    Incompatible {
        chan: Chan,
        left: String,
        right: String,
    },
    #[error("session `{0}` is already complete")]
    Closed(Chan),
}

/// `Δ1 ⊙ Δ2`: channels present on both sides must have dual types and
/// become `⊥`.
pub fn compose(d1: &SessionEnv, d2: &SessionEnv) -> Result<SessionEnv, ComposeError> {
    let mut out = d1.clone();
    for (k, e2) in d2.iter() {
        match (d1.get(k), e2) {
            (None, e) => {
                out.insert(k.clone(), e.clone());
            }
            (Some(Entry::Type(t1)), Entry::Type(t2)) => {
                if *t1 != t2.dual() {
                    return Err(ComposeError::Incompatible {
                        chan: k.clone(),
                        left: print_type(t1),
                        right: print_type(t2),
                    });
                }
                out.insert(k.clone(), Entry::Bottom);
            }
            _ => return Err(ComposeError::Closed(k.clone())),
        }
    }
    Ok(out)
}
