use std::collections::BTreeMap;

use super::names::Label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basic {
    Int,
    Bool,
    Str,
}

impl Basic {
    pub fn keyword(self) -> &'static str {
        match self {
            Basic::Int => "int",
            Basic::Bool => "bool",
            Basic::Str => "string",
        }
    }
}

/// What a message carries: a basic value, a service channel of sort `<α>`,
/// or a session channel of type `α` (delegation).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    Basic(Basic),
    Service(SessionType),
    Session(SessionType),
}

/// Session types. Finite trees; choice maps are nonempty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SessionType {
    In(Box<Payload>, Box<SessionType>),
    Out(Box<Payload>, Box<SessionType>),
    Branch(BTreeMap<Label, SessionType>),
    Select(BTreeMap<Label, SessionType>),
    End,
}

impl SessionType {
    pub fn input(p: Payload, cont: SessionType) -> Self {
        SessionType::In(Box::new(p), Box::new(cont))
    }

    pub fn output(p: Payload, cont: SessionType) -> Self {
        SessionType::Out(Box::new(p), Box::new(cont))
    }

    pub fn branch<L: AsRef<str>>(arms: impl IntoIterator<Item = (L, SessionType)>) -> Self {
        SessionType::Branch(arms.into_iter().map(|(l, t)| (Label::new(l), t)).collect())
    }

    pub fn select<L: AsRef<str>>(arms: impl IntoIterator<Item = (L, SessionType)>) -> Self {
        SessionType::Select(arms.into_iter().map(|(l, t)| (Label::new(l), t)).collect())
    }

    /// The dual type: input and output swap, branch and select swap.
    /// Payloads are not dualized.
    pub fn dual(&self) -> SessionType {
        match self {
            SessionType::In(p, a) => SessionType::Out(p.clone(), Box::new(a.dual())),
            SessionType::Out(p, a) => SessionType::In(p.clone(), Box::new(a.dual())),
            SessionType::Branch(arms) => {
                SessionType::Select(arms.iter().map(|(l, a)| (l.clone(), a.dual())).collect())
            }
            SessionType::Select(arms) => {
                SessionType::Branch(arms.iter().map(|(l, a)| (l.clone(), a.dual())).collect())
            }
            SessionType::End => SessionType::End,
        }
    }

    pub fn is_end(&self) -> bool {
        matches!(self, SessionType::End)
    }

    /// Number of type constructors, payloads included.
    pub fn size(&self) -> usize {
        match self {
            SessionType::In(p, a) | SessionType::Out(p, a) => 1 + p.size() + a.size(),
            SessionType::Branch(arms) | SessionType::Select(arms) => {
                1 + arms.values().map(SessionType::size).sum::<usize>()
            }
            SessionType::End => 1,
        }
    }
}

impl Payload {
    pub fn size(&self) -> usize {
        match self {
            Payload::Basic(_) => 1,
            Payload::Service(t) | Payload::Session(t) => 1 + t.size(),
        }
    }
}

/// Sorts of service channels and variables: `basic | <α>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Basic(Basic),
    Service(SessionType),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_of_buy_type() {
        // ![int].&{ok: ![string].end, stop: end}
        let buy = SessionType::output(
            Payload::Basic(Basic::Int),
            SessionType::branch([
                (
                    "ok",
                    SessionType::output(Payload::Basic(Basic::Str), SessionType::End),
                ),
                ("stop", SessionType::End),
            ]),
        );
        let expected = SessionType::input(
            Payload::Basic(Basic::Int),
            SessionType::select([
                (
                    "ok",
                    SessionType::input(Payload::Basic(Basic::Str), SessionType::End),
                ),
                ("stop", SessionType::End),
            ]),
        );
        assert_eq!(buy.dual(), expected);
        assert_eq!(buy.dual().dual(), buy);
        assert_eq!(SessionType::End.dual(), SessionType::End);
    }
}
