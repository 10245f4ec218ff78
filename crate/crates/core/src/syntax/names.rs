use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

/// An identifier with a display name and an identity.
///
/// Free names carry uid `0` and are identified by their text. Every binding
/// occurrence gets a fresh uid, so two binders that print the same are still
/// distinct names.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    text: Arc<str>,
    uid: u64,
}

impl Name {
    pub fn free(text: impl AsRef<str>) -> Self {
        Name {
            text: Arc::from(text.as_ref()),
            uid: 0,
        }
    }

    pub fn fresh(text: impl AsRef<str>) -> Self {
        Name {
            text: Arc::from(text.as_ref()),
            uid: NEXT_UID.fetch_add(1, Ordering::Relaxed),
        }
    }

    /// A fresh name with the same display text.
    pub fn refresh(&self) -> Self {
        Name::fresh(&*self.text)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn uid(&self) -> u64 {
        self.uid
    }

    pub fn is_free_form(&self) -> bool {
        self.uid == 0
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.uid == 0 {
            write!(f, "{}", self.text)
        } else {
            write!(f, "{}#{}", self.text, self.uid)
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

macro_rules! name_newtype {
    ($(#[$m:meta])* $ty:ident) => {
        $(#[$m])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $ty(pub Name);

        impl $ty {
            pub fn free(text: impl AsRef<str>) -> Self {
                $ty(Name::free(text))
            }

            pub fn fresh(text: impl AsRef<str>) -> Self {
                $ty(Name::fresh(text))
            }

            pub fn refresh(&self) -> Self {
                $ty(self.0.refresh())
            }

            pub fn name(&self) -> &Name {
                &self.0
            }

            pub fn text(&self) -> &str {
                self.0.text()
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Debug::fmt(&self.0, f)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)
            }
        }
    };
}

name_newtype!(
    /// A session (private) channel: `k`, `k'`, `t`, ...
    Chan
);
name_newtype!(
    /// A service (public) channel or a value variable: `a`, `buy`, `x`, ...
    Var
);

/// A branch/selection label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(text: impl AsRef<str>) -> Self {
        Label(Arc::from(text.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Prefix reserved for service names minted by the inhabitation construction.
/// The lexer never produces it, so such names cannot clash with source names.
pub const RESERVED_PREFIX: char = '#';

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_names_are_distinct() {
        let a = Chan::fresh("k");
        let b = Chan::fresh("k");
        assert_ne!(a, b);
        assert_eq!(a.text(), b.text());
        assert_eq!(Chan::free("k"), Chan::free("k"));
        assert_ne!(Chan::free("k"), a);
    }
}
