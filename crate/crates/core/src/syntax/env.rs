use std::collections::BTreeMap;

use super::names::{Chan, Var};
use super::types::{SessionType, Sort};

/// Service typing Γ: service names (and variables) to sorts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ServiceEnv {
    entries: BTreeMap<Var, Sort>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is already bound in the service environment")]
pub struct DuplicateBinding(pub String);

impl ServiceEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: Var, sort: Sort) -> Result<(), DuplicateBinding> {
        if self.entries.contains_key(&name) {
            return Err(DuplicateBinding(name.text().to_string()));
        }
        self.entries.insert(name, sort);
        Ok(())
    }

    /// Convenience for `a : <α>`.
    pub fn with_service(mut self, name: &str, ty: SessionType) -> Self {
        self.entries.insert(Var::free(name), Sort::Service(ty));
        self
    }

    pub fn get(&self, name: &Var) -> Option<&Sort> {
        self.entries.get(name)
    }

    pub fn service_type(&self, name: &Var) -> Option<&SessionType> {
        match self.entries.get(name) {
            Some(Sort::Service(t)) => Some(t),
            _ => None,
        }
    }

    pub fn contains(&self, name: &Var) -> bool {
        self.entries.contains_key(name)
    }

    /// Union with `other`; entries of `other` win on conflict.
    pub fn extended(&self, other: &ServiceEnv) -> ServiceEnv {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(k, v)| (k.clone(), v.clone())));
        ServiceEnv { entries }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Sort)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(Var, Sort)> for ServiceEnv {
    fn from_iter<T: IntoIterator<Item = (Var, Sort)>>(iter: T) -> Self {
        ServiceEnv {
            entries: iter.into_iter().collect(),
        }
    }
}

/// A session environment entry: a session type, or ⊥ once both endpoints
/// of the session have been found.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    Bottom,
    Type(SessionType),
}

impl Entry {
    pub fn as_type(&self) -> Option<&SessionType> {
        match self {
            Entry::Type(t) => Some(t),
            Entry::Bottom => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Entry::Bottom)
    }
}

/// Session typing Δ: session channels to types or ⊥.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SessionEnv {
    entries: BTreeMap<Chan, Entry>,
}

impl SessionEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, k: Chan, e: Entry) -> Option<Entry> {
        self.entries.insert(k, e)
    }

    pub fn with(mut self, k: &Chan, e: Entry) -> Self {
        self.entries.insert(k.clone(), e);
        self
    }

    pub fn get(&self, k: &Chan) -> Option<&Entry> {
        self.entries.get(k)
    }

    pub fn remove(&mut self, k: &Chan) -> Option<Entry> {
        self.entries.remove(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Chan, &Entry)> {
        self.entries.iter()
    }

    pub fn channels(&self) -> impl Iterator<Item = &Chan> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bottom_count(&self) -> usize {
        self.entries.values().filter(|e| e.is_bottom()).count()
    }

    /// The environment with `k:end` entries dropped.
    pub fn without_end(&self) -> SessionEnv {
        SessionEnv {
            entries: self
                .entries
                .iter()
                .filter(|(_, e)| !matches!(e, Entry::Type(SessionType::End)))
                .map(|(k, e)| (k.clone(), e.clone()))
                .collect(),
        }
    }
}

impl FromIterator<(Chan, Entry)> for SessionEnv {
    fn from_iter<T: IntoIterator<Item = (Chan, Entry)>>(iter: T) -> Self {
        SessionEnv {
            entries: iter.into_iter().collect(),
        }
    }
}
