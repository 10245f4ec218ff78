use std::fmt;

use serde::Serialize;

use super::reduce::{Redex, RuleTag};
use crate::syntax::{Expr, Process};

/// A reduction sequence: each step pairs the source state with the redex
/// fired in it.
#[derive(Clone, Debug)]
pub struct Trace {
    pub steps: Vec<(Process, Redex)>,
    pub last: Process,
}

/// One step in serializable form. Thread positions are 1-based.
#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub rule: RuleTag,
    pub threads: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
    pub result: String,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The states visited, initial and final included.
    pub fn states(&self) -> impl Iterator<Item = &Process> {
        self.steps
            .iter()
            .map(|(p, _)| p)
            .chain(std::iter::once(&self.last))
    }

    pub fn records(&self) -> Vec<TraceRecord> {
        let results = self.states().skip(1);
        self.steps
            .iter()
            .zip(results)
            .enumerate()
            .map(|(i, ((_, r), after))| TraceRecord {
                step: i + 1,
                rule: r.rule,
                threads: r.threads.iter().map(|t| t + 1).collect(),
                label: r.label.as_ref().map(|l| l.to_string()),
                value: r.value.as_ref().map(|v| Expr::Lit(v.clone()).to_string()),
                channel: r.delegated.as_ref().map(|k| k.to_string()),
                result: after.to_string(),
            })
            .collect()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut states = self.states();
        if let Some(first) = states.next() {
            writeln!(f, "   {first}")?;
        }
        for ((_, r), after) in self.steps.iter().zip(states) {
            writeln!(f, "-> [{r}]")?;
            writeln!(f, "   {after}")?;
        }
        Ok(())
    }
}
