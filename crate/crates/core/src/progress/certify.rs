use std::collections::{BTreeSet, HashSet};

use serde::{Serialize, Serializer};

use super::partner::{construct_partner, PartnerError};
use crate::congruence::{canonical_key, has_live_channels, normalize, Normal};
use crate::depgraph::find_cyclic_subterm;
use crate::semantics::{explore_bounded, redexes, redexes_of, step, TraceRecord};
use crate::syntax::{Chan, Process, ServiceEnv};
use crate::typing::{check, TypeError};

/// Exploration stops adding states beyond this many.
pub const MAX_STATES: usize = 20_000;

fn as_text<S: Serializer>(p: &Process, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(p)
}

fn opt_as_text<S: Serializer>(p: &Option<Process>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.collect_str(p),
        None => s.serialize_none(),
    }
}

/// A reachable state split as `E[subterm]`, where `subterm` is the
/// parallel composition of the listed top-level threads (0-based).
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub state_index: usize,
    pub depth: usize,
    #[serde(serialize_with = "as_text")]
    pub state: Process,
    pub threads: Vec<usize>,
    #[serde(serialize_with = "as_text")]
    pub subterm: Process,
}

/// Which obligation on a stuck sub-term could not be met.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FailedCondition {
    /// No request or open session to build a partner from.
    NoPartner,
    /// The partner reduces on its own.
    PartnerReduces,
    /// Sub-term and partner do not type together.
    NotComposable,
    /// Sub-term and partner do not reduce together.
    CompositionStuck,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub at: Decomposition,
    #[serde(serialize_with = "opt_as_text")]
    pub partner: Option<Process>,
    pub failed: FailedCondition,
    /// Steps from the initial process to the offending state.
    pub trace: Vec<TraceRecord>,
    /// Whether the initial process passed the transparency check.
    pub initially_transparent: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Certificate {
    pub depth: usize,
    pub states: usize,
    pub decompositions: usize,
    pub partners: usize,
    pub initially_transparent: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "reason")]
pub enum InconclusiveReason {
    StateLimit {
        limit: usize,
    },
    SubsetBudget {
        budget: usize,
        state_index: usize,
    },
    ReductNotTransparent {
        at: Box<Decomposition>,
        #[serde(serialize_with = "as_text")]
        partner: Process,
        #[serde(serialize_with = "as_text")]
        reduct: Process,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Inconclusive {
    pub reason: InconclusiveReason,
    /// Work done before giving up.
    pub checked: Certificate,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict")]
pub enum ProgressVerdict {
    Certificate(Certificate),
    Counterexample(Box<Counterexample>),
    Inconclusive(Box<Inconclusive>),
}

impl ProgressVerdict {
    pub fn is_certificate(&self) -> bool {
        matches!(self, ProgressVerdict::Certificate(_))
    }
}

/// Bounded progress check: every sub-term of every state reachable within
/// `depth` steps that has live channels must either reduce or be unblocked
/// by a constructed partner. At most `subset_budget` sub-terms are examined
/// per state.
pub fn check_progress(
    g: &ServiceEnv,
    p: &Process,
    depth: usize,
    subset_budget: usize,
) -> Result<ProgressVerdict, TypeError> {
    check_progress_bounded(g, p, depth, subset_budget, MAX_STATES)
}

pub fn check_progress_bounded(
    g: &ServiceEnv,
    p: &Process,
    depth: usize,
    subset_budget: usize,
    max_states: usize,
) -> Result<ProgressVerdict, TypeError> {
    check(g, p)?;
    let initially_transparent = find_cyclic_subterm(p).is_none();
    let ex = explore_bounded(p, depth, max_states);
    let mut stats = Certificate {
        depth,
        states: ex.states.len(),
        initially_transparent,
        ..Certificate::default()
    };
    let mut pending: Option<InconclusiveReason> = None;
    let mut passed: HashSet<String> = HashSet::new();
    for (idx, state) in ex.states.iter().enumerate() {
        let n = normalize(&state.process);
        let restricted: BTreeSet<&Chan> = n.restricted.iter().collect();
        let blockers = Blockers::of(&n);
        let mut remaining = subset_budget;
        for size in 1..=blockers.candidates.len() {
            let picks = blockers.independent_sets(size, remaining.saturating_add(1));
            if picks.is_empty() {
                break;
            }
            if picks.len() > remaining {
                pending.get_or_insert(InconclusiveReason::SubsetBudget {
                    budget: subset_budget,
                    state_index: idx,
                });
            }
            for pick in picks.into_iter().take(remaining) {
                remaining -= 1;
                let sub = Process::par_all(pick.iter().map(|&i| n.threads[i].clone()));
                let scoped: Vec<Chan> = sub
                    .free_session_channels()
                    .into_iter()
                    .filter(|k| restricted.contains(k))
                    .collect();
                let key = canonical_key(&Process::restrict_all(&scoped, sub.clone()));
                if passed.contains(&key) {
                    continue;
                }
                stats.decompositions += 1;
                let at = || Decomposition {
                    state_index: idx,
                    depth: state.depth,
                    state: state.process.clone(),
                    threads: pick.clone(),
                    subterm: sub.clone(),
                };
                let fail = |partner: Option<Process>, failed| {
                    Ok(ProgressVerdict::Counterexample(Box::new(Counterexample {
                        at: at(),
                        partner,
                        failed,
                        trace: ex.path_to(idx).records(),
                        initially_transparent,
                    })))
                };
                let (q, ext) = match construct_partner(g, &sub) {
                    Ok(Some(found)) => found,
                    Ok(None) => return fail(None, FailedCondition::NoPartner),
                    Err(PartnerError::NotWellTyped(_)) => {
                        return fail(None, FailedCondition::NotComposable)
                    }
                    Err(PartnerError::Reducible | PartnerError::NoLiveChannels) => {
                        unreachable!("candidates are live and pairwise inert")
                    }
                };
                stats.partners += 1;
                if !redexes(&q).is_empty() {
                    return fail(Some(q), FailedCondition::PartnerReduces);
                }
                let g2 = g.extended(&ext);
                let both = Process::par(sub.clone(), q.clone());
                if check(&g2, &both).is_err() {
                    return fail(Some(q), FailedCondition::NotComposable);
                }
                let rs = redexes(&both);
                if rs.is_empty() {
                    return fail(Some(q), FailedCondition::CompositionStuck);
                }
                let reducts: Vec<Process> = rs
                    .iter()
                    .map(|r| step(&both, r).expect("enumerated redex"))
                    .collect();
                let clear = !blockers.inert_opaque
                    && reducts
                        .iter()
                        .any(|reduct| find_cyclic_subterm(reduct).is_none());
                let opaque = (!clear).then(|| reducts.into_iter().next().expect("nonempty"));
                match opaque {
                    Some(reduct) => {
                        pending.get_or_insert(InconclusiveReason::ReductNotTransparent {
                            at: Box::new(at()),
                            partner: q,
                            reduct,
                        });
                    }
                    None => {
                        passed.insert(key);
                    }
                }
            }
            if remaining == 0 {
                break;
            }
        }
    }
    if ex.truncated {
        pending.get_or_insert(InconclusiveReason::StateLimit { limit: max_states });
    }
    Ok(match pending {
        None => ProgressVerdict::Certificate(stats),
        Some(reason) => ProgressVerdict::Inconclusive(Box::new(Inconclusive {
            reason,
            checked: stats,
        })),
    })
}

/// Which threads of a state can appear in a sub-term that needs a partner.
///
/// A sub-term containing a redex reduces, and so does every larger one, so
/// only sets of live threads with no redex among them are candidates.
/// Threads without live channels never interact with a partner; they are
/// left out, and their own nested sub-terms are checked once.
struct Blockers {
    candidates: Vec<usize>,
    paired: HashSet<(usize, usize)>,
    inert_opaque: bool,
}

impl Blockers {
    fn of(n: &Normal) -> Self {
        let mut solo = vec![false; n.threads.len()];
        let mut paired = HashSet::new();
        for r in redexes_of(n) {
            match r.threads[..] {
                [i] => solo[i] = true,
                [i, j] => {
                    paired.insert((i.min(j), i.max(j)));
                }
                _ => unreachable!("redexes involve one or two threads"),
            }
        }
        let (live, inert): (Vec<usize>, Vec<usize>) =
            (0..n.threads.len()).partition(|&i| has_live_channels(&n.threads[i]));
        Blockers {
            candidates: live.into_iter().filter(|&i| !solo[i]).collect(),
            paired,
            inert_opaque: inert
                .iter()
                .any(|&i| find_cyclic_subterm(&n.threads[i]).is_some()),
        }
    }

    /// Up to `limit` candidate sets of the given size with no redex inside,
    /// in lexicographic order.
    fn independent_sets(&self, size: usize, limit: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.extend(size, limit, 0, &mut Vec::new(), &mut out);
        out
    }

    fn extend(
        &self,
        size: usize,
        limit: usize,
        from: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for at in from..self.candidates.len() {
            if out.len() >= limit || self.candidates.len() - at < size - cur.len() {
                return;
            }
            let t = self.candidates[at];
            if cur
                .iter()
                .any(|&u| self.paired.contains(&(u.min(t), u.max(t))))
            {
                continue;
            }
            cur.push(t);
            self.extend(size, limit, at + 1, cur, out);
            cur.pop();
        }
    }
}
