use super::inhabit::inhabit_avoiding;
use crate::congruence::{has_live_channels, normalize};
use crate::semantics::redexes;
use crate::syntax::{Chan, Entry, Process, ServiceEnv};
use crate::typing::{check, TypeError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PartnerError {
    #[error("process is not well typed: {0}")]
    NotWellTyped(TypeError),
    #[error("process can still reduce")]
    Reducible,
    #[error("process has no live channels")]
    NoLiveChannels,
}

/// A stuck process that lets an irreducible `p` with live channels move,
/// together with the services it introduces. `None` when neither an open
/// request nor an open session gives a handle.
pub fn construct_partner(
    g: &ServiceEnv,
    p: &Process,
) -> Result<Option<(Process, ServiceEnv)>, PartnerError> {
    let delta = check(g, p).map_err(PartnerError::NotWellTyped)?;
    if !redexes(p).is_empty() {
        return Err(PartnerError::Reducible);
    }
    if !has_live_channels(p) {
        return Err(PartnerError::NoLiveChannels);
    }
    let threads = normalize(p).threads;
    for t in &threads {
        if let Process::Request { service, chan, .. } = t {
            if let Some(ty) = g.service_type(service) {
                let k = chan.refresh();
                let (body, ext) = inhabit_avoiding(ty, &k, g);
                return Ok(Some((Process::serv(service, &k, body), ext)));
            }
        }
    }
    let open = |k: &Chan| match delta.get(k) {
        Some(Entry::Type(ty)) if !ty.is_end() => Some(ty.clone()),
        _ => None,
    };
    let by_head = threads
        .iter()
        .filter_map(Process::subject)
        .find_map(|k| open(k).map(|t| (k.clone(), t)));
    let any = || {
        delta
            .channels()
            .find_map(|k| open(k).map(|t| (k.clone(), t)))
    };
    Ok(by_head
        .or_else(any)
        .map(|(k, ty)| inhabit_avoiding(&ty.dual(), &k, g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::canonical_key;
    use crate::semantics::explore_all;
    use crate::surface::{parse_process, parse_source};

    #[test]
    fn open_request_gets_a_server() {
        let f = parse_source("env a : <![int].end>; a<k>.k?(x).0").unwrap();
        let (q, ext) = construct_partner(&f.env, &f.process).unwrap().unwrap();
        assert!(ext.is_empty());
        let expected = parse_process("env a : <![int].end>; a(k).k!(1).0").unwrap();
        assert_eq!(canonical_key(&q), canonical_key(&expected));
        let both = Process::par(f.process.clone(), q);
        let ex = explore_all(&both, 5);
        assert_eq!(ex.states.iter().map(|s| s.depth).max(), Some(2));
        assert!(ex.irreducible().all(|s| s.process == Process::Inact));
    }

    #[test]
    fn open_session_gets_its_dual() {
        let p = parse_process("sessions k; k!(5).0").unwrap();
        let (q, _) = construct_partner(&ServiceEnv::new(), &p).unwrap().unwrap();
        let expected = parse_process("sessions k; k?(x).0").unwrap();
        assert_eq!(canonical_key(&q), canonical_key(&expected));
    }

    #[test]
    fn preconditions_are_enforced() {
        let p = parse_process("new k . (k?(x).0 | k!(1).0)").unwrap();
        assert_eq!(
            construct_partner(&ServiceEnv::new(), &p),
            Err(PartnerError::Reducible)
        );
        let p = parse_process("env a : <end>; *a(k).0").unwrap();
        let g = ServiceEnv::new().with_service("a", crate::syntax::SessionType::End);
        assert_eq!(construct_partner(&g, &p), Err(PartnerError::NoLiveChannels));
    }

    #[test]
    fn closed_cycle_has_no_partner() {
        let p = parse_process("sessions k', k''; k'?(x).k''!(x).0 | k''?(x).k'!(x).0").unwrap();
        assert_eq!(construct_partner(&ServiceEnv::new(), &p), Ok(None));
    }
}
