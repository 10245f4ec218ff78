//! Random session types and random well-typed processes.
//!
//! Every generator builds a process from session types, so the result
//! type-checks by construction. The shape of the sharing between threads
//! decides the rest: a tree of sessions gives a transparent process, an
//! arbitrary multigraph may not.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::congruence::has_live_channels;
use crate::semantics::{explore_seeded, redexes};
use crate::syntax::{
    Basic, BinOp, Chan, Expr, Payload, Process, ServiceEnv, SessionType, Sort, Var,
};

const LABELS: [&str; 4] = ["a", "b", "ok", "stop"];
const STRINGS: [&str; 3] = ["a", "ok", "hello"];

/// A generated process with the service environment it is typed under.
#[derive(Clone, Debug)]
pub struct Generated {
    pub env: ServiceEnv,
    pub process: Process,
}

fn random_basic(rng: &mut impl Rng) -> Basic {
    *[Basic::Int, Basic::Int, Basic::Bool, Basic::Str]
        .choose(rng)
        .unwrap()
}

/// A random session type with at most `depth` nested constructors along
/// any path.
pub fn random_type(rng: &mut impl Rng, depth: usize) -> SessionType {
    if depth == 0 {
        return SessionType::End;
    }
    let rest = |rng: &mut _| random_type(rng, depth - 1);
    match rng.gen_range(0..100) {
        0..=9 => SessionType::End,
        10..=29 => SessionType::input(Payload::Basic(random_basic(rng)), rest(rng)),
        30..=49 => SessionType::output(Payload::Basic(random_basic(rng)), rest(rng)),
        50..=54 => SessionType::input(Payload::Service(random_type(rng, depth / 2)), rest(rng)),
        55..=59 => SessionType::output(Payload::Service(random_type(rng, depth / 2)), rest(rng)),
        60..=64 => SessionType::input(Payload::Session(random_type(rng, depth / 2)), rest(rng)),
        65..=69 => SessionType::output(Payload::Session(random_type(rng, depth / 2)), rest(rng)),
        n => {
            let width = rng.gen_range(1..=3);
            let mut labels = LABELS.to_vec();
            labels.shuffle(rng);
            let arms: Vec<_> = labels[..width].iter().map(|l| (*l, rest(rng))).collect();
            if n < 85 {
                SessionType::branch(arms)
            } else {
                SessionType::select(arms)
            }
        }
    }
}

/// Tunables for the process generators.
#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_threads: usize,
    pub type_depth: usize,
    /// Percent chance that a thread keeps an extra session with no partner.
    pub dangling: u32,
    /// Percent chance of a conditional before an action.
    pub conditionals: u32,
    /// Percent chance that a thread opens its sessions by requesting a service.
    pub requests: u32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_threads: 4,
            type_depth: 3,
            dangling: 40,
            conditionals: 10,
            requests: 25,
        }
    }
}

struct Builder<'r, R> {
    rng: &'r mut R,
    cfg: GenConfig,
    env: ServiceEnv,
    servers: Vec<Process>,
    next_service: usize,
    /// Obtain delegated sessions by requesting a service instead of
    /// restricting a fresh one, so that the result stays a program.
    program: bool,
}

impl<'r, R: Rng> Builder<'r, R> {
    fn new(rng: &'r mut R, cfg: GenConfig, program: bool) -> Self {
        Builder {
            rng,
            cfg,
            env: ServiceEnv::new(),
            servers: Vec::new(),
            next_service: 0,
            program,
        }
    }

    fn chance(&mut self, percent: u32) -> bool {
        self.rng.gen_range(0..100) < percent
    }

    fn new_service(&mut self, ty: &SessionType) -> Var {
        let a = Var::free(format!("s{}", self.next_service));
        self.next_service += 1;
        self.env
            .insert(a.clone(), Sort::Service(ty.clone()))
            .expect("generated service names are unique");
        a
    }

    /// A service of sort `<ty>` backed by a replicated server.
    fn served(&mut self, ty: &SessionType) -> Var {
        let existing = self
            .env
            .iter()
            .filter(|(_, s)| **s == Sort::Service(ty.clone()))
            .map(|(a, _)| a.clone())
            .collect::<Vec<_>>();
        if let Some(a) = existing.choose(self.rng) {
            return a.clone();
        }
        let a = self.new_service(ty);
        let k = Chan::fresh("k");
        let body = self.threads_of(vec![(k.clone(), ty.clone())], &[]);
        self.servers.push(Process::rep_serv(&a, &k, body));
        a
    }

    fn expr(&mut self, b: Basic, scope: &[(Var, Sort)], depth: usize) -> Expr {
        let vars: Vec<&Var> = scope
            .iter()
            .filter(|(_, s)| *s == Sort::Basic(b))
            .map(|(x, _)| x)
            .collect();
        if !vars.is_empty() && self.chance(40) {
            return Expr::var(vars.choose(self.rng).unwrap());
        }
        let compound = depth > 0 && self.chance(30);
        match b {
            Basic::Int if compound => {
                let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul]
                    .choose(self.rng)
                    .unwrap();
                Expr::bin(
                    op,
                    self.expr(b, scope, depth - 1),
                    self.expr(b, scope, depth - 1),
                )
            }
            Basic::Int => Expr::int(self.rng.gen_range(-5..100)),
            Basic::Bool if compound => match self.rng.gen_range(0..4) {
                0 => Expr::negate(self.expr(b, scope, depth - 1)),
                1 => Expr::bin(
                    BinOp::And,
                    self.expr(b, scope, depth - 1),
                    self.expr(b, scope, depth - 1),
                ),
                n => Expr::bin(
                    if n == 2 { BinOp::Le } else { BinOp::Eq },
                    self.expr(Basic::Int, scope, depth - 1),
                    self.expr(Basic::Int, scope, depth - 1),
                ),
            },
            Basic::Bool => Expr::bool(self.rng.gen()),
            Basic::Str => Expr::str(STRINGS.choose(self.rng).unwrap()),
        }
    }

    /// One thread driving every listed session to its end, interleaving
    /// their actions at random.
    fn threads_of(
        &mut self,
        mut chans: Vec<(Chan, SessionType)>,
        scope: &[(Var, Sort)],
    ) -> Process {
        chans.retain(|(_, t)| !t.is_end());
        if chans.is_empty() {
            return Process::Inact;
        }
        if self.chance(self.cfg.conditionals) {
            let guard = self.expr(Basic::Bool, scope, 2);
            let then = self.threads_of(chans.clone(), scope);
            let other = self.threads_of(chans, scope);
            return Process::cond(guard, then, other);
        }
        let i = self.rng.gen_range(0..chans.len());
        let (k, ty) = chans[i].clone();
        let with = |chans: &Vec<(Chan, SessionType)>, rest: &SessionType| {
            let mut c = chans.clone();
            c[i].1 = rest.clone();
            c
        };
        match &ty {
            SessionType::End => unreachable!("ended sessions were dropped"),
            SessionType::In(p, rest) => match &**p {
                Payload::Basic(b) => {
                    let x = Var::fresh("x");
                    let mut scope = scope.to_vec();
                    scope.push((x.clone(), Sort::Basic(*b)));
                    Process::input(&k, &x, self.threads_of(with(&chans, rest), &scope))
                }
                Payload::Service(inner) => {
                    let x = Var::fresh("x");
                    let mut scope = scope.to_vec();
                    scope.push((x.clone(), Sort::Service(inner.clone())));
                    let cont = self.threads_of(with(&chans, rest), &scope);
                    let cont = if self.chance(30) {
                        let h = Chan::fresh("h");
                        let client = self.threads_of(vec![(h.clone(), inner.dual())], &scope);
                        Process::par(cont, Process::request(&x, &h, client))
                    } else {
                        cont
                    };
                    Process::input(&k, &x, cont)
                }
                Payload::Session(inner) => {
                    let h = Chan::fresh("h");
                    let mut next = with(&chans, rest);
                    next.push((h.clone(), inner.clone()));
                    Process::input_s(&k, &h, self.threads_of(next, scope))
                }
            },
            SessionType::Out(p, rest) => match &**p {
                Payload::Basic(b) => {
                    let e = self.expr(*b, scope, 2);
                    Process::output(&k, e, self.threads_of(with(&chans, rest), scope))
                }
                Payload::Service(inner) => {
                    let local: Vec<Var> = scope
                        .iter()
                        .filter(|(_, s)| *s == Sort::Service(inner.clone()))
                        .map(|(x, _)| x.clone())
                        .collect();
                    let e = match local.choose(self.rng) {
                        Some(x) if self.chance(50) => Expr::var(x),
                        _ => Expr::service(&self.served(inner)),
                    };
                    Process::output(&k, e, self.threads_of(with(&chans, rest), scope))
                }
                Payload::Session(inner) => {
                    let owned = chans
                        .iter()
                        .enumerate()
                        .filter(|(j, (_, t))| *j != i && t == inner)
                        .map(|(j, _)| j)
                        .collect::<Vec<_>>();
                    if let Some(&j) = owned.choose(self.rng) {
                        let sent = chans[j].0.clone();
                        let mut next = with(&chans, rest);
                        next.remove(j);
                        return Process::delegate(&k, &sent, self.threads_of(next, scope));
                    }
                    let sent = Chan::fresh("h");
                    let mine =
                        Process::delegate(&k, &sent, self.threads_of(with(&chans, rest), scope));
                    if self.program {
                        let b = self.served(&inner.dual());
                        Process::request(&b, &sent, mine)
                    } else {
                        let other = self.threads_of(vec![(sent.clone(), inner.dual())], scope);
                        Process::restrict(&sent, Process::par(mine, other))
                    }
                }
            },
            SessionType::Branch(arms) => {
                let arms: Vec<_> = arms
                    .iter()
                    .map(|(l, a)| {
                        (
                            l.as_str().to_string(),
                            self.threads_of(with(&chans, a), scope),
                        )
                    })
                    .collect();
                Process::branch(&k, arms)
            }
            SessionType::Select(arms) => {
                let picked: Vec<_> = arms.iter().collect();
                let (l, a) = *picked.choose(self.rng).unwrap();
                Process::select(&k, l.as_str(), self.threads_of(with(&chans, a), scope))
            }
        }
    }

    /// A thread over `chans`, possibly preceded by a request that opens one
    /// more session with a freshly served service.
    fn thread(&mut self, mut chans: Vec<(Chan, SessionType)>) -> Process {
        if self.chance(self.cfg.requests) {
            let ty = random_type(self.rng, self.cfg.type_depth);
            let a = self.served(&ty);
            let k = Chan::fresh("k");
            chans.push((k.clone(), ty.dual()));
            return Process::request(&a, &k, self.threads_of(chans, &[]));
        }
        self.threads_of(chans, &[])
    }

    fn finish(self, threads: Vec<Process>) -> Generated {
        Generated {
            env: self.env,
            process: Process::par_all(threads.into_iter().chain(self.servers)),
        }
    }
}

/// Sessions shared along `links`, each a pair of thread indices. Session
/// `i` is free and named `k{i}`, or restricted at top level.
fn linked(
    rng: &mut impl Rng,
    cfg: GenConfig,
    threads: usize,
    links: &[(usize, usize)],
) -> Generated {
    let mut b = Builder::new(rng, cfg, false);
    let mut owned: Vec<Vec<(Chan, SessionType)>> = vec![Vec::new(); threads];
    let mut restricted = Vec::new();
    for (i, &(u, v)) in links.iter().enumerate() {
        let k = Chan::free(format!("k{i}"));
        let ty = random_type(b.rng, cfg.type_depth);
        owned[u].push((k.clone(), ty.dual()));
        owned[v].push((k.clone(), ty));
        if b.chance(30) {
            restricted.push(k);
        }
    }
    for (t, chans) in owned.iter_mut().enumerate() {
        if b.chance(cfg.dangling) {
            let ty = random_type(b.rng, cfg.type_depth);
            chans.push((Chan::free(format!("d{t}")), ty));
        }
    }
    let bodies: Vec<Process> = owned.into_iter().map(|c| b.thread(c)).collect();
    let mut g = b.finish(bodies);
    g.process = Process::restrict_all(&restricted, g.process);
    g
}

/// A transparent process: sessions link the threads along a random tree.
pub fn random_transparent(rng: &mut impl Rng, cfg: GenConfig) -> Generated {
    let threads = rng.gen_range(1..=cfg.max_threads.max(1));
    let links: Vec<(usize, usize)> = (1..threads).map(|i| (rng.gen_range(0..i), i)).collect();
    linked(rng, cfg, threads, &links)
}

/// A well-typed process whose sessions link threads along a random
/// multigraph, so the dependency graph may have cycles.
pub fn random_linked(rng: &mut impl Rng, cfg: GenConfig) -> Generated {
    let threads = rng.gen_range(2..=cfg.max_threads.max(2));
    let count = rng.gen_range(1..=threads + 1);
    let links: Vec<(usize, usize)> = (0..count)
        .map(|_| {
            let u = rng.gen_range(0..threads);
            let mut v = rng.gen_range(0..threads - 1);
            if v >= u {
                v += 1;
            }
            (u, v)
        })
        .collect();
    linked(rng, cfg, threads, &links)
}

/// A program: services with replicated or one-shot servers and clients
/// that request them. No free sessions and no restrictions.
pub fn random_program(rng: &mut impl Rng, cfg: GenConfig) -> Generated {
    let mut b = Builder::new(rng, cfg, true);
    let mut threads = Vec::new();
    let services = b.rng.gen_range(1..=2);
    let mut offered = Vec::new();
    for i in 0..services {
        let ty = random_type(b.rng, cfg.type_depth);
        let a = Var::free(format!("a{i}"));
        b.env
            .insert(a.clone(), Sort::Service(ty.clone()))
            .expect("top-level service names are unique");
        let k = Chan::fresh("k");
        let body = b.threads_of(vec![(k.clone(), ty.clone())], &[]);
        threads.push(if b.chance(70) {
            Process::rep_serv(&a, &k, body)
        } else {
            Process::serv(&a, &k, body)
        });
        offered.push((a, ty));
    }
    let clients = b.rng.gen_range(1..=cfg.max_threads.max(1));
    for _ in 0..clients {
        let uses = b.rng.gen_range(1..=offered.len());
        let mut picks = offered.clone();
        picks.shuffle(b.rng);
        picks.truncate(uses);
        let ks: Vec<Chan> = picks.iter().map(|_| Chan::fresh("k")).collect();
        let chans = ks
            .iter()
            .cloned()
            .zip(picks.iter().map(|(_, t)| t.dual()))
            .collect();
        let mut body = b.threads_of(chans, &[]);
        for ((a, _), k) in picks.iter().zip(&ks).rev() {
            body = Process::request(a, k, body);
        }
        threads.push(body);
    }
    b.finish(threads)
}

/// A well-typed process from any of the generators above.
pub fn random_well_typed(rng: &mut impl Rng, cfg: GenConfig) -> Generated {
    match rng.gen_range(0..3) {
        0 => random_transparent(rng, cfg),
        1 => random_linked(rng, cfg),
        _ => random_program(rng, cfg),
    }
}

/// A transparent process that cannot reduce but still has live channels,
/// obtained by running a random transparent process until it is stuck.
/// Gives up after `attempts` tries.
pub fn random_stuck_live(rng: &mut impl Rng, cfg: GenConfig, attempts: usize) -> Option<Generated> {
    for _ in 0..attempts {
        let g = random_transparent(rng, cfg);
        let run = explore_seeded(&g.process, 64, rng.gen());
        if redexes(&run.last).is_empty() && has_live_channels(&run.last) {
            return Some(Generated {
                env: g.env,
                process: run.last,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depgraph::is_transparent;
    use crate::typing::{check, is_program};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_produce_what_they_promise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = GenConfig::default();
        for _ in 0..200 {
            let g = random_linked(&mut rng, cfg);
            check(&g.env, &g.process).unwrap_or_else(|e| panic!("{e}\n{}", g.process));
            let g = random_transparent(&mut rng, cfg);
            assert!(
                is_transparent(&g.env, &g.process).is_transparent(),
                "{}",
                g.process
            );
            let g = random_program(&mut rng, cfg);
            assert!(is_program(&g.process), "{}", g.process);
            assert!(
                check(&g.env, &g.process).unwrap().is_empty(),
                "{}",
                g.process
            );
        }
    }

    #[test]
    fn stuck_live_processes_exist() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_stuck_live(&mut rng, GenConfig::default(), 100).unwrap();
        assert!(redexes(&g.process).is_empty());
        assert!(has_live_channels(&g.process));
    }
}
