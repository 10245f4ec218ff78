//! The nine acceptance criteria, one PASS/FAIL line each.
//!
//! The report goes straight to standard output, so it shows even when the
//! test harness captures output.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spi_core::congruence::{
    canonical_key, is_program, maximal_parallel_subterms, normal_form, normalize,
};
use spi_core::depgraph::{build_graph, is_transparent, Transparency};
use spi_core::gen::{
    random_program, random_stuck_live, random_transparent, random_type, random_well_typed,
    GenConfig,
};
use spi_core::golden::load;
use spi_core::progress::{check_progress, construct_partner, inhabit};
use spi_core::semantics::{explore_all, explore_bounded, redexes, step, RuleTag};
use spi_core::surface::parse_source;
use spi_core::syntax::{Chan, Entry, Expr, Process, SessionEnv};
use spi_core::typing::{check, check_against};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const STATE_CAP: usize = 5_000;
const PROGRAM_DEPTH: usize = 4;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn without_services(p: &Process) -> Process {
    let mut n = normalize(p);
    n.threads.retain(|t| !matches!(t, Process::RepServ { .. }));
    normal_form(&n.to_process())
}

fn golden_graphs() -> Outcome {
    let g = build_graph(&load("free_cycle").process);
    ensure(
        g.node_count() == 2 && g.edge_count() == 2 && !g.is_acyclic(),
        || format!("free cycle: {g:?}"),
    )?;

    let g = build_graph(&load("restricted_cycle").process);
    ensure(
        g.node_count() == 2
            && g.edge_count() == 2
            && !g.is_acyclic()
            && g.nodes.iter().all(|n| n.labels.is_empty()),
        || format!("restricted cycle: {g:?}"),
    )?;

    let f = load("cycle_under_service");
    let g = build_graph(&f.process);
    ensure(g.node_count() == 1 && g.edge_count() == 0, || {
        format!("cycle under service: {g:?}")
    })?;
    match is_transparent(&f.env, &f.process) {
        Transparency::NotTransparent { subterm, .. } if subterm != f.process => {}
        other => return Err(format!("cycle under service verdict: {other:?}")),
    }

    let g = build_graph(&load("intro_path").process);
    ensure(
        g.node_count() == 3
            && g.edge_count() == 2
            && g.is_acyclic()
            && g.leads_to(&Chan::free("k"), &Chan::free("k'")) == Some(true),
        || format!("intro: {g:?}"),
    )?;
    Ok("4 graphs exact".into())
}

fn buyer_seller() -> Outcome {
    let f = load("buyer_seller");
    let delta = check(&f.env, &f.process).map_err(|e| e.to_string())?;
    ensure(delta.is_empty(), || format!("Δ = {delta:?}"))?;
    ensure(is_program(&f.process), || "not a program".into())?;
    ensure(is_transparent(&f.env, &f.process).is_transparent(), || {
        "not transparent".into()
    })?;

    let rs = redexes(&f.process);
    ensure(rs.len() == 1 && rs[0].rule == RuleTag::RInit, || {
        format!("redexes {rs:?}")
    })?;
    let first = step(&f.process, &rs[0]).map_err(|e| e.to_string())?;
    let shape = parse_source(
        "env buy : <![int].&{ok: ![string].end, stop: end}>; ship : <?[![string].end].end>;
         new k . (k?(x_quote).if x_quote <= 100 then k << ok.k?(x_conf).0 else k << stop.0
                 | k!(90).k >> { ok: ship<k'>.k'!((k)).0, stop: 0 })
         | *buy(k).k!(90).k >> { ok: ship<k'>.k'!((k)).0, stop: 0 }
         | *ship(k').k'?((k)).k!(\"confirmed\").0",
    )
    .map_err(|e| e.to_string())?;
    ensure(
        canonical_key(&first) == canonical_key(&shape.process),
        || format!("first step gave {first}"),
    )?;

    let target = canonical_key(&load("after_ship").process);
    let ex = explore_all(&f.process, 10);
    let state = ex
        .states
        .iter()
        .find(|s| canonical_key(&without_services(&s.process)) == target)
        .ok_or("ship invocation not reached")?;
    let g = build_graph(&without_services(&state.process));
    let mut degrees = vec![0usize; g.node_count()];
    for e in &g.edges {
        degrees[e.a] += 1;
        degrees[e.b] += 1;
    }
    degrees.sort();
    ensure(degrees == [1, 1, 2] && g.is_acyclic(), || {
        format!("after ship: {g:?}")
    })?;

    let verdict = check_progress(&f.env, &f.process, 10, 4096).map_err(|e| e.to_string())?;
    ensure(verdict.is_certificate(), || {
        format!("progress: {verdict:?}")
    })?;
    Ok(format!("certificate over {} states", ex.states.len()))
}

fn blocked_delegation() -> Outcome {
    let f = load("self_delegation");
    check(&f.env, &f.process).map_err(|e| e.to_string())?;
    let rs = redexes(&f.process);
    ensure(rs.is_empty(), || format!("redexes {rs:?}"))?;
    match is_transparent(&f.env, &f.process) {
        Transparency::NotTransparent { .. } => Ok("0 redexes, NotTransparent".into()),
        other => Err(format!("{other:?}")),
    }
}

fn orderings_examples() -> Outcome {
    for name in ["branch_orderings", "deferred_payment"] {
        let f = load(name);
        ensure(is_transparent(&f.env, &f.process).is_transparent(), || {
            format!("{name} not transparent")
        })?;
        let verdict = check_progress(&f.env, &f.process, 10, 4096).map_err(|e| e.to_string())?;
        ensure(verdict.is_certificate(), || format!("{name}: {verdict:?}"))?;
    }
    Ok("both transparent and certified".into())
}

fn subject_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = GenConfig::default();
    let (mut states, mut truncated) = (0usize, 0usize);
    for i in 0..1000 {
        let g = random_well_typed(&mut rng, cfg);
        let delta = check(&g.env, &g.process).map_err(|e| format!("#{i} generator: {e}"))?;
        let nf = normal_form(&g.process);
        let nf_delta = check(&g.env, &nf).map_err(|e| format!("#{i} normal form: {e}\n{nf}"))?;
        ensure(nf_delta == delta, || {
            format!("#{i} normal form changed Δ\n{}", g.process)
        })?;
        let ex = explore_bounded(&g.process, 5, STATE_CAP);
        truncated += usize::from(ex.truncated);
        for s in &ex.states {
            states += 1;
            check(&g.env, &s.process)
                .map_err(|e| format!("#{i} after {} steps: {e}\n{}", s.depth, s.process))?;
        }
    }
    Ok(format!(
        "1000 processes, {states} states re-checked, {truncated} explorations capped"
    ))
}

fn stability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = GenConfig::default();
    let mut transitions = 0usize;
    for i in 0..1000 {
        let g = random_transparent(&mut rng, cfg);
        ensure(is_transparent(&g.env, &g.process).is_transparent(), || {
            format!("#{i} generator produced an opaque process\n{}", g.process)
        })?;
        let ex = explore_bounded(&g.process, 4, STATE_CAP);
        for s in &ex.states {
            let before = build_graph(&s.process);
            for r in redexes(&s.process) {
                transitions += 1;
                let after = step(&s.process, &r).map_err(|e| e.to_string())?;
                ensure(is_transparent(&g.env, &after).is_transparent(), || {
                    format!("#{i} {r} broke transparency\n{}\n-> {after}", s.process)
                })?;
                let graph = build_graph(&after);
                let chans: Vec<Chan> = after.free_session_channels().into_iter().collect();
                for a in &chans {
                    for b in &chans {
                        if graph.leads_to(a, b) == Some(true) && before.leads_to(a, b) != Some(true)
                        {
                            return Err(format!(
                                "#{i} {r} created {a} ⤳ {b}\n{}\n-> {after}",
                                s.process
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "1000 processes, {transitions} transitions within 5 steps"
    ))
}

fn inhabitation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let k = Chan::free("k");
    for i in 0..1000 {
        let ty = random_type(&mut rng, 4);
        let (p, ext) = inhabit(&ty, &k);
        let expected = SessionEnv::new().with(&k, Entry::Type(ty.clone()));
        check_against(&ext, &p, &expected).map_err(|e| format!("#{i} {ty:?}: {e}"))?;
        ensure(is_transparent(&ext, &p).is_transparent(), || {
            format!("#{i} opaque: {p}")
        })?;
        ensure(redexes(&p).is_empty(), || format!("#{i} reducible: {p}"))?;
    }
    Ok("1000 types".into())
}

fn partners_and_programs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = GenConfig::default();
    for i in 0..500 {
        let g = random_stuck_live(&mut rng, cfg, 1000).ok_or("no stuck live process found")?;
        ensure(is_transparent(&g.env, &g.process).is_transparent(), || {
            format!("#{i} stuck process is opaque: {}", g.process)
        })?;
        let (q, ext) = construct_partner(&g.env, &g.process)
            .map_err(|e| format!("#{i} {e}: {}", g.process))?
            .ok_or_else(|| format!("#{i} no partner for {}", g.process))?;
        ensure(redexes(&q).is_empty(), || {
            format!("#{i} partner reduces: {q}")
        })?;
        let both = Process::par(g.process.clone(), q.clone());
        check(&g.env.extended(&ext), &both).map_err(|e| format!("#{i} composition: {e}"))?;
        ensure(!redexes(&both).is_empty(), || {
            format!("#{i} {} | {q} is stuck", g.process)
        })?;
    }
    let mut decompositions = 0usize;
    for i in 0..500 {
        let g = random_program(&mut rng, cfg);
        ensure(is_program(&g.process), || {
            format!("#{i} not a program: {}", g.process)
        })?;
        for sub in maximal_parallel_subterms(&g.process) {
            let graph = build_graph(&sub);
            ensure(graph.edge_count() == 0, || format!("#{i} edges in {sub}"))?;
        }
        let verdict =
            check_progress(&g.env, &g.process, PROGRAM_DEPTH, 4096).map_err(|e| e.to_string())?;
        match verdict {
            spi_core::progress::ProgressVerdict::Certificate(c) => {
                decompositions += c.decompositions
            }
            other => return Err(format!("#{i} {}\n{other:?}", g.process)),
        }
    }
    Ok(format!(
        "500 partners, 500 certificates ({decompositions} stuck sub-terms unblocked)"
    ))
}

/// `threads` threads in a row; neighbours share one session carrying
/// `messages` integers.
fn pipeline(threads: usize, messages: usize) -> Process {
    let chan = |i: usize| Chan::free(format!("k{i}"));
    let mut out = Vec::with_capacity(threads);
    for t in 0..threads {
        let mut body = Process::Inact;
        if t + 1 < threads {
            for _ in 0..messages {
                body = Process::output(&chan(t), Expr::int(1), body);
            }
        }
        if t > 0 {
            for _ in 0..messages {
                body = Process::input(&chan(t - 1), &spi_core::syntax::Var::fresh("x"), body);
            }
        }
        out.push(body);
    }
    Process::par_all(out)
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let cov: f64 = points
        .iter()
        .map(|(x, y)| (x.ln() - mx) * (y.ln() - my))
        .sum();
    let var: f64 = points.iter().map(|(x, _)| (x.ln() - mx).powi(2)).sum();
    cov / var
}

fn time_transparency(p: &Process) -> Duration {
    let g = spi_core::syntax::ServiceEnv::new();
    (0..3)
        .map(|_| {
            let start = Instant::now();
            let verdict = is_transparent(&g, p);
            let took = start.elapsed();
            assert!(verdict.is_transparent());
            took
        })
        .min()
        .unwrap()
}

fn scaling() -> Outcome {
    let mut report = Vec::new();
    // More channels at a fixed thread length, then longer threads at a
    // fixed channel count.
    let families: [(&str, Vec<(usize, usize)>); 2] = [
        (
            "channels",
            [10, 30, 100, 300, 1000]
                .iter()
                .map(|&c| (c + 1, 50))
                .collect(),
        ),
        (
            "length",
            [5, 15, 50, 150, 500].iter().map(|&m| (101, m)).collect(),
        ),
    ];
    for (name, sizes) in families {
        let mut points = Vec::new();
        for (threads, messages) in sizes {
            let p = pipeline(threads, messages);
            let (n, c) = (p.size(), p.free_session_channels().len());
            let took = time_transparency(&p);
            points.push(((n * c) as f64, took.as_secs_f64().max(1e-7)));
            drop(p);
        }
        let s = slope(&points);
        let max_n = points.last().map(|(nc, _)| *nc).unwrap_or_default();
        report.push(format!("{name} slope {s:.2} (n·c up to {max_n:.0})"));
        ensure(s <= 1.3, || report.join(", "))?;
    }
    Ok(report.join(", "))
}

fn run_in_thread<'s>(
    s: &'s std::thread::Scope<'s, '_>,
    f: fn() -> Outcome,
) -> std::thread::ScopedJoinHandle<'s, (Outcome, Duration)> {
    std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn_scoped(s, move || {
            let start = Instant::now();
            let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".to_string()));
            (out, start.elapsed())
        })
        .expect("spawn criterion thread")
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("golden graphs", golden_graphs),
        ("buyer-seller", buyer_seller),
        ("blocked delegation", blocked_delegation),
        ("orderings examples", orderings_examples),
        ("subject reduction", subject_reduction),
        ("stability preservation", stability),
        ("inhabitation", inhabitation),
        ("partners and programs", partners_and_programs),
        ("transparency scaling", scaling),
    ];
    // The timing criterion runs alone.
    let (parallel, timed) = criteria.split_at(8);
    let mut results: Vec<(Outcome, Duration)> = std::thread::scope(|s| {
        let handles: Vec<_> = parallel.iter().map(|(_, f)| run_in_thread(s, *f)).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("criterion thread"))
            .collect()
    });
    results.extend(std::thread::scope(|s| {
        let handles: Vec<_> = timed.iter().map(|(_, f)| run_in_thread(s, *f)).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("criterion thread"))
            .collect::<Vec<_>>()
    }));
    let mut report = String::from("\n");
    let mut failed = BTreeSet::new();
    for (i, ((name, _), (outcome, took))) in criteria.iter().zip(&results).enumerate() {
        let secs = took.as_secs_f64();
        match outcome {
            Ok(detail) => report += &format!("AC{} {name}: PASS [{detail}] ({secs:.1}s)\n", i + 1),
            Err(why) => {
                report += &format!("AC{} {name}: FAIL [{why}] ({secs:.1}s)\n", i + 1);
                failed.insert(i + 1);
            }
        }
    }
    let mut out = std::io::stdout().lock();
    out.write_all(report.as_bytes()).expect("write report");
    out.flush().expect("flush report");
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
