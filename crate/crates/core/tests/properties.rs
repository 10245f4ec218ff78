use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spi_core::congruence::{canonical_key, maximal_parallel_subterms, normal_form};
use spi_core::depgraph::{build_graph, find_cyclic_subterm, is_transparent};
use spi_core::gen::{random_linked, random_type, random_well_typed, GenConfig, Generated};
use spi_core::progress::{construct_partner, inhabit};
use spi_core::semantics::{explore_seeded, redexes, step};
use spi_core::surface::{parse_source, parse_type, print_source, print_type, SourceFile};
use spi_core::syntax::{alpha_equivalent, Chan};
use spi_core::typing::{check, check_against};

fn well_typed(seed: u64) -> Generated {
    random_well_typed(&mut ChaCha8Rng::seed_from_u64(seed), GenConfig::default())
}

fn source(g: &Generated) -> SourceFile {
    SourceFile {
        sessions: Vec::new(),
        env: g.env.clone(),
        process: g.process.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_sources_parse_back(seed in any::<u64>()) {
        let g = well_typed(seed);
        let text = print_source(&source(&g));
        let back = parse_source(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert!(alpha_equivalent(&back.process, &g.process), "{}", text);
        prop_assert_eq!(back.env, g.env);
    }

    #[test]
    fn printed_types_parse_back(seed in any::<u64>(), depth in 0usize..5) {
        let ty = random_type(&mut ChaCha8Rng::seed_from_u64(seed), depth);
        prop_assert_eq!(parse_type(&print_type(&ty)).unwrap(), ty.clone());
        prop_assert_eq!(ty.dual().dual(), ty);
    }

    #[test]
    fn normal_form_is_idempotent_and_keeps_the_type(seed in any::<u64>()) {
        let g = well_typed(seed);
        let n = normal_form(&g.process);
        prop_assert_eq!(normal_form(&n), n.clone());
        prop_assert_eq!(check(&g.env, &n).unwrap(), check(&g.env, &g.process).unwrap());
        prop_assert_eq!(canonical_key(&n), canonical_key(&g.process));
    }

    #[test]
    fn canonical_key_ignores_bound_names(seed in any::<u64>()) {
        let g = well_typed(seed);
        prop_assert_eq!(canonical_key(&g.process.freshen()), canonical_key(&g.process));
    }

    #[test]
    fn seeded_runs_are_reproducible(seed in any::<u64>(), run in any::<u64>()) {
        let g = well_typed(seed);
        let a = explore_seeded(&g.process, 8, run);
        let b = explore_seeded(&g.process, 8, run);
        prop_assert_eq!(a.to_string(), b.to_string());
        prop_assert!(a.len() <= 8);
    }

    #[test]
    fn every_redex_steps(seed in any::<u64>()) {
        let g = well_typed(seed);
        for r in redexes(&g.process) {
            let next = step(&g.process, &r).unwrap();
            prop_assert!(check(&g.env, &next).is_ok(), "{} after {}", g.process, r);
        }
    }

    #[test]
    fn transparency_agrees_with_subterm_graphs(seed in any::<u64>()) {
        let g = random_linked(&mut ChaCha8Rng::seed_from_u64(seed), GenConfig::default());
        let acyclic = maximal_parallel_subterms(&g.process)
            .iter()
            .all(|s| build_graph(s).is_acyclic());
        prop_assert_eq!(is_transparent(&g.env, &g.process).is_transparent(), acyclic);
        prop_assert_eq!(find_cyclic_subterm(&g.process).is_none(), acyclic);
    }

    #[test]
    fn leads_to_is_symmetric(seed in any::<u64>()) {
        let g = random_linked(&mut ChaCha8Rng::seed_from_u64(seed), GenConfig::default());
        let graph = build_graph(&g.process);
        let chans: Vec<Chan> = graph.channels().into_iter().collect();
        for a in &chans {
            prop_assert_eq!(graph.leads_to(a, a), Some(true));
            for b in &chans {
                prop_assert_eq!(graph.leads_to(a, b), graph.leads_to(b, a));
            }
        }
    }

    #[test]
    fn inhabitants_are_stuck_and_transparent(seed in any::<u64>(), depth in 0usize..5) {
        let ty = random_type(&mut ChaCha8Rng::seed_from_u64(seed), depth);
        let k = Chan::free("k");
        let (p, ext) = inhabit(&ty, &k);
        let expected = [(k, spi_core::syntax::Entry::Type(ty))].into_iter().collect();
        prop_assert!(check_against(&ext, &p, &expected).is_ok(), "{}", p);
        prop_assert!(redexes(&p).is_empty());
        prop_assert!(find_cyclic_subterm(&p).is_none());
    }

    #[test]
    fn partners_unblock_stuck_processes(seed in any::<u64>()) {
        let g = well_typed(seed);
        let trace = explore_seeded(&g.process, 64, seed);
        let last = trace.last.clone();
        prop_assume!(redexes(&last).is_empty() && find_cyclic_subterm(&last).is_none());
        prop_assume!(construct_partner(&g.env, &last).is_ok());
        if let Some((q, ext)) = construct_partner(&g.env, &last).unwrap() {
            prop_assert!(redexes(&q).is_empty());
            let both = spi_core::syntax::Process::par(last.clone(), q);
            prop_assert!(check(&g.env.extended(&ext), &both).is_ok());
            prop_assert!(!redexes(&both).is_empty());
        }
    }
}
