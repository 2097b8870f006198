use proptest::prelude::*;

use tourpart::generators::random_tournament;
use tourpart::oracle::bruteforce_local_cut;
use tourpart::refine::two_pass_filter;
use tourpart::paths::{max_disjoint_paths, minimize_path_system, verify_backward_chords};
use tourpart::{is_k_connected, local_connectivity, Tournament, VertexSet};

fn tournament(max_n: usize) -> impl Strategy<Value = Tournament> {
    (1..=max_n, any::<u64>()).prop_map(|(n, seed)| random_tournament(n, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn degrees_sum_to_pairs(t in tournament(40)) {
        let n = t.n();
        let out = t.out_degrees();
        let inn = t.in_degrees();
        prop_assert_eq!(out.iter().sum::<usize>(), n * (n - 1) / 2);
        for v in 0..n {
            prop_assert_eq!(out[v] + inn[v], n - 1);
        }
    }

    #[test]
    fn trn_round_trip(t in tournament(30)) {
        prop_assert_eq!(Tournament::from_trn(&t.to_trn()).unwrap(), t);
    }

    #[test]
    fn k_connectivity_is_monotone(t in tournament(14), k in 1usize..5) {
        if is_k_connected(&t, k + 1) {
            prop_assert!(is_k_connected(&t, k));
        }
    }

    #[test]
    fn reversal_keeps_connectivity(t in tournament(14)) {
        prop_assert_eq!(tourpart::connectivity(&t), tourpart::connectivity(&t.reversed()));
    }

    #[test]
    fn menger_agreement(t in tournament(10)) {
        let n = t.n();
        for u in 0..n {
            for v in 0..n {
                if u != v && t.beats(v, u) {
                    prop_assert_eq!(local_connectivity(&t, u, v).unwrap(), bruteforce_local_cut(&t, u, v).unwrap());
                }
            }
        }
    }

    #[test]
    fn k_connected_means_no_small_deletion_disconnects(t in tournament(9), k in 1usize..4, drop in any::<u64>()) {
        let n = t.n();
        if is_k_connected(&t, k) {
            let gone: Vec<usize> = (0..n).filter(|v| drop >> (v % 64) & 1 == 1).take(k - 1).collect();
            let alive = VertexSet::from_ids(n, gone.iter().copied()).unwrap().complement();
            prop_assert!(tourpart::connectivity::is_strongly_connected_within(&t, &alive));
        }
    }

    #[test]
    fn minimisation_is_idempotent_and_shrinks(n in 20usize..120, seed in any::<u64>(), want in 1usize..6) {
        let t = random_tournament(n, seed);
        let sources = VertexSet::from_ids(n, 0..want * 2).unwrap();
        let sinks = VertexSet::from_ids(n, n - want * 2..n).unwrap();
        let forbidden = VertexSet::new(n);
        if let Ok(ps) = max_disjoint_paths(&t, &sources, &sinks, &forbidden, want) {
            let once = minimize_path_system(&t, &ps);
            prop_assert!(once.covered() <= ps.covered());
            prop_assert_eq!(&minimize_path_system(&t, &once), &once);
            prop_assert!(verify_backward_chords(&t, &once));
            once.validate(&t).unwrap();
            let ends = |s: &tourpart::paths::PathSystem| s.terminals();
            prop_assert_eq!(ends(&once).len(), want);
            for (a, b) in ends(&once) {
                prop_assert!(sources.contains(a) && sinks.contains(b));
            }
        }
    }

    #[test]
    fn surviving_triggers_have_a_dropped_witness(len in 1usize..40, slots in 1usize..4, density in 0u64..100, seed in any::<u64>()) {
        let rel = |a: usize, s: usize, b: usize| a != b && tourpart::rng::derive(seed, "rel", ((a * 64 + s) * 64 + b) as u64) % 100 < density;
        let c0: Vec<usize> = (0..len).collect();
        let kept = two_pass_filter(&c0, &|_| slots, &mut |a, s, pending| pending.iter().copied().find(|&b| rel(a, s, b)));
        for &a in &kept {
            for s in 0..slots {
                if kept.iter().any(|&b| rel(a, s, b)) {
                    prop_assert!(c0.iter().any(|&g| !kept.contains(&g) && rel(a, s, g)));
                }
            }
        }
    }
}
