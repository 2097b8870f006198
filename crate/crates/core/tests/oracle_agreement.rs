use std::time::Duration;

use tourpart::connectivity::{min_separator, reach};
use tourpart::generators::random_tournament;
use tourpart::oracle::{bruteforce_connectivity, bruteforce_is_k_connected, bruteforce_local_cut, bruteforce_partition, SearchOutcome};
use tourpart::paths::{max_disjoint_paths, PathError};
use tourpart::{check_k_connected, connectivity, local_connectivity, verify_partition, Tournament, VertexSet};

/// Every tournament on `n` vertices, in pair order.
fn all_tournaments(n: usize) -> impl Iterator<Item = Tournament> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u32..1 << pairs.len()).map(move |code| {
        Tournament::from_fn(n, |i, j| {
            let idx = pairs.iter().position(|&p| p == (i, j)).unwrap();
            code >> idx & 1 == 1
        })
    })
}

#[test]
fn local_connectivity_matches_subset_cuts_on_all_small_tournaments() {
    for n in 2..=5 {
        for t in all_tournaments(n) {
            for u in 0..n {
                for v in 0..n {
                    if u != v && t.beats(v, u) {
                        assert_eq!(local_connectivity(&t, u, v).unwrap(), bruteforce_local_cut(&t, u, v).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn min_separator_is_a_minimum_cut() {
    for seed in 0..60 {
        let n = 6 + (seed as usize % 5);
        let t = random_tournament(n, seed);
        for u in 0..n {
            for v in 0..n {
                if u == v || t.beats(u, v) {
                    continue;
                }
                let cut = min_separator(&t, u, v).unwrap().unwrap();
                assert_eq!(cut.len(), bruteforce_local_cut(&t, u, v).unwrap());
                assert!(!cut.contains(u) && !cut.contains(v));
                assert!(!reach(&t, &cut.complement(), u, true).contains(v));
            }
        }
    }
}

#[test]
fn k_connectivity_matches_exhaustive_deletion() {
    for seed in 0..300 {
        let n = 2 + (seed as usize % 8);
        let t = random_tournament(n, seed);
        for k in 1..=3 {
            let fast = check_k_connected(&t, k);
            assert_eq!(fast.is_ok(), bruteforce_is_k_connected(&t, k).unwrap(), "seed {seed} k {k}");
            if let Err(w) = fast {
                assert!(w.holds_for(&t, k));
            }
        }
        assert_eq!(connectivity(&t), bruteforce_connectivity(&t).unwrap());
    }
}

#[test]
fn rotational_nine_connectivity() {
    // x -> x + d for d in 1..=4 (mod 9): the oracle's deletion search gives 4.
    let t = tourpart::generators::rotational_tournament(9).unwrap();
    assert_eq!(bruteforce_connectivity(&t).unwrap(), 4);
    assert_eq!(connectivity(&t), 4);
}

fn masks(t: &Tournament) -> Vec<u32> {
    (0..t.n()).map(|u| (0..t.n()).filter(|&v| u != v && t.beats(u, v)).fold(0, |m, v| m | 1 << v)).collect()
}

/// Smallest set of non-forbidden vertices meeting every source-to-sink path.
fn subset_min_cut(t: &Tournament, sources: u32, sinks: u32, forbidden: u32) -> usize {
    let out = masks(t);
    let universe = (1u32 << t.n()) - 1;
    let allowed = universe & !forbidden;
    let mut best = usize::MAX;
    let mut c = allowed;
    loop {
        let alive = allowed & !c;
        let mut seen = sources & alive;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for (v, o) in out.iter().enumerate() {
                if frontier >> v & 1 == 1 {
                    next |= o;
                }
            }
            next &= alive & !seen;
            seen |= next;
            frontier = next;
        }
        if seen & sinks == 0 {
            best = best.min(c.count_ones() as usize);
        }
        if c == 0 {
            break;
        }
        c = (c - 1) & allowed;
    }
    best
}

#[test]
fn path_system_exists_iff_no_small_cut() {
    for seed in 0..200u64 {
        let n = 5 + (seed as usize % 6);
        let t = random_tournament(n, seed);
        let pick = |salt: u64| (0..n).filter(|&v| tourpart::rng::derive(seed, "pick", salt * 64 + v as u64).is_multiple_of(4)).collect::<Vec<_>>();
        let (src, snk, forb) = (pick(1), pick(2), pick(3));
        let forb: Vec<usize> = forb.into_iter().filter(|v| !src.contains(v) && !snk.contains(v)).collect();
        let to_set = |ids: &[usize]| VertexSet::from_ids(n, ids.iter().copied()).unwrap();
        let to_mask = |ids: &[usize]| ids.iter().fold(0u32, |m, &v| m | 1 << v);
        let cut = subset_min_cut(&t, to_mask(&src), to_mask(&snk), to_mask(&forb));
        for want in 0..=4 {
            let got = max_disjoint_paths(&t, &to_set(&src), &to_set(&snk), &to_set(&forb), want);
            match got {
                Ok(ps) => {
                    assert!(want <= cut, "seed {seed}: {want} paths past a cut of {cut}");
                    assert_eq!(ps.paths.len(), want);
                    ps.validate(&t).unwrap();
                }
                Err(PathError::Infeasible { achieved, .. }) => {
                    assert!(want > cut);
                    assert_eq!(achieved, cut);
                }
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn oracle_partitions_verify() {
    let mut found = 0;
    for seed in 0..80 {
        let t = random_tournament(10, seed);
        match bruteforce_partition(&t, 1, 2, Duration::from_secs(10)).unwrap() {
            SearchOutcome::Found { parts } => {
                found += 1;
                assert!(verify_partition(&t, &parts, 1).is_valid());
            }
            SearchOutcome::NoneExists => {}
            SearchOutcome::Timeout { .. } => panic!("timeout at n = 10"),
        }
    }
    assert!(found > 0);
}
