use tourpart::bounds::{monte_carlo_validate, three_sigma, Scenario, Tail};
use tourpart::complete::{partition_tournament, PartitionCertificate};
use tourpart::gadgets::{build_normalized, verify_gadget_properties};
use tourpart::generators::random_tournament;
use tourpart::predicates::{available_set, eligible_set, helpful_set, is_available};
use tourpart::profile::Profile;
use tourpart::verify_partition;

#[test]
fn desk_build_meets_the_structural_properties() {
    let p = Profile::desk();
    let t = random_tournament(2000, 5);
    let (work, family) = build_normalized(&t, 1, 2, &p).unwrap();
    let report = verify_gadget_properties(&work, &family, &p);
    assert!(report.all_passed(&["shape", "G1", "G2", "G3", "G4", "classification"]), "{report:?}");
}

#[test]
fn predicates_nest_and_stay_inside_w() {
    let p = Profile::desk();
    let t = random_tournament(1500, 9);
    let (work, family) = build_normalized(&t, 1, 2, &p).unwrap();
    let ids: Vec<usize> = family.indices().into_iter().take(24).collect();
    let w = family.w_of(&ids);
    let helpful = helpful_set(&work, &family, &ids, &w);
    let eligible = eligible_set(&work, &family, &ids, &w, p.tau3);
    assert!(helpful.is_subset(&w));
    // eligibility demands at least k neighbours per layer, so it implies helpfulness
    assert!(eligible.is_subset(&helpful));
    let alpha = ids[3];
    let avail = available_set(&work, &family, &ids, alpha, p.tau2);
    assert!(avail.is_subset(&family.w_without(&ids, alpha)));
    for u in (0..work.n()).step_by(97) {
        assert_eq!(is_available(&work, &family, &ids, alpha, u, p.tau2), Some(avail.contains(u)));
    }
    assert_eq!(is_available(&work, &family, &ids, usize::MAX, 0, p.tau2), None);
}

#[test]
fn desk_certificate_verifies_and_round_trips() {
    let t = random_tournament(2000, 21);
    let cert = partition_tournament(&t, 1, 2, &Profile::desk(), 21, 8).unwrap();
    assert_eq!(cert.parts.len(), 2);
    assert!(verify_partition(&t, &cert.parts, 1).is_valid());
    let json = serde_json::to_string(&cert).unwrap();
    let back: PartitionCertificate = serde_json::from_str(&json).unwrap();
    assert!(back == cert, "certificate changed on a JSON round trip");
    assert!(partition_tournament(&t, 1, 2, &Profile::desk(), 21, 8).unwrap() == cert);
}

#[test]
fn failures_carry_a_transcript() {
    let t = tourpart::Tournament::from_fn(300, |i, j| i < j);
    let err = partition_tournament(&t, 1, 2, &Profile::desk(), 0, 4).unwrap_err();
    assert!(!err.stage_log.is_empty());
    assert!(!err.failure.stage.is_empty());
}

#[test]
fn monte_carlo_stays_under_the_bounds() {
    let trials = 20_000;
    let cases = [
        Scenario::Hoeffding { m: vec![1.0; 40], p: 0.5, ell: 4.0, eta2: 1.0 },
        Scenario::Markov { r: 30, p: 0.96, eta: 0.2 },
        Scenario::Chernoff { n: 100, p: 0.3, delta: 0.3, tail: Tail::Lower },
        Scenario::Chernoff { n: 100, p: 0.3, delta: 0.3, tail: Tail::Upper },
    ];
    for (i, s) in cases.iter().enumerate() {
        let bound = s.analytic_bound().unwrap().bound;
        let freq = monte_carlo_validate(s, trials, i as u64).unwrap();
        assert!(freq <= bound + three_sigma(bound, trials), "{s:?}: {freq} > {bound}");
    }
}
