//! Absorbing the leftover vertices into the parts, and the end-to-end driver.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assemble::{build_connected_parts, group_gadgets};
use crate::bits::VertexSet;
use crate::connectivity::{check_k_connected, is_k_connected, verify_partition};
use crate::gadgets::build_normalized;
use crate::profile::{Derived, Profile};
use crate::refine::refine_available;
use crate::rng::stream;
use crate::stage::{LogEntry, StageFailure, StageLog};
use crate::tournament::Tournament;

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSnapshot {
    #[serde(flatten)]
    pub profile: Profile,
    pub derived: Derived,
}

impl From<&Profile> for ProfileSnapshot {
    fn from(p: &Profile) -> Self {
        Self { profile: p.clone(), derived: p.derived() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub version: u32,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub seed: u64,
    pub profile: ProfileSnapshot,
    pub parts: Vec<Vec<usize>>,
    pub stage_log: Vec<LogEntry>,
}

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[error("{failure}")]
pub struct PipelineFailure {
    pub failure: StageFailure,
    pub stage_log: Vec<LogEntry>,
}

fn count_with(t: &Tournament, v: usize, set: &VertexSet, k: usize) -> (bool, bool) {
    (t.out_count_in(v, set) >= k, t.in_count_in(v, set) >= k)
}

/// Parts in which `v` has at least `k` out-neighbours, and those with `k`
/// in-neighbours.
fn reach_counts(t: &Tournament, v: usize, parts: &[VertexSet], k: usize) -> (usize, usize) {
    parts.iter().fold((0, 0), |(o, i), p| {
        let (a, b) = count_with(t, v, p, k);
        (o + a as usize, i + b as usize)
    })
}

/// Checks the hypotheses of one extension step. `support` is `Y` together
/// with every part.
pub fn extension_hypotheses(t: &Tournament, z: &VertexSet, y: &VertexSet, parts: &[VertexSet], k: usize, profile: &Profile) -> Result<(), String> {
    let n = t.n();
    let tp = parts.len();
    let mut union = z.union(y);
    if !z.is_disjoint(y) {
        return Err("Z and Y overlap".into());
    }
    for (i, p) in parts.iter().enumerate() {
        if !union.is_disjoint(p) {
            return Err(format!("part {i} overlaps Z, Y or another part"));
        }
        union.union_with(p);
        if p.len() < 2 * k || p.len() > n / tp {
            return Err(format!("part {i} has size {} outside [2k, n/t]", p.len()));
        }
    }
    let quorum = |c: usize| 4 * c >= 3 * tp;
    for v in y.iter() {
        let both = parts.iter().filter(|p| count_with(t, v, p, k) == (true, true)).count();
        if !quorum(both) {
            return Err(format!("vertex {v} of Y reaches only {both} parts"));
        }
    }
    for (i, p) in parts.iter().enumerate() {
        let got = y.iter().filter(|&v| count_with(t, v, p, k) == (true, true)).count();
        if (got as f64) < profile.extension_reservoir * n as f64 {
            return Err(format!("part {i}: only {got} vertices of Y attach to it"));
        }
    }
    let mut support = y.clone();
    for p in parts {
        support.union_with(p);
    }
    let wide = (profile.z_factor * z.len() as f64).max(profile.z_kt_factor * (k * tp) as f64);
    for v in z.iter() {
        let (o, i) = reach_counts(t, v, parts, k);
        let out_ok = quorum(o) || t.out_count_in(v, &support) as f64 >= wide;
        let in_ok = quorum(i) || t.in_count_in(v, &support) as f64 >= wide;
        if !(out_ok && in_ok) {
            return Err(format!("vertex {v} of Z has too few {}-neighbours", if out_ok { "in" } else { "out" }));
        }
    }
    Ok(())
}

/// Spreads `Y` over the parts it attaches to, then places each vertex of
/// `Z` into a part where it has `k` out- and in-neighbours.
#[allow(clippy::too_many_arguments)]
pub fn extend_partition(
    t: &Tournament,
    z: &VertexSet,
    y: &VertexSet,
    parts: &[VertexSet],
    k: usize,
    profile: &Profile,
    seed: u64,
    max_rounds: usize,
    name: &str,
    log: &mut StageLog,
) -> Result<Vec<VertexSet>, StageFailure> {
    if let Err(why) = extension_hypotheses(t, z, y, parts, k, profile) {
        log.push(name, 0, "failed", why.clone());
        return Err(StageFailure::new(name, "hypothesis", 1.0, 0.0).with_detail(why));
    }
    let tp = parts.len();
    let options: Vec<(usize, Vec<usize>)> = y
        .iter()
        .map(|v| (v, (0..tp).filter(|&i| count_with(t, v, &parts[i], k) == (true, true)).collect()))
        .collect();
    let mut stuck = None;
    for round in 0..max_rounds {
        let mut rng = stream(seed, name, round as u64);
        let mut grown: Vec<VertexSet> = parts.to_vec();
        for (v, opts) in &options {
            grown[opts[rng.gen_range(0..opts.len())]].insert(*v);
        }
        let base = grown.clone();
        let mut failed = None;
        for v in z.iter() {
            let pick = (0..tp)
                .filter(|&i| count_with(t, v, &base[i], k) == (true, true))
                .min_by_key(|&i| (grown[i].len(), i));
            match pick {
                Some(i) => {
                    grown[i].insert(v);
                }
                None => {
                    failed = Some(v);
                    break;
                }
            }
        }
        if let Some(v) = failed {
            log.push(name, round, "rejected", format!("vertex {v} fits no part"));
            stuck = Some(v);
            continue;
        }
        for (i, p) in grown.iter().enumerate() {
            let (sub, map) = t.induced(p).expect("parts within range");
            if let Err(w) = check_k_connected(&sub, k) {
                let w = w.relabel(&map);
                log.push(name, round, "failed", format!("part {i} lost k-connectivity: {w:?}"));
                return Err(StageFailure::new(name, "k-connected parts", 1.0, 0.0).with_detail(format!("part {i}")));
            }
        }
        log.push(name, round, "accepted", format!("absorbed {} + {} vertices", y.len(), z.len()));
        return Ok(grown);
    }
    Err(StageFailure::new(name, "assignable vertices", z.len() as f64, 0.0)
        .with_detail(format!("vertex {} has no valid part", stuck.map_or("?".into(), |v| v.to_string())))
        .with_rounds(max_rounds))
}

/// Checks the driver's conditions on a random split of `Y` into four
/// pieces: every `Y`-vertex attaches to three quarters of the parts, each
/// piece attaches to every part, and every vertex of `Z_i` is either
/// attached widely or has many neighbours in what earlier stages absorb.
fn split_ok(t: &Tournament, zs: &[VertexSet; 4], ys: &[VertexSet; 4], parts: &[VertexSet], k: usize, profile: &Profile) -> Result<(), String> {
    let n = t.n();
    let tp = parts.len();
    let quorum = |c: usize| 4 * c >= 3 * tp;
    let mut support = VertexSet::new(n);
    for p in parts {
        support.union_with(p);
    }
    for (i, (z, y)) in zs.iter().zip(ys).enumerate() {
        for v in y.iter() {
            let both = parts.iter().filter(|p| count_with(t, v, p, k) == (true, true)).count();
            if !quorum(both) {
                return Err(format!("vertex {v} of Y reaches only {both} parts"));
            }
        }
        for (j, p) in parts.iter().enumerate() {
            let got = y.iter().filter(|&v| count_with(t, v, p, k) == (true, true)).count();
            if (got as f64) < profile.extension_reservoir * n as f64 {
                return Err(format!("piece {}: only {got} vertices attach to part {j}", i + 1));
            }
        }
        support.union_with(y);
        let wide = (profile.z_factor * z.len() as f64).max(profile.z_kt_factor * (k * tp) as f64);
        for v in z.iter() {
            let (o, inn) = reach_counts(t, v, parts, k);
            let out_ok = quorum(o) || t.out_count_in(v, &support) as f64 >= wide;
            let in_ok = quorum(inn) || t.in_count_in(v, &support) as f64 >= wide;
            if !(out_ok && in_ok) {
                return Err(format!("vertex {v} of Z{} is poorly attached", i + 1));
            }
        }
        support.union_with(z);
    }
    Ok(())
}

/// Runs the whole pipeline. A certificate is returned only after the parts
/// pass [`verify_partition`] on `t`.
pub fn partition_tournament(
    t: &Tournament,
    k: usize,
    parts: usize,
    profile: &Profile,
    seed: u64,
    max_rounds: usize,
) -> Result<PartitionCertificate, PipelineFailure> {
    let mut log = StageLog::default();
    let n = t.n();
    let fail = |f: StageFailure, log: StageLog| PipelineFailure { failure: f, stage_log: log.entries };
    if parts == 0 || k == 0 {
        return Err(fail(StageFailure::new("input", "k >= 1 and t >= 1", 1.0, 0.0), log));
    }
    if n < k + 1 {
        return Err(fail(StageFailure::new("input", "n >= k + 1", (k + 1) as f64, n as f64), log));
    }
    let certificate = |found: Vec<Vec<usize>>, log: StageLog| PartitionCertificate {
        version: CERTIFICATE_VERSION,
        n,
        k,
        t: parts,
        seed,
        profile: profile.into(),
        parts: found,
        stage_log: log.entries,
    };
    if parts == 1 {
        return if is_k_connected(t, k) {
            log.push("single-part", 0, "verified", "whole tournament is k-connected");
            Ok(certificate(vec![(0..n).collect()], log))
        } else {
            log.push("single-part", 0, "failed", "whole tournament is not k-connected");
            Err(fail(StageFailure::new("single-part", "k-connected tournament", 1.0, 0.0), log))
        };
    }
    for w in profile.warnings() {
        log.push("profile", 0, "warning", w);
    }

    let (work, family) = match build_normalized(t, k, parts, profile) {
        Ok(x) => x,
        Err(f) => {
            log.push(&f.stage, 0, "failed", f.to_string());
            return Err(fail(f, log));
        }
    };
    log.push(
        "gadgets",
        0,
        "built",
        format!(
            "{} gadgets, |V_okay| = {}, |V_good| = {}, reversed = {}",
            family.len(),
            family.classes.okay.len(),
            family.classes.good.len(),
            family.reversed
        ),
    );
    let run = |log: &mut StageLog| -> Result<Vec<Vec<usize>>, StageFailure> {
        let refined = refine_available(&work, &family, &family.indices(), profile, seed, max_rounds, log)?;
        let plan = group_gadgets(&work, &family, &refined.kept, profile, seed, max_rounds, log)?;
        let linked = build_connected_parts(&work, &family, &plan, profile, seed, max_rounds, log)?;
        let base: Vec<VertexSet> = linked.parts.iter().map(|p| p.members.clone()).collect();
        let c = &family.classes;
        let z = &linked.z;
        let y = z.intersection(&c.good);
        let zs = [
            z.intersection(&c.good_plus.difference(&c.good_minus)),
            z.intersection(&c.good_minus.difference(&c.good_plus)),
            z.intersection(&c.bad),
            z.difference(&c.okay),
        ];
        let mut last = StageFailure::new("complete", "rounds", 1.0, 0.0);
        for round in 0..max_rounds {
            let mut rng = stream(seed, "split", round as u64);
            let mut ys: [VertexSet; 4] = std::array::from_fn(|_| VertexSet::new(n));
            for v in y.iter() {
                ys[rng.gen_range(0..4)].insert(v);
            }
            if let Err(why) = split_ok(&work, &zs, &ys, &base, k, profile) {
                log.push("complete", round, "rejected", why.clone());
                last = StageFailure::new("complete", "split conditions", 1.0, 0.0).with_detail(why);
                continue;
            }
            let mut current = base.clone();
            let mut ok = true;
            for i in 0..4 {
                let name = format!("extend-{}", i + 1);
                let sub_seed = crate::rng::derive(seed, &name, round as u64);
                match extend_partition(&work, &zs[i], &ys[i], &current, k, profile, sub_seed, max_rounds, &name, log) {
                    Ok(next) => current = next,
                    Err(f) => {
                        last = f;
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Ok(current.iter().map(VertexSet::to_vec).collect());
            }
        }
        Err(last.with_rounds(max_rounds))
    };
    let found = match run(&mut log) {
        Ok(p) => p,
        Err(f) => return Err(fail(f, log)),
    };
    let report = verify_partition(t, &found, k);
    if !report.is_valid() {
        log.push("verify", 0, "failed", format!("failing parts {:?}", report.failing_parts()));
        return Err(fail(StageFailure::new("verify", "valid partition", 1.0, 0.0), log));
    }
    log.push("verify", 0, "verified", format!("{} parts", found.len()));
    Ok(certificate(found, log))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_extension_changes_nothing() {
        // two 3-cycles, all arcs from the first to the second
        let t = Tournament::from_fn(6, |i, j| if i / 3 == j / 3 { j == i + 1 } else { true });
        let parts = vec![VertexSet::from_ids(6, 0..3).unwrap(), VertexSet::from_ids(6, 3..6).unwrap()];
        let mut p = Profile::tiny();
        p.extension_reservoir = 0.0;
        let empty = VertexSet::new(6);
        let out = extend_partition(&t, &empty, &empty, &parts, 1, &p, 1, 4, "extend", &mut StageLog::default()).unwrap();
        assert_eq!(out, parts);
    }

    #[test]
    fn single_part_shortcut() {
        let c3 = Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let cert = partition_tournament(&c3, 1, 1, &Profile::desk(), 0, 4).unwrap();
        assert_eq!(cert.parts, vec![vec![0, 1, 2]]);
        assert!(partition_tournament(&c3, 2, 1, &Profile::desk(), 0, 4).is_err());
    }

    #[test]
    fn transitive_input_fails_with_transcript() {
        let t = Tournament::from_fn(40, |_, _| true);
        let e = partition_tournament(&t, 1, 2, &Profile::tiny(), 3, 4).unwrap_err();
        assert!(!e.stage_log.is_empty());
    }
}
