//! Grouping gadgets into blocks and growing each block into a strongly
//! k-connected part.

use rand::Rng;
use serde::Serialize;

use crate::bits::VertexSet;
use crate::connectivity::{check_k_connected, CutWitness};
use crate::gadgets::GadgetFamily;
use crate::predicates::{eligible_set, helpful_set};
use crate::profile::{threshold, Profile};
use crate::rng::stream;
use crate::stage::{StageFailure, StageLog};
use crate::tournament::Tournament;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupPlan {
    pub a3: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
    /// Per block: vertices of `V_good cap W(A3)` eligible for it.
    #[serde(skip)]
    pub eligible_reservoir: Vec<VertexSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkedPart {
    pub block_id: usize,
    #[serde(with = "crate::paths::ids")]
    pub members: VertexSet,
    pub gadgets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectedParts {
    pub parts: Vec<LinkedPart>,
    /// Everything outside the parts.
    #[serde(with = "crate::paths::ids")]
    pub z: VertexSet,
    /// The half of `W(A3)` set aside before linking.
    #[serde(with = "crate::paths::ids")]
    pub reservoir: VertexSet,
}

/// `k` out- and in-neighbours of every vertex of `S(alpha)` inside `pool`
/// minus `X(alpha)`, for every `alpha` in `ids`. Returns the first offender.
fn fan_deficit(t: &Tournament, family: &GadgetFamily, ids: &[usize], pool: impl Fn(usize) -> VertexSet, need: usize) -> Option<(usize, usize, usize)> {
    for &a in ids {
        let g = &family.gadgets[a];
        let p = pool(a).difference(&g.x);
        for s in g.s.iter() {
            let got = t.out_count_in(s, &p).min(t.in_count_in(s, &p));
            if got < need {
                return Some((a, s, got));
            }
        }
    }
    None
}

fn minus(ids: &[usize], drop: &[usize]) -> Vec<usize> {
    ids.iter().copied().filter(|a| !drop.contains(a)).collect()
}

/// Checks (a): every vertex of every gadget in the class sees `tau3 k t`
/// eligible out- and in-neighbours in `W(A2 \ C) \ X(alpha)`.
fn class_well_linked(t: &Tournament, family: &GadgetFamily, a2: &[usize], class: &[usize], profile: &Profile) -> Option<(usize, usize, usize)> {
    let base = family.w_of(&minus(a2, class));
    let shared = eligible_set(t, family, class, &base, profile.tau3);
    let need = threshold(profile.tau3 * (family.k * family.t) as f64);
    fan_deficit(
        t,
        family,
        class,
        |a| {
            let x = &family.gadgets[a].x;
            if x.is_empty() {
                shared.clone()
            } else {
                eligible_set(t, family, class, &base.difference(x), profile.tau3)
            }
        },
        need,
    )
}

/// Eligible vertices for `class` in `W(class)` that lie in `V_good`.
fn class_reservoir(t: &Tournament, family: &GadgetFamily, class: &[usize], w: &VertexSet, profile: &Profile) -> VertexSet {
    let mut e = eligible_set(t, family, class, w, profile.tau3);
    e.intersect_with(&family.classes.good);
    e
}

/// Random classes, the best of them trimmed to blocks of `block_factor k`
/// gadgets, every block rechecked.
pub fn group_gadgets(
    t: &Tournament,
    family: &GadgetFamily,
    a2: &[usize],
    profile: &Profile,
    seed: u64,
    max_rounds: usize,
    log: &mut StageLog,
) -> Result<GroupPlan, StageFailure> {
    let n = family.n;
    let parts = family.t;
    if parts == 0 {
        return Err(StageFailure::new("group", "t >= 1", 1.0, 0.0));
    }
    let size = profile.block_factor * family.k;
    let wanted = profile.blocks(parts);
    if a2.len() < size * wanted {
        return Err(StageFailure::new("group", "gadgets for all blocks", (size * wanted) as f64, a2.len() as f64));
    }
    let classes = profile.classes(parts);
    let mut best = 0;
    for round in 0..max_rounds {
        let mut rng = stream(seed, "group", round as u64);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes];
        for &a in a2 {
            members[rng.gen_range(0..classes)].push(a);
        }
        let mut passing: Vec<(usize, usize)> = Vec::new();
        for (i, class) in members.iter().enumerate() {
            if class.len() < size {
                continue;
            }
            if class_well_linked(t, family, a2, class, profile).is_some() {
                continue;
            }
            let w = family.w_of(class);
            if (class_reservoir(t, family, class, &w, profile).len() as f64) < profile.class_reservoir * n as f64 {
                continue;
            }
            passing.push((family.u_of(class).len(), i));
        }
        passing.sort_unstable();
        let take = (passing.len() as f64 / profile.select_divisor).floor() as usize;
        best = best.max(take);
        if take < wanted {
            log.push("group", round, "rejected", format!("{} classes pass, {take} selected, {wanted} needed", passing.len()));
            continue;
        }
        let blocks: Vec<Vec<usize>> = passing[..wanted]
            .iter()
            .map(|&(_, i)| {
                let mut b = members[i].clone();
                b.sort_unstable();
                b.truncate(size);
                b
            })
            .collect();
        let mut a3: Vec<usize> = blocks.concat();
        a3.sort_unstable();
        match verify_group(t, family, &a3, &blocks, profile) {
            Ok(eligible_reservoir) => {
                log.push("group", round, "accepted", format!("{wanted} blocks of {size} gadgets"));
                return Ok(GroupPlan { a3, blocks, eligible_reservoir });
            }
            Err(why) => log.push("group", round, "rejected", why),
        }
    }
    Err(StageFailure::new("group", "selected classes", wanted as f64, best as f64).with_rounds(max_rounds))
}

/// Rechecks the block guarantees; returns the per-block reservoirs.
pub fn verify_group(t: &Tournament, family: &GadgetFamily, a3: &[usize], blocks: &[Vec<usize>], profile: &Profile) -> Result<Vec<VertexSet>, String> {
    let size = profile.block_factor * family.k;
    let need = threshold(profile.tau3 * (family.k * family.t) as f64);
    let w3 = family.w_of(a3);
    let mut seen = Vec::new();
    let mut reservoirs = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        if b.len() != size {
            return Err(format!("block {i} has {} gadgets", b.len()));
        }
        if b.iter().any(|a| seen.contains(a)) {
            return Err(format!("block {i} overlaps an earlier block"));
        }
        seen.extend_from_slice(b);
        let base = family.w_of(&minus(a3, b));
        if let Some((a, s, got)) = fan_deficit(t, family, b, |a| eligible_set(t, family, b, &base.difference(&family.gadgets[a].x), profile.tau3), need) {
            return Err(format!("block {i}: vertex {s} of gadget {a} has {got} eligible neighbours"));
        }
        let r = class_reservoir(t, family, b, &w3, profile);
        if (r.len() as f64) < profile.block_reservoir * family.n as f64 {
            return Err(format!("block {i}: reservoir of {}", r.len()));
        }
        reservoirs.push(r);
    }
    Ok(reservoirs)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinkFailure {
    BlockTooSmall { size: usize, min: usize },
    HypothesisUnmet { gadget: usize, vertex: usize, helpful: usize },
    NotKConnected(CutWitness),
}

/// Joins the gadgets of `block` through the vertices of `w_i` that are
/// helpful for it, and verifies the result is strongly k-connected.
pub fn link_group(
    t: &Tournament,
    family: &GadgetFamily,
    block_id: usize,
    block: &[usize],
    w_i: &VertexSet,
    min_block: usize,
) -> Result<LinkedPart, LinkFailure> {
    if block.len() < min_block.max(1) {
        return Err(LinkFailure::BlockTooSmall { size: block.len(), min: min_block.max(1) });
    }
    let k = family.k;
    let ub = family.u_of(block);
    let w = w_i.union(&ub);
    let helpful = helpful_set(t, family, block, &w);
    if let Some((gadget, vertex, got)) = fan_deficit(t, family, block, |_| helpful.clone(), k) {
        return Err(LinkFailure::HypothesisUnmet { gadget, vertex, helpful: got });
    }
    let members = helpful.union(&ub);
    let (sub, map) = t.induced(&members).expect("members within range");
    check_k_connected(&sub, k).map_err(|w| LinkFailure::NotKConnected(w.relabel(&map)))?;
    Ok(LinkedPart { block_id, members, gadgets: block.to_vec() })
}

/// Splits `W(A3)` at random, links every block, and keeps `t` parts of
/// suitable size once the reservoir guarantees hold.
pub fn build_connected_parts(
    t: &Tournament,
    family: &GadgetFamily,
    plan: &GroupPlan,
    profile: &Profile,
    seed: u64,
    max_rounds: usize,
    log: &mut StageLog,
) -> Result<ConnectedParts, StageFailure> {
    let n = family.n;
    let (k, parts) = (family.k, family.t);
    let cap = n / parts.max(1);
    if 2 * k > cap {
        return Err(StageFailure::new("link", "2k <= n/t", (2 * k) as f64, cap as f64));
    }
    let w = family.w_of(&plan.a3);
    let blocks = plan.blocks.len();
    let min_block = profile.min_link_factor * k;
    let mut best = 0;
    for round in 0..max_rounds {
        let mut rng = stream(seed, "link", round as u64);
        let mut reservoir = VertexSet::new(n);
        let mut pools = vec![VertexSet::new(n); blocks];
        for v in w.iter() {
            if rng.gen_bool(0.5) {
                reservoir.insert(v);
            } else {
                pools[rng.gen_range(0..blocks)].insert(v);
            }
        }
        let mut linked = Vec::new();
        for (i, b) in plan.blocks.iter().enumerate() {
            match link_group(t, family, i, b, &pools[i], min_block) {
                Ok(p) if (2 * k..=cap).contains(&p.members.len()) => linked.push(p),
                Ok(p) => log.push("link", round, "skipped", format!("block {i}: part of size {}", p.members.len())),
                Err(LinkFailure::BlockTooSmall { size, min }) => {
                    return Err(StageFailure::new("link", "block size", min as f64, size as f64));
                }
                Err(e) => log.push("link", round, "skipped", format!("block {i}: {e:?}")),
            }
            if linked.len() == parts {
                break;
            }
        }
        best = best.max(linked.len());
        if linked.len() < parts {
            log.push("link", round, "rejected", format!("{} of {parts} parts linked", linked.len()));
            continue;
        }
        let mut z = VertexSet::full(n);
        for p in &linked {
            z.difference_with(&p.members);
        }
        let zg = z.intersection(&family.classes.good);
        let need = profile.part_reservoir * n as f64;
        let short = linked.iter().find_map(|p| {
            let got = zg.iter().filter(|&v| t.out_count_in(v, &p.members) >= k && t.in_count_in(v, &p.members) >= k).count();
            ((got as f64) < need).then_some((p.block_id, got))
        });
        if let Some((b, got)) = short {
            log.push("link", round, "rejected", format!("part from block {b}: reservoir of {got}"));
            continue;
        }
        log.push("link", round, "accepted", format!("sizes {:?}", linked.iter().map(|p| p.members.len()).collect::<Vec<_>>()));
        return Ok(ConnectedParts { parts: linked, z, reservoir });
    }
    Err(StageFailure::new("link", "linked parts", parts as f64, best as f64).with_rounds(max_rounds))
}
