//! Trimming the gadget index set until every gadget vertex sees many
//! available neighbours.
//!
//! Each stage is a two-pass filter followed by rounds of random halving; a
//! round is accepted only after its condition is rechecked on the kept set.

use rand::Rng;
use serde::Serialize;

use crate::bits::VertexSet;
use crate::gadgets::GadgetFamily;
use crate::predicates::{available_set, filter};
use crate::profile::{threshold, Profile};
use crate::rng::stream;
use crate::stage::{StageFailure, StageLog};
use crate::tournament::Tournament;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterOutcome {
    pub kept: Vec<usize>,
    pub rounds_used: usize,
    pub verified: bool,
}

/// `(alpha, slot, unclaimed) -> claimed index`.
pub type Trigger<'a> = dyn FnMut(usize, usize, &[usize]) -> Option<usize> + 'a;

/// Forward pass then backward pass over `c0`. Each processed index claims,
/// for each of its `slots(alpha)` slots, at most one still-unclaimed index
/// returned by `trigger(alpha, slot, unclaimed)`; claimed indices are
/// dropped. Returns the survivors in ascending order.
pub fn two_pass_filter(
    c0: &[usize],
    slots: &dyn Fn(usize) -> usize,
    trigger: &mut Trigger,
) -> Vec<usize> {
    let x1 = pass(c0, slots, trigger);
    let mut back = x1.clone();
    back.reverse();
    let mut x2 = pass(&back, slots, trigger);
    x2.sort_unstable();
    x2
}

fn pass(
    order: &[usize],
    slots: &dyn Fn(usize) -> usize,
    trigger: &mut Trigger,
) -> Vec<usize> {
    let mut pending: Vec<usize> = order.to_vec();
    let mut kept = Vec::new();
    while !pending.is_empty() {
        let alpha = pending.remove(0);
        kept.push(alpha);
        for slot in 0..slots(alpha) {
            if let Some(beta) = trigger(alpha, slot, &pending) {
                pending.retain(|&b| b != beta);
            }
        }
    }
    kept
}

/// One of the neighbourhood conditions imposed on every vertex of `S(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Depth {
    /// `|N_okay(s) cap W| >= theta`.
    Okay,
    /// at least `theta` such `u` with `|N^mu_good(u) cap W| >= theta`.
    Good { both: bool },
    /// at least `theta` such `u` with at least `theta` vertices `v` in
    /// `N^mu_good(u) cap W` having `|N^-_good(v) cap W| >= theta`.
    Second { both: bool },
}

struct Ctx<'a> {
    t: &'a Tournament,
    family: &'a GadgetFamily,
    s_lists: Vec<Vec<usize>>,
}

impl Ctx<'_> {
    /// Vertices `u` of `dom` whose neighbourhoods reach `theta`, counting
    /// first-order neighbours in `mid` and the final layer in `inner`.
    fn relay(&self, depth: Depth, dom: &VertexSet, mid: &VertexSet, inner: &VertexSet, theta: usize) -> VertexSet {
        let t = self.t;
        let c = &self.family.classes;
        let okay_dom = c.okay.intersection(dom);
        if c.okay.is_disjoint(inner) {
            return VertexSet::new(self.family.n);
        }
        let (both, second) = match depth {
            Depth::Okay => return okay_dom.intersection(inner),
            Depth::Good { both } => (both, false),
            Depth::Second { both } => (both, true),
        };
        let (plus, minus) = if second {
            let inner_good = c.good.intersection(inner);
            let deep = filter(mid, |v| t.in_count_in(v, &inner_good) >= theta);
            (c.good_plus.intersection(&deep), c.good.intersection(&deep))
        } else {
            (c.good_plus.intersection(inner), c.good.intersection(inner))
        };
        filter(&okay_dom, |u| t.out_count_in(u, &plus) >= theta && (!both || t.in_count_in(u, &minus) >= theta))
    }

    fn holds(&self, depth: Depth, ids: &[usize], alpha: usize, theta: usize) -> bool {
        let w = self.family.w_without(ids, alpha);
        let r = self.relay(depth, &w, &w, &w, theta);
        self.s_lists[alpha]
            .iter()
            .all(|&s| self.t.out_count_in(s, &r) >= theta && self.t.in_count_in(s, &r) >= theta)
    }

    /// Vertices whose relevant count meets `theta` through `U(beta)` alone.
    fn influence(&self, depth: Depth, beta: usize, theta: usize) -> VertexSet {
        let all = VertexSet::full(self.family.n);
        self.relay(depth, &all, &all, &self.family.gadgets[beta].u, theta)
    }
}

/// Applies one stage: two-pass filter, then random halving rounds.
#[allow(clippy::too_many_arguments)]
fn stage(
    ctx: &Ctx,
    name: &str,
    depth: Depth,
    input: &[usize],
    theta: usize,
    target: usize,
    seed: u64,
    max_rounds: usize,
    log: &mut StageLog,
) -> Result<(Vec<usize>, usize), StageFailure> {
    let influence: Vec<Option<VertexSet>> = (0..ctx.family.len())
        .map(|b| {
            let r = ctx.influence(depth, b, theta);
            (!r.is_empty()).then_some(r)
        })
        .collect();
    let slots = |a: usize| 2 * ctx.s_lists[a].len();
    let mut trigger = |a: usize, slot: usize, pending: &[usize]| {
        let s = ctx.s_lists[a][slot / 2];
        let nb = if slot.is_multiple_of(2) { ctx.t.out_neighbours(s) } else { ctx.t.in_neighbours(s) };
        pending
            .iter()
            .copied()
            .find(|&b| influence[b].as_ref().is_some_and(|r| nb.count_and(r) >= theta))
    };
    let filtered = two_pass_filter(input, &slots, &mut trigger);
    log.push(name, 0, "filtered", format!("{} of {} indices survive the two-pass filter", filtered.len(), input.len()));

    let mut best = 0;
    for round in 0..max_rounds {
        let half: Vec<usize> = if round == 0 {
            filtered.clone()
        } else {
            let mut rng = stream(seed, name, round as u64);
            filtered.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
        };
        let kept: Vec<usize> = half.iter().copied().filter(|&a| ctx.holds(depth, &half, a, theta)).collect();
        best = best.max(kept.len());
        let verified = kept.len() >= target && kept.iter().all(|&a| ctx.holds(depth, &kept, a, theta));
        log.push(name, round, if verified { "accepted" } else { "rejected" }, format!("kept {} (target {target})", kept.len()));
        if verified {
            return Ok((kept, round + 1));
        }
    }
    Err(StageFailure::new(name, "kept indices", target as f64, best as f64).with_rounds(max_rounds))
}

/// Trims `a1` to an index set whose gadget vertices each have at least
/// `tau2 k t` available out- and in-neighbours.
pub fn refine_available(
    t: &Tournament,
    family: &GadgetFamily,
    a1: &[usize],
    profile: &Profile,
    seed: u64,
    max_rounds: usize,
    log: &mut StageLog,
) -> Result<FilterOutcome, StageFailure> {
    let kt = (family.k * family.t) as f64;
    let target_floor = threshold(profile.sigma2 * kt);
    if a1.len() < target_floor {
        return Err(StageFailure::new("refine-1", "sigma2 k t indices", target_floor as f64, a1.len() as f64));
    }
    let ctx = Ctx {
        t,
        family,
        s_lists: family.gadgets.iter().map(|g| g.s.to_vec()).collect(),
    };
    let d = profile.derived();
    let rho = profile.rho;
    let th = |x: f64| threshold(x * kt);
    if d.phi1 * kt < 1.0 {
        log.push("refine", 0, "warning", "thresholds below one vertex are clamped to one");
    }
    let theta2a = d.phi1 / (128.0 * rho);
    let theta3a = d.phi2 / (256.0 * rho);
    let plan = [
        ("refine-1", Depth::Okay, th(d.phi1)),
        ("refine-2a", Depth::Good { both: false }, th(theta2a)),
        ("refine-2b", Depth::Good { both: true }, th(theta2a / (128.0 * rho))),
        ("refine-3a", Depth::Second { both: false }, th(theta3a)),
        ("refine-3b", Depth::Second { both: true }, th(theta3a / (256.0 * rho))),
    ];
    let mut current = a1.to_vec();
    let mut rounds = 0;
    for (name, depth, theta) in plan {
        let target = ((current.len() as f64 / (36.0 * rho * rho)).ceil() as usize).max(target_floor);
        let (kept, used) = stage(&ctx, name, depth, &current, theta, target, seed, max_rounds, log)?;
        rounds += used;
        current = kept;
    }

    let need = th(profile.tau2);
    for &alpha in &current {
        let avail = available_set(t, family, &current, alpha, profile.tau2);
        for &s in &ctx.s_lists[alpha] {
            let (o, i) = (t.out_count_in(s, &avail), t.in_count_in(s, &avail));
            if o < need || i < need {
                log.push("refine-check", 0, "failed", format!("gadget {alpha}, vertex {s}"));
                return Err(StageFailure::new("refine-check", "available neighbours", need as f64, o.min(i) as f64)
                    .with_detail(format!("gadget {alpha}, vertex {s}"))
                    .with_rounds(rounds));
            }
        }
    }
    log.push("refine-check", 0, "verified", format!("{} gadgets kept", current.len()));
    Ok(FilterOutcome { kept: current, rounds_used: rounds, verified: true })
}
