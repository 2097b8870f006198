//! Layered neighbour predicates: available, eligible and helpful vertices.
//!
//! All three share one shape. A vertex qualifies through its class:
//! `V_good` directly, `V_good+ \ V_good-` through in-neighbours of the first
//! layer, `V_good- \ V_good+` through out-neighbours of the first two
//! layers, and `V_bad` through both. They differ in the extra miss-count
//! conditions and in the neighbour threshold.

use crate::bits::VertexSet;
use crate::gadgets::GadgetFamily;
use crate::profile::threshold;
use crate::tournament::Tournament;

/// Evaluates the four layers inside `w`. `out_ok` / `in_ok` restrict the
/// layers that carry a miss-count condition; `thr` is the neighbour bound.
pub(crate) fn layered(
    t: &Tournament,
    family: &GadgetFamily,
    w: &VertexSet,
    out_ok: Option<&VertexSet>,
    in_ok: Option<&VertexSet>,
    thr: usize,
) -> VertexSet {
    let c = &family.classes;
    let restrict = |mut s: VertexSet, extra: Option<&VertexSet>| {
        s.intersect_with(w);
        if let Some(e) = extra {
            s.intersect_with(e);
        }
        s
    };
    let first = restrict(restrict(c.good.clone(), out_ok), in_ok);
    let mut second = restrict(c.good_plus.difference(&c.good_minus), out_ok);
    second = filter(&second, |u| t.in_count_in(u, &first) >= thr);
    let lower = first.union(&second);
    let mut third = restrict(c.good_minus.difference(&c.good_plus), in_ok);
    third = filter(&third, |u| t.out_count_in(u, &lower) >= thr);
    let mut fourth = restrict(c.bad.clone(), None);
    fourth = filter(&fourth, |u| t.in_count_in(u, &first) >= thr && t.out_count_in(u, &lower) >= thr);
    let mut all = lower;
    all.union_with(&third);
    all.union_with(&fourth);
    all
}

pub(crate) fn filter(set: &VertexSet, mut keep: impl FnMut(usize) -> bool) -> VertexSet {
    let mut out = VertexSet::new(set.universe());
    for v in set.iter() {
        if keep(v) {
            out.insert(v);
        }
    }
    out
}

/// Vertices whose miss counts over `ids` are at most `k`, out- then in-side.
fn miss_filters(family: &GadgetFamily, ids: &[usize], k: usize) -> (VertexSet, VertexSet) {
    let n = family.n;
    let side = |forward| {
        let m = family.misses(ids, forward);
        VertexSet::from_ids(n, (0..n).filter(|&v| m[v] <= k)).unwrap()
    };
    (side(true), side(false))
}

/// Vertices available for `alpha` with respect to `ids`.
pub fn available_set(t: &Tournament, family: &GadgetFamily, ids: &[usize], alpha: usize, tau2: f64) -> VertexSet {
    let w = family.w_without(ids, alpha);
    let kt = (family.k * family.t) as f64;
    layered(t, family, &w, None, None, threshold(tau2 * kt))
}

/// Single-vertex form of [`available_set`]; `None` when `alpha` is not in `ids`.
pub fn is_available(t: &Tournament, family: &GadgetFamily, ids: &[usize], alpha: usize, u: usize, tau2: f64) -> Option<bool> {
    ids.contains(&alpha).then(|| available_set(t, family, ids, alpha, tau2).contains(u))
}

/// Vertices eligible for `ids` in `w`.
pub fn eligible_set(t: &Tournament, family: &GadgetFamily, ids: &[usize], w: &VertexSet, tau3: f64) -> VertexSet {
    let (out_ok, in_ok) = miss_filters(family, ids, family.k);
    let kt = (family.k * family.t) as f64;
    layered(t, family, w, Some(&out_ok), Some(&in_ok), threshold(tau3 * kt))
}

pub fn is_eligible(t: &Tournament, family: &GadgetFamily, ids: &[usize], w: &VertexSet, u: usize, tau3: f64) -> bool {
    eligible_set(t, family, ids, w, tau3).contains(u)
}

/// Vertices helpful for `ids` in `w`.
pub fn helpful_set(t: &Tournament, family: &GadgetFamily, ids: &[usize], w: &VertexSet) -> VertexSet {
    let (out_ok, in_ok) = miss_filters(family, ids, family.k);
    layered(t, family, w, Some(&out_ok), Some(&in_ok), family.k.max(1))
}

pub fn is_helpful(t: &Tournament, family: &GadgetFamily, ids: &[usize], w: &VertexSet, u: usize) -> bool {
    helpful_set(t, family, ids, w).contains(u)
}
