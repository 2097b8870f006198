//! Gadgets: pairs of transitive fans joined by a path, and the vertex
//! classification built on top of them.

use serde::Serialize;

use crate::bits::VertexSet;
use crate::paths::{max_disjoint_paths, minimize_path_system, PathError, PathSystem};
use crate::profile::Profile;
use crate::stage::StageFailure;
use crate::tournament::Tournament;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

/// Greedy dominating sequence grown from a hub.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominatingSeq {
    pub hub: usize,
    pub direction: Direction,
    /// `u_0 = hub, u_1, ...` in the order chosen.
    pub sequence: Vec<usize>,
    /// `|U_j|` for `j = 1, ..., len`; the last entry is the residual.
    pub undominated: Vec<usize>,
}

impl DominatingSeq {
    pub fn set(&self, n: usize) -> VertexSet {
        VertexSet::from_ids(n, self.sequence.iter().copied()).expect("sequence within range")
    }

    pub fn residual(&self) -> usize {
        *self.undominated.last().unwrap_or(&0)
    }

    /// The last vertex chosen: the source of an out-fan, the sink of an in-fan.
    pub fn terminal(&self) -> usize {
        *self.sequence.last().unwrap()
    }

    /// `|U_j| <= |U_1| / 2^(j-1)` for every recorded step.
    pub fn halving_holds(&self) -> bool {
        let first = self.undominated.first().copied().unwrap_or(0);
        self.undominated
            .iter()
            .enumerate()
            .all(|(j, &u)| j >= 64 || (u as u128) << j <= first as u128)
    }
}

/// Grows `a = u_0, u_1, ...`: each `u_j` maximises its out-degree (in-degree
/// for [`Direction::In`]) inside the pool vertices not yet dominated by the
/// chosen ones. Stops when nothing is left or after `cap` steps.
pub fn build_dominating_seq(t: &Tournament, a: usize, pool: &VertexSet, cap: usize, direction: Direction) -> DominatingSeq {
    assert!(!pool.contains(a), "hub {a} lies in its own pool");
    let forward = direction == Direction::Out;
    let dominated_by = |v: usize| if forward { t.in_neighbours(v) } else { t.out_neighbours(v) };
    let mut sequence = vec![a];
    let mut rest = pool.intersection(&dominated_by(a));
    let mut undominated = vec![rest.len()];
    while !rest.is_empty() && sequence.len() <= cap {
        let score = |w: usize| if forward { t.out_count_in(w, &rest) } else { t.in_count_in(w, &rest) };
        let mut best = None;
        for w in rest.iter() {
            let s = score(w);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((w, s));
            }
        }
        let (u, _) = best.unwrap();
        sequence.push(u);
        rest.remove(u);
        rest.intersect_with(&dominated_by(u));
        undominated.push(rest.len());
    }
    DominatingSeq { hub: a, direction, sequence, undominated }
}

/// The `m` vertices of largest out-degree, then the `m` vertices of largest
/// in-degree among the rest; ties go to the smaller id, results ascending.
pub fn select_hubs(t: &Tournament, m: usize) -> Result<(Vec<usize>, Vec<usize>), StageFailure> {
    let n = t.n();
    if m.checked_mul(2).is_none_or(|d| d >= n) {
        return Err(StageFailure::new("hub-selection", "n > 2m", (m as f64) * 2.0 + 1.0, n as f64));
    }
    let out = t.out_degrees();
    let inn = t.in_degrees();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(out[v]), v));
    let mut plus: Vec<usize> = order[..m].to_vec();
    let taken = VertexSet::from_ids(n, plus.iter().copied()).unwrap();
    let mut rest: Vec<usize> = (0..n).filter(|&v| !taken.contains(v)).collect();
    rest.sort_by_key(|&v| (std::cmp::Reverse(inn[v]), v));
    let mut minus: Vec<usize> = rest[..m].to_vec();
    plus.sort_unstable();
    minus.sort_unstable();
    Ok((plus, minus))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gadget {
    pub id: usize,
    pub hub_out: usize,
    pub hub_in: usize,
    #[serde(with = "crate::paths::ids")]
    pub s_plus: VertexSet,
    #[serde(with = "crate::paths::ids")]
    pub s_minus: VertexSet,
    pub path: Vec<usize>,
    #[serde(skip)]
    pub u: VertexSet,
    #[serde(skip)]
    pub s: VertexSet,
    /// Last vertex of the path, the source of `s_plus`.
    pub s_plus_vertex: usize,
    /// First vertex of the path, the sink of `s_minus`.
    pub s_minus_vertex: usize,
    #[serde(with = "crate::paths::ids")]
    pub x: VertexSet,
}

impl Gadget {
    /// Assembles `U` and `S` from the fans and the path; `X` starts empty.
    pub fn new(n: usize, id: usize, hub_out: usize, hub_in: usize, s_plus: VertexSet, s_minus: VertexSet, path: Vec<usize>) -> Self {
        let mut u = s_plus.union(&s_minus);
        let mut s = u.clone();
        for &v in &path {
            u.insert(v);
        }
        let len = path.len();
        for (i, &v) in path.iter().enumerate() {
            if i < 3 || i + 3 >= len {
                s.insert(v);
            }
        }
        Self {
            id,
            hub_out,
            hub_in,
            s_plus,
            s_minus,
            s_plus_vertex: *path.last().unwrap(),
            s_minus_vertex: path[0],
            path,
            u,
            s,
            x: VertexSet::new(n),
        }
    }

    /// `U \ S`: path vertices beyond the first and last three.
    pub fn interior(&self) -> VertexSet {
        self.u.difference(&self.s)
    }
}

/// Vertices that look like in-neighbours of `s+` (out-neighbours of `s-`)
/// without being so for the whole interior `U \ S`.
pub fn compute_x(t: &Tournament, g: &Gadget) -> VertexSet {
    let n = t.n();
    let mut beaten_by_interior = VertexSet::new(n);
    let mut beating_interior = VertexSet::new(n);
    for w in g.interior().iter() {
        beaten_by_interior.union_with(&t.out_neighbours(w));
        beating_interior.union_with(&t.in_neighbours(w));
    }
    let mut x = t.in_neighbours(g.s_plus_vertex);
    x.intersect_with(&beaten_by_interior);
    let mut y = t.out_neighbours(g.s_minus_vertex);
    y.intersect_with(&beating_interior);
    x.union_with(&y);
    x
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    #[serde(with = "crate::paths::ids")]
    pub okay: VertexSet,
    #[serde(with = "crate::paths::ids")]
    pub bad_plus: VertexSet,
    #[serde(with = "crate::paths::ids")]
    pub bad_minus: VertexSet,
    #[serde(with = "crate::paths::ids")]
    pub bad: VertexSet,
    #[serde(with = "crate::paths::ids")]
    pub good_plus: VertexSet,
    #[serde(with = "crate::paths::ids")]
    pub good_minus: VertexSet,
    #[serde(with = "crate::paths::ids")]
    pub good: VertexSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct GadgetFamily {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    /// Built on the arc-reversed tournament.
    pub reversed: bool,
    pub gadgets: Vec<Gadget>,
    pub fans_out: Vec<DominatingSeq>,
    pub fans_in: Vec<DominatingSeq>,
    #[serde(skip)]
    pub paths: PathSystem,
    /// Vertices with an out-neighbour in `S-(alpha)`, per gadget.
    #[serde(skip)]
    pub hits_out: Vec<VertexSet>,
    /// Vertices with an in-neighbour in `S+(alpha)`, per gadget.
    #[serde(skip)]
    pub hits_in: Vec<VertexSet>,
    pub classes: Classification,
}

impl GadgetFamily {
    pub fn len(&self) -> usize {
        self.gadgets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gadgets.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.gadgets.len()).collect()
    }

    /// `U(A)` for an index set.
    pub fn u_of(&self, ids: &[usize]) -> VertexSet {
        let mut u = VertexSet::new(self.n);
        for &a in ids {
            u.union_with(&self.gadgets[a].u);
        }
        u
    }

    /// `W(A) = V \ U(A)`.
    pub fn w_of(&self, ids: &[usize]) -> VertexSet {
        self.u_of(ids).complement()
    }

    /// `W(A \ {alpha})`.
    pub fn w_without(&self, ids: &[usize], alpha: usize) -> VertexSet {
        let mut w = self.w_of(ids);
        w.union_with(&self.gadgets[alpha].u);
        w
    }

    /// Per vertex, the number of indices in `ids` whose `S-` it has no
    /// out-neighbour in (`forward`), or whose `S+` it has no in-neighbour in.
    pub fn misses(&self, ids: &[usize], forward: bool) -> Vec<usize> {
        let hits = if forward { &self.hits_out } else { &self.hits_in };
        let mut c = vec![0; self.n];
        for &a in ids {
            for v in hits[a].complement().iter() {
                c[v] += 1;
            }
        }
        c
    }

    /// Recomputes the classification from the gadgets.
    pub fn classify(&mut self) {
        let n = self.n;
        let mut okay = VertexSet::full(n);
        for g in &self.gadgets {
            okay.difference_with(&g.s);
        }
        let kt = self.k * self.t;
        let all = self.indices();
        let split = |miss: Vec<usize>| {
            let mut bad = VertexSet::new(n);
            for v in okay.iter() {
                if miss[v] >= kt {
                    bad.insert(v);
                }
            }
            bad
        };
        let bad_plus = split(self.misses(&all, true));
        let bad_minus = split(self.misses(&all, false));
        let good_plus = okay.difference(&bad_plus);
        let good_minus = okay.difference(&bad_minus);
        self.classes = Classification {
            bad: bad_plus.intersection(&bad_minus),
            good: good_plus.intersection(&good_minus),
            okay,
            bad_plus,
            bad_minus,
            good_plus,
            good_minus,
        };
    }
}

/// Hubs, fans, a minimised path system and one gadget per path, followed by
/// the classification of the remaining vertices.
pub fn build_gadget_family(t: &Tournament, k: usize, parts: usize, profile: &Profile) -> Result<GadgetFamily, StageFailure> {
    let n = t.n();
    let m = profile
        .gadget_count(k, parts)
        .ok_or_else(|| StageFailure::new("hub-selection", "n > 2 sigma1 k t", f64::INFINITY, n as f64))?;
    if m == 0 {
        return Err(StageFailure::new("hub-selection", "sigma1 k t >= 1", 1.0, 0.0));
    }
    let (plus, minus) = select_hubs(t, m)?;
    let cap = profile.sequence_cap();
    let hubs = VertexSet::from_ids(n, plus.iter().chain(&minus).copied()).unwrap();

    let mut used = hubs.clone();
    let mut fans_out = Vec::with_capacity(m);
    for &a in &plus {
        let fan = build_dominating_seq(t, a, &used.complement(), cap, Direction::Out);
        used.union_with(&fan.set(n));
        fans_out.push(fan);
    }
    let mut fans_in = Vec::with_capacity(m);
    for &a in &minus {
        let fan = build_dominating_seq(t, a, &used.complement(), cap, Direction::In);
        used.union_with(&fan.set(n));
        fans_in.push(fan);
    }

    let sources = VertexSet::from_ids(n, fans_in.iter().map(DominatingSeq::terminal)).unwrap();
    let sinks = VertexSet::from_ids(n, fans_out.iter().map(DominatingSeq::terminal)).unwrap();
    let forbidden = used.difference(&sources.union(&sinks));
    let raw = max_disjoint_paths(t, &sources, &sinks, &forbidden, m).map_err(|e| match e {
        PathError::Infeasible { achieved, .. } => StageFailure::new("paths", "disjoint fan-to-fan paths", m as f64, achieved as f64),
        PathError::TerminalForbidden(v) => StageFailure::new("paths", "terminals outside the forbidden set", 0.0, 1.0)
            .with_detail(format!("terminal {v} is forbidden")),
    })?;
    let paths = minimize_path_system(t, &raw);

    let mut gadgets = Vec::with_capacity(m);
    for (id, p) in paths.paths.iter().enumerate() {
        let fin = fans_in.iter().find(|f| f.terminal() == p[0]).expect("path starts at an in-fan sink");
        let fout = fans_out.iter().find(|f| f.terminal() == *p.last().unwrap()).expect("path ends at an out-fan source");
        let mut g = Gadget::new(n, id, fout.hub, fin.hub, fout.set(n), fin.set(n), p.clone());
        g.x = compute_x(t, &g);
        let bound = profile.rho * profile.sigma1 * (k * parts) as f64;
        if g.x.len() as f64 > bound {
            return Err(StageFailure::new("exception-set", "|X(alpha)| <= rho sigma1 k t", bound, g.x.len() as f64)
                .with_detail(format!("gadget {id}")));
        }
        gadgets.push(g);
    }

    let hits = |set: &VertexSet, forward: bool| {
        let mut h = VertexSet::new(n);
        for x in set.iter() {
            h.union_with(&if forward { t.in_neighbours(x) } else { t.out_neighbours(x) });
        }
        h
    };
    let hits_out = gadgets.iter().map(|g| hits(&g.s_minus, true)).collect();
    let hits_in = gadgets.iter().map(|g| hits(&g.s_plus, false)).collect();
    let empty = VertexSet::new(n);
    let mut family = GadgetFamily {
        n,
        k,
        t: parts,
        reversed: false,
        gadgets,
        fans_out,
        fans_in,
        paths,
        hits_out,
        hits_in,
        classes: Classification {
            okay: empty.clone(),
            bad_plus: empty.clone(),
            bad_minus: empty.clone(),
            bad: empty.clone(),
            good_plus: empty.clone(),
            good_minus: empty.clone(),
            good: empty,
        },
    };
    family.classify();
    Ok(family)
}

/// Builds on `t`, and on its reversal when that is needed to get
/// `|V_bad-| >= |V_bad+|`. Returns the tournament the family lives on.
pub fn build_normalized(t: &Tournament, k: usize, parts: usize, profile: &Profile) -> Result<(Tournament, GadgetFamily), StageFailure> {
    let family = build_gadget_family(t, k, parts, profile)?;
    if family.classes.bad_minus.len() >= family.classes.bad_plus.len() {
        return Ok((t.clone(), family));
    }
    let r = t.reversed();
    match build_gadget_family(&r, k, parts, profile) {
        Ok(mut rf) if rf.classes.bad_minus.len() >= rf.classes.bad_plus.len() => {
            rf.reversed = true;
            Ok((r, rf))
        }
        _ => Ok((t.clone(), family)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GadgetReport {
    pub checks: Vec<PropertyCheck>,
}

impl GadgetReport {
    pub fn passed(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name == name && c.passed)
    }

    pub fn all_passed(&self, names: &[&str]) -> bool {
        names.iter().all(|n| self.passed(n))
    }
}

fn outcome(name: &str, failure: Option<String>) -> PropertyCheck {
    PropertyCheck { name: name.into(), passed: failure.is_none(), detail: failure }
}

fn transitive_with(t: &Tournament, set: &VertexSet, apex: usize, apex_is_sink: bool) -> Option<String> {
    if !set.contains(apex) {
        return Some(format!("apex {apex} missing"));
    }
    let mut degs: Vec<usize> = set.iter().map(|v| t.out_count_in(v, set)).collect();
    degs.sort_unstable();
    if degs.iter().enumerate().any(|(i, &d)| d != i) {
        return Some("fan is not transitive".into());
    }
    let d = t.out_count_in(apex, set);
    let want = if apex_is_sink { 0 } else { set.len() - 1 };
    (d != want).then(|| format!("apex {apex} is not the {}", if apex_is_sink { "sink" } else { "source" }))
}

/// Checks G1 to G9 plus the structural shape of each gadget and the
/// consistency of the classification.
pub fn verify_gadget_properties(t: &Tournament, family: &GadgetFamily, profile: &Profile) -> GadgetReport {
    let n = t.n();
    let kt = (family.k * family.t) as f64;
    let c = &family.classes;
    let mut checks = Vec::new();

    let mut shape = None;
    for g in &family.gadgets {
        let fail = transitive_with(t, &g.s_plus, g.hub_out, true)
            .or_else(|| transitive_with(t, &g.s_minus, g.hub_in, false))
            .or_else(|| (!g.s_minus.contains(g.path[0])).then(|| "path does not start in S-".into()))
            .or_else(|| (!g.s_plus.contains(*g.path.last().unwrap())).then(|| "path does not end in S+".into()));
        if let Some(f) = fail {
            shape = Some(format!("gadget {}: {f}", g.id));
            break;
        }
    }
    checks.push(outcome("shape", shape));

    let mut seen = VertexSet::new(n);
    let mut g1 = None;
    'g1: for g in &family.gadgets {
        for v in g.u.iter() {
            if !seen.insert(v) {
                g1 = Some(format!("vertex {v} lies in two gadgets (second: {})", g.id));
                break 'g1;
            }
        }
    }
    checks.push(outcome("G1", g1));

    let xcap = profile.rho * profile.sigma1 * kt;
    let g2 = family.gadgets.iter().find_map(|g| {
        if g.s.len() as f64 > profile.rho {
            Some(format!("gadget {}: |S| = {} > rho", g.id, g.s.len()))
        } else if g.x.len() as f64 > xcap {
            Some(format!("gadget {}: |X| = {} > {xcap}", g.id, g.x.len()))
        } else {
            None
        }
    });
    checks.push(outcome("G2", g2));

    let g3 = family.gadgets.iter().find_map(|g| {
        if let Some(w) = g.path.windows(2).find(|w| !t.beats(w[0], w[1])) {
            return Some(format!("gadget {}: missing arc {} -> {}", g.id, w[0], w[1]));
        }
        if let Some(u) = g.s_minus.iter().find(|&u| u != g.s_minus_vertex && !t.beats(u, g.s_minus_vertex)) {
            return Some(format!("gadget {}: {u} does not reach s-", g.id));
        }
        if let Some(v) = g.s_plus.iter().find(|&v| v != g.s_plus_vertex && !t.beats(g.s_plus_vertex, v)) {
            return Some(format!("gadget {}: s+ does not reach {v}", g.id));
        }
        None
    });
    checks.push(outcome("G3", g3));

    let g4 = family.gadgets.iter().find_map(|g| {
        let into = t.in_neighbours(g.s_plus_vertex).difference(&g.x);
        let from = t.out_neighbours(g.s_minus_vertex).difference(&g.x);
        for w in g.interior().iter() {
            let mut a = into.difference(&t.in_neighbours(w));
            a.remove(w);
            if let Some(u) = a.first() {
                return Some(format!("gadget {}: {u} -> s+ but not {u} -> {w}", g.id));
            }
            let mut b = from.difference(&t.out_neighbours(w));
            b.remove(w);
            if let Some(u) = b.first() {
                return Some(format!("gadget {}: s- -> {u} but not {w} -> {u}", g.id));
            }
        }
        None
    });
    checks.push(outcome("G4", g4));

    let out = t.out_degrees();
    let inn = t.in_degrees();
    let g5 = c.okay.iter().find_map(|u| {
        if (out[u] as f64) < profile.g5_factor * c.bad_plus.len() as f64 {
            Some(format!("d+({u}) = {} below the bound", out[u]))
        } else if (inn[u] as f64) < profile.g5_factor * c.bad_minus.len() as f64 {
            Some(format!("d-({u}) = {} below the bound", inn[u]))
        } else {
            None
        }
    });
    checks.push(outcome("G5", g5));

    let g6 = ((c.good.len() as f64) < profile.good_fraction * n as f64)
        .then(|| format!("|V_good| = {} of {n}", c.good.len()));
    checks.push(outcome("G6", g6));

    let half = profile.tau1 * kt / 2.0;
    let g7_need = (profile.g7_factor * c.bad_plus.len() as f64).max(half);
    let g7 = c.okay.iter().find(|&u| (t.out_count_in(u, &c.good_plus) as f64) < g7_need).map(|u| format!("vertex {u}"));
    checks.push(outcome("G7", g7));
    let g8_need = (profile.g7_factor * c.bad_minus.len() as f64).max(half);
    let g8 = c.okay.iter().find(|&u| (t.in_count_in(u, &c.good) as f64) < g8_need).map(|u| format!("vertex {u}"));
    checks.push(outcome("G8", g8));
    let g9_need = (profile.g7_factor * (n - c.okay.len()) as f64).max(half);
    let g9 = (0..n)
        .find(|&u| (t.out_count_in(u, &c.okay) as f64) < g9_need || (t.in_count_in(u, &c.okay) as f64) < g9_need)
        .map(|u| format!("vertex {u}"));
    checks.push(outcome("G9", g9));

    let mut s_union = VertexSet::new(n);
    for g in &family.gadgets {
        s_union.union_with(&g.s);
    }
    let consistent = c.okay.union(&s_union) == VertexSet::full(n)
        && c.okay.is_disjoint(&s_union)
        && c.bad_plus.is_subset(&c.okay)
        && c.bad_minus.is_subset(&c.okay)
        && c.bad == c.bad_plus.intersection(&c.bad_minus)
        && c.good_plus == c.okay.difference(&c.bad_plus)
        && c.good_minus == c.okay.difference(&c.bad_minus)
        && c.good == c.good_plus.intersection(&c.good_minus);
    checks.push(outcome("classification", (!consistent).then(|| "set identities fail".into())));

    GadgetReport { checks }
}
