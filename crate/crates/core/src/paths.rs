//! Vertex-disjoint path systems and their local minimisation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::VertexSet;
use crate::flow::DisjointPaths;
use crate::tournament::Tournament;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("terminal {0} lies in the forbidden set")]
    TerminalForbidden(usize),
    #[error("only {achieved} disjoint paths exist; cut {cut:?} separates the terminals")]
    Infeasible { achieved: usize, cut: Vec<usize> },
}

/// Pairwise vertex-disjoint paths whose interiors avoid `forbidden`.
///
/// `reserved` holds the terminal pools the system was built from; the
/// minimisation rules never route a path through a reserved vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSystem {
    pub paths: Vec<Vec<usize>>,
    #[serde(with = "ids")]
    pub forbidden: VertexSet,
    #[serde(with = "ids")]
    pub reserved: VertexSet,
}

pub(crate) mod ids {
    use super::VertexSet;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        universe: usize,
        members: Vec<usize>,
    }

    pub fn serialize<S: Serializer>(set: &VertexSet, s: S) -> Result<S::Ok, S::Error> {
        Repr { universe: set.universe(), members: set.to_vec() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<VertexSet, D::Error> {
        let r = Repr::deserialize(d)?;
        VertexSet::from_ids(r.universe, r.members)
            .map_err(|v| serde::de::Error::custom(format!("vertex {v} outside universe")))
    }
}

impl PathSystem {
    pub fn terminals(&self) -> Vec<(usize, usize)> {
        self.paths.iter().map(|p| (p[0], *p.last().unwrap())).collect()
    }

    pub fn covered(&self) -> usize {
        self.paths.iter().map(Vec::len).sum()
    }

    pub fn vertex_set(&self) -> VertexSet {
        let mut s = VertexSet::new(self.forbidden.universe());
        for p in &self.paths {
            for &v in p {
                s.insert(v);
            }
        }
        s
    }

    /// Checks arcs, disjointness and interior avoidance of `forbidden`.
    pub fn validate(&self, t: &Tournament) -> Result<(), String> {
        let mut seen = VertexSet::new(t.n());
        for (i, p) in self.paths.iter().enumerate() {
            if p.is_empty() {
                return Err(format!("path {i} is empty"));
            }
            for &v in p {
                if v >= t.n() {
                    return Err(format!("path {i} leaves the vertex range at {v}"));
                }
                if !seen.insert(v) {
                    return Err(format!("vertex {v} is used twice (path {i})"));
                }
            }
            for w in p.windows(2) {
                if !t.beats(w[0], w[1]) {
                    return Err(format!("path {i} uses the missing arc {} -> {}", w[0], w[1]));
                }
            }
            if p.len() > 2 {
                if let Some(&v) = p[1..p.len() - 1].iter().find(|&&v| self.forbidden.contains(v)) {
                    return Err(format!("path {i} passes through forbidden vertex {v}"));
                }
            }
        }
        Ok(())
    }
}

/// Exactly `want` disjoint paths from `sources` to `sinks`, interiors outside
/// `forbidden`, sources and sinks. Paths are listed by ascending start.
pub fn max_disjoint_paths(
    t: &Tournament,
    sources: &VertexSet,
    sinks: &VertexSet,
    forbidden: &VertexSet,
    want: usize,
) -> Result<PathSystem, PathError> {
    if let Some(v) = sources.union(sinks).intersection(forbidden).first() {
        return Err(PathError::TerminalForbidden(v));
    }
    let alive = forbidden.complement();
    let mut flow = DisjointPaths::new(t, &alive, sources, sinks);
    let got = flow.run(want);
    if got < want {
        let cut = flow.min_cut().expect("flow below target is maximum");
        return Err(PathError::Infeasible { achieved: got, cut: cut.to_vec() });
    }
    Ok(PathSystem {
        paths: flow.paths(),
        forbidden: forbidden.clone(),
        reserved: sources.union(sinks),
    })
}

/// Applies the three shortening rules until none fires. Each application
/// strictly reduces the number of covered vertices and keeps every start,
/// every end, disjointness and forbidden-avoidance.
///
/// * shortcut: a forward chord `x_i -> x_j`, `j > i + 1`, replaces the
///   stretch between them (largest `j` first);
/// * bypass: an unused vertex `y` with `s -> y -> x_j`, `j >= 3` (0-based),
///   replaces the prefix up to `x_j`; mirrored at the end of a path;
/// * exchange: out-neighbours `y1, y2, y3` of the start `s` of `P` appearing
///   in this order on another path `Q`, with `y1 -> u` for `u` on `P`,
///   turn `P, Q` into `Q..y1 u..P` and `s y3..Q`, dropping `y2`; mirrored
///   for in-neighbours of the end of `P`.
///
/// Shortcuts run to exhaustion, then a single bypass or exchange fires and
/// the loop restarts; scans go by path index, then position.
pub fn minimize_path_system(t: &Tournament, ps: &PathSystem) -> PathSystem {
    let mut out = ps.clone();
    loop {
        for p in &mut out.paths {
            shortcut(t, p);
        }
        if bypass(t, &mut out) || exchange(t, &mut out) {
            continue;
        }
        return out;
    }
}

fn shortcut(t: &Tournament, p: &mut Vec<usize>) -> bool {
    let mut changed = false;
    let mut i = 0;
    while i + 2 < p.len() {
        if let Some(j) = (i + 2..p.len()).rev().find(|&j| t.beats(p[i], p[j])) {
            p.drain(i + 1..j);
            changed = true;
        }
        i += 1;
    }
    changed
}

fn free_vertices(ps: &PathSystem) -> VertexSet {
    let mut blocked = ps.vertex_set();
    blocked.union_with(&ps.forbidden);
    blocked.union_with(&ps.reserved);
    blocked.complement()
}

fn bypass(t: &Tournament, ps: &mut PathSystem) -> bool {
    let free = free_vertices(ps);
    for p in ps.paths.iter_mut() {
        let len = p.len();
        if len >= 4 {
            let s = p[0];
            let mut cand = t.out_neighbours(s);
            cand.intersect_with(&free);
            for y in cand.iter() {
                if let Some(j) = (3..len).rev().find(|&j| t.beats(y, p[j])) {
                    let tail = p.split_off(j);
                    p.truncate(1);
                    p.push(y);
                    p.extend(tail);
                    return true;
                }
            }
            let e = p[len - 1];
            let mut cand = t.in_neighbours(e);
            cand.intersect_with(&free);
            for y in cand.iter() {
                if let Some(j) = (0..=len - 4).find(|&j| t.beats(p[j], y)) {
                    p.truncate(j + 1);
                    p.push(y);
                    p.push(e);
                    return true;
                }
            }
        }
    }
    false
}

fn exchange(t: &Tournament, ps: &mut PathSystem) -> bool {
    let m = ps.paths.len();
    for a in 0..m {
        for b in 0..m {
            if a == b {
                continue;
            }
            let (p, q) = (&ps.paths[a], &ps.paths[b]);
            let s = p[0];
            let hits: Vec<usize> = (0..q.len()).filter(|&i| t.beats(s, q[i])).collect();
            if hits.len() >= 3 && p.len() >= 2 {
                let i3 = *hits.last().unwrap();
                for &i1 in &hits[..hits.len() - 2] {
                    if let Some(ju) = (1..p.len()).rev().find(|&j| t.beats(q[i1], p[j])) {
                        let mut joined: Vec<usize> = q[..=i1].to_vec();
                        joined.extend_from_slice(&p[ju..]);
                        let mut rest = vec![s];
                        rest.extend_from_slice(&q[i3..]);
                        ps.paths[a] = rest;
                        ps.paths[b] = joined;
                        return true;
                    }
                }
            }
            let (p, q) = (&ps.paths[a], &ps.paths[b]);
            let e = *p.last().unwrap();
            let hits: Vec<usize> = (0..q.len()).filter(|&i| t.beats(q[i], e)).collect();
            if hits.len() >= 3 && p.len() >= 2 {
                let i1 = hits[0];
                for &i3 in hits[2..].iter().rev() {
                    if let Some(ju) = (0..p.len() - 1).find(|&j| t.beats(p[j], q[i3])) {
                        let mut joined: Vec<usize> = p[..=ju].to_vec();
                        joined.extend_from_slice(&q[i3..]);
                        let mut rest: Vec<usize> = q[..=i1].to_vec();
                        rest.push(e);
                        ps.paths[a] = joined;
                        ps.paths[b] = rest;
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Every pair `x_i, x_j` with `i < j - 1` on a path is oriented `x_j -> x_i`.
pub fn verify_backward_chords(t: &Tournament, ps: &PathSystem) -> bool {
    ps.paths.iter().all(|p| {
        (0..p.len()).all(|j| (0..j.saturating_sub(1)).all(|i| t.beats(p[j], p[i])))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, ids: &[usize]) -> VertexSet {
        VertexSet::from_ids(n, ids.iter().copied()).unwrap()
    }

    fn system(n: usize, paths: Vec<Vec<usize>>) -> PathSystem {
        let mut reserved = VertexSet::new(n);
        for p in &paths {
            reserved.insert(p[0]);
            reserved.insert(*p.last().unwrap());
        }
        PathSystem { paths, forbidden: VertexSet::new(n), reserved }
    }

    #[test]
    fn three_cycle_path() {
        let t = Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let ps = max_disjoint_paths(&t, &set(3, &[0]), &set(3, &[2]), &VertexSet::new(3), 1).unwrap();
        assert_eq!(ps.paths, vec![vec![0, 1, 2]]);
        assert!(verify_backward_chords(&t, &ps));
    }

    #[test]
    fn single_source_cannot_carry_two_paths() {
        let t = Tournament::from_fn(5, |_, _| true);
        let err = max_disjoint_paths(&t, &set(5, &[0]), &set(5, &[3, 4]), &VertexSet::new(5), 2).unwrap_err();
        assert_eq!(err, PathError::Infeasible { achieved: 1, cut: vec![0] });
    }

    #[test]
    fn chord_is_shortcut() {
        let t = Tournament::from_fn(3, |_, _| true);
        let ps = system(3, vec![vec![0, 1, 2]]);
        assert!(!verify_backward_chords(&t, &ps));
        let min = minimize_path_system(&t, &ps);
        assert_eq!(min.paths, vec![vec![0, 2]]);
        assert_eq!(minimize_path_system(&t, &min), min);
    }

    #[test]
    fn start_bypass_uses_outside_vertex() {
        // path 0 1 2 3 4 with only backward chords; 0 -> 5 -> 3 and 4 -> 5.
        let path = [0, 1, 2, 3, 4];
        let t = Tournament::from_fn(6, |i, j| {
            if j == 5 {
                return i == 0 || i == 4;
            }
            let (pi, pj) = (path.iter().position(|&x| x == i).unwrap(), path.iter().position(|&x| x == j).unwrap());
            pj == pi + 1
        });
        assert!(t.beats(5, 3) && t.beats(0, 5));
        let ps = system(6, vec![path.to_vec()]);
        let min = minimize_path_system(&t, &ps);
        assert_eq!(min.paths, vec![vec![0, 5, 3, 4]]);
        assert!(min.validate(&t).is_ok());
    }
}
