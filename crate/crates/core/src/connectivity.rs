//! Strong connectivity, local vertex connectivity, the strong k-connectivity
//! test and partition verification.

use serde::{Deserialize, Serialize};

use crate::bits::VertexSet;
use crate::error::TournamentError;
use crate::flow::DisjointPaths;
use crate::tournament::Tournament;

/// Why a tournament failed a strong k-connectivity test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    TooFewVertices,
    Separator,
}

/// A falsification witness: deleting `separator` leaves no directed path from
/// `pair.0` to `pair.1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutWitness {
    pub kind: WitnessKind,
    pub separator: Vec<usize>,
    pub pair: Option<(usize, usize)>,
}

impl CutWitness {
    fn too_few() -> Self {
        Self {
            kind: WitnessKind::TooFewVertices,
            separator: Vec::new(),
            pair: None,
        }
    }

    fn separator(cut: &VertexSet, from: usize, to: usize) -> Self {
        Self {
            kind: WitnessKind::Separator,
            separator: cut.to_vec(),
            pair: Some((from, to)),
        }
    }

    /// Rewrites vertex ids through `map` (local id to parent id).
    pub fn relabel(&self, map: &[usize]) -> Self {
        Self {
            kind: self.kind.clone(),
            separator: self.separator.iter().map(|&v| map[v]).collect(),
            pair: self.pair.map(|(a, b)| (map[a], map[b])),
        }
    }

    /// Checks the witness claim directly by a reachability search.
    pub fn holds_for(&self, t: &Tournament, k: usize) -> bool {
        match self.kind {
            WitnessKind::TooFewVertices => t.n() < k + 1,
            WitnessKind::Separator => {
                let Some((a, b)) = self.pair else { return false };
                if self.separator.len() + 1 > k.max(1) || a >= t.n() || b >= t.n() {
                    return false;
                }
                let Ok(cut) = VertexSet::from_ids(t.n(), self.separator.iter().copied()) else {
                    return false;
                };
                if cut.contains(a) || cut.contains(b) || a == b {
                    return false;
                }
                let alive = cut.complement();
                !reach(t, &alive, a, true).contains(b)
            }
        }
    }
}

/// Vertices of `alive` reachable from `start` inside `alive`, following arcs
/// forwards or backwards.
pub fn reach(t: &Tournament, alive: &VertexSet, start: usize, forward: bool) -> VertexSet {
    let n = t.n();
    let mut seen = VertexSet::new(n);
    if !alive.contains(start) {
        return seen;
    }
    seen.insert(start);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        let row = if forward { t.out_row(v) } else { t.in_row(v) };
        for (i, &r) in row.iter().enumerate() {
            let mut word = r & alive.words()[i] & !seen.words()[i];
            while word != 0 {
                let w = i * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    seen
}

/// Strong connectivity of `T[alive]`. Empty and single-vertex digraphs are
/// strongly connected.
pub fn is_strongly_connected_within(t: &Tournament, alive: &VertexSet) -> bool {
    let Some(start) = alive.first() else { return true };
    reach(t, alive, start, true) == *alive && reach(t, alive, start, false) == *alive
}

pub fn is_strongly_connected(t: &Tournament) -> bool {
    is_strongly_connected_within(t, &VertexSet::full(t.n()))
}

fn check_pair(t: &Tournament, u: usize, v: usize) -> Result<(), TournamentError> {
    for x in [u, v] {
        if x >= t.n() {
            return Err(TournamentError::VertexOutOfRange { vertex: x, n: t.n() });
        }
    }
    if u == v {
        return Err(TournamentError::SameVertex(u));
    }
    Ok(())
}

/// Minimum `u -> v` separator when `v -> u`; `None` when the arc `u -> v`
/// exists. Flow stops once `limit` disjoint paths are found, in which case
/// the returned set is empty and the count equals `limit`.
fn local_cut(t: &Tournament, u: usize, v: usize, limit: usize) -> Option<(usize, Option<VertexSet>)> {
    if t.beats(u, v) {
        return None;
    }
    let n = t.n();
    let mut alive = VertexSet::full(n);
    alive.remove(u);
    alive.remove(v);
    let sources = t.out_neighbours(u);
    let sinks = t.in_neighbours(v);
    let mut flow = DisjointPaths::new(t, &alive, &sources, &sinks);
    let value = flow.run(limit);
    if value >= limit {
        return Some((value, None));
    }
    Some((value, flow.min_cut()))
}

/// Local vertex connectivity from `u` to `v`: `n - 1` when the arc `u -> v`
/// exists, otherwise the size of a minimum vertex set avoiding `u`, `v`
/// whose removal destroys every `u -> v` path.
pub fn local_connectivity(t: &Tournament, u: usize, v: usize) -> Result<usize, TournamentError> {
    check_pair(t, u, v)?;
    Ok(match local_cut(t, u, v, usize::MAX) {
        None => t.n() - 1,
        Some((value, _)) => value,
    })
}

/// A minimum `u -> v` separator, or `None` if the arc `u -> v` exists.
pub fn min_separator(t: &Tournament, u: usize, v: usize) -> Result<Option<VertexSet>, TournamentError> {
    check_pair(t, u, v)?;
    Ok(local_cut(t, u, v, usize::MAX).map(|(_, cut)| cut.expect("maximum flow yields a cut")))
}

/// Tests strong k-connectivity: `n >= k + 1` and no set of at most `k - 1`
/// vertices separates an ordered pair. On failure a witness is returned.
///
/// Uses Even's scheme: all ordered pairs among the first `k` vertices, then,
/// for every later vertex `v_j`, disjoint paths between `{v_0..v_{j-1}}` and
/// `v_j` in both directions, each flow stopping at `k`.
pub fn check_k_connected(t: &Tournament, k: usize) -> Result<(), CutWitness> {
    let n = t.n();
    if k == 0 {
        return Ok(());
    }
    if n < k + 1 {
        return Err(CutWitness::too_few());
    }
    if k == 1 {
        let all = VertexSet::full(n);
        let fwd = reach(t, &all, 0, true);
        if let Some(b) = fwd.complement().first() {
            return Err(CutWitness::separator(&VertexSet::new(n), 0, b));
        }
        let back = reach(t, &all, 0, false);
        if let Some(a) = back.complement().first() {
            return Err(CutWitness::separator(&VertexSet::new(n), a, 0));
        }
        return Ok(());
    }
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            if let Some((value, Some(cut))) = local_cut(t, i, j, k) {
                debug_assert!(value < k);
                return Err(CutWitness::separator(&cut, i, j));
            }
        }
    }
    let mut prefix = VertexSet::from_ids(n, 0..k).unwrap();
    for j in k..n {
        let mut alive = VertexSet::full(n);
        alive.remove(j);
        let into = t.in_neighbours(j);
        let mut flow = DisjointPaths::new(t, &alive, &prefix, &into);
        if flow.run(k) < k {
            let cut = flow.min_cut().expect("flow below limit is maximum");
            let from = prefix.difference(&cut).first().expect("prefix exceeds cut");
            return Err(CutWitness::separator(&cut, from, j));
        }
        let out_of = t.out_neighbours(j);
        let mut flow = DisjointPaths::new(t, &alive, &out_of, &prefix);
        if flow.run(k) < k {
            let cut = flow.min_cut().expect("flow below limit is maximum");
            let to = prefix.difference(&cut).first().expect("prefix exceeds cut");
            return Err(CutWitness::separator(&cut, j, to));
        }
        prefix.insert(j);
    }
    Ok(())
}

pub fn is_k_connected(t: &Tournament, k: usize) -> bool {
    check_k_connected(t, k).is_ok()
}

/// Largest `k` with `T` strongly k-connected, or 0.
pub fn connectivity(t: &Tournament) -> usize {
    if t.n() < 2 || !is_strongly_connected(t) {
        return 0;
    }
    let (mut lo, mut hi) = (1, t.n() - 1);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if is_k_connected(t, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Outcome of checking one part of a claimed partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartCheck {
    pub index: usize,
    pub size: usize,
    pub k_connected: bool,
    pub witness: Option<CutWitness>,
}

/// Full verdict on a claimed partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub k: usize,
    /// Vertices not covered by any part.
    pub missing: Vec<usize>,
    /// `(vertex, first part, second part)` for every repeated vertex.
    pub overlaps: Vec<(usize, usize, usize)>,
    pub out_of_range: Vec<usize>,
    pub parts: Vec<PartCheck>,
}

impl PartitionReport {
    pub fn is_partition(&self) -> bool {
        self.missing.is_empty() && self.overlaps.is_empty() && self.out_of_range.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.is_partition() && self.parts.iter().all(|p| p.k_connected)
    }

    pub fn failing_parts(&self) -> Vec<usize> {
        self.parts.iter().filter(|p| !p.k_connected).map(|p| p.index).collect()
    }
}

/// Checks that `parts` partition `V` and that each part induces a strongly
/// k-connected tournament. Witnesses use original vertex ids.
pub fn verify_partition(t: &Tournament, parts: &[Vec<usize>], k: usize) -> PartitionReport {
    let n = t.n();
    let mut owner = vec![usize::MAX; n];
    let mut overlaps = Vec::new();
    let mut out_of_range = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        for &v in part {
            if v >= n {
                out_of_range.push(v);
            } else if owner[v] == usize::MAX {
                owner[v] = i;
            } else {
                overlaps.push((v, owner[v], i));
            }
        }
    }
    let missing = (0..n).filter(|&v| owner[v] == usize::MAX).collect();
    let checks = parts
        .iter()
        .enumerate()
        .map(|(i, part)| {
            let ids: Vec<usize> = part.iter().copied().filter(|&v| v < n).collect();
            let (sub, map) = t.induced_ids(&ids).expect("ids filtered to range");
            let witness = check_k_connected(&sub, k).err().map(|w| w.relabel(&map));
            PartCheck {
                index: i,
                size: part.len(),
                k_connected: witness.is_none(),
                witness,
            }
        })
        .collect();
    PartitionReport {
        k,
        missing,
        overlaps,
        out_of_range,
        parts: checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> Tournament {
        Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn transitive(n: usize) -> Tournament {
        Tournament::from_fn(n, |_, _| true)
    }

    /// Two 3-cycles on {0,1,2} and {3,4,5}, every arc from the first to the second.
    fn two_cycles() -> Tournament {
        Tournament::from_fn(6, |i, j| {
            if i < 3 && j >= 3 {
                true
            } else {
                j == i + 1
            }
        })
    }

    #[test]
    fn strong_connectivity_basics() {
        assert!(is_strongly_connected(&three_cycle()));
        assert!(!is_strongly_connected(&transitive(3)));
        assert!(is_strongly_connected(&transitive(1)));
        assert!(is_strongly_connected(&transitive(0)));
    }

    #[test]
    fn local_connectivity_of_three_cycle() {
        let t = three_cycle();
        assert_eq!(local_connectivity(&t, 1, 0).unwrap(), 1);
        assert_eq!(local_connectivity(&t, 0, 1).unwrap(), 2);
        assert_eq!(local_connectivity(&t, 0, 0), Err(TournamentError::SameVertex(0)));
    }

    #[test]
    fn three_cycle_k_tests() {
        let t = three_cycle();
        assert!(is_k_connected(&t, 1));
        let w = check_k_connected(&t, 2).unwrap_err();
        assert_eq!(w.kind, WitnessKind::Separator);
        assert_eq!(w.separator.len(), 1);
        assert!(w.holds_for(&t, 2));
        assert_eq!(check_k_connected(&t, 3).unwrap_err().kind, WitnessKind::TooFewVertices);
    }

    #[test]
    fn connectivity_small_cases() {
        assert_eq!(connectivity(&transitive(3)), 0);
        assert_eq!(connectivity(&three_cycle()), 1);
        assert_eq!(connectivity(&transitive(1)), 0);
    }

    #[test]
    fn witness_for_transitive_pair() {
        let t = transitive(4);
        let w = check_k_connected(&t, 1).unwrap_err();
        assert!(w.holds_for(&t, 1));
    }

    #[test]
    fn partition_reports() {
        let t = two_cycles();
        let parts = vec![vec![0, 1, 2], vec![3, 4, 5]];
        assert!(verify_partition(&t, &parts, 1).is_valid());
        let r = verify_partition(&t, &parts, 2);
        assert!(r.is_partition() && !r.is_valid());
        for p in &r.parts {
            let w = p.witness.as_ref().unwrap();
            assert_eq!(w.separator.len(), 1);
        }
        let r = verify_partition(&t, &[vec![0, 1, 2], vec![3, 4]], 1);
        assert_eq!(r.missing, vec![5]);
    }
}
