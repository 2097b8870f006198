//! Brute-force ground truth on small tournaments: minimum cuts by subset
//! enumeration, strong k-connectivity by exhaustive deletion, and exact
//! partition search.
//!
//! Nothing here calls the flow code or the pipeline. Tournaments are held as
//! one `u64` out-neighbour mask per vertex.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tournament::Tournament;

/// Default vertex limit for [`bruteforce_local_cut`].
pub const CUT_LIMIT: usize = 12;
/// Hard limit for the mask representation.
pub const MASK_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("tournament has {n} vertices, oracle limit is {limit}")]
    LimitExceeded { n: usize, limit: usize },
    #[error("arc {0} -> {1} is present, so the pair cannot be separated")]
    InseparablePair(usize, usize),
    #[error("pair ({0}, {0}) is not a pair of distinct vertices")]
    SameVertex(usize),
    #[error("vertex {vertex} out of range for a tournament on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

struct Masks {
    out: Vec<u64>,
    inn: Vec<u64>,
}

impl Masks {
    fn new(t: &Tournament, limit: usize) -> Result<Self, OracleError> {
        let n = t.n();
        if n > limit.min(MASK_LIMIT) {
            return Err(OracleError::LimitExceeded { n, limit: limit.min(MASK_LIMIT) });
        }
        let row = |u: usize, forward: bool| {
            (0..n).filter(|&v| v != u && t.beats(u, v) == forward).fold(0u64, |m, v| m | 1 << v)
        };
        let out = (0..n).map(|u| row(u, true)).collect();
        let inn = (0..n).map(|u| row(u, false)).collect();
        Ok(Self { out, inn })
    }

    fn closure(&self, alive: u64, start: usize, forward: bool) -> u64 {
        let adj = if forward { &self.out } else { &self.inn };
        let mut seen = 1u64 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let x = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[x];
            }
            next &= alive & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    fn strong(&self, set: u64) -> bool {
        if set == 0 {
            return false;
        }
        let s = set.trailing_zeros() as usize;
        self.closure(set, s, true) == set && self.closure(set, s, false) == set
    }

    /// `set` induces a strongly k-connected tournament.
    fn k_connected(&self, set: u64, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        if (set.count_ones() as usize) < k + 1 {
            return false;
        }
        let members: Vec<u64> = bits(set).map(|v| 1u64 << v).collect();
        self.deletions_ok(set, &members, 0, k - 1)
    }

    fn deletions_ok(&self, alive: u64, members: &[u64], from: usize, budget: usize) -> bool {
        if !self.strong(alive) {
            return false;
        }
        if budget == 0 {
            return true;
        }
        (from..members.len()).all(|i| self.deletions_ok(alive & !members[i], members, i + 1, budget - 1))
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            v
        })
    })
}

fn full(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Smallest number of vertices whose deletion leaves no `u -> v` path, found
/// by trying every subset of the other vertices. Requires the arc `v -> u`.
pub fn bruteforce_local_cut(t: &Tournament, u: usize, v: usize) -> Result<usize, OracleError> {
    bruteforce_local_cut_with_limit(t, u, v, CUT_LIMIT)
}

pub fn bruteforce_local_cut_with_limit(t: &Tournament, u: usize, v: usize, limit: usize) -> Result<usize, OracleError> {
    let n = t.n();
    let m = Masks::new(t, limit)?;
    for x in [u, v] {
        if x >= n {
            return Err(OracleError::VertexOutOfRange { vertex: x, n });
        }
    }
    if u == v {
        return Err(OracleError::SameVertex(u));
    }
    if m.out[u] >> v & 1 == 1 {
        return Err(OracleError::InseparablePair(u, v));
    }
    let others = full(n) & !(1 << u) & !(1 << v);
    let mut best = others.count_ones() as usize;
    let mut z = others;
    loop {
        let size = z.count_ones() as usize;
        if size < best && m.closure(full(n) & !z, u, true) >> v & 1 == 0 {
            best = size;
        }
        if z == 0 {
            break;
        }
        z = (z - 1) & others;
    }
    Ok(best)
}

/// Strong k-connectivity by deleting every set of at most `k - 1` vertices.
pub fn bruteforce_is_k_connected(t: &Tournament, k: usize) -> Result<bool, OracleError> {
    let m = Masks::new(t, MASK_LIMIT)?;
    Ok(m.k_connected(full(t.n()), k))
}

/// Largest `k` for which [`bruteforce_is_k_connected`] holds.
pub fn bruteforce_connectivity(t: &Tournament) -> Result<usize, OracleError> {
    let m = Masks::new(t, MASK_LIMIT)?;
    let all = full(t.n());
    let mut k = 0;
    while m.k_connected(all, k + 1) {
        k += 1;
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found { parts: Vec<Vec<usize>> },
    NoneExists,
    /// `fraction` of the top-level candidates were examined.
    Timeout { fraction: f64 },
}

impl SearchOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Found { .. } => "found",
            SearchOutcome::NoneExists => "none",
            SearchOutcome::Timeout { .. } => "timeout",
        }
    }
}

/// Exhaustive search for a partition into `parts` sets, each inducing a
/// strongly k-connected tournament.
pub fn bruteforce_partition(t: &Tournament, k: usize, parts: usize, budget: Duration) -> Result<SearchOutcome, OracleError> {
    bruteforce_partition_mixed(t, &vec![k; parts], budget)
}

/// As [`bruteforce_partition`] with part `i` required to be strongly
/// `targets[i]`-connected.
pub fn bruteforce_partition_mixed(t: &Tournament, targets: &[usize], budget: Duration) -> Result<SearchOutcome, OracleError> {
    let m = Masks::new(t, MASK_LIMIT)?;
    if targets.is_empty() {
        return Ok(if t.n() == 0 { SearchOutcome::Found { parts: Vec::new() } } else { SearchOutcome::NoneExists });
    }
    let mut search = Search {
        m: &m,
        targets,
        deadline: Instant::now() + budget,
        ticks: 0,
        timed_out: false,
        chosen: Vec::new(),
        top_done: 0,
        top_total: 0,
    };
    let found = search.fill(full(t.n()), 0);
    Ok(if found {
        SearchOutcome::Found {
            parts: search.chosen.iter().map(|&p| bits(p).collect()).collect(),
        }
    } else if search.timed_out {
        SearchOutcome::Timeout {
            fraction: search.top_done as f64 / search.top_total.max(1) as f64,
        }
    } else {
        SearchOutcome::NoneExists
    })
}

struct Search<'a> {
    m: &'a Masks,
    targets: &'a [usize],
    deadline: Instant,
    ticks: u64,
    timed_out: bool,
    chosen: Vec<u64>,
    top_done: u64,
    top_total: u64,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.ticks += 1;
        if self.ticks.is_multiple_of(1024) && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    /// Places parts `i..` inside `rest`.
    fn fill(&mut self, rest: u64, i: usize) -> bool {
        let k = self.targets[i];
        if i + 1 == self.targets.len() {
            if self.m.k_connected(rest, k) {
                self.chosen.push(rest);
                return true;
            }
            return false;
        }
        let later: usize = self.targets[i + 1..].iter().map(|&x| x + 1).sum();
        let size = rest.count_ones() as usize;
        if size < k + 1 + later {
            return false;
        }
        // Interchangeable parts: the lowest remaining vertex opens the next one.
        let pinned = if self.targets[i..].iter().all(|&x| x == k) { 1u64 << rest.trailing_zeros() } else { 0 };
        let free = rest & !pinned;
        if i == 0 {
            self.top_total = 1u64.checked_shl(free.count_ones()).unwrap_or(u64::MAX);
        }
        let mut sub = free;
        loop {
            if self.tick() {
                return false;
            }
            let part = sub | pinned;
            let c = part.count_ones() as usize;
            if c > k && size - c >= later && self.m.k_connected(part, k) {
                self.chosen.push(part);
                if self.fill(rest & !part, i + 1) {
                    return true;
                }
                self.chosen.pop();
                if self.timed_out {
                    return false;
                }
            }
            if i == 0 {
                self.top_done += 1;
            }
            if sub == 0 {
                return false;
            }
            sub = (sub - 1) & free;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> Tournament {
        Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn three_cycle_cut() {
        assert_eq!(bruteforce_local_cut(&c3(), 1, 0), Ok(1));
        assert_eq!(bruteforce_local_cut(&c3(), 0, 1), Err(OracleError::InseparablePair(0, 1)));
        assert_eq!(bruteforce_local_cut(&c3(), 2, 2), Err(OracleError::SameVertex(2)));
    }

    #[test]
    fn cut_limit() {
        let t = Tournament::from_fn(13, |i, j| i < j);
        assert_eq!(bruteforce_local_cut(&t, 1, 0), Err(OracleError::LimitExceeded { n: 13, limit: 12 }));
    }

    #[test]
    fn two_cycles_split() {
        let t = Tournament::from_fn(6, |i, j| if i / 3 == j / 3 { j == i + 1 } else { true });
        let out = bruteforce_partition(&t, 1, 2, Duration::from_secs(5)).unwrap();
        assert_eq!(out, SearchOutcome::Found { parts: vec![vec![0, 1, 2], vec![3, 4, 5]] });
    }

    #[test]
    fn transitive_has_no_split() {
        let t = Tournament::from_fn(6, |i, j| i < j);
        assert_eq!(bruteforce_partition(&t, 1, 2, Duration::from_secs(5)).unwrap(), SearchOutcome::NoneExists);
        assert_eq!(bruteforce_connectivity(&t), Ok(0));
    }

    #[test]
    fn zero_budget_times_out() {
        let t = Tournament::from_fn(24, |i, j| i < j);
        match bruteforce_partition(&t, 1, 2, Duration::ZERO).unwrap() {
            SearchOutcome::Timeout { fraction } => assert!((0.0..1.0).contains(&fraction)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn three_cycle_is_exactly_one_connected() {
        assert_eq!(bruteforce_connectivity(&c3()), Ok(1));
        assert_eq!(bruteforce_is_k_connected(&c3(), 2), Ok(false));
    }
}
