//! Bit-packed tournaments and the `.trn` text format.

use std::fmt::Write as _;

use crate::bits::{words_for, VertexSet};
use crate::error::TournamentError;

/// A tournament on vertices `0..n`.
///
/// Both the out-neighbourhood and the in-neighbourhood of every vertex are
/// stored as packed rows, so neighbourhood intersections are word operations.
#[derive(Clone, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    stride: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tournament").field("n", &self.n).finish_non_exhaustive()
    }
}

impl Tournament {
    /// Builds a tournament from `beats(i, j)` for every `i < j`; `true`
    /// orients the pair as `i → j`.
    pub fn from_fn(n: usize, mut beats: impl FnMut(usize, usize) -> bool) -> Self {
        let stride = words_for(n);
        let mut out = vec![0u64; n * stride];
        let mut inn = vec![0u64; n * stride];
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = if beats(i, j) { (i, j) } else { (j, i) };
                out[a * stride + b / 64] |= 1 << (b % 64);
                inn[b * stride + a / 64] |= 1 << (a % 64);
            }
        }
        Self { n, stride, out, inn }
    }

    /// Builds a tournament from an explicit arc list; every unordered pair
    /// must appear exactly once.
    pub fn build(n: usize, arcs: &[(usize, usize)]) -> Result<Self, TournamentError> {
        let mut seen = vec![false; n * n];
        let mut forward = vec![false; n * n];
        for &(u, v) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(TournamentError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(TournamentError::SelfLoop(u));
            }
            let (a, b) = (u.min(v), u.max(v));
            if seen[a * n + b] {
                return Err(TournamentError::DuplicatePair(a, b));
            }
            seen[a * n + b] = true;
            forward[a * n + b] = u == a;
        }
        for a in 0..n {
            for b in a + 1..n {
                if !seen[a * n + b] {
                    return Err(TournamentError::MissingPair(a, b));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| forward[i * n + j]))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether the arc `u → v` is present. `beats(v, v)` is false.
    #[inline]
    pub fn beats(&self, u: usize, v: usize) -> bool {
        self.out[u * self.stride + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn out_row(&self, v: usize) -> &[u64] {
        &self.out[v * self.stride..(v + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn in_row(&self, v: usize) -> &[u64] {
        &self.inn[v * self.stride..(v + 1) * self.stride]
    }

    pub fn out_neighbours(&self, v: usize) -> VertexSet {
        VertexSet::from_words(self.n, self.out_row(v).to_vec())
    }

    pub fn in_neighbours(&self, v: usize) -> VertexSet {
        VertexSet::from_words(self.n, self.in_row(v).to_vec())
    }

    /// `|N⁺(v) ∩ set|`.
    #[inline]
    pub fn out_count_in(&self, v: usize, set: &VertexSet) -> usize {
        crate::bits::count_and(self.out_row(v), set.words())
    }

    /// `|N⁻(v) ∩ set|`.
    #[inline]
    pub fn in_count_in(&self, v: usize, set: &VertexSet) -> usize {
        crate::bits::count_and(self.in_row(v), set.words())
    }

    fn check_vertex(&self, v: usize) -> Result<(), TournamentError> {
        if v < self.n {
            Ok(())
        } else {
            Err(TournamentError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    pub fn out_degree(&self, v: usize) -> Result<usize, TournamentError> {
        self.check_vertex(v)?;
        Ok(self.out_row(v).iter().map(|w| w.count_ones() as usize).sum())
    }

    pub fn in_degree(&self, v: usize) -> Result<usize, TournamentError> {
        self.check_vertex(v)?;
        Ok(self.in_row(v).iter().map(|w| w.count_ones() as usize).sum())
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        (0..self.n)
            .map(|v| self.out_row(v).iter().map(|w| w.count_ones() as usize).sum())
            .collect()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        (0..self.n)
            .map(|v| self.in_row(v).iter().map(|w| w.count_ones() as usize).sum())
            .collect()
    }

    /// The subtournament induced on `set`, relabelled densely in ascending
    /// id order. The returned map sends new ids to original ids.
    pub fn induced(&self, set: &VertexSet) -> Result<(Tournament, Vec<usize>), TournamentError> {
        if set.universe() != self.n {
            if let Some(v) = set.iter().find(|&v| v >= self.n) {
                return Err(TournamentError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        let map: Vec<usize> = set.iter().collect();
        let sub = Tournament::from_fn(map.len(), |i, j| self.beats(map[i], map[j]));
        Ok((sub, map))
    }

    /// Same as [`induced`](Self::induced) for a plain id list.
    pub fn induced_ids(&self, ids: &[usize]) -> Result<(Tournament, Vec<usize>), TournamentError> {
        let set = VertexSet::from_ids(self.n, ids.iter().copied())
            .map_err(|v| TournamentError::VertexOutOfRange { vertex: v, n: self.n })?;
        self.induced(&set)
    }

    /// The tournament with every arc reversed.
    pub fn reversed(&self) -> Tournament {
        Tournament {
            n: self.n,
            stride: self.stride,
            out: self.inn.clone(),
            inn: self.out.clone(),
        }
    }

    /// All arcs `(u, v)` with `u → v`, ordered by `u` then `v`.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for u in 0..self.n {
            let row = VertexSet::from_words(self.n, self.out_row(u).to_vec());
            arcs.extend(row.iter().map(|v| (u, v)));
        }
        arcs
    }

    /// Serialises to the `.trn` format: the vertex count on the first line,
    /// then for each `i` in `0..n-1` a line of `n-1-i` bits whose `j`-th
    /// character is `1` iff `i → i+1+j`.
    pub fn to_trn(&self) -> String {
        let mut s = String::with_capacity(self.n * self.n / 2 + 16);
        writeln!(s, "{}", self.n).unwrap();
        for i in 0..self.n.saturating_sub(1) {
            for j in i + 1..self.n {
                s.push(if self.beats(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_trn(text: &str) -> Result<Self, TournamentError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| TournamentError::Format("empty input".into()))?;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| TournamentError::Format(format!("bad vertex count {header:?}")))?;
        let mut rows: Vec<&[u8]> = Vec::with_capacity(n);
        for i in 0..n.saturating_sub(1) {
            let line = lines
                .next()
                .ok_or_else(|| TournamentError::Format(format!("missing row {i}")))?
                .trim_end_matches('\r');
            if line.len() != n - 1 - i {
                return Err(TournamentError::Format(format!(
                    "row {i} has {} characters, expected {}",
                    line.len(),
                    n - 1 - i
                )));
            }
            if let Some(c) = line.chars().find(|c| *c != '0' && *c != '1') {
                return Err(TournamentError::Format(format!("row {i} contains {c:?}")));
            }
            rows.push(line.as_bytes());
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(TournamentError::Format("trailing data after last row".into()));
        }
        Ok(Tournament::from_fn(n, |i, j| rows[i][j - i - 1] == b'1'))
    }
}
