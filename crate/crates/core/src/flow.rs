//! Vertex-disjoint path flow on the implicit split graph of a tournament.
//!
//! Every live vertex `v` is split into `v_in -> v_out` with capacity one.
//! Arcs `u_out -> v_in` follow the tournament and are uncapacitated, a super
//! source feeds every source's `in` half and every sink's `out` half drains
//! into a super sink. Arcs into sources and out of sinks are dropped, so
//! sources and sinks never appear in the interior of a path; a vertex that is
//! both a source and a sink carries a single-vertex path.
//!
//! The residual search runs on packed rows, so one BFS costs `O(n^2 / 64)`.

use std::collections::VecDeque;

use crate::bits::{words_for, VertexSet};
use crate::tournament::Tournament;

const NONE: u32 = u32::MAX;
const FROM_SOURCE: u32 = u32::MAX - 1;

pub(crate) struct DisjointPaths<'a> {
    t: &'a Tournament,
    alive: &'a VertexSet,
    sources: &'a VertexSet,
    sinks: &'a VertexSet,
    next: Vec<u32>,
    prev: Vec<u32>,
    used: Vec<bool>,
    is_start: Vec<bool>,
    is_end: Vec<bool>,
    value: usize,
    visited_in: Vec<u64>,
    visited_out: Vec<u64>,
    parent: Vec<u32>,
}

impl<'a> DisjointPaths<'a> {
    /// Sources and sinks outside `alive` are ignored.
    pub(crate) fn new(
        t: &'a Tournament,
        alive: &'a VertexSet,
        sources: &'a VertexSet,
        sinks: &'a VertexSet,
    ) -> Self {
        let n = t.n();
        debug_assert!(alive.universe() == n && sources.universe() == n && sinks.universe() == n);
        Self {
            t,
            alive,
            sources,
            sinks,
            next: vec![NONE; n],
            prev: vec![NONE; n],
            used: vec![false; n],
            is_start: vec![false; n],
            is_end: vec![false; n],
            value: 0,
            visited_in: vec![0; words_for(n)],
            visited_out: vec![0; words_for(n)],
            parent: vec![NONE; 2 * n],
        }
    }

    /// Augments until `limit` paths exist or the flow is maximum.
    pub(crate) fn run(&mut self, limit: usize) -> usize {
        while self.value < limit {
            match self.search() {
                Some(end) => self.augment(end),
                None => break,
            }
        }
        self.value
    }

    #[inline]
    fn mark(bits: &mut [u64], v: usize) -> bool {
        let w = &mut bits[v / 64];
        let b = 1u64 << (v % 64);
        let fresh = *w & b == 0;
        *w |= b;
        fresh
    }

    #[inline]
    fn seen(bits: &[u64], v: usize) -> bool {
        bits[v / 64] >> (v % 64) & 1 == 1
    }

    /// BFS in the residual graph. Returns the sink vertex whose `out` half
    /// reached the super sink.
    fn search(&mut self) -> Option<usize> {
        self.visited_in.iter_mut().for_each(|w| *w = 0);
        self.visited_out.iter_mut().for_each(|w| *w = 0);
        let mut queue: VecDeque<u32> = VecDeque::new();
        for s in self.sources.iter() {
            if self.alive.contains(s) && !self.is_start[s] {
                Self::mark(&mut self.visited_in, s);
                self.parent[2 * s] = FROM_SOURCE;
                queue.push_back(2 * s as u32);
            }
        }
        let stride = self.visited_in.len();
        let mut frontier = vec![0u64; stride];
        while let Some(node) = queue.pop_front() {
            let v = (node / 2) as usize;
            if node % 2 == 0 {
                if !self.used[v] {
                    if Self::mark(&mut self.visited_out, v) {
                        self.parent[2 * v + 1] = node;
                        queue.push_back(node + 1);
                    }
                } else if self.prev[v] != NONE {
                    let p = self.prev[v] as usize;
                    if Self::mark(&mut self.visited_out, p) {
                        self.parent[2 * p + 1] = node;
                        queue.push_back(2 * p as u32 + 1);
                    }
                }
            } else {
                if self.sinks.contains(v) {
                    if !self.is_end[v] {
                        return Some(v);
                    }
                } else {
                    let row = self.t.out_row(v);
                    let alive = self.alive.words();
                    let src = self.sources.words();
                    for i in 0..stride {
                        frontier[i] = row[i] & alive[i] & !src[i] & !self.visited_in[i];
                    }
                    for (i, &word) in frontier.iter().enumerate() {
                        let mut word = word;
                        while word != 0 {
                            let w = i * 64 + word.trailing_zeros() as usize;
                            word &= word - 1;
                            self.visited_in[i] |= 1 << (w % 64);
                            self.parent[2 * w] = node;
                            queue.push_back(2 * w as u32);
                        }
                    }
                }
                if self.used[v] && Self::mark(&mut self.visited_in, v) {
                    self.parent[2 * v] = node;
                    queue.push_back(2 * v as u32);
                }
            }
        }
        None
    }

    fn augment(&mut self, end: usize) {
        let mut nodes = vec![2 * end as u32 + 1];
        loop {
            let p = self.parent[*nodes.last().unwrap() as usize];
            if p == FROM_SOURCE {
                break;
            }
            nodes.push(p);
        }
        nodes.reverse();
        self.is_start[(nodes[0] / 2) as usize] = true;
        for pair in nodes.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (va, vb) = ((a / 2) as usize, (b / 2) as usize);
            match (a % 2, b % 2) {
                (0, 1) if va == vb => self.used[va] = true,
                (1, 0) if va == vb => self.used[va] = false,
                (1, 0) => {
                    self.next[va] = vb as u32;
                    self.prev[vb] = va as u32;
                }
                (0, 1) => {
                    // residual reverse of the flow arc vb -> va
                    if self.next[vb] == va as u32 {
                        self.next[vb] = NONE;
                    }
                    if self.prev[va] == vb as u32 {
                        self.prev[va] = NONE;
                    }
                }
                _ => unreachable!("residual path alternates halves"),
            }
        }
        self.is_end[end] = true;
        self.value += 1;
    }

    /// Decomposes the current flow into paths, one per used source in
    /// ascending order.
    pub(crate) fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.value);
        for s in self.sources.iter() {
            if !self.is_start[s] {
                continue;
            }
            let mut path = vec![s];
            let mut v = s;
            while !self.is_end[v] {
                v = self.next[v] as usize;
                path.push(v);
            }
            out.push(path);
        }
        out
    }

    /// A minimum vertex cut separating sources from sinks, or `None` when the
    /// flow is not yet maximum.
    pub(crate) fn min_cut(&mut self) -> Option<VertexSet> {
        if self.search().is_some() {
            return None;
        }
        let n = self.t.n();
        let mut cut = VertexSet::new(n);
        for v in self.alive.iter() {
            let vin = Self::seen(&self.visited_in, v);
            let vout = Self::seen(&self.visited_out, v);
            let source_edge = self.sources.contains(v) && !vin;
            let link_edge = vin && !vout;
            let sink_edge = self.sinks.contains(v) && vout;
            if source_edge || link_edge || sink_edge {
                cut.insert(v);
            }
        }
        debug_assert_eq!(cut.len(), self.value);
        Some(cut)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, ids: &[usize]) -> VertexSet {
        VertexSet::from_ids(n, ids.iter().copied()).unwrap()
    }

    #[test]
    fn single_path_in_three_cycle() {
        let t = Tournament::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let all = VertexSet::full(3);
        let (s, k) = (set(3, &[0]), set(3, &[2]));
        let mut f = DisjointPaths::new(&t, &all, &s, &k);
        assert_eq!(f.run(5), 1);
        assert_eq!(f.paths(), vec![vec![0, 1, 2]]);
        assert_eq!(f.min_cut().unwrap().len(), 1);
    }

    #[test]
    fn shared_vertex_is_a_single_path() {
        let t = Tournament::from_fn(4, |_, _| true);
        let all = VertexSet::full(4);
        let both = set(4, &[1]);
        let mut f = DisjointPaths::new(&t, &all, &both, &both);
        assert_eq!(f.run(3), 1);
        assert_eq!(f.paths(), vec![vec![1]]);
    }

    #[test]
    fn rerouting_through_residual_arcs() {
        // 0 -> 2 -> 4 is the greedy first path; the maximum needs 0 -> 3 -> 5
        // and 1 -> 2 -> 4.
        let n = 6;
        let arcs = [(0, 2), (0, 3), (1, 2), (2, 4), (2, 5), (3, 5)];
        let t = Tournament::from_fn(n, |i, j| {
            if arcs.contains(&(i, j)) {
                true
            } else if arcs.contains(&(j, i)) {
                false
            } else {
                j < i
            }
        });
        let all = VertexSet::full(n);
        let (s, k) = (set(n, &[0, 1]), set(n, &[4, 5]));
        let mut f = DisjointPaths::new(&t, &all, &s, &k);
        assert_eq!(f.run(10), 2);
        let paths = f.paths();
        let mut seen = VertexSet::new(n);
        for p in &paths {
            for w in p.windows(2) {
                assert!(t.beats(w[0], w[1]));
            }
            for &v in p {
                assert!(seen.insert(v));
            }
        }
        assert_eq!(f.min_cut().unwrap().len(), 2);
    }
}
