//! Seeded tournament generators.
//!
//! `random_tournament` orients the pair `i < j` as `i -> j` iff the top bit of
//! output `p` of the SplitMix64 stream seeded with `seed` is set, where `p` is
//! the position of `(i, j)` in row-major order over the upper triangle. The
//! orientation of a pair therefore never depends on iteration order.

use serde::{Deserialize, Serialize};

use crate::connectivity::is_k_connected;
use crate::error::InputError;
use crate::rng::{derive, splitmix_at};
use crate::tournament::Tournament;

#[inline]
fn pair_index(n: usize, i: usize, j: usize) -> u64 {
    (i * n - i * (i + 1) / 2 + (j - i - 1)) as u64
}

pub fn random_tournament(n: usize, seed: u64) -> Tournament {
    Tournament::from_fn(n, |i, j| splitmix_at(seed, pair_index(n, i, j)) >> 63 == 1)
}

/// `i -> i + j (mod n)` for `j = 1..=(n-1)/2`.
pub fn rotational_tournament(n: usize) -> Result<Tournament, InputError> {
    if n.is_multiple_of(2) {
        return Err(InputError::Precondition(format!("rotational tournament needs odd n, got {n}")));
    }
    let half = (n - 1) / 2;
    Ok(Tournament::from_fn(n, |i, j| j - i <= half))
}

/// Rejection sampling of a strongly k-connected tournament. Try `r` uses the
/// seed derived from `(seed, r)`.
pub fn random_k_connected(n: usize, k: usize, seed: u64, max_tries: u64) -> Result<Tournament, InputError> {
    if n < k + 1 {
        return Err(InputError::Precondition(format!("need n >= k + 1, got n = {n}, k = {k}")));
    }
    if max_tries == 0 {
        return Err(InputError::Precondition("max_tries must be at least 1".into()));
    }
    for r in 0..max_tries {
        let t = random_tournament(n, derive(seed, "kconn", r));
        if is_k_connected(&t, k) {
            return Ok(t);
        }
    }
    Err(InputError::Exhausted { tries: max_tries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Uniform,
    Rotational,
    RejectionKConnected,
}

/// A complete description of a generated tournament.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub model: Model,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub max_tries: u64,
}

impl GenSpec {
    pub fn generate(&self) -> Result<Tournament, InputError> {
        match self.model {
            Model::Uniform => Ok(random_tournament(self.n, self.seed)),
            Model::Rotational => rotational_tournament(self.n),
            Model::RejectionKConnected => random_k_connected(self.n, self.k, self.seed, self.max_tries),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_is_row_major() {
        let n = 5;
        let mut expect = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), expect);
                expect += 1;
            }
        }
    }

    #[test]
    fn uniform_is_deterministic() {
        assert_eq!(random_tournament(5, 42).arcs(), random_tournament(5, 42).arcs());
        assert_eq!(random_tournament(1, 3).arcs(), vec![]);
        assert_ne!(random_tournament(40, 1), random_tournament(40, 2));
    }

    #[test]
    fn rotational_shapes() {
        let t3 = rotational_tournament(3).unwrap();
        assert_eq!(t3.arcs(), vec![(0, 1), (1, 2), (2, 0)]);
        let t7 = rotational_tournament(7).unwrap();
        assert!(t7.out_degrees().iter().all(|&d| d == 3));
        assert!(rotational_tournament(8).is_err());
    }

    #[test]
    fn rejection_preconditions() {
        assert!(matches!(random_k_connected(2, 2, 0, 10), Err(InputError::Precondition(_))));
        let t = random_k_connected(3, 1, 5, 64).unwrap();
        assert!(is_k_connected(&t, 1));
    }
}
