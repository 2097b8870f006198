//! Threshold experiments: connectivity of random tournaments against whether
//! a partition is found, written as CSV.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::complete::partition_tournament;
use crate::connectivity::connectivity;
use crate::generators::random_tournament;
use crate::oracle::{bruteforce_partition, OracleError, MASK_LIMIT};
use crate::profile::Profile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Pipeline,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub base_seed: u64,
    pub count: u64,
    pub budget: Duration,
    pub mode: Mode,
    pub profile: Profile,
    pub max_rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub connectivity: usize,
    /// `found`, `none` or `timeout`; pipeline mode reports `failed` instead of `none`.
    pub result: String,
    pub elapsed_ms: u128,
}

/// One row per seed in `base_seed .. base_seed + count`, each on
/// `random_tournament(n, seed)`.
pub fn threshold_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>, OracleError> {
    if cfg.mode == Mode::Exact && cfg.n > MASK_LIMIT {
        return Err(OracleError::LimitExceeded { n: cfg.n, limit: MASK_LIMIT });
    }
    let mut rows = Vec::new();
    for seed in cfg.base_seed..cfg.base_seed + cfg.count {
        let t = random_tournament(cfg.n, seed);
        let start = Instant::now();
        let result = match cfg.mode {
            Mode::Exact => bruteforce_partition(&t, cfg.k, cfg.t, cfg.budget)?.label().to_string(),
            Mode::Pipeline => match partition_tournament(&t, cfg.k, cfg.t, &cfg.profile, seed, cfg.max_rounds) {
                Ok(_) => "found".into(),
                Err(_) => "failed".into(),
            },
        };
        rows.push(ExperimentRow {
            seed,
            n: cfg.n,
            k: cfg.k,
            t: cfg.t,
            connectivity: connectivity(&t),
            result,
            elapsed_ms: start.elapsed().as_millis(),
        });
    }
    Ok(rows)
}

pub fn success_fraction(rows: &[ExperimentRow]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter().filter(|r| r.result == "found").count() as f64 / rows.len() as f64
}

/// CSV with a header line. Timings vary between runs, so `elapsed_ms` is
/// left empty unless `timing` is set.
pub fn to_csv(rows: &[ExperimentRow], timing: bool) -> String {
    let mut s = String::from("seed,n,k,t,connectivity,result,elapsed_ms\n");
    for r in rows {
        let ms = if timing { r.elapsed_ms.to_string() } else { String::new() };
        writeln!(s, "{},{},{},{},{},{},{}", r.seed, r.n, r.k, r.t, r.connectivity, r.result, ms).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(count: u64) -> ExperimentConfig {
        ExperimentConfig {
            n: 8,
            k: 1,
            t: 2,
            base_seed: 0,
            count,
            budget: Duration::from_secs(10),
            mode: Mode::Exact,
            profile: Profile::tiny(),
            max_rounds: 4,
        }
    }

    #[test]
    fn zero_seeds_is_empty() {
        let rows = threshold_experiment(&cfg(0)).unwrap();
        assert!(rows.is_empty());
        assert_eq!(to_csv(&rows, false), "seed,n,k,t,connectivity,result,elapsed_ms\n");
        assert_eq!(success_fraction(&rows), 0.0);
    }

    #[test]
    fn one_row_per_seed() {
        let rows = threshold_experiment(&cfg(50)).unwrap();
        assert_eq!(rows.len(), 50);
        assert_eq!(to_csv(&rows, false).lines().count(), 51);
        assert!(rows.iter().all(|r| r.result == "found" || r.result == "none"));
    }
}
