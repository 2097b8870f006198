//! Concentration bounds and seeded Monte Carlo checks against them.
//!
//! Bounds are formed in log space; `bound` is `exp(log_bound)` and underflows
//! to zero for extreme parameters while `log_bound` stays exact.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::InputError;
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    /// Upper bound on the failure probability, in `[0, 1]`.
    pub bound: f64,
    pub log_bound: f64,
    /// Boundary of the event the bound concerns.
    pub threshold: f64,
}

impl BoundResult {
    fn from_log(log_bound: f64, threshold: f64) -> Self {
        let log_bound = log_bound.min(0.0);
        Self {
            bound: log_bound.exp(),
            log_bound,
            threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Lower,
    Upper,
}

fn precondition(ok: bool, msg: impl FnOnce() -> String) -> Result<(), InputError> {
    if ok {
        Ok(())
    } else {
        Err(InputError::Precondition(msg()))
    }
}

/// `X_j` takes values `0` and `m_j <= eta2 * l` with `P[X_j = m_j] >= 1/2`
/// and `sum m_j >= eta1 * l`. Then `P[X < eta2 * l] <= exp(-eta1 / 8 eta2)`.
/// The threshold is reported per unit of `l`.
pub fn hoeffding_bound(eta1: f64, eta2: f64) -> Result<BoundResult, InputError> {
    precondition(eta2 > 0.0 && eta1 > 4.0 * eta2 && eta1.is_finite(), || {
        format!("need eta1 > 4 eta2 > 0, got eta1 = {eta1}, eta2 = {eta2}")
    })?;
    Ok(BoundResult::from_log(-eta1 / (8.0 * eta2), eta2))
}

/// Independent indicators with `P[X_i = 1] >= 1 - eta^2`:
/// `P[X < (1 - eta) r] <= eta`.
pub fn markov_bound(eta: f64, r: u64) -> Result<BoundResult, InputError> {
    precondition(eta > 0.0 && eta < 1.0, || format!("need 0 < eta < 1, got {eta}"))?;
    let threshold = (1.0 - eta) * r as f64;
    if r == 0 {
        return Ok(BoundResult::from_log(f64::NEG_INFINITY, threshold));
    }
    Ok(BoundResult::from_log(eta.ln(), threshold))
}

/// `P[X <= (1 - delta) mu] <= exp(-delta^2 mu / 2)` and
/// `P[X >= (1 + delta) mu] <= exp(-delta^2 mu / 3)`.
pub fn chernoff_bound(mu: f64, delta: f64, tail: Tail) -> Result<BoundResult, InputError> {
    precondition(mu >= 0.0 && mu.is_finite(), || format!("need mu >= 0, got {mu}"))?;
    precondition((0.0..=1.0).contains(&delta), || format!("need 0 <= delta <= 1, got {delta}"))?;
    Ok(match tail {
        Tail::Lower => BoundResult::from_log(-delta * delta * mu / 2.0, (1.0 - delta) * mu),
        Tail::Upper => BoundResult::from_log(-delta * delta * mu / 3.0, (1.0 + delta) * mu),
    })
}

/// A random experiment whose failure event one of the bounds above covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    /// `X = sum X_j`, `X_j = m_j` with probability `p`; fails when `X < eta2 * l`.
    Hoeffding { m: Vec<f64>, p: f64, ell: f64, eta2: f64 },
    /// `r` indicators each one with probability `p`; fails when `X < (1 - eta) r`.
    Markov { r: u64, p: f64, eta: f64 },
    /// `X ~ Bin(trials, p)`; fails in the given tail at relative distance `delta`.
    Chernoff { n: u64, p: f64, delta: f64, tail: Tail },
}

impl Scenario {
    pub fn analytic_bound(&self) -> Result<BoundResult, InputError> {
        match self {
            Scenario::Hoeffding { m, p, ell, eta2 } => {
                precondition(*p >= 0.5 && *p <= 1.0, || format!("need p in [1/2, 1], got {p}"))?;
                precondition(*ell > 0.0, || "need l > 0".into())?;
                let cap = eta2 * ell;
                precondition(m.iter().all(|&x| (0.0..=cap + 1e-12).contains(&x)), || {
                    format!("every m_j must lie in [0, {cap}]")
                })?;
                let eta1 = m.iter().sum::<f64>() / ell;
                hoeffding_bound(eta1, *eta2)
            }
            Scenario::Markov { r, p, eta } => {
                precondition(*p >= 1.0 - eta * eta && *p <= 1.0, || {
                    format!("need p >= 1 - eta^2 = {}, got {p}", 1.0 - eta * eta)
                })?;
                markov_bound(*eta, *r)
            }
            Scenario::Chernoff { n, p, delta, tail } => {
                precondition((0.0..=1.0).contains(p), || format!("need p in [0, 1], got {p}"))?;
                chernoff_bound(*n as f64 * p, *delta, *tail)
            }
        }
    }

    fn fails(&self, rng: &mut impl Rng) -> bool {
        match self {
            Scenario::Hoeffding { m, p, ell, eta2 } => {
                let x: f64 = m.iter().filter(|_| rng.gen_bool(*p)).sum();
                x < eta2 * ell
            }
            Scenario::Markov { r, p, eta } => {
                let x = (0..*r).filter(|_| rng.gen_bool(*p)).count() as f64;
                x < (1.0 - eta) * *r as f64
            }
            Scenario::Chernoff { n, p, delta, tail } => {
                let x = (0..*n).filter(|_| rng.gen_bool(*p)).count() as f64;
                let mu = *n as f64 * p;
                match tail {
                    Tail::Lower => x <= (1.0 - delta) * mu,
                    Tail::Upper => x >= (1.0 + delta) * mu,
                }
            }
        }
    }
}

/// Empirical failure frequency over `trials` seeded runs.
pub fn monte_carlo_validate(scenario: &Scenario, trials: u64, seed: u64) -> Result<f64, InputError> {
    precondition(trials >= 1, || "trials must be at least 1".into())?;
    let mut rng = stream(seed, "monte-carlo", 0);
    let failures = (0..trials).filter(|_| scenario.fails(&mut rng)).count();
    Ok(failures as f64 / trials as f64)
}

/// Three binomial standard deviations of a frequency estimated from
/// `trials` samples with success probability `p`.
pub fn three_sigma(p: f64, trials: u64) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hoeffding_values() {
        let r = hoeffding_bound(8.0, 1.0).unwrap();
        assert!((r.bound - (-1.0f64).exp()).abs() < 1e-15);
        assert!(hoeffding_bound(4.0, 1.0).is_err());
        assert!(hoeffding_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn paper_scale_hoeffding_stays_in_log_space() {
        let rho = 1e4;
        let r = hoeffding_bound(64.0 * rho, 1.0).unwrap();
        assert_eq!(r.log_bound, -8e4);
        assert_eq!(r.bound, 0.0);
    }

    #[test]
    fn markov_values() {
        let r = markov_bound(0.5, 10).unwrap();
        assert_eq!((r.threshold, r.bound), (5.0, 0.5));
        let r = markov_bound(0.3, 0).unwrap();
        assert_eq!((r.threshold, r.bound), (0.0, 0.0));
        assert!(markov_bound(1.0, 3).is_err());
    }

    #[test]
    fn chernoff_values() {
        let r = chernoff_bound(10.0, 1.0, Tail::Lower).unwrap();
        assert!((r.bound - (-5.0f64).exp()).abs() < 1e-15);
        for tail in [Tail::Lower, Tail::Upper] {
            assert_eq!(chernoff_bound(7.0, 0.0, tail).unwrap().bound, 1.0);
        }
        assert!(chernoff_bound(1.0, 1.5, Tail::Upper).is_err());
    }

    #[test]
    fn zero_trials_rejected() {
        let s = Scenario::Markov { r: 3, p: 1.0, eta: 0.5 };
        assert!(monte_carlo_validate(&s, 0, 1).is_err());
        assert_eq!(monte_carlo_validate(&s, 100, 1).unwrap(), 0.0);
    }
}
