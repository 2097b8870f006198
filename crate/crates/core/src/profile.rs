//! Runtime constants for the partition pipeline.
//!
//! Every absolute constant the construction uses lives here so that a small
//! instance can run with rescaled values. Thresholds derived from these
//! constants are always rounded up to at least one vertex.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub name: String,
    pub rho: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    /// Required ratio between consecutive members of `tau1, tau2, tau3, rho`.
    pub separation: f64,
    /// Number of random classes per unit of `sigma3 * t` (`paper` profile: 16).
    pub class_factor: f64,
    /// Fraction `1 / select_divisor` of the good classes kept (`paper` profile: 8).
    pub select_divisor: f64,
    /// Gadgets per block, per unit of `k` (`paper` profile: 10).
    pub block_factor: usize,
    /// Smallest block, per unit of `k`, that linking accepts (`paper` profile: 3).
    pub min_link_factor: usize,
    /// Degree multiplier in G5 (`paper` profile: 10^12).
    pub g5_factor: f64,
    /// Degree multiplier in G7 to G9 (`paper` profile: 10^11).
    pub g7_factor: f64,
    /// Lower bound on `|V_good| / n` in G6 (`paper` profile: 1/2).
    pub good_fraction: f64,
    /// Eligible reservoir of a random class, as a fraction of `n` (`paper` profile: 1/4).
    pub class_reservoir: f64,
    /// Eligible reservoir of a block (`paper` profile: 1/10).
    pub block_reservoir: f64,
    /// Reservoir of a connected part (`paper` profile: 1/100).
    pub part_reservoir: f64,
    /// Reservoir of an extension step (`paper` profile: 1/1000).
    pub extension_reservoir: f64,
    /// Degree requirement `max(z_factor |Z|, z_kt_factor kt)` for leftover
    /// vertices (`paper` profile: 10^10 and 100).
    pub z_factor: f64,
    pub z_kt_factor: f64,
}

/// Values computed from a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub phi: f64,
}

impl Profile {
    pub fn paper() -> Self {
        Self {
            name: "paper".into(),
            rho: 1e4,
            sigma1: 1e60,
            sigma2: 1e4,
            sigma3: 10.0,
            tau1: 1e72,
            tau2: 1e68,
            tau3: 1e64,
            separation: 1e3,
            class_factor: 16.0,
            select_divisor: 8.0,
            block_factor: 10,
            min_link_factor: 3,
            g5_factor: 1e12,
            g7_factor: 1e11,
            good_fraction: 0.5,
            class_reservoir: 0.25,
            block_reservoir: 0.1,
            part_reservoir: 0.01,
            extension_reservoir: 0.001,
            z_factor: 1e10,
            z_kt_factor: 100.0,
        }
    }

    /// Tuned for random tournaments with a few thousand vertices, `k = 1`,
    /// `t = 2`.
    pub fn desk() -> Self {
        Self {
            name: "desk".into(),
            rho: 80.0,
            sigma1: 32.0,
            sigma2: 8.0,
            sigma3: 1.0,
            tau1: 64.0,
            tau2: 8.0,
            tau3: 2.0,
            separation: 2.0,
            class_factor: 2.0,
            select_divisor: 2.0,
            block_factor: 10,
            min_link_factor: 3,
            g5_factor: 8.0,
            g7_factor: 4.0,
            good_fraction: 0.5,
            class_reservoir: 0.25,
            block_reservoir: 0.1,
            part_reservoir: 0.01,
            extension_reservoir: 0.001,
            z_factor: 1.0,
            z_kt_factor: 100.0,
        }
    }

    /// For tournaments on at most a few dozen vertices.
    pub fn tiny() -> Self {
        Self {
            name: "tiny".into(),
            rho: 10.0,
            sigma1: 1.0,
            sigma2: 1.0,
            sigma3: 1.0,
            tau1: 4.0,
            tau2: 1.0,
            tau3: 1.0,
            separation: 1.0,
            class_factor: 1.0,
            select_divisor: 1.0,
            block_factor: 1,
            min_link_factor: 1,
            g5_factor: 1.0,
            g7_factor: 1.0,
            good_fraction: 0.25,
            class_reservoir: 0.1,
            block_reservoir: 0.05,
            part_reservoir: 0.01,
            extension_reservoir: 0.001,
            z_factor: 0.5,
            z_kt_factor: 1.0,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "paper" => Some(Self::paper()),
            "desk" => Some(Self::desk()),
            "tiny" => Some(Self::tiny()),
            _ => None,
        }
    }

    pub fn derived(&self) -> Derived {
        let phi0 = self.tau1 / 4.0;
        let phi1 = phi0 / (64.0 * self.rho);
        let phi2 = phi1 / (16384.0 * self.rho * self.rho);
        let phi3 = phi2 / (16384.0 * self.rho * self.rho);
        Derived {
            phi0,
            phi1,
            phi2,
            phi3,
            phi: self.class_factor * self.sigma3,
        }
    }

    /// Number of gadgets, `sigma1 k t`, or `None` if it does not fit a `usize`.
    pub fn gadget_count(&self, k: usize, t: usize) -> Option<usize> {
        count(self.sigma1 * (k * t) as f64)
    }

    /// Largest dominating-sequence step, `floor(rho / 10)`.
    pub fn sequence_cap(&self) -> usize {
        (self.rho / 10.0).floor().max(0.0) as usize
    }

    pub fn classes(&self, t: usize) -> usize {
        count((self.class_factor * self.sigma3).round() * t as f64).unwrap_or(usize::MAX).max(1)
    }

    pub fn blocks(&self, t: usize) -> usize {
        count((self.sigma3 * t as f64).ceil()).unwrap_or(usize::MAX).max(1)
    }

    pub fn is_paper_faithful(&self) -> bool {
        self.rho == 1e4
            && self.sigma1 == 1e60
            && self.sigma2 == 1e4
            && self.sigma3 == 10.0
            && self.separation > 1.0
            && self.tau1 >= self.separation * self.tau2
            && self.tau2 >= self.separation * self.tau3
            && self.tau3 >= self.separation * self.rho.max(self.sigma1).max(self.sigma2).max(self.sigma3)
    }

    /// Constant relations the construction relies on that this profile breaks.
    pub fn warnings(&self) -> Vec<String> {
        let d = self.derived();
        let mut w = Vec::new();
        let mut check = |ok: bool, msg: &str| {
            if !ok {
                w.push(msg.to_string());
            }
        };
        check(self.tau1 > self.tau2 && self.tau2 > self.tau3, "tau1 > tau2 > tau3 fails");
        check(self.tau3 > self.rho.max(self.sigma1), "tau3 exceeds rho and sigma1 fails");
        check(self.tau1 >= self.rho * self.sigma1, "tau1 >= rho sigma1 fails");
        check(2.0 * (self.sequence_cap() + 1) as f64 + 6.0 <= self.rho, "|S(alpha)| <= rho is not guaranteed");
        check(d.phi3 >= self.tau2, "phi3 >= tau2 fails");
        check(d.phi1 >= 1.0, "phi-cascade thresholds fall below one vertex and are clamped");
        check(
            self.sigma1 / (6f64.powi(10) * self.rho.powi(10)) >= self.sigma2,
            "sigma1 / (6 rho)^10 >= sigma2 fails",
        );
        check(
            self.sigma2 >= 2.0 * self.block_factor as f64 * d.phi,
            "classes are not expected to reach the block size",
        );
        check(self.min_link_factor >= 3, "blocks smaller than 3k gadgets are linked");
        w
    }
}

fn count(x: f64) -> Option<usize> {
    if (0.0..1e15).contains(&x) {
        Some(x.round() as usize)
    } else {
        None
    }
}

/// `ceil(x)` as a vertex count, at least one.
pub(crate) fn threshold(x: f64) -> usize {
    if !x.is_finite() || x > 1e15 {
        usize::MAX
    } else {
        (x.ceil() as usize).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_cascade() {
        let p = Profile::paper();
        let d = p.derived();
        assert_eq!(d.phi0, p.tau1 / 4.0);
        assert_eq!(d.phi1, d.phi0 / (64.0 * 1e4));
        assert_eq!(d.phi, 160.0);
        assert!(p.is_paper_faithful());
        assert!(!Profile::desk().is_paper_faithful());
    }

    #[test]
    fn paper_gadget_count_is_unrepresentable() {
        assert_eq!(Profile::paper().gadget_count(1, 2), None);
        assert_eq!(Profile::desk().gadget_count(1, 2), Some(64));
    }

    #[test]
    fn desk_profile_warns() {
        assert!(Profile::desk().warnings().iter().any(|w| w.contains("clamped")));
    }

    #[test]
    fn thresholds_clamp_to_one() {
        assert_eq!(threshold(0.001), 1);
        assert_eq!(threshold(2.5), 3);
    }
}
