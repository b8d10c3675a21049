//! k-selection mechanisms.
//!
//! Every randomized mechanism is split into a deterministic core and a
//! sampler that draws the core's randomness from a [`SeedRng`], so the exact
//! engine can enumerate the same randomness the sampler draws from.

mod edge_scan;
mod mrp;
mod optimal;
mod random_subset;
mod sliding;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Selection};
use crate::rng::SeedRng;

pub use edge_scan::edge_scan;
pub use mrp::{m_rp, m_rp_core, m_rp_sample, MrpRandomness};
pub(crate) use mrp::{mrp_fill_universe, mrp_quota_selection};
pub use optimal::optimal_select;
pub use random_subset::{random_subset, random_subset_sample};
pub use sliding::{sliding_partition, sliding_partition_sample};

/// A mechanism and its structural parameters. The selection size `k` is
/// supplied separately at run time.
///
/// Text syntax: `optimal`, `random-subset`, `mrp:m=<int>`, `edge-scan`,
/// `sliding-partition`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum MechanismSpec {
    Optimal,
    RandomSubset,
    Mrp { m: usize },
    EdgeScan,
    SlidingPartition,
}

impl MechanismSpec {
    pub fn is_deterministic(self) -> bool {
        matches!(self, MechanismSpec::Optimal | MechanismSpec::EdgeScan)
    }

    /// Checks `(n, k)` against the mechanism's requirements.
    pub fn validate(self, n: usize, k: usize) -> Result<()> {
        match self {
            MechanismSpec::EdgeScan => {
                if n < 2 {
                    return Err(Error::InvalidParameter(format!(
                        "edge-scan needs n >= 2, got {n}"
                    )));
                }
                Ok(())
            }
            MechanismSpec::SlidingPartition => {
                if k != 1 {
                    return Err(Error::InvalidParameter(format!(
                        "sliding-partition selects exactly one agent, got k={k}"
                    )));
                }
                Ok(())
            }
            MechanismSpec::Mrp { m: 0 } => Err(Error::InvalidParameter("mrp needs m >= 1".into())),
            _ => check_k(n, k),
        }
    }

    /// Draws one outcome, consuming randomness from `rng`.
    pub fn sample(self, g: &DirectedGraph, k: usize, rng: &mut SeedRng) -> Result<Selection> {
        self.validate(g.n(), k)?;
        match self {
            MechanismSpec::Optimal => optimal_select(g, k),
            MechanismSpec::RandomSubset => random_subset_sample(g, k, rng),
            MechanismSpec::Mrp { m } => m_rp_sample(g, k, m, rng),
            MechanismSpec::EdgeScan => edge_scan(g),
            MechanismSpec::SlidingPartition => sliding_partition_sample(g, rng),
        }
    }

    /// One run with a fresh random source seeded by `seed`.
    pub fn run(self, g: &DirectedGraph, k: usize, seed: u64) -> Result<Selection> {
        self.sample(g, k, &mut SeedRng::new(seed))
    }
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k must lie in 1..={n}, got {k}"
        )));
    }
    Ok(())
}

impl fmt::Display for MechanismSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MechanismSpec::Optimal => write!(f, "optimal"),
            MechanismSpec::RandomSubset => write!(f, "random-subset"),
            MechanismSpec::Mrp { m } => write!(f, "mrp:m={m}"),
            MechanismSpec::EdgeScan => write!(f, "edge-scan"),
            MechanismSpec::SlidingPartition => write!(f, "sliding-partition"),
        }
    }
}

impl FromStr for MechanismSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "optimal" => MechanismSpec::Optimal,
            "random-subset" => MechanismSpec::RandomSubset,
            "edge-scan" => MechanismSpec::EdgeScan,
            "sliding-partition" => MechanismSpec::SlidingPartition,
            _ => {
                let m = s
                    .strip_prefix("mrp:m=")
                    .and_then(|m| m.parse::<usize>().ok())
                    .ok_or_else(|| Error::UnknownMechanism(s.to_string()))?;
                if m == 0 {
                    return Err(Error::InvalidParameter("mrp needs m >= 1".into()));
                }
                MechanismSpec::Mrp { m }
            }
        })
    }
}

impl From<MechanismSpec> for String {
    fn from(spec: MechanismSpec) -> String {
        spec.to_string()
    }
}

impl TryFrom<String> for MechanismSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_random;

    #[test]
    fn spec_strings() {
        for s in [
            "optimal",
            "random-subset",
            "mrp:m=2",
            "mrp:m=13",
            "edge-scan",
            "sliding-partition",
        ] {
            let spec: MechanismSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("mrp:m=0".parse::<MechanismSpec>().is_err());
        assert!("mrp".parse::<MechanismSpec>().is_err());
        assert!("vcg".parse::<MechanismSpec>().is_err());
        let json = serde_json::to_string(&MechanismSpec::Mrp { m: 3 }).unwrap();
        assert_eq!(json, "\"mrp:m=3\"");
    }

    #[test]
    fn output_sizes_hold_on_random_inputs() {
        let mut rng = SeedRng::new(2024);
        for trial in 0..1000u64 {
            let n = 1 + rng.below_usize(9);
            let g = gen_random(n, 0.3, trial).unwrap();
            let k = 1 + rng.below_usize(n);
            let m = 1 + rng.below_usize(4);
            for spec in [
                MechanismSpec::Optimal,
                MechanismSpec::RandomSubset,
                MechanismSpec::Mrp { m },
            ] {
                assert_eq!(
                    spec.run(&g, k, trial).unwrap().len(),
                    k,
                    "{spec} n={n} k={k}"
                );
            }
            assert_eq!(
                MechanismSpec::SlidingPartition
                    .run(&g, 1, trial)
                    .unwrap()
                    .len(),
                1
            );
            if n >= 2 {
                let s = MechanismSpec::EdgeScan.run(&g, k, trial).unwrap();
                assert!((1..=2).contains(&s.len()));
            }
        }
    }

    #[test]
    fn parameter_checks() {
        let g = gen_random(4, 0.5, 0).unwrap();
        assert!(MechanismSpec::Optimal.run(&g, 0, 0).is_err());
        assert!(MechanismSpec::Optimal.run(&g, 5, 0).is_err());
        assert!(MechanismSpec::SlidingPartition.run(&g, 2, 0).is_err());
        assert!(MechanismSpec::Mrp { m: 0 }.run(&g, 1, 0).is_err());
        let single = DirectedGraph::empty(1).unwrap();
        assert!(MechanismSpec::EdgeScan.run(&single, 1, 0).is_err());
    }
}
