use serde_json::json;

use crate::error::Result;
use crate::exact::{exact_distribution_with, expected_total_indegree, ExactConfig};
use crate::graph::DirectedGraph;
use crate::mechanisms::{check_k, MechanismSpec};
use crate::num::{Probability, ReportScalar};

/// Maximum total indegree over all `k`-subsets: the sum of the `k` largest
/// indegrees.
pub fn opt_value(g: &DirectedGraph, k: usize) -> Result<u64> {
    check_k(g.n(), k)?;
    let mut deg = g.indegrees();
    deg.sort_unstable_by(|a, b| b.cmp(a));
    Ok(deg.iter().take(k).map(|&d| d as u64).sum())
}

/// `OPT / E[value]`, or infinite when the mechanism scores zero against a
/// positive optimum. A zero optimum counts as ratio 1.
#[derive(Debug, Clone, PartialEq)]
pub enum RatioValue<P> {
    Finite(P),
    Infinite,
}

impl<P: ReportScalar> RatioValue<P> {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            RatioValue::Finite(p) => p.to_json(),
            RatioValue::Infinite => json!("inf"),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            RatioValue::Finite(p) => p.to_text(),
            RatioValue::Infinite => "inf".into(),
        }
    }
}

impl<P: Probability> RatioValue<P> {
    pub fn to_f64(&self) -> f64 {
        match self {
            RatioValue::Finite(p) => p.to_f64(),
            RatioValue::Infinite => f64::INFINITY,
        }
    }

    pub(crate) fn of(opt: u64, expected: &P) -> Self {
        if opt == 0 {
            RatioValue::Finite(P::one())
        } else if expected.is_zero() {
            RatioValue::Infinite
        } else {
            let mut r = P::from_count(opt);
            r /= expected.clone();
            RatioValue::Finite(r)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioMode {
    Exact,
    MonteCarlo,
}

impl RatioMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RatioMode::Exact => "exact",
            RatioMode::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioEstimate<P> {
    pub mode: RatioMode,
    pub opt: u64,
    pub expected: P,
    pub ratio: RatioValue<P>,
    /// Monte Carlo only.
    pub trials: Option<u64>,
    /// 99% interval for the ratio, Monte Carlo only.
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

impl<P: ReportScalar> RatioEstimate<P> {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "mode": self.mode.as_str(),
            "opt": self.opt,
            "expected": self.expected.to_json(),
            "ratio": self.ratio.to_json(),
        });
        if let Some(trials) = self.trials {
            v["trials"] = json!(trials);
            v["ci_low"] = self.ci_low.unwrap_or(f64::NAN).to_json();
            v["ci_high"] = self.ci_high.unwrap_or(f64::NAN).to_json();
        }
        v
    }
}

/// Exact ratio on one graph.
pub fn approx_ratio_exact<P: Probability>(
    spec: MechanismSpec,
    g: &DirectedGraph,
    k: usize,
) -> Result<RatioEstimate<P>> {
    approx_ratio_exact_with(spec, g, k, &ExactConfig::default())
}

pub(crate) fn approx_ratio_exact_with<P: Probability>(
    spec: MechanismSpec,
    g: &DirectedGraph,
    k: usize,
    config: &ExactConfig,
) -> Result<RatioEstimate<P>> {
    let dist = exact_distribution_with::<P>(spec, g, k, config)?;
    let expected = expected_total_indegree(g, &dist);
    let opt = opt_value(g, k)?;
    Ok(RatioEstimate {
        mode: RatioMode::Exact,
        opt,
        ratio: RatioValue::of(opt, &expected),
        expected,
        trials: None,
        ci_low: None,
        ci_high: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_cycle, gen_named, gen_random, gen_single_edge, gen_star};
    use crate::num::{for_each_combination, Rational};

    fn q(a: u128, b: u128) -> Rational {
        Rational::from_ratio(a, b)
    }

    #[test]
    fn opt_examples() {
        assert_eq!(opt_value(&gen_named("figure2").unwrap(), 2).unwrap(), 5);
        assert_eq!(opt_value(&DirectedGraph::empty(5).unwrap(), 3).unwrap(), 0);
        for n in 2..=7 {
            for k in 1..n {
                assert_eq!(opt_value(&gen_cycle(k, n).unwrap(), k).unwrap(), k as u64);
            }
        }
        assert!(opt_value(&DirectedGraph::empty(3).unwrap(), 4).is_err());
    }

    #[test]
    fn opt_matches_brute_force() {
        for seed in 0..100 {
            let n = 2 + (seed % 7) as usize;
            let g = gen_random(n, 0.45, seed).unwrap();
            let deg = g.indegrees();
            for k in 1..=n {
                let mut best = 0u64;
                for_each_combination(n, k, |c| {
                    best = best.max(c.iter().map(|&i| deg[i] as u64).sum());
                });
                assert_eq!(opt_value(&g, k).unwrap(), best);
            }
        }
    }

    #[test]
    fn optimal_ratio_is_one() {
        let g = gen_named("figure2").unwrap();
        let r = approx_ratio_exact::<Rational>(MechanismSpec::Optimal, &g, 2).unwrap();
        assert_eq!(r.ratio, RatioValue::Finite(q(1, 1)));
    }

    #[test]
    fn random_subset_on_full_star() {
        let g = gen_star(&[true; 5]).unwrap();
        let r = approx_ratio_exact::<Rational>(MechanismSpec::RandomSubset, &g, 1).unwrap();
        assert_eq!(r.ratio, RatioValue::Finite(q(6, 1)));
        assert_eq!(r.to_json()["ratio"], "6/1");
    }

    #[test]
    fn two_partition_single_edge_is_just_below_four() {
        let g = gen_single_edge(8).unwrap();
        let r = approx_ratio_exact::<Rational>(MechanismSpec::Mrp { m: 2 }, &g, 1).unwrap();
        let v = r.ratio.to_f64();
        assert!((3.8..4.0).contains(&v), "{v}");
    }

    #[test]
    fn zero_opt_and_infinite_conventions() {
        let g = DirectedGraph::empty(3).unwrap();
        let r = approx_ratio_exact::<Rational>(MechanismSpec::RandomSubset, &g, 1).unwrap();
        assert_eq!(r.ratio, RatioValue::Finite(q(1, 1)));
        // one part always yields agent 1, which has no incoming edge here
        let g = DirectedGraph::new(3, [(3, 2)]).unwrap();
        let r = approx_ratio_exact::<Rational>(MechanismSpec::Mrp { m: 1 }, &g, 1).unwrap();
        assert_eq!(r.ratio, RatioValue::Infinite);
        assert_eq!(r.to_json()["ratio"], "inf");
    }
}
