//! Seeded Monte Carlo estimation.
//!
//! Trial `t` draws from stream `t` of the master seed (see [`crate::rng`]),
//! and per-trial results are combined with integer sums, so the output is
//! identical however rayon schedules the trials.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Selection};
use crate::mechanisms::MechanismSpec;
use crate::rng::SeedRng;

use super::ratio::{opt_value, RatioEstimate, RatioMode, RatioValue};

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;
/// Two-sided 99.9% standard normal quantile.
pub const Z_999: f64 = 3.290_526_731_491_926;

/// Outcome counts over `trials` seeded runs.
pub fn sample_frequencies(
    spec: MechanismSpec,
    g: &DirectedGraph,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<BTreeMap<Selection, u64>> {
    spec.validate(g.n(), k)?;
    (0..trials)
        .into_par_iter()
        .try_fold(BTreeMap::new, |mut acc, t| {
            let s = spec.sample(g, k, &mut SeedRng::with_stream(seed, t))?;
            *acc.entry(s).or_insert(0u64) += 1;
            Ok(acc)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (s, c) in b {
                *a.entry(s).or_insert(0) += c;
            }
            Ok(a)
        })
}

/// Ratio `OPT / mean` over `trials` runs with a 99% normal-approximation
/// interval mapped through `OPT / x`.
pub fn approx_ratio_mc(
    spec: MechanismSpec,
    g: &DirectedGraph,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<RatioEstimate<f64>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    spec.validate(g.n(), k)?;
    let opt = opt_value(g, k)?;
    let (sum, sum_sq) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = spec.sample(g, k, &mut SeedRng::with_stream(seed, t))?;
            let v = s.total_indegree(g) as u128;
            Ok((v, v * v))
        })
        .try_reduce(|| (0u128, 0u128), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;

    let t = trials as f64;
    let mean = sum as f64 / t;
    let var = if trials > 1 {
        // exact integer numerator avoids cancellation
        let num = (trials as u128 * sum_sq - sum * sum) as f64;
        num / (t * (t - 1.0))
    } else {
        0.0
    };
    let half = Z_99 * (var / t).sqrt();
    let ratio = RatioValue::of(opt, &mean);
    let (ci_low, ci_high) = if opt == 0 {
        (1.0, 1.0)
    } else {
        let o = opt as f64;
        let low = if mean + half > 0.0 {
            o / (mean + half)
        } else {
            f64::INFINITY
        };
        let high = if mean - half > 0.0 {
            o / (mean - half)
        } else {
            f64::INFINITY
        };
        (low, high)
    };
    Ok(RatioEstimate {
        mode: RatioMode::MonteCarlo,
        opt,
        expected: mean,
        ratio,
        trials: Some(trials),
        ci_low: Some(ci_low),
        ci_high: Some(ci_high),
    })
}

/// Normal-approximation interval `p ± z·sqrt(p(1-p)/trials)` for a count
/// with true probability `p`, clipped to `[0, 1]`.
pub fn binomial_interval(p: f64, trials: u64, z: f64) -> (f64, f64) {
    let half = z * (p * (1.0 - p) / trials as f64).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}
