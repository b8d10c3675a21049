//! Random m-Partition.
//!
//! 1. every agent joins one of `m` parts uniformly and independently;
//! 2. a uniform set `T` of `k mod m` parts is chosen;
//! 3. part `t` contributes its `ceil(k/m)` (if `t` in `T`) or `floor(k/m)`
//!    agents of highest indegree counted only over edges from outside the
//!    part, ties to the smaller index, or the whole part if it is too small;
//! 4. any shortfall is filled by a uniform subset of the unselected agents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Selection};
use crate::rng::SeedRng;

use super::check_k;

/// The complete random input of one m-RP run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrpRandomness {
    /// Part of each agent, zero-based (`assignment[i] < m`).
    pub assignment: Vec<usize>,
    /// Parts that contribute the rounded-up quota; sorted, size `k mod m`.
    pub big_parts: Vec<usize>,
    /// Step-4 completion: sorted positions into the ascending list of agents
    /// left unselected by step 3. Empty unless step 3 falls short.
    pub fill: Vec<usize>,
}

impl MrpRandomness {
    /// Number of agents step 3 selects for these part sizes.
    fn quota_total(&self, k: usize, m: usize) -> usize {
        let mut sizes = vec![0usize; m];
        for &p in &self.assignment {
            sizes[p] += 1;
        }
        sizes
            .iter()
            .enumerate()
            .map(|(t, &s)| s.min(quota(k, m, t, &self.big_parts)))
            .sum()
    }

    pub fn validate(&self, n: usize, k: usize, m: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(format!("mrp randomness: {msg}")));
        if self.assignment.len() != n {
            return bad(format!(
                "{} assignments for {n} agents",
                self.assignment.len()
            ));
        }
        if let Some(p) = self.assignment.iter().find(|&&p| p >= m) {
            return bad(format!("part {p} out of range for m={m}"));
        }
        if self.big_parts.len() != k % m {
            return bad(format!(
                "expected {} big parts, got {}",
                k % m,
                self.big_parts.len()
            ));
        }
        if !strictly_increasing_below(&self.big_parts, m) {
            return bad("big parts must be sorted, distinct and < m".into());
        }
        let selected = self.quota_total(k, m);
        let shortfall = k - selected;
        if self.fill.len() != shortfall {
            return bad(format!(
                "step 3 selects {selected}, so fill needs {shortfall} entries, got {}",
                self.fill.len()
            ));
        }
        if !strictly_increasing_below(&self.fill, n - selected) {
            return bad(
                "fill positions must be sorted, distinct and index unselected agents".into(),
            );
        }
        Ok(())
    }
}

fn strictly_increasing_below(v: &[usize], bound: usize) -> bool {
    v.windows(2).all(|w| w[0] < w[1]) && v.last().is_none_or(|&x| x < bound)
}

fn quota(k: usize, m: usize, part: usize, big_parts: &[usize]) -> usize {
    k / m + usize::from(big_parts.binary_search(&part).is_ok())
}

/// Step 3: zero-based agents chosen by quota, before any fill.
pub(crate) fn mrp_quota_selection(
    g: &DirectedGraph,
    k: usize,
    m: usize,
    assignment: &[usize],
    big_parts: &[usize],
) -> Vec<usize> {
    let n = g.n();
    let mut parts: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for i in 0..n {
        let own = assignment[i];
        let cross = g
            .in_idx(i)
            .iter()
            .filter(|&&j| assignment[j as usize] != own)
            .count();
        parts[own].push((cross, i));
    }
    let mut chosen = Vec::with_capacity(k);
    for (t, members) in parts.iter_mut().enumerate() {
        let q = quota(k, m, t, big_parts);
        if q == 0 {
            continue;
        }
        members.sort_unstable_by_key(|&(cross, i)| (std::cmp::Reverse(cross), i));
        chosen.extend(members.iter().take(q).map(|&(_, i)| i));
    }
    chosen
}

/// Unselected agents in ascending order; step-4 positions index this list.
pub(crate) fn mrp_fill_universe(n: usize, chosen: &[usize]) -> Vec<usize> {
    let mut taken = vec![false; n];
    for &i in chosen {
        taken[i] = true;
    }
    (0..n).filter(|&i| !taken[i]).collect()
}

/// Deterministic m-RP given all of its randomness.
pub fn m_rp_core(
    g: &DirectedGraph,
    k: usize,
    m: usize,
    randomness: &MrpRandomness,
) -> Result<Selection> {
    check_k(g.n(), k)?;
    if m == 0 {
        return Err(Error::InvalidParameter("mrp needs m >= 1".into()));
    }
    randomness.validate(g.n(), k, m)?;
    let mut chosen = mrp_quota_selection(g, k, m, &randomness.assignment, &randomness.big_parts);
    let universe = mrp_fill_universe(g.n(), &chosen);
    chosen.extend(randomness.fill.iter().map(|&pos| universe[pos]));
    Ok(Selection::from_indices(chosen))
}

/// Samples m-RP from `seed`.
pub fn m_rp(g: &DirectedGraph, k: usize, m: usize, seed: u64) -> Result<Selection> {
    m_rp_sample(g, k, m, &mut SeedRng::new(seed))
}

/// Draw order: `n` part indices, then the big parts, then the fill.
pub fn m_rp_sample(g: &DirectedGraph, k: usize, m: usize, rng: &mut SeedRng) -> Result<Selection> {
    check_k(g.n(), k)?;
    if m == 0 {
        return Err(Error::InvalidParameter("mrp needs m >= 1".into()));
    }
    let n = g.n();
    let assignment: Vec<usize> = (0..n).map(|_| rng.below_usize(m)).collect();
    let big_parts = rng.subset(m, k % m);
    let mut chosen = mrp_quota_selection(g, k, m, &assignment, &big_parts);
    if chosen.len() < k {
        let universe = mrp_fill_universe(n, &chosen);
        let fill = rng.subset(universe.len(), k - chosen.len());
        chosen.extend(fill.into_iter().map(|pos| universe[pos]));
    }
    Ok(Selection::from_indices(chosen))
}
