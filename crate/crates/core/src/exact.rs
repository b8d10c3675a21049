//! Exact outcome distributions by full enumeration of a mechanism's
//! randomness.
//!
//! Every function here is generic over [`Probability`]; instantiate with
//! [`Rational`] for zero-tolerance audits. Enumeration accumulates integer
//! path counts per outcome and converts to `P` once at the end, so the
//! result does not depend on how the work is split across threads.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AgentId, DirectedGraph, Selection};
use crate::mechanisms::{
    edge_scan, mrp_fill_universe, mrp_quota_selection, optimal_select, MechanismSpec,
};
use crate::num::{binomial, for_each_combination, format_rational, Probability, Rational};

/// Default bound on enumerated randomness paths.
pub const DEFAULT_MAX_PATHS: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    pub max_paths: u128,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            max_paths: DEFAULT_MAX_PATHS,
        }
    }
}

/// Probability distribution over selections, keyed in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionDistribution<P> {
    n: usize,
    outcomes: BTreeMap<Selection, P>,
}

impl<P: Probability> SelectionDistribution<P> {
    pub fn point_mass(n: usize, selection: Selection) -> Self {
        let mut outcomes = BTreeMap::new();
        outcomes.insert(selection, P::one());
        SelectionDistribution { n, outcomes }
    }

    /// Builds a distribution from explicit atoms; zero-probability atoms are dropped.
    pub fn from_atoms(n: usize, atoms: impl IntoIterator<Item = (Selection, P)>) -> Self {
        let mut outcomes: BTreeMap<Selection, P> = BTreeMap::new();
        for (s, p) in atoms {
            if p.is_zero() {
                continue;
            }
            *outcomes.entry(s).or_insert_with(P::zero) += p;
        }
        SelectionDistribution { n, outcomes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn outcomes(&self) -> &BTreeMap<Selection, P> {
        &self.outcomes
    }

    pub fn probability(&self, s: &Selection) -> P {
        self.outcomes.get(s).cloned().unwrap_or_else(P::zero)
    }

    pub fn total_mass(&self) -> P {
        self.outcomes.values().fold(P::zero(), |mut acc, p| {
            acc += p.clone();
            acc
        })
    }

    /// `Pr[i in S]` for every agent, indexed by [`AgentId::index`].
    pub fn selection_probabilities(&self) -> Vec<P> {
        let mut probs = vec![P::zero(); self.n];
        for (s, p) in &self.outcomes {
            for a in s.members() {
                probs[a.index()] += p.clone();
            }
        }
        probs
    }

    pub fn probability_of(&self, i: AgentId) -> P {
        self.outcomes
            .iter()
            .filter(|(s, _)| s.contains(i))
            .fold(P::zero(), |mut acc, (_, p)| {
                acc += p.clone();
                acc
            })
    }

    /// Expected selection size; equals `k` for fixed-size mechanisms.
    pub fn expected_size(&self) -> P {
        self.outcomes.iter().fold(P::zero(), |mut acc, (s, p)| {
            acc += P::from_count(s.len() as u64) * p.clone();
            acc
        })
    }
}

/// `E[sum of indegrees of the selection]`.
///
/// Computed both per outcome and per agent (linearity); for exact scalars the
/// two are asserted equal.
pub fn expected_total_indegree<P: Probability>(
    g: &DirectedGraph,
    dist: &SelectionDistribution<P>,
) -> P {
    let by_outcome = dist.outcomes.iter().fold(P::zero(), |mut acc, (s, p)| {
        acc += P::from_count(s.total_indegree(g) as u64) * p.clone();
        acc
    });
    if P::EXACT {
        let deg = g.indegrees();
        let by_agent = dist.selection_probabilities().into_iter().zip(deg).fold(
            P::zero(),
            |mut acc, (p, d)| {
                acc += P::from_count(d as u64) * p;
                acc
            },
        );
        assert!(
            by_outcome == by_agent,
            "linearity identity failed: {by_outcome:?} vs {by_agent:?}"
        );
    }
    by_outcome
}

pub fn exact_distribution<P: Probability>(
    spec: MechanismSpec,
    g: &DirectedGraph,
    k: usize,
) -> Result<SelectionDistribution<P>> {
    exact_distribution_with(spec, g, k, &ExactConfig::default())
}

pub fn exact_distribution_with<P: Probability>(
    spec: MechanismSpec,
    g: &DirectedGraph,
    k: usize,
    config: &ExactConfig,
) -> Result<SelectionDistribution<P>> {
    spec.validate(g.n(), k)?;
    match spec {
        MechanismSpec::Optimal => Ok(SelectionDistribution::point_mass(
            g.n(),
            optimal_select(g, k)?,
        )),
        MechanismSpec::EdgeScan => Ok(SelectionDistribution::point_mass(g.n(), edge_scan(g)?)),
        MechanismSpec::RandomSubset => random_subset_exact(g.n(), k, config),
        MechanismSpec::Mrp { m } => mrp_exact(g, k, m, config),
        MechanismSpec::SlidingPartition => sliding_exact(g, config),
    }
}

fn too_large(what: impl Into<String>, required: impl ToString, config: &ExactConfig) -> Error {
    Error::TooLarge {
        what: what.into(),
        required: required.to_string(),
        bound: config.max_paths,
    }
}

fn random_subset_exact<P: Probability>(
    n: usize,
    k: usize,
    config: &ExactConfig,
) -> Result<SelectionDistribution<P>> {
    let total = binomial(n as u64, k as u64)
        .filter(|&c| c <= config.max_paths)
        .ok_or_else(|| too_large("random-subset", format!("C({n},{k})"), config))?;
    let mut atoms = Vec::with_capacity(total as usize);
    for_each_combination(n, k, |c| {
        atoms.push((Selection::from_indices(c.to_vec()), P::from_ratio(1, total)))
    });
    Ok(SelectionDistribution::from_atoms(n, atoms))
}

/// Upper bound on m-RP randomness paths: assignments x big-part choices x
/// the largest possible fill.
fn mrp_path_bound(n: usize, k: usize, m: usize) -> Option<u128> {
    let assignments = (m as u128).checked_pow(n as u32)?;
    let big = binomial(m as u64, (k % m) as u64)?;
    let mut fill = 1u128;
    for short in 1..=k {
        fill = fill.max(binomial((n - k + short) as u64, short as u64)?);
    }
    assignments.checked_mul(big)?.checked_mul(fill)
}

fn mrp_exact<P: Probability>(
    g: &DirectedGraph,
    k: usize,
    m: usize,
    config: &ExactConfig,
) -> Result<SelectionDistribution<P>> {
    let n = g.n();
    match mrp_path_bound(n, k, m) {
        Some(b) if b <= config.max_paths => {}
        Some(b) => return Err(too_large(format!("mrp:m={m} on n={n}, k={k}"), b, config)),
        None => {
            return Err(too_large(
                format!("mrp:m={m} on n={n}, k={k}"),
                "more than 2^128",
                config,
            ))
        }
    }
    let r = k % m;
    let mut big_choices = Vec::new();
    for_each_combination(m, r, |c| big_choices.push(c.to_vec()));
    let assignments = (m as u64).pow(n as u32);

    // (outcome, fill count) -> number of (assignment, big parts, fill) paths
    type Tally = HashMap<(Selection, u128), u128>;
    let tally: Tally = (0..assignments)
        .into_par_iter()
        .fold(Tally::new, |mut tally, code| {
            let mut assignment = vec![0usize; n];
            let mut rest = code;
            for slot in assignment.iter_mut() {
                *slot = (rest % m as u64) as usize;
                rest /= m as u64;
            }
            for big in &big_choices {
                let chosen = mrp_quota_selection(g, k, m, &assignment, big);
                if chosen.len() == k {
                    *tally
                        .entry((Selection::from_indices(chosen), 1))
                        .or_insert(0) += 1;
                    continue;
                }
                let universe = mrp_fill_universe(n, &chosen);
                let short = k - chosen.len();
                let fills = binomial(universe.len() as u64, short as u64).expect("bounded above");
                for_each_combination(universe.len(), short, |c| {
                    let mut s = chosen.clone();
                    s.extend(c.iter().map(|&pos| universe[pos]));
                    *tally
                        .entry((Selection::from_indices(s), fills))
                        .or_insert(0) += 1;
                });
            }
            tally
        })
        .reduce(Tally::new, |mut a, b| {
            for (key, count) in b {
                *a.entry(key).or_insert(0) += count;
            }
            a
        });

    let base = u128::from(assignments) * big_choices.len() as u128;
    let atoms = tally
        .into_iter()
        .map(|((s, fills), count)| (s, P::from_ratio(count, base * fills)));
    Ok(SelectionDistribution::from_atoms(n, atoms))
}

/// Dynamic program over eliminated sets.
fn sliding_exact<P: Probability>(
    g: &DirectedGraph,
    config: &ExactConfig,
) -> Result<SelectionDistribution<P>> {
    let n = g.n();
    let states = if n < 64 { Some(1u128 << n) } else { None };
    match states.and_then(|s| s.checked_mul(n as u128)) {
        Some(work) if work <= config.max_paths => {}
        _ => {
            return Err(too_large(
                format!("sliding-partition on n={n}"),
                format!("2^{n} * {n}"),
                config,
            ))
        }
    }
    let full = 1usize << n;
    let mut reach: Vec<Option<P>> = vec![None; full];
    reach[0] = Some(P::one());
    let mut atoms = Vec::with_capacity(n);
    let mut member = vec![false; n];
    for mask in 0..full {
        let Some(p) = reach[mask].take() else {
            continue;
        };
        let eliminated = mask.count_ones() as usize;
        if eliminated + 1 == n || n == 1 {
            let survivor = (0..n).find(|&i| mask >> i & 1 == 0).expect("one survivor");
            atoms.push((Selection::from_indices(vec![survivor]), p));
            continue;
        }
        for (i, flag) in member.iter_mut().enumerate() {
            *flag = mask >> i & 1 == 1;
        }
        let counts: Vec<(usize, usize)> = (0..n)
            .filter(|&i| !member[i])
            .map(|i| (i, g.indegree_from_mask(i, &member)))
            .collect();
        let low = counts.iter().map(|&(_, c)| c).min().expect("survivors");
        let tied: Vec<usize> = counts
            .iter()
            .filter(|&&(_, c)| c == low)
            .map(|&(i, _)| i)
            .collect();
        let mut share = p;
        share *= P::from_ratio(1, tied.len() as u128);
        for i in tied {
            let next = mask | 1 << i;
            match &mut reach[next] {
                Some(acc) => *acc += share.clone(),
                slot => *slot = Some(share.clone()),
            }
        }
    }
    Ok(SelectionDistribution::from_atoms(n, atoms))
}

/// JSON shape of an exact distribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub n: usize,
    pub outcomes: Vec<OutcomeEntry>,
    pub agents: Vec<AgentEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeEntry {
    pub members: Vec<u32>,
    pub p: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentEntry {
    pub agent: u32,
    pub p: String,
}

impl SelectionDistribution<Rational> {
    pub fn report(&self) -> DistributionReport {
        DistributionReport {
            n: self.n,
            outcomes: self
                .outcomes
                .iter()
                .map(|(s, p)| OutcomeEntry {
                    members: s.ids(),
                    p: format_rational(p),
                })
                .collect(),
            agents: self
                .selection_probabilities()
                .iter()
                .enumerate()
                .map(|(i, p)| AgentEntry {
                    agent: i as u32 + 1,
                    p: format_rational(p),
                })
                .collect(),
        }
    }
}
