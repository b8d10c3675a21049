//! Exhaustive deviation checks with exact probabilities.
//!
//! For every in-scope true graph, coalition, and joint misreport of the
//! coalition's outgoing edges, the exact selection probabilities of the
//! coalition members are compared. Probabilities for all graphs that can
//! occur are computed up front in parallel; the scan for a violation is
//! sequential in a fixed order, so the reported counterexample is always
//! the first one in (graph, coalition, report) order.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{exact_distribution_with, ExactConfig};
use crate::graph::{gen_random, AgentId, DirectedGraph};
use crate::mechanisms::MechanismSpec;
use crate::num::{for_each_combination, serde_rational_vec, Rational};

use super::Verdict;

/// Largest `n` for [`Scope::All`] (`2^(n(n-1))` graphs).
pub const MAX_ALL_SCOPE_N: usize = 4;

/// Which true graphs to audit.
#[derive(Debug, Clone, PartialEq)]
pub enum Scope {
    /// Every graph on `n` agents; an all-clear is a proof for this `n`.
    All,
    /// An explicit list; an all-clear holds for the listed graphs.
    Graphs(Vec<DirectedGraph>),
    /// `count` random graphs (edge probability 1/2, seeds `seed..seed+count`);
    /// an all-clear is reported as inconclusive.
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    /// No single agent changes its own selection probability by misreporting.
    Sp,
    /// No coalition of the given size has every member strictly gain.
    Gsp,
}

/// A deviation that breaks the audited property. Graphs are embedded in the
/// edge-list format; probabilities are exact `"num/den"` strings indexed by
/// agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub graph: DirectedGraph,
    pub coalition: Vec<u32>,
    pub reported: DirectedGraph,
    #[serde(with = "serde_rational_vec")]
    pub before: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub after: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub property: Property,
    pub mechanism: MechanismSpec,
    pub n: usize,
    pub k: usize,
    pub coalition_size: usize,
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    pub graphs_checked: u64,
    pub deviations_checked: u64,
    /// Wall-clock time; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub runtime: Duration,
}

impl AuditReport {
    /// Recomputes the counterexample from scratch. `Ok(true)` when it still
    /// demonstrates a violation and matches the recorded probabilities;
    /// `Ok(false)` when there is nothing to replay or it does not reproduce.
    pub fn replay(&self) -> Result<bool> {
        let Some(cx) = &self.counterexample else {
            return Ok(false);
        };
        let config = ExactConfig::default();
        let before = probabilities(self.mechanism, &cx.graph, self.k, &config)?;
        let after = probabilities(self.mechanism, &cx.reported, self.k, &config)?;
        if before != cx.before || after != cx.after {
            return Ok(false);
        }
        let members: Vec<AgentId> = cx.coalition.iter().map(|&a| AgentId::new(a)).collect();
        if !differs_only_in(&cx.graph, &cx.reported, &members) {
            return Ok(false);
        }
        Ok(match self.property {
            Property::Sp => members
                .iter()
                .any(|a| before[a.index()] != after[a.index()]),
            Property::Gsp => members.iter().all(|a| after[a.index()] > before[a.index()]),
        })
    }
}

fn differs_only_in(g: &DirectedGraph, h: &DirectedGraph, members: &[AgentId]) -> bool {
    g.n() == h.n()
        && g.agents()
            .filter(|a| !members.contains(a))
            .all(|a| g.out_neighbors(a).eq(h.out_neighbors(a)))
}

fn probabilities(
    spec: MechanismSpec,
    g: &DirectedGraph,
    k: usize,
    config: &ExactConfig,
) -> Result<Vec<Rational>> {
    Ok(exact_distribution_with::<Rational>(spec, g, k, config)?.selection_probabilities())
}

/// Largest `n` for any audit; graphs are handled as slot bitmasks.
pub const MAX_AUDIT_N: usize = 8;

fn scope_graphs(n: usize, scope: &Scope) -> Result<Vec<DirectedGraph>> {
    match scope {
        Scope::All => {
            if n > MAX_ALL_SCOPE_N {
                return Err(Error::TooLarge {
                    what: format!("all graphs on n={n}"),
                    required: format!("2^{}", DirectedGraph::slot_count(n)),
                    bound: 1 << DirectedGraph::slot_count(MAX_ALL_SCOPE_N),
                });
            }
            (0u64..1 << DirectedGraph::slot_count(n))
                .map(|code| DirectedGraph::from_code(n, code))
                .collect()
        }
        Scope::Graphs(list) => {
            if let Some(g) = list.iter().find(|g| g.n() != n) {
                return Err(Error::InvalidParameter(format!(
                    "scope graph has {} agents, audit is for n={n}",
                    g.n()
                )));
            }
            Ok(list.clone())
        }
        Scope::Sampled { count, seed } => (0..*count as u64)
            .map(|i| gen_random(n, 0.5, seed.wrapping_add(i)))
            .collect(),
    }
}

/// Calls `visit` with the code of every joint misreport of `coalition`
/// (zero-based agents), including the truthful one, in ascending order of
/// the joint report index. Member `t`'s report occupies bits
/// `t*(n-1)..(t+1)*(n-1)` of that index; within a report, bit `b` is the
/// `b`-th other agent. Stops early when `visit` returns `false`.
fn for_each_joint_report(
    n: usize,
    code: u64,
    coalition: &[usize],
    mut visit: impl FnMut(u64) -> bool,
) {
    let width = n - 1;
    let block = (1u64 << width) - 1;
    let base = coalition
        .iter()
        .fold(code, |c, &u| c & !(block << (u * width)));
    for joint in 0u64..1 << (width * coalition.len()) {
        let reported = coalition.iter().enumerate().fold(base, |c, (t, &u)| {
            c | (joint >> (t * width) & block) << (u * width)
        });
        if !visit(reported) {
            return;
        }
    }
}

fn audit(
    property: Property,
    spec: MechanismSpec,
    n: usize,
    k: usize,
    coalition_size: usize,
    scope: &Scope,
) -> Result<AuditReport> {
    let started = Instant::now();
    spec.validate(n, k)?;
    if n > MAX_AUDIT_N {
        return Err(Error::InvalidParameter(format!(
            "exhaustive misreports need n <= {MAX_AUDIT_N}, got {n}"
        )));
    }
    let config = ExactConfig::default();
    let truths: Vec<u64> = scope_graphs(n, scope)?
        .iter()
        .map(DirectedGraph::code)
        .collect();
    let mut coalitions: Vec<Vec<usize>> = Vec::new();
    for_each_combination(n, coalition_size, |c| coalitions.push(c.to_vec()));

    let needed: Vec<u64> = if matches!(scope, Scope::All) {
        (0u64..1 << DirectedGraph::slot_count(n)).collect()
    } else {
        let mut set: HashSet<u64> = HashSet::new();
        for &code in &truths {
            for c in &coalitions {
                for_each_joint_report(n, code, c, |r| {
                    set.insert(r);
                    true
                });
            }
        }
        let mut v: Vec<u64> = set.into_iter().collect();
        v.sort_unstable();
        v
    };
    let table: HashMap<u64, Vec<Rational>> = needed
        .par_iter()
        .map(|&code| {
            let g = DirectedGraph::from_code(n, code)?;
            Ok((code, probabilities(spec, &g, k, &config)?))
        })
        .collect::<Result<_>>()?;

    let mut deviations_checked = 0u64;
    let mut found: Option<(u64, Vec<usize>, u64)> = None;
    'scan: for &code in &truths {
        let before = &table[&code];
        for coalition in &coalitions {
            for_each_joint_report(n, code, coalition, |reported| {
                if reported == code {
                    return true;
                }
                deviations_checked += 1;
                let after = &table[&reported];
                let broken = match property {
                    Property::Sp => coalition.iter().any(|&a| before[a] != after[a]),
                    Property::Gsp => coalition.iter().all(|&a| after[a] > before[a]),
                };
                if broken {
                    found = Some((code, coalition.clone(), reported));
                }
                !broken
            });
            if found.is_some() {
                break 'scan;
            }
        }
    }

    let counterexample = found
        .map(|(code, coalition, reported)| -> Result<Counterexample> {
            Ok(Counterexample {
                graph: DirectedGraph::from_code(n, code)?,
                coalition: coalition.iter().map(|&a| a as u32 + 1).collect(),
                reported: DirectedGraph::from_code(n, reported)?,
                before: table[&code].clone(),
                after: table[&reported].clone(),
            })
        })
        .transpose()?;
    let verdict = match (&counterexample, scope) {
        (Some(_), _) => Verdict::Violated,
        (None, Scope::Sampled { .. }) => Verdict::Inconclusive,
        (None, _) => Verdict::Holds,
    };
    Ok(AuditReport {
        property,
        mechanism: spec,
        n,
        k,
        coalition_size,
        verdict,
        counterexample,
        graphs_checked: truths.len() as u64,
        deviations_checked,
        runtime: started.elapsed(),
    })
}

/// Strategyproofness: every agent's exact selection probability is the same
/// under all of its possible reports.
pub fn check_sp(spec: MechanismSpec, n: usize, k: usize, scope: &Scope) -> Result<AuditReport> {
    audit(Property::Sp, spec, n, k, 1, scope)
}

/// Group strategyproofness against coalitions of exactly `coalition_size`
/// agents (1 or 2): violated when every member strictly gains.
pub fn check_gsp(
    spec: MechanismSpec,
    n: usize,
    k: usize,
    coalition_size: usize,
    scope: &Scope,
) -> Result<AuditReport> {
    if !(1..=2).contains(&coalition_size) || coalition_size > n {
        return Err(Error::InvalidParameter(format!(
            "exhaustive coalition audits support sizes 1 and 2 (at most n), got {coalition_size}"
        )));
    }
    audit(Property::Gsp, spec, n, k, coalition_size, scope)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mutual_pair() -> DirectedGraph {
        DirectedGraph::new(2, [(1, 2), (2, 1)]).unwrap()
    }

    #[test]
    fn optimal_two_agent_counterexample() {
        let scope = Scope::Graphs(vec![mutual_pair()]);
        let report = check_sp(MechanismSpec::Optimal, 2, 1, &scope).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let cx = report.counterexample.as_ref().unwrap();
        assert_eq!(cx.coalition, vec![2]);
        assert_eq!(cx.reported, DirectedGraph::new(2, [(1, 2)]).unwrap());
        assert!(report.replay().unwrap());
    }

    #[test]
    fn random_subset_holds() {
        for n in 2..=3 {
            for k in 1..n {
                let r = check_sp(MechanismSpec::RandomSubset, n, k, &Scope::All).unwrap();
                assert_eq!(r.verdict, Verdict::Holds);
                assert_eq!(r.graphs_checked, 1 << DirectedGraph::slot_count(n));
                assert!(!r.replay().unwrap());
            }
        }
    }

    #[test]
    fn sampled_scope_is_inconclusive() {
        let scope = Scope::Sampled { count: 5, seed: 3 };
        let r = check_sp(MechanismSpec::Mrp { m: 2 }, 5, 2, &scope).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.graphs_checked, 5);
    }

    #[test]
    fn scope_guards() {
        assert!(matches!(
            check_sp(MechanismSpec::RandomSubset, 5, 1, &Scope::All),
            Err(Error::TooLarge { .. })
        ));
        let wrong = Scope::Graphs(vec![DirectedGraph::empty(3).unwrap()]);
        assert!(check_sp(MechanismSpec::RandomSubset, 2, 1, &wrong).is_err());
        assert!(check_gsp(MechanismSpec::RandomSubset, 3, 1, 3, &Scope::All).is_err());
    }

    #[test]
    fn gsp_counterexample_replays() {
        // 3 and 4 each point at a winner; reporting each other swaps them in
        let g = DirectedGraph::new(4, [(3, 1), (4, 2)]).unwrap();
        let r = check_gsp(MechanismSpec::Optimal, 4, 2, 2, &Scope::Graphs(vec![g])).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.counterexample.as_ref().unwrap().coalition.len(), 2);
        assert!(r.replay().unwrap());
    }

    #[test]
    fn tampered_counterexample_fails_replay() {
        let scope = Scope::Graphs(vec![mutual_pair()]);
        let mut report = check_sp(MechanismSpec::Optimal, 2, 1, &scope).unwrap();
        report.counterexample.as_mut().unwrap().after.swap(0, 1);
        assert!(!report.replay().unwrap());
    }

    #[test]
    fn report_json_roundtrip() {
        let scope = Scope::Graphs(vec![mutual_pair()]);
        let report = check_sp(MechanismSpec::Optimal, 2, 1, &scope).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"graph\":\"n 2\\nedge 1 2\\nedge 2 1\\n\""));
        assert!(json.contains("\"verdict\":\"violated\""));
        let back: AuditReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.counterexample, report.counterexample);
        assert!(back.replay().unwrap());
    }
}
