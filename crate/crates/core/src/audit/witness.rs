//! Constructive lower-bound arguments run against a concrete mechanism.
//!
//! These do not prove bounds for all mechanisms; they execute the
//! construction on one mechanism and report whether the bound it implies
//! is met, with exact probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{exact_distribution, expected_total_indegree};
use crate::graph::{gen_cycle, AgentId, DirectedGraph};
use crate::mechanisms::MechanismSpec;
use crate::num::{format_rational, Probability, Rational};

use super::ratio::{opt_value, RatioValue};

/// Cycle construction for randomized SP mechanisms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleWitness {
    pub mechanism: MechanismSpec,
    pub n: usize,
    pub k: usize,
    /// Cycle agent with the lowest selection probability on the cycle.
    pub agent: Option<u32>,
    pub probability_on_cycle: Option<String>,
    /// `k / (k + 1)`.
    pub threshold: String,
    pub probability_after_cut: Option<String>,
    pub ratio_cycle: String,
    pub ratio_cut: Option<String>,
    /// Larger of the two ratios.
    pub witness_ratio: Option<String>,
    /// `1 + 1/(k^2 + k - 1)`.
    pub bound: String,
    /// The agent's probability did not change when it dropped its edge.
    pub sp_premise_holds: bool,
    pub meets_bound: bool,
    #[serde(skip)]
    pub witness_ratio_value: Option<RatioValue<Rational>>,
}

fn ratio_of(
    spec: MechanismSpec,
    g: &DirectedGraph,
    k: usize,
) -> Result<(RatioValue<Rational>, Vec<Rational>)> {
    let dist = exact_distribution::<Rational>(spec, g, k)?;
    let expected = expected_total_indegree(g, &dist);
    let opt = opt_value(g, k)?;
    Ok((
        RatioValue::of(opt, &expected),
        dist.selection_probabilities(),
    ))
}

fn ratio_ge(r: &RatioValue<Rational>, bound: &Rational) -> bool {
    match r {
        RatioValue::Finite(v) => v >= bound,
        RatioValue::Infinite => true,
    }
}

fn max_ratio(a: RatioValue<Rational>, b: RatioValue<Rational>) -> RatioValue<Rational> {
    match (a, b) {
        (RatioValue::Finite(x), RatioValue::Finite(y)) => RatioValue::Finite(x.max(y)),
        _ => RatioValue::Infinite,
    }
}

/// Builds the `(k+1)`-cycle, finds a cycle agent selected with probability at
/// most `k/(k+1)`, cuts its outgoing edge, and reports the larger of the two
/// ratios against `1 + 1/(k^2 + k - 1)`.
pub fn cycle_lower_bound_witness(spec: MechanismSpec, n: usize, k: usize) -> Result<CycleWitness> {
    let g = gen_cycle(k, n)?;
    let (ratio_cycle, probs) = ratio_of(spec, &g, k)?;
    let threshold = Rational::from_ratio(k as u128, k as u128 + 1);
    let kk = (k * k + k - 1) as u128;
    let bound = Rational::from_ratio(kk + 1, kk);

    let agent = (0..=k)
        .filter(|&i| probs[i] <= threshold)
        .min_by(|&a, &b| probs[a].cmp(&probs[b]).then(a.cmp(&b)))
        .map(AgentId::from_index);
    let mut witness = CycleWitness {
        mechanism: spec,
        n,
        k,
        agent: agent.map(AgentId::get),
        probability_on_cycle: agent.map(|a| format_rational(&probs[a.index()])),
        threshold: format_rational(&threshold),
        probability_after_cut: None,
        ratio_cycle: ratio_cycle.to_text(),
        ratio_cut: None,
        witness_ratio: None,
        bound: format_rational(&bound),
        sp_premise_holds: false,
        meets_bound: false,
        witness_ratio_value: None,
    };
    let Some(agent) = agent else {
        return Ok(witness);
    };
    let cut = g.with_out_edges(agent, &[])?;
    let (ratio_cut, probs_cut) = ratio_of(spec, &cut, k)?;
    let combined = max_ratio(ratio_cycle, ratio_cut.clone());
    witness.probability_after_cut = Some(format_rational(&probs_cut[agent.index()]));
    witness.sp_premise_holds = probs_cut[agent.index()] == probs[agent.index()];
    witness.ratio_cut = Some(ratio_cut.to_text());
    witness.witness_ratio = Some(combined.to_text());
    witness.meets_bound = ratio_ge(&combined, &bound);
    witness.witness_ratio_value = Some(combined);
    Ok(witness)
}

/// Two-agent construction for randomized GSP mechanisms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GspWitness {
    pub mechanism: MechanismSpec,
    pub n: usize,
    pub k: usize,
    /// The two least likely agents on the empty graph.
    pub pair: [u32; 2],
    pub empty_probabilities: [String; 2],
    pub mutual_probabilities: [String; 2],
    /// Pair member that does not gain from the mutual edges; `None` when
    /// both strictly gain, which is a GSP violation.
    pub target: Option<u32>,
    /// Probability of `target` when only the other agent points at it.
    pub single_edge_probability: Option<String>,
    pub ratio: Option<String>,
    /// `(n - 1) / k`.
    pub bound: String,
    pub meets_bound: bool,
    pub gsp_violation: bool,
    #[serde(skip)]
    pub ratio_value: Option<RatioValue<Rational>>,
}

pub fn gsp_lower_bound_witness(spec: MechanismSpec, n: usize, k: usize) -> Result<GspWitness> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("needs n >= 2, got {n}")));
    }
    let empty = DirectedGraph::empty(n)?;
    let probs = exact_distribution::<Rational>(spec, &empty, k)?.selection_probabilities();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| probs[a].cmp(&probs[b]).then(a.cmp(&b)));
    let (i, j) = (AgentId::from_index(order[0]), AgentId::from_index(order[1]));

    let mutual = DirectedGraph::new(n, [(i.get(), j.get()), (j.get(), i.get())])?;
    let mutual_probs = exact_distribution::<Rational>(spec, &mutual, k)?.selection_probabilities();
    let target = [(i, j), (j, i)]
        .into_iter()
        .find(|(a, _)| mutual_probs[a.index()] <= probs[a.index()]);
    let bound = Rational::from_ratio(n as u128 - 1, k as u128);

    let mut witness = GspWitness {
        mechanism: spec,
        n,
        k,
        pair: [i.get(), j.get()],
        empty_probabilities: [i, j].map(|a| format_rational(&probs[a.index()])),
        mutual_probabilities: [i, j].map(|a| format_rational(&mutual_probs[a.index()])),
        target: target.map(|(a, _)| a.get()),
        single_edge_probability: None,
        ratio: None,
        bound: format_rational(&bound),
        meets_bound: false,
        gsp_violation: target.is_none(),
        ratio_value: None,
    };
    if let Some((a, b)) = target {
        let single = DirectedGraph::new(n, [(b.get(), a.get())])?;
        let (ratio, single_probs) = ratio_of(spec, &single, k)?;
        witness.single_edge_probability = Some(format_rational(&single_probs[a.index()]));
        witness.ratio = Some(ratio.to_text());
        witness.meets_bound = ratio_ge(&ratio, &bound);
        witness.ratio_value = Some(ratio);
    }
    Ok(witness)
}
