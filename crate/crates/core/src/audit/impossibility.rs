//! Exhaustive search for deterministic strategyproof selection rules on the
//! star domain.
//!
//! A rule restricted to stars centred on agent `n` is a table
//! `f: {0,1}^(n-1) -> k-subsets`, where bit `i-1` of the cube index says
//! whether `i -> n` is reported. A rule with a finite approximation ratio
//! must satisfy
//!
//! 1. `n ∉ f(0)`,
//! 2. `n ∈ f(x)` for every `x ≠ 0`,
//! 3. `i ∈ f(x) ⟺ i ∈ f(x ⊕ e_i)` for every `i < n` (strategyproofness),
//!
//! after relabelling so that `n` is an agent left out on the empty graph.
//! The search counts tables meeting all three; the parity audit checks the
//! counting argument that makes the count zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Selection;
use crate::num::for_each_combination;
use crate::rng::SeedRng;

/// A complete rule on the star domain, indexed by cube point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    pub n: usize,
    pub k: usize,
    pub values: Vec<Selection>,
}

impl FunctionTable {
    fn check(&self) -> Result<()> {
        if self.n < 2 || self.n > 20 {
            return Err(Error::IncompleteTable(format!(
                "star tables need 2 <= n <= 20, got n={}",
                self.n
            )));
        }
        let points = 1usize << (self.n - 1);
        if self.values.len() != points {
            return Err(Error::IncompleteTable(format!(
                "{} entries for {points} cube points",
                self.values.len()
            )));
        }
        for (x, s) in self.values.iter().enumerate() {
            if s.len() != self.k || s.members().iter().any(|a| a.index() >= self.n) {
                return Err(Error::IncompleteTable(format!(
                    "entry {x} is {s}, not a {}-subset of 1..={}",
                    self.k, self.n
                )));
            }
        }
        Ok(())
    }

    fn masks(&self) -> Vec<u32> {
        self.values.iter().map(selection_mask).collect()
    }
}

fn selection_mask(s: &Selection) -> u32 {
    s.members().iter().fold(0, |m, a| m | 1 << a.index())
}

fn mask_selection(mask: u32) -> Selection {
    Selection::from_indices((0..32).filter(|i| mask >> i & 1 == 1).collect())
}

/// Parity bookkeeping for one table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityReport {
    pub n: usize,
    pub k: usize,
    /// `|{x : i ∈ f(x)}|` for agents `1..=n`.
    pub counts: Vec<u64>,
    /// `'1'` where the count is odd, `'0'` where even, agent 1 first.
    pub parity: String,
    /// `Σ_x |f(x)|`, which equals `2^(n-1) * k`.
    pub total: u64,
    pub hub_odd: bool,
    pub total_even: bool,
    /// Non-hub agents whose count is odd.
    pub odd_non_hub: Vec<u32>,
    pub satisfies_hub_constraints: bool,
    pub satisfies_sp: bool,
    /// Hub constraints hold, so the hub count is `2^(n-1) - 1` (odd) while
    /// the total is even: some non-hub count must be odd, contradicting SP.
    pub forces_contradiction: bool,
}

pub fn parity_audit(table: &FunctionTable) -> Result<ParityReport> {
    table.check()?;
    Ok(parity_of_masks(table.n, table.k, &table.masks()))
}

fn hub_constraints(n: usize, masks: &[u32]) -> bool {
    let hub = 1u32 << (n - 1);
    masks[0] & hub == 0 && masks[1..].iter().all(|&m| m & hub != 0)
}

fn sp_constraint(n: usize, masks: &[u32]) -> bool {
    (0..masks.len()).all(|x| {
        (0..n - 1).all(|i| {
            let y = x ^ (1 << i);
            (masks[x] ^ masks[y]) >> i & 1 == 0
        })
    })
}

fn parity_of_masks(n: usize, k: usize, masks: &[u32]) -> ParityReport {
    let counts: Vec<u64> = (0..n)
        .map(|i| masks.iter().filter(|&&m| m >> i & 1 == 1).count() as u64)
        .collect();
    let total: u64 = masks.iter().map(|m| u64::from(m.count_ones())).sum();
    let odd_non_hub: Vec<u32> = (0..n - 1)
        .filter(|&i| counts[i] % 2 == 1)
        .map(|i| i as u32 + 1)
        .collect();
    let hub_odd = counts[n - 1] % 2 == 1;
    let total_even = total.is_multiple_of(2);
    let satisfies_hub_constraints = hub_constraints(n, masks);
    ParityReport {
        n,
        k,
        parity: counts
            .iter()
            .map(|c| if c % 2 == 1 { '1' } else { '0' })
            .collect(),
        counts,
        total,
        hub_odd,
        total_even,
        odd_non_hub,
        satisfies_hub_constraints,
        satisfies_sp: sp_constraint(n, masks),
        forces_contradiction: satisfies_hub_constraints && hub_odd && total_even,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Abort when the backtracking search visits more nodes than this.
    pub max_nodes: u64,
    /// Hub-constraint candidates to parity-audit; above this, a seeded
    /// uniform sample of this size is audited instead.
    pub max_candidates: u64,
    pub sample_seed: u64,
    /// Parity strings kept verbatim in the report.
    pub keep_parities: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_nodes: 100_000_000,
            max_candidates: 100_000,
            sample_seed: 0,
            keep_parities: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpossibilityReport {
    pub n: usize,
    pub k: usize,
    /// `|S_k|^(2^(n-1))`, the number of tables in the domain, as a decimal
    /// string or power expression.
    pub tables: String,
    /// Tables meeting all three constraints.
    pub feasible_count: u64,
    pub nodes_visited: u64,
    /// Tables meeting constraints 1 and 2.
    pub hub_candidates: String,
    pub candidates_audited: u64,
    pub candidates_sampled: bool,
    /// Over all audited candidates.
    pub all_hub_odd: bool,
    pub all_total_even: bool,
    pub all_have_odd_non_hub: bool,
    pub parity_samples: Vec<String>,
    /// One feasible table, if any existed.
    pub witness: Option<Vec<Vec<u32>>>,
}

pub fn impossibility_search(n: usize, k: usize) -> Result<ImpossibilityReport> {
    impossibility_search_with(n, k, &SearchConfig::default())
}

pub fn impossibility_search_with(
    n: usize,
    k: usize,
    config: &SearchConfig,
) -> Result<ImpossibilityReport> {
    if !(2..=16).contains(&n) || k < 1 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "impossibility search needs 2 <= n <= 16 and 1 <= k <= n-1, got n={n}, k={k}"
        )));
    }
    let points = 1usize << (n - 1);
    let hub = 1u32 << (n - 1);
    let mut all: Vec<u32> = Vec::new();
    for_each_combination(n, k, |c| all.push(c.iter().fold(0, |m, &i| m | 1 << i)));
    let without_hub: Vec<u32> = all.iter().copied().filter(|m| m & hub == 0).collect();
    let with_hub: Vec<u32> = all.iter().copied().filter(|m| m & hub != 0).collect();

    // backtracking in cube order; constraint 3 is checked against every
    // already-assigned neighbour x ^ e_i < x
    let mut table = vec![0u32; points];
    let mut nodes = 0u64;
    let mut feasible = 0u64;
    let mut witness = None;
    let mut stack: Vec<usize> = vec![0];
    let choices = |x: usize| if x == 0 { &without_hub } else { &with_hub };
    while let Some(&pos) = stack.last() {
        let depth = stack.len() - 1;
        let options = choices(depth);
        if pos >= options.len() {
            stack.pop();
            if let Some(top) = stack.last_mut() {
                *top += 1;
            }
            continue;
        }
        nodes += 1;
        if nodes > config.max_nodes {
            return Err(Error::TooLarge {
                what: format!("impossibility search n={n}, k={k}"),
                required: format!("more than {} nodes", config.max_nodes),
                bound: u128::from(config.max_nodes),
            });
        }
        let value = options[pos];
        let consistent = (0..n - 1)
            .filter(|&i| depth >> i & 1 == 1)
            .all(|i| (value ^ table[depth ^ (1 << i)]) >> i & 1 == 0);
        if !consistent {
            *stack.last_mut().expect("non-empty") += 1;
            continue;
        }
        table[depth] = value;
        if depth + 1 == points {
            feasible += 1;
            if witness.is_none() {
                witness = Some(table.iter().map(|&m| mask_selection(m).ids()).collect());
            }
            *stack.last_mut().expect("non-empty") += 1;
        } else {
            stack.push(0);
        }
    }

    let exponent = points as u32;
    let tables = (all.len() as u128)
        .checked_pow(exponent)
        .map_or_else(|| format!("{}^{}", all.len(), points), |t| t.to_string());
    let hub_count = (without_hub.len() as u128).checked_mul(
        (with_hub.len() as u128)
            .checked_pow(exponent - 1)
            .unwrap_or(u128::MAX),
    );
    let hub_candidates = match hub_count {
        Some(c) if c < u128::MAX => c.to_string(),
        _ => format!("{}*{}^{}", without_hub.len(), with_hub.len(), points - 1),
    };

    let audited = hub_count
        .filter(|&c| c <= u128::from(config.max_candidates))
        .map(|c| c as u64);
    let mut report = ImpossibilityReport {
        n,
        k,
        tables,
        feasible_count: feasible,
        nodes_visited: nodes,
        hub_candidates,
        candidates_audited: 0,
        candidates_sampled: audited.is_none(),
        all_hub_odd: true,
        all_total_even: true,
        all_have_odd_non_hub: true,
        parity_samples: Vec::new(),
        witness,
    };
    let mut record = |masks: &[u32]| {
        let p = parity_of_masks(n, k, masks);
        debug_assert!(p.satisfies_hub_constraints);
        report.candidates_audited += 1;
        report.all_hub_odd &= p.hub_odd;
        report.all_total_even &= p.total_even;
        report.all_have_odd_non_hub &= !p.odd_non_hub.is_empty();
        if report.parity_samples.len() < config.keep_parities {
            report.parity_samples.push(p.parity);
        }
    };
    let radix = |x: usize| {
        if x == 0 {
            without_hub.len()
        } else {
            with_hub.len()
        }
    };
    let pick = |x: usize, d: usize| if x == 0 { without_hub[d] } else { with_hub[d] };
    match audited {
        Some(count) => {
            // mixed-radix counter over the per-point choices
            let mut digits = vec![0usize; points];
            for _ in 0..count {
                let masks: Vec<u32> = (0..points).map(|x| pick(x, digits[x])).collect();
                record(&masks);
                for (x, digit) in digits.iter_mut().enumerate() {
                    *digit += 1;
                    if *digit < radix(x) {
                        break;
                    }
                    *digit = 0;
                }
            }
        }
        None => {
            let mut rng = SeedRng::new(config.sample_seed);
            for _ in 0..config.max_candidates {
                let masks: Vec<u32> = (0..points)
                    .map(|x| pick(x, rng.below_usize(radix(x))))
                    .collect();
                record(&masks);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain enumeration of every table; independent of the backtracking.
    fn brute_force_feasible(n: usize, k: usize) -> u64 {
        let points = 1usize << (n - 1);
        let mut all: Vec<u32> = Vec::new();
        for_each_combination(n, k, |c| all.push(c.iter().fold(0, |m, &i| m | 1 << i)));
        let total = (all.len() as u64).pow(points as u32);
        let mut feasible = 0;
        let mut masks = vec![0u32; points];
        for code in 0..total {
            let mut rest = code;
            for slot in masks.iter_mut() {
                *slot = all[(rest % all.len() as u64) as usize];
                rest /= all.len() as u64;
            }
            if hub_constraints(n, &masks) && sp_constraint(n, &masks) {
                feasible += 1;
            }
        }
        feasible
    }

    #[test]
    fn small_cases_match_brute_force() {
        for (n, k) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 3)] {
            let report = impossibility_search(n, k).unwrap();
            assert_eq!(
                report.feasible_count,
                brute_force_feasible(n, k),
                "n={n} k={k}"
            );
            assert_eq!(report.feasible_count, 0);
            assert!(report.witness.is_none());
        }
    }

    #[test]
    fn table_counts() {
        assert_eq!(impossibility_search(2, 1).unwrap().tables, "4");
        assert_eq!(impossibility_search(3, 1).unwrap().tables, "81");
        assert_eq!(impossibility_search(3, 2).unwrap().tables, "81");
        assert_eq!(impossibility_search(4, 3).unwrap().tables, "65536");
    }

    #[test]
    fn dropping_the_hub_constraint_admits_tables() {
        // sanity check that the search can find something: the constant
        // table {1..k} is SP and satisfies nothing about the hub
        let masks = vec![0b011u32; 4];
        assert!(sp_constraint(3, &masks));
        assert!(!hub_constraints(3, &masks));
    }

    #[test]
    fn parity_of_constant_table() {
        let t = FunctionTable {
            n: 4,
            k: 2,
            values: vec![Selection::of(&[1, 2]); 8],
        };
        let p = parity_audit(&t).unwrap();
        assert_eq!(p.counts, vec![8, 8, 0, 0]);
        assert_eq!(p.parity, "0000");
        assert_eq!(p.total, 16);
        assert!(p.satisfies_sp && !p.satisfies_hub_constraints && !p.forces_contradiction);
    }

    #[test]
    fn parity_of_hub_table() {
        // n = 3, k = 1: f(0) = {1}, f(x) = {3} otherwise
        let t = FunctionTable {
            n: 3,
            k: 1,
            values: vec![
                Selection::of(&[1]),
                Selection::of(&[3]),
                Selection::of(&[3]),
                Selection::of(&[3]),
            ],
        };
        let p = parity_audit(&t).unwrap();
        assert_eq!(p.counts[2], 3);
        assert!(p.hub_odd && p.total_even && p.forces_contradiction);
        assert_eq!(p.odd_non_hub, vec![1]);
        assert!(!p.satisfies_sp);
    }

    #[test]
    fn sp_tables_have_even_non_hub_counts() {
        // every SP table on n = 3, k = 1 (found by brute force)
        let all = [0b001u32, 0b010, 0b100];
        for code in 0..81u32 {
            let masks: Vec<u32> = (0..4)
                .map(|x| all[(code / 3u32.pow(x)) as usize % 3])
                .collect();
            if sp_constraint(3, &masks) {
                let p = parity_of_masks(3, 1, &masks);
                assert!(p.odd_non_hub.is_empty(), "{masks:?}");
            }
        }
    }

    #[test]
    fn incomplete_tables_are_rejected() {
        let short = FunctionTable {
            n: 3,
            k: 1,
            values: vec![Selection::of(&[1]); 3],
        };
        assert!(matches!(
            parity_audit(&short),
            Err(Error::IncompleteTable(_))
        ));
        let wrong_size = FunctionTable {
            n: 3,
            k: 1,
            values: vec![Selection::of(&[1, 2]); 4],
        };
        assert!(parity_audit(&wrong_size).is_err());
        let out_of_range = FunctionTable {
            n: 3,
            k: 1,
            values: vec![Selection::of(&[4]); 4],
        };
        assert!(parity_audit(&out_of_range).is_err());
    }

    #[test]
    fn candidates_all_force_the_contradiction() {
        let r = impossibility_search(4, 2).unwrap();
        assert_eq!(r.feasible_count, 0);
        assert_eq!(r.hub_candidates, "6561");
        assert_eq!(r.candidates_audited, 6561);
        assert!(!r.candidates_sampled);
        assert!(r.all_hub_odd && r.all_total_even && r.all_have_odd_non_hub);
    }

    #[test]
    fn node_guard() {
        let tiny = SearchConfig {
            max_nodes: 3,
            ..SearchConfig::default()
        };
        assert!(matches!(
            impossibility_search_with(4, 2, &tiny),
            Err(Error::TooLarge { .. })
        ));
        assert!(impossibility_search(1, 1).is_err());
        assert!(impossibility_search(3, 3).is_err());
    }
}
