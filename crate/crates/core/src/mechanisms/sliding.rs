use crate::error::Result;
use crate::graph::{DirectedGraph, Selection};
use crate::rng::SeedRng;

/// Iterative elimination for `k = 1`: repeatedly eliminate a uniformly random
/// agent among those with the fewest incoming edges from already-eliminated
/// agents; the last agent standing is selected.
pub fn sliding_partition(g: &DirectedGraph, seed: u64) -> Result<Selection> {
    sliding_partition_sample(g, &mut SeedRng::new(seed))
}

/// One elimination draw per step: a uniform position in the current
/// minimum-count bucket.
pub fn sliding_partition_sample(g: &DirectedGraph, rng: &mut SeedRng) -> Result<Selection> {
    let order = elimination_order(g, rng);
    let mut alive = vec![true; g.n()];
    for &i in &order {
        alive[i] = false;
    }
    let survivor = (0..g.n()).find(|&i| alive[i]).expect("one agent survives");
    Ok(Selection::from_indices(vec![survivor]))
}

/// Zero-based agents in the order they are eliminated (`n - 1` of them).
fn elimination_order(g: &DirectedGraph, rng: &mut SeedRng) -> Vec<usize> {
    let n = g.n();
    let mut order = Vec::with_capacity(n.saturating_sub(1));
    // count[i] = edges into i from eliminated agents; counts only grow and
    // the minimum over survivors never decreases
    let mut count = vec![0usize; n];
    let mut buckets: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut slot: Vec<usize> = (0..n).collect();
    let mut alive = vec![true; n];
    let mut low = 0;
    for _ in 0..n - 1 {
        while buckets[low].is_empty() {
            low += 1;
        }
        let pick = rng.below_usize(buckets[low].len());
        let victim = remove_at(&mut buckets[low], &mut slot, pick);
        alive[victim] = false;
        order.push(victim);
        for &v in g.out_idx(victim) {
            let v = v as usize;
            if !alive[v] {
                continue;
            }
            let c = count[v];
            let at = slot[v];
            remove_at(&mut buckets[c], &mut slot, at);
            count[v] = c + 1;
            if buckets.len() <= c + 1 {
                buckets.push(Vec::new());
            }
            slot[v] = buckets[c + 1].len();
            buckets[c + 1].push(v);
        }
    }
    order
}

fn remove_at(bucket: &mut Vec<usize>, slot: &mut [usize], pos: usize) -> usize {
    let agent = bucket.swap_remove(pos);
    if let Some(&moved) = bucket.get(pos) {
        slot[moved] = pos;
    }
    agent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_random, gen_sliding_counterexample};

    #[test]
    fn lone_agent() {
        let g = DirectedGraph::empty(1).unwrap();
        assert_eq!(sliding_partition(&g, 5).unwrap(), Selection::of(&[1]));
    }

    #[test]
    fn every_victim_has_minimum_count() {
        for seed in 0..200 {
            let n = 2 + (seed % 8) as usize;
            let g = gen_random(n, 0.35, seed).unwrap();
            let order = elimination_order(&g, &mut SeedRng::new(seed));
            assert_eq!(order.len(), n - 1);
            let mut eliminated = vec![false; n];
            for &victim in &order {
                let from_eliminated = |i: usize| g.indegree_from_mask(i, &eliminated);
                let low = (0..n)
                    .filter(|&i| !eliminated[i])
                    .map(from_eliminated)
                    .min()
                    .unwrap();
                assert!(!eliminated[victim]);
                assert_eq!(from_eliminated(victim), low);
                eliminated[victim] = true;
            }
        }
    }

    #[test]
    fn large_tree_runs() {
        let g = gen_sliding_counterexample(16, 16).unwrap();
        let s = sliding_partition(&g, 1).unwrap();
        assert_eq!(s.len(), 1);
    }
}
