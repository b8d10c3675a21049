//! Instance families used throughout the audits.

use super::DirectedGraph;
use crate::error::{Error, Result};
use crate::rng::SeedRng;

/// Names accepted by [`gen_named`].
pub const NAMED_INSTANCES: [&str; 2] = ["figure2", "figure4"];

/// Star on `bits.len() + 1` agents: `i -> n` is present iff `bits[i-1]`.
pub fn gen_star(bits: &[bool]) -> Result<DirectedGraph> {
    if bits.is_empty() {
        return Err(Error::InvalidParameter(
            "star needs at least one leaf bit".into(),
        ));
    }
    let n = bits.len() + 1;
    let hub = n as u32;
    let edges = bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| (i as u32 + 1, hub));
    DirectedGraph::new(n, edges.collect::<Vec<_>>())
}

/// Directed cycle `1 -> 2 -> ... -> k+1 -> 1`, agents `k+2..=n` isolated.
pub fn gen_cycle(k: usize, n: usize) -> Result<DirectedGraph> {
    if k < 1 || k + 1 > n {
        return Err(Error::InvalidParameter(format!(
            "cycle needs 1 <= k <= n-1, got k={k}, n={n}"
        )));
    }
    let len = k as u32 + 1;
    let edges = (1..=len).map(|i| (i, if i == len { 1 } else { i + 1 }));
    DirectedGraph::new(n, edges.collect::<Vec<_>>())
}

/// The single edge `1 -> n`.
pub fn gen_single_edge(n: usize) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "single-edge instance needs n >= 2, got {n}"
        )));
    }
    DirectedGraph::new(n, [(1, n as u32)])
}

/// Two-level in-tree: root 1, spokes `2..=t+1` pointing at the root, and `d`
/// private leaves pointing at each spoke. `n = 1 + t + t*d`.
pub fn gen_sliding_counterexample(t: usize, d: usize) -> Result<DirectedGraph> {
    if t == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!(
            "sliding counterexample needs t, d >= 1, got t={t}, d={d}"
        )));
    }
    let n = 1 + t + t * d;
    let mut edges = Vec::with_capacity(t + t * d);
    let mut leaf = t as u32 + 2;
    for spoke in 2..=t as u32 + 1 {
        edges.push((spoke, 1));
        for _ in 0..d {
            edges.push((leaf, spoke));
            leaf += 1;
        }
    }
    DirectedGraph::new(n, edges)
}

/// Each ordered pair is an edge independently with probability `p`.
///
/// Pairs are visited in `(u, v)` order; pair `u -> v` is kept when the next
/// 53-bit uniform `(next_u64 >> 11) / 2^53` is below `p`.
pub fn gen_random(n: usize, p: f64, seed: u64) -> Result<DirectedGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let mut rng = SeedRng::new(seed);
    let mut edges = Vec::new();
    for u in 1..=n as u32 {
        for v in 1..=n as u32 {
            if u == v {
                continue;
            }
            let x = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            if x < p {
                edges.push((u, v));
            }
        }
    }
    DirectedGraph::new(n, edges)
}

pub fn gen_named(name: &str) -> Result<DirectedGraph> {
    match name {
        "figure2" => DirectedGraph::new(
            6,
            [
                (1, 2),
                (3, 1),
                (4, 1),
                (4, 2),
                (4, 3),
                (4, 5),
                (4, 6),
                (6, 2),
                (6, 5),
            ],
        ),
        "figure4" => DirectedGraph::new(6, [(4, 5), (2, 4), (3, 1), (3, 6), (4, 3)]),
        other => Err(Error::UnknownInstance(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AgentId;

    fn edge_list(g: &DirectedGraph) -> Vec<(u32, u32)> {
        g.edges().map(|(u, v)| (u.get(), v.get())).collect()
    }

    fn bits(v: &[u8]) -> Vec<bool> {
        v.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn stars_from_figure_one() {
        let g = gen_star(&bits(&[1, 0, 1, 1, 0, 0])).unwrap();
        assert_eq!(g.n(), 7);
        assert_eq!(edge_list(&g), vec![(1, 7), (3, 7), (4, 7)]);
        let g = gen_star(&bits(&[1, 1, 0, 0, 0, 1])).unwrap();
        assert_eq!(edge_list(&g), vec![(1, 7), (2, 7), (6, 7)]);
        let g = gen_star(&bits(&[0, 0, 0])).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(gen_star(&[]).is_err());
    }

    #[test]
    fn star_edges_all_hit_the_hub() {
        for mask in 0u32..64 {
            let b: Vec<bool> = (0..6).map(|i| mask >> i & 1 == 1).collect();
            let g = gen_star(&b).unwrap();
            assert_eq!(g.edge_count(), mask.count_ones() as usize);
            assert!(g.edges().all(|(_, v)| v.get() == 7));
        }
    }

    #[test]
    fn cycles() {
        assert_eq!(edge_list(&gen_cycle(1, 2).unwrap()), vec![(1, 2), (2, 1)]);
        let g = gen_cycle(2, 4).unwrap();
        assert_eq!(edge_list(&g), vec![(1, 2), (2, 3), (3, 1)]);
        assert_eq!(g.indegree(AgentId::new(4)).unwrap(), 0);
        let g = gen_cycle(3, 4).unwrap();
        assert_eq!(g.indegrees(), vec![1, 1, 1, 1]);
        assert!(gen_cycle(0, 4).is_err());
        assert!(gen_cycle(4, 4).is_err());
    }

    #[test]
    fn single_edge() {
        assert_eq!(edge_list(&gen_single_edge(2).unwrap()), vec![(1, 2)]);
        assert_eq!(edge_list(&gen_single_edge(10).unwrap()), vec![(1, 10)]);
        let g = gen_single_edge(6).unwrap();
        let positive: Vec<usize> = (0..6).filter(|&i| g.indegrees()[i] > 0).collect();
        assert_eq!(positive, vec![5]);
        assert!(gen_single_edge(1).is_err());
    }

    #[test]
    fn sliding_trees() {
        let g = gen_sliding_counterexample(1, 1).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(edge_list(&g), vec![(2, 1), (3, 2)]);

        let g = gen_sliding_counterexample(4, 4).unwrap();
        assert_eq!(g.n(), 21);
        let deg = g.indegrees();
        assert_eq!(deg[0], 4);
        assert!((1..=4).all(|s| deg[s] == 4));
        assert!(deg[5..].iter().all(|&d| d == 0));

        let mut rng = SeedRng::new(99);
        for _ in 0..20 {
            let t = 1 + rng.below_usize(12);
            let d = 1 + rng.below_usize(12);
            let g = gen_sliding_counterexample(t, d).unwrap();
            assert_eq!(g.edge_count(), t + t * d);
            assert_eq!(g.n(), 1 + t + t * d);
        }
        assert!(gen_sliding_counterexample(0, 3).is_err());
    }

    #[test]
    fn random_graphs() {
        assert_eq!(gen_random(6, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(gen_random(6, 1.0, 1).unwrap().edge_count(), 30);
        assert_eq!(
            gen_random(20, 0.3, 5).unwrap(),
            gen_random(20, 0.3, 5).unwrap()
        );
        assert_ne!(
            gen_random(20, 0.3, 5).unwrap(),
            gen_random(20, 0.3, 6).unwrap()
        );
        assert!(gen_random(5, 1.5, 0).is_err());
        assert!(gen_random(5, -0.1, 0).is_err());
    }

    #[test]
    fn named() {
        let g = gen_named("figure2").unwrap();
        assert_eq!(g.edge_count(), 9);
        assert_eq!(g.indegrees()[1], 3);
        assert_eq!(g.indegrees()[4], 2);
        assert_eq!(gen_named("figure4").unwrap().edge_count(), 5);
        assert_eq!(
            gen_named("nosuch"),
            Err(Error::UnknownInstance("nosuch".into()))
        );
    }
}
