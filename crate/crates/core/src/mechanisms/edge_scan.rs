use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Selection};

/// Deterministic mechanism that selects at most two agents.
///
/// Left-to-right: the first agent with an edge to a larger index names its
/// smallest such target (agent `n` if there is no forward edge).
/// Right-to-left: the last agent with an edge to a smaller index names its
/// largest such target (agent 1 if there is no backward edge).
pub fn edge_scan(g: &DirectedGraph) -> Result<Selection> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "edge-scan needs n >= 2, got {n}"
        )));
    }
    let forward = (0..n)
        .find_map(|u| g.out_idx(u).iter().find(|&&v| v as usize > u))
        .map_or(n - 1, |&v| v as usize);
    let backward = (0..n)
        .rev()
        .find_map(|u| g.out_idx(u).iter().rev().find(|&&v| (v as usize) < u))
        .map_or(0, |&v| v as usize);
    let mut picks = vec![forward];
    if backward != forward {
        picks.push(backward);
    }
    Ok(Selection::from_indices(picks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_named, gen_random};

    #[test]
    fn figure4() {
        let g = gen_named("figure4").unwrap();
        assert_eq!(edge_scan(&g).unwrap(), Selection::of(&[3, 4]));
    }

    #[test]
    fn fallbacks() {
        let g = DirectedGraph::empty(5).unwrap();
        assert_eq!(edge_scan(&g).unwrap(), Selection::of(&[1, 5]));
        let g = DirectedGraph::new(3, [(1, 2)]).unwrap();
        assert_eq!(edge_scan(&g).unwrap(), Selection::of(&[1, 2]));
        // both scans land on the same agent
        let g = DirectedGraph::new(3, [(1, 2), (3, 2)]).unwrap();
        assert_eq!(edge_scan(&g).unwrap(), Selection::of(&[2]));
    }

    #[test]
    fn picks_an_agent_with_an_incoming_edge() {
        for seed in 0..300 {
            let n = 2 + (seed % 9) as usize;
            let g = gen_random(n, 0.15, seed).unwrap();
            if g.edge_count() > 0 {
                let s = edge_scan(&g).unwrap();
                assert!(s.total_indegree(&g) >= 1, "{g:?}");
            }
        }
    }
}
