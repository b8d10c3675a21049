use crate::error::Result;
use crate::graph::{DirectedGraph, Selection};

use super::check_k;

/// The `k` agents of largest indegree.
///
/// Equal indegrees are ordered by fewer outgoing edges first, then by
/// smaller index. Any order among equal indegrees attains the optimum.
pub fn optimal_select(g: &DirectedGraph, k: usize) -> Result<Selection> {
    check_k(g.n(), k)?;
    let indeg = g.indegrees();
    let outdeg = g.outdegrees();
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(indeg[i]), outdeg[i], i));
    order.truncate(k);
    Ok(Selection::from_indices(order))
}
