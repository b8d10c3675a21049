use crate::error::Result;
use crate::graph::{DirectedGraph, Selection};
use crate::rng::SeedRng;

use super::check_k;

/// Uniform `k`-subset, ignoring the edges entirely.
pub fn random_subset(g: &DirectedGraph, k: usize, seed: u64) -> Result<Selection> {
    random_subset_sample(g, k, &mut SeedRng::new(seed))
}

pub fn random_subset_sample(g: &DirectedGraph, k: usize, rng: &mut SeedRng) -> Result<Selection> {
    check_k(g.n(), k)?;
    Ok(Selection::from_indices(rng.subset(g.n(), k)))
}
