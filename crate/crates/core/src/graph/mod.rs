//! Directed approval graphs, selections, and the edge-list text format.

mod format;
mod generators;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::{parse_graph, serialize_graph};
pub use generators::{
    gen_cycle, gen_named, gen_random, gen_single_edge, gen_sliding_counterexample, gen_star,
    NAMED_INSTANCES,
};

/// An agent, numbered from 1.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(u32);

impl AgentId {
    /// Panics on 0; agents are 1-based.
    pub fn new(id: u32) -> Self {
        assert!(id >= 1, "agent ids start at 1");
        AgentId(id)
    }

    pub fn from_index(index: usize) -> Self {
        AgentId(index as u32 + 1)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Zero-based position.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A reported approval graph on agents `1..=n`.
///
/// Immutable once built. There are no self-loops or parallel edges, and
/// isolated agents are kept.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DirectedGraph {
    n: usize,
    // zero-based, each list sorted ascending
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
    edge_count: usize,
}

impl DirectedGraph {
    /// Builds a graph from 1-based `(source, target)` pairs.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("a graph needs at least one agent".into()));
        }
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, v) in edges {
            for x in [u, v] {
                if x == 0 || x as usize > n {
                    return Err(Error::AgentOutOfRange {
                        agent: u64::from(x),
                        n,
                    });
                }
            }
            if u == v {
                return Err(Error::Validation(format!("self-loop on agent {u}")));
            }
            out[u as usize - 1].push(v - 1);
            inn[v as usize - 1].push(u - 1);
            edge_count += 1;
        }
        for (u, targets) in out.iter_mut().enumerate() {
            targets.sort_unstable();
            if let Some(w) = targets.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Validation(format!(
                    "duplicate edge {} -> {}",
                    u + 1,
                    w[0] + 1
                )));
            }
        }
        for sources in &mut inn {
            sources.sort_unstable();
        }
        Ok(DirectedGraph {
            n,
            out,
            inn,
            edge_count,
        })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.n).map(AgentId::from_index)
    }

    /// Edges sorted by `(source, target)`.
    pub fn edges(&self) -> impl Iterator<Item = (AgentId, AgentId)> + '_ {
        self.out.iter().enumerate().flat_map(|(u, ts)| {
            ts.iter()
                .map(move |&v| (AgentId::from_index(u), AgentId::from_index(v as usize)))
        })
    }

    pub fn has_edge(&self, u: AgentId, v: AgentId) -> bool {
        u.index() < self.n && self.out[u.index()].binary_search(&(v.get() - 1)).is_ok()
    }

    pub fn check_agent(&self, i: AgentId) -> Result<()> {
        if i.index() < self.n {
            Ok(())
        } else {
            Err(Error::AgentOutOfRange {
                agent: u64::from(i.get()),
                n: self.n,
            })
        }
    }

    pub fn indegree(&self, i: AgentId) -> Result<usize> {
        self.check_agent(i)?;
        Ok(self.inn[i.index()].len())
    }

    /// Incoming edges of `i` whose source lies in `from`.
    pub fn indegree_from(&self, i: AgentId, from: &[AgentId]) -> Result<usize> {
        self.check_agent(i)?;
        let mut member = vec![false; self.n];
        for &j in from {
            self.check_agent(j)?;
            member[j.index()] = true;
        }
        Ok(self.indegree_from_mask(i.index(), &member))
    }

    pub fn out_neighbors(&self, i: AgentId) -> impl Iterator<Item = AgentId> + '_ {
        self.out[i.index()]
            .iter()
            .map(|&v| AgentId::from_index(v as usize))
    }

    pub fn in_neighbors(&self, i: AgentId) -> impl Iterator<Item = AgentId> + '_ {
        self.inn[i.index()]
            .iter()
            .map(|&v| AgentId::from_index(v as usize))
    }

    /// Indegrees of all agents, indexed from 0.
    pub fn indegrees(&self) -> Vec<usize> {
        self.inn.iter().map(Vec::len).collect()
    }

    pub fn outdegrees(&self) -> Vec<usize> {
        self.out.iter().map(Vec::len).collect()
    }

    /// The same graph with agent `i`'s outgoing edges replaced by `targets`.
    pub fn with_out_edges(&self, i: AgentId, targets: &[AgentId]) -> Result<Self> {
        self.check_agent(i)?;
        let edges = self
            .edges()
            .filter(|(u, _)| *u != i)
            .map(|(u, v)| (u.get(), v.get()))
            .chain(targets.iter().map(|t| (i.get(), t.get())));
        Self::new(self.n, edges.collect::<Vec<_>>())
    }

    pub(crate) fn out_idx(&self, i: usize) -> &[u32] {
        &self.out[i]
    }

    pub(crate) fn in_idx(&self, i: usize) -> &[u32] {
        &self.inn[i]
    }

    pub(crate) fn indegree_from_mask(&self, i: usize, member: &[bool]) -> usize {
        self.inn[i].iter().filter(|&&j| member[j as usize]).count()
    }

    /// Number of ordered pairs, i.e. edge slots, on `n` agents.
    pub fn slot_count(n: usize) -> usize {
        n * n.saturating_sub(1)
    }

    /// Bit position of the slot `u -> v` (zero-based, `u != v`).
    ///
    /// Agent `u`'s outgoing slots occupy the contiguous block
    /// `u*(n-1) .. (u+1)*(n-1)`.
    pub fn slot(n: usize, u: usize, v: usize) -> usize {
        debug_assert!(u != v);
        u * (n - 1) + if v < u { v } else { v - 1 }
    }

    /// Decodes a graph from its slot bitmask (`n <= 8`).
    pub fn from_code(n: usize, code: u64) -> Result<Self> {
        if Self::slot_count(n) > 63 {
            return Err(Error::InvalidParameter(format!(
                "graph codes are limited to n <= 8, got {n}"
            )));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && code >> Self::slot(n, u, v) & 1 == 1 {
                    edges.push((u as u32 + 1, v as u32 + 1));
                }
            }
        }
        Self::new(n, edges)
    }

    /// Slot bitmask of this graph (`n <= 8`).
    pub fn code(&self) -> u64 {
        assert!(Self::slot_count(self.n) <= 63, "graph too large to encode");
        let mut code = 0u64;
        for (u, ts) in self.out.iter().enumerate() {
            for &v in ts {
                code |= 1 << Self::slot(self.n, u, v as usize);
            }
        }
        code
    }
}

impl fmt::Debug for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<(u32, u32)> = self.edges().map(|(u, v)| (u.get(), v.get())).collect();
        f.debug_struct("DirectedGraph")
            .field("n", &self.n)
            .field("edges", &edges)
            .finish()
    }
}

impl fmt::Display for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_graph(self))
    }
}

impl Serialize for DirectedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&serialize_graph(self))
    }
}

impl<'de> Deserialize<'de> for DirectedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_graph(&text).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for DirectedGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_graph(s)
    }
}

/// A set of selected agents, kept sorted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Selection(Vec<AgentId>);

impl Selection {
    /// Sorts and rejects duplicates.
    pub fn new(mut members: Vec<AgentId>) -> Result<Self> {
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("selection lists an agent twice".into()));
        }
        Ok(Selection(members))
    }

    /// From zero-based positions; callers guarantee distinctness.
    pub(crate) fn from_indices(mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        Selection(idx.into_iter().map(AgentId::from_index).collect())
    }

    pub fn of(ids: &[u32]) -> Self {
        Self::new(ids.iter().map(|&i| AgentId::new(i)).collect()).expect("distinct agents")
    }

    pub fn members(&self) -> &[AgentId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: AgentId) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.0.iter().map(|a| a.get()).collect()
    }

    /// Sum of indegrees of the members.
    pub fn total_indegree(&self, g: &DirectedGraph) -> usize {
        self.0.iter().map(|&a| g.inn[a.index()].len()).sum()
    }

    /// Checks that every member belongs to `g`.
    pub fn check_within(&self, g: &DirectedGraph) -> Result<()> {
        self.0.iter().try_for_each(|&a| g.check_agent(a))
    }
}

impl fmt::Debug for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter().map(|a| a.0)).finish()
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, a) in self.0.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}
