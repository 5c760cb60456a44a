//! s-uniform multi-hypergraphs on vertex set `[n]`, generators for the target
//! families used throughout the crate, and subgraph-containment checking.
//!
//! Vertices are 1-based integers. An [`Edge`] is a strictly increasing list of
//! vertex identifiers; a [`MultiHypergraph`] maps edges to multiplicities.

mod embed;
mod target;

pub use embed::{contains_copy, verify_embedding, Embedding};
pub use target::{build_target, TargetSpec};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex identifier in `[1, n]`.
pub type Vertex = u32;

/// A sorted set of distinct vertices. Used both for hyperedges (length `s`)
/// and for the random `r`-sets and player responses of the process.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Edge(Vec<Vertex>);

impl Edge {
    /// Builds an edge from arbitrary vertex order, rejecting duplicates and
    /// zero identifiers.
    pub fn new(mut vertices: Vec<Vertex>) -> Result<Edge> {
        vertices.sort_unstable();
        if vertices.first() == Some(&0) {
            return Err(Error::parameter("vertex identifiers are 1-based"));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::parameter("edge contains a repeated vertex"));
        }
        Ok(Edge(vertices))
    }

    /// Wraps a list already known to be strictly increasing and 1-based.
    pub fn from_sorted(vertices: Vec<Vertex>) -> Edge {
        debug_assert!(vertices.iter().all(|&v| v >= 1));
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Edge(vertices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// True when every vertex of `other` lies in `self`.
    pub fn contains_set(&self, other: &Edge) -> bool {
        other.iter().all(|v| self.contains(v))
    }

    pub fn intersection_size(&self, other: &Edge) -> usize {
        self.iter().filter(|&v| other.contains(v)).count()
    }

    /// Sorted union of two disjoint or overlapping vertex sets.
    pub fn union(&self, other: &Edge) -> Edge {
        let mut v: Vec<Vertex> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        Edge(v)
    }

    /// Sorted difference `self \ other`.
    pub fn difference(&self, other: &Edge) -> Vec<Vertex> {
        self.iter().filter(|&v| !other.contains(v)).collect()
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl From<&[Vertex]> for Edge {
    fn from(slice: &[Vertex]) -> Edge {
        Edge::new(slice.to_vec()).expect("valid vertex list")
    }
}

/// An s-uniform hypergraph on vertex set `[1, n]` with edge multiplicities.
///
/// The process only ever inserts edges, so edges are stored canonically
/// sorted in a map from edge to multiplicity.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiHypergraph {
    s: usize,
    n: u32,
    edges: BTreeMap<Edge, u64>,
    /// Total insertions, i.e. edge count with multiplicity.
    total: u64,
}

impl MultiHypergraph {
    pub fn new(s: usize, n: u32) -> Result<MultiHypergraph> {
        if s < 1 {
            return Err(Error::parameter("uniformity s must be at least 1"));
        }
        Ok(MultiHypergraph {
            s,
            n,
            edges: BTreeMap::new(),
            total: 0,
        })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Declared vertex count; this is the `v_H` used by the density formulas.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Inserts one copy of `edge`, validating the uniformity and range.
    pub fn insert(&mut self, edge: Edge) -> Result<()> {
        if edge.len() != self.s {
            return Err(Error::parameter(format!(
                "edge {:?} has size {}, expected s={}",
                edge,
                edge.len(),
                self.s
            )));
        }
        if let Some(&max) = edge.vertices().last() {
            if max > self.n {
                return Err(Error::parameter(format!(
                    "edge {:?} exceeds vertex range [1, {}]",
                    edge, self.n
                )));
            }
        }
        *self.edges.entry(edge).or_insert(0) += 1;
        self.total += 1;
        Ok(())
    }

    /// Edge count with multiplicity (`e_H` for multigraphs).
    pub fn edge_count(&self) -> u64 {
        self.total
    }

    pub fn distinct_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn multiplicity(&self, edge: &Edge) -> u64 {
        self.edges.get(edge).copied().unwrap_or(0)
    }

    pub fn contains_edge(&self, edge: &Edge) -> bool {
        self.edges.contains_key(edge)
    }

    /// True when every multiplicity is exactly 1.
    pub fn is_simple(&self) -> bool {
        self.edges.values().all(|&m| m == 1)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Edge, u64)> {
        self.edges.iter().map(|(e, &m)| (e, m))
    }

    pub fn distinct_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.keys()
    }

    /// Vertices of positive degree, sorted.
    pub fn support(&self) -> Vec<Vertex> {
        let mut seen = vec![false; self.n as usize + 1];
        for e in self.edges.keys() {
            for v in e.iter() {
                seen[v as usize] = true;
            }
        }
        (1..=self.n).filter(|&v| seen[v as usize]).collect()
    }

    /// Degree of a vertex, counted with multiplicity.
    pub fn degree(&self, v: Vertex) -> u64 {
        self.edges
            .iter()
            .filter(|(e, _)| e.contains(v))
            .map(|(_, &m)| m)
            .sum()
    }

    /// Number of edges (with multiplicity) inside the vertex set `within`,
    /// given as a sorted edge/set.
    pub fn edges_within(&self, within: &Edge) -> u64 {
        self.edges
            .iter()
            .filter(|(e, _)| within.contains_set(e))
            .map(|(_, &m)| m)
            .sum()
    }

    /// Maximum number of edges (with multiplicity) containing a common
    /// `d`-subset of vertices.
    pub fn delta_d(&self, d: usize) -> Result<u64> {
        if d < 1 || d > self.s {
            return Err(Error::parameter(format!(
                "d={} out of range [1, s={}]",
                d, self.s
            )));
        }
        use itertools::Itertools;
        let mut counts: BTreeMap<Vec<Vertex>, u64> = BTreeMap::new();
        for (e, &m) in &self.edges {
            for sub in e.vertices().iter().copied().combinations(d) {
                *counts.entry(sub).or_insert(0) += m;
            }
        }
        Ok(counts.values().copied().max().unwrap_or(0))
    }

    /// Relabels the graph onto `[1, |support|]`, dropping isolated vertices.
    /// Returns the relabeled graph and the old labels indexed by new ones.
    pub fn compacted(&self) -> (MultiHypergraph, Vec<Vertex>) {
        let support = self.support();
        let mut index = vec![0u32; self.n as usize + 1];
        for (i, &v) in support.iter().enumerate() {
            index[v as usize] = i as u32 + 1;
        }
        let mut g = MultiHypergraph::new(self.s, support.len() as u32).expect("valid s");
        for (e, &m) in &self.edges {
            let mapped = Edge::from_sorted(e.iter().map(|v| index[v as usize]).collect());
            for _ in 0..m {
                g.insert(mapped.clone()).expect("in range");
            }
        }
        (g, support)
    }
}

impl fmt::Debug for MultiHypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MultiHypergraph(s={}, n={}, edges={:?})",
            self.s, self.n, self.edges
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_rejects_duplicates_and_zero() {
        assert!(Edge::new(vec![1, 2, 2]).is_err());
        assert!(Edge::new(vec![0, 1]).is_err());
        assert_eq!(Edge::new(vec![3, 1, 2]).unwrap().vertices(), &[1, 2, 3]);
    }

    #[test]
    fn multiplicity_counts_insertions() {
        let mut g = MultiHypergraph::new(3, 5).unwrap();
        let e = Edge::new(vec![1, 2, 3]).unwrap();
        g.insert(e.clone()).unwrap();
        g.insert(e.clone()).unwrap();
        g.insert(Edge::new(vec![2, 3, 4]).unwrap()).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.distinct_edge_count(), 2);
        assert_eq!(g.multiplicity(&e), 2);
        assert!(!g.is_simple());
    }

    #[test]
    fn insert_validates_size_and_range() {
        let mut g = MultiHypergraph::new(3, 4).unwrap();
        assert!(g.insert(Edge::new(vec![1, 2]).unwrap()).is_err());
        assert!(g.insert(Edge::new(vec![2, 3, 5]).unwrap()).is_err());
    }

    #[test]
    fn delta_d_single_edge() {
        let mut g = MultiHypergraph::new(4, 4).unwrap();
        g.insert(Edge::new(vec![1, 2, 3, 4]).unwrap()).unwrap();
        assert_eq!(g.delta_d(4).unwrap(), 1);
        assert_eq!(g.delta_d(1).unwrap(), 1);
        assert!(g.delta_d(0).is_err());
        assert!(g.delta_d(5).is_err());
    }
}
