//! Starplus decompositions: center detection, ray/cap split, and the
//! ray-excess ratio condition that gates the matching upper bound.

use itertools::Itertools;
use num::BigInt;

use super::{balance_report, Rational};
use crate::error::{Error, Result};
use crate::hypergraph::{Edge, MultiHypergraph, Vertex};

/// Outcome of comparing `(λ1 + λ2) / (λ1 - 1)` against
/// `(k - s + r) / (k - s)` with `r = s - c`, evaluated by exact
/// cross-multiplication so the boundary cases are unambiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition14 {
    Strict,
    Equality,
    Violated,
}

/// A decomposition of an s-graph into a c-star plus excess edges.
#[derive(Debug, Clone)]
pub struct StarplusDecomposition {
    /// The center: a c-set contained in every ray.
    pub center: Vec<Vertex>,
    /// Ray count.
    pub lambda1: u64,
    /// Excess (cap) edge count.
    pub lambda2: u64,
    /// The rays with the center removed: an (s-c)-uniform hypergraph on the
    /// original vertex labels.
    pub flower: MultiHypergraph,
    /// The excess edges, none of which contain the center.
    pub cap: MultiHypergraph,
    /// Ray-excess ratio condition, with `r = s - c`.
    pub condition14: Condition14,
    pub flower_edge_balanced: bool,
    /// Total vertex count `k` of the decomposed hypergraph.
    pub k: u32,
    /// Uniformity of the decomposed hypergraph.
    pub s: usize,
}

impl StarplusDecomposition {
    /// True when the flower is the complete (s-c)-graph on the k-c
    /// non-center vertices.
    pub fn is_full(&self) -> bool {
        let kc = (self.k as u64) - self.center.len() as u64;
        let sc = (self.s - self.center.len()) as u64;
        BigInt::from(self.lambda1) == super::big_binomial(kc, sc)
    }

    /// The uniformity of the flower, `r = s - c`.
    pub fn flower_uniformity(&self) -> u32 {
        (self.s - self.center.len()) as u32
    }

    /// Exponent of the starplus threshold, `r - (k - s + r) / (λ1 + λ2)`.
    pub fn threshold_exponent(&self) -> Rational {
        let r = self.flower_uniformity() as i64;
        let num = self.k as i64 - self.s as i64 + r;
        Rational::from(BigInt::from(r))
            - Rational::new(BigInt::from(num), BigInt::from((self.lambda1 + self.lambda2) as i64))
    }
}

fn evaluate_condition14(lambda1: u64, lambda2: u64, k: i64, s: i64, r: i64) -> Condition14 {
    // (λ1 + λ2)(k - s) vs (k - s + r)(λ1 - 1), both sides nonnegative.
    let lhs = BigInt::from((lambda1 + lambda2) as i64) * BigInt::from(k - s);
    let rhs = BigInt::from(k - s + r) * BigInt::from(lambda1 as i64 - 1);
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Less => Condition14::Strict,
        std::cmp::Ordering::Equal => Condition14::Equality,
        std::cmp::Ordering::Greater => Condition14::Violated,
    }
}

/// Decomposes `h` as a c-starplus: searches all c-subsets of the vertex set,
/// takes rays = edges containing the subset and cap = the rest, and returns
/// the decomposition maximizing the ray count (ties broken toward the
/// lexicographically smallest center). Returns `None` when no c-set lies in
/// any edge.
pub fn starplus_decompose(h: &MultiHypergraph, c: usize) -> Result<Option<StarplusDecomposition>> {
    if c < 1 || c >= h.s() {
        return Err(Error::parameter(format!(
            "center size c={} must satisfy 1 <= c < s={}",
            c,
            h.s()
        )));
    }
    if h.edge_count() == 0 {
        return Ok(None);
    }
    let mut best: Option<(u64, Vec<Vertex>)> = None;
    // Only c-sets inside at least one edge can have rays; enumerate them
    // from the edges instead of all of [n].
    let mut candidates: std::collections::BTreeSet<Vec<Vertex>> = Default::default();
    for e in h.distinct_edges() {
        for sub in e.vertices().iter().copied().combinations(c) {
            candidates.insert(sub);
        }
    }
    for center in candidates {
        let center_edge = Edge::from_sorted(center.clone());
        let lambda1: u64 = h
            .edges()
            .filter(|(e, _)| e.contains_set(&center_edge))
            .map(|(_, m)| m)
            .sum();
        if lambda1 >= 1 && best.as_ref().map_or(true, |(l, _)| lambda1 > *l) {
            best = Some((lambda1, center));
        }
    }
    let Some((lambda1, center)) = best else {
        return Ok(None);
    };
    let center_edge = Edge::from_sorted(center.clone());
    let r = h.s() - c;
    let mut flower = MultiHypergraph::new(r, h.n())?;
    let mut cap = MultiHypergraph::new(h.s(), h.n())?;
    let mut lambda2 = 0u64;
    for (e, m) in h.edges() {
        if e.contains_set(&center_edge) {
            let residue = Edge::from_sorted(e.difference(&center_edge));
            for _ in 0..m {
                flower.insert(residue.clone())?;
            }
        } else {
            for _ in 0..m {
                cap.insert(e.clone())?;
            }
            lambda2 += m;
        }
    }
    let condition14 = evaluate_condition14(
        lambda1,
        lambda2,
        h.n() as i64,
        h.s() as i64,
        r as i64,
    );
    // Edge-balancedness of the flower on its support (the center vertices
    // are isolated in the flower and must not inflate v).
    let (flower_compact, _) = flower.compacted();
    let flower_edge_balanced = if flower_compact.edge_count() == 0 {
        false
    } else {
        balance_report(&flower_compact, None)?.is_edge_balanced
    };
    Ok(Some(StarplusDecomposition {
        center,
        lambda1,
        lambda2,
        flower,
        cap,
        condition14,
        flower_edge_balanced,
        k: h.n(),
        s: h.s(),
    }))
}
