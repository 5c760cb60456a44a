//! Subgraph containment by backtracking search.
//!
//! The pattern is always a fixed small hypergraph while the host can be
//! large, so pattern vertices are matched in reverse degeneracy-peeling
//! order (highest-constraint first) and host candidates are drawn from the
//! neighborhoods of already-matched vertices whenever possible.

use std::collections::{HashMap, HashSet};

use super::{Edge, MultiHypergraph, Vertex};
use crate::error::{Error, Result};

/// An injective map from pattern vertices to host vertices.
/// `map[i]` is the host vertex assigned to pattern vertex `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub map: Vec<Vertex>,
}

impl Embedding {
    pub fn image(&self, v: Vertex) -> Vertex {
        self.map[(v - 1) as usize]
    }

    pub fn image_edge(&self, e: &Edge) -> Edge {
        Edge::new(e.iter().map(|v| self.image(v)).collect()).expect("injective map")
    }
}

/// Checks that `phi` maps every edge of `pattern` onto an edge present in
/// `host` and is injective on the pattern's vertex set.
pub fn verify_embedding(host: &MultiHypergraph, pattern: &MultiHypergraph, phi: &Embedding) -> bool {
    if phi.map.len() < pattern.n() as usize {
        return false;
    }
    let used: HashSet<Vertex> = phi.map[..pattern.n() as usize].iter().copied().collect();
    if used.len() < pattern.n() as usize {
        return false;
    }
    if phi.map.iter().any(|&v| v < 1 || v > host.n()) {
        return false;
    }
    pattern
        .distinct_edges()
        .all(|e| host.contains_edge(&phi.image_edge(e)))
}

/// Pattern vertices in reverse min-degree-peeling order.
fn reverse_peel_order(pattern: &MultiHypergraph) -> Vec<Vertex> {
    let n = pattern.n() as usize;
    let edges: Vec<&Edge> = pattern.distinct_edges().collect();
    let mut removed = vec![false; n + 1];
    let mut edge_alive: Vec<bool> = vec![true; edges.len()];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(u64, Vertex)> = None;
        for v in 1..=n as u32 {
            if removed[v as usize] {
                continue;
            }
            let deg = edges
                .iter()
                .zip(&edge_alive)
                .filter(|(e, &alive)| alive && e.contains(v))
                .count() as u64;
            if best.map_or(true, |(d, _)| deg < d) {
                best = Some((deg, v));
            }
        }
        let (_, v) = best.expect("vertex remains");
        removed[v as usize] = true;
        for (i, e) in edges.iter().enumerate() {
            if e.contains(v) {
                edge_alive[i] = false;
            }
        }
        order.push(v);
    }
    order.reverse();
    order
}

struct Search<'a> {
    host: &'a MultiHypergraph,
    pattern: &'a MultiHypergraph,
    order: Vec<Vertex>,
    /// Pattern edges fully matched once the vertex at this order index is
    /// assigned.
    check_at: Vec<Vec<&'a Edge>>,
    /// For each order index, an earlier-matched pattern vertex sharing an
    /// edge with the vertex matched at that index, if any.
    anchor: Vec<Option<Vertex>>,
    host_support: Vec<Vertex>,
    incidence: HashMap<Vertex, Vec<&'a Edge>>,
}

impl<'a> Search<'a> {
    fn new(host: &'a MultiHypergraph, pattern: &'a MultiHypergraph) -> Search<'a> {
        let order = reverse_peel_order(pattern);
        let mut pos = vec![usize::MAX; pattern.n() as usize + 1];
        for (i, &v) in order.iter().enumerate() {
            pos[v as usize] = i;
        }
        let mut check_at: Vec<Vec<&Edge>> = vec![Vec::new(); order.len()];
        for e in pattern.distinct_edges() {
            let last = e.iter().map(|v| pos[v as usize]).max().expect("nonempty");
            check_at[last].push(e);
        }
        let mut anchor: Vec<Option<Vertex>> = vec![None; order.len()];
        for (i, &v) in order.iter().enumerate() {
            'outer: for e in pattern.distinct_edges() {
                if !e.contains(v) {
                    continue;
                }
                for w in e.iter() {
                    if w != v && pos[w as usize] < i {
                        anchor[i] = Some(w);
                        break 'outer;
                    }
                }
            }
        }
        let mut incidence: HashMap<Vertex, Vec<&Edge>> = HashMap::new();
        for e in host.distinct_edges() {
            for v in e.iter() {
                incidence.entry(v).or_default().push(e);
            }
        }
        Search {
            host,
            pattern,
            order,
            check_at,
            anchor,
            host_support: host.support(),
            incidence,
        }
    }

    fn run(&self) -> Option<Embedding> {
        let mut assignment = vec![0u32; self.pattern.n() as usize + 1];
        let mut used: HashSet<Vertex> = HashSet::new();
        if self.backtrack(0, &mut assignment, &mut used) {
            // Pattern vertices isolated in the pattern could remain at 0 only
            // if the pattern has fewer support vertices than n; fill them with
            // arbitrary unused host vertices.
            let mut map = Vec::with_capacity(self.pattern.n() as usize);
            let mut spare = (1..=self.host.n()).filter(|v| !used.contains(v));
            for v in 1..=self.pattern.n() {
                let img = assignment[v as usize];
                if img != 0 {
                    map.push(img);
                } else {
                    map.push(spare.next()?);
                }
            }
            Some(Embedding { map })
        } else {
            None
        }
    }

    fn backtrack(
        &self,
        idx: usize,
        assignment: &mut Vec<Vertex>,
        used: &mut HashSet<Vertex>,
    ) -> bool {
        if idx == self.order.len() {
            return true;
        }
        let pv = self.order[idx];
        let candidates: Vec<Vertex> = match self.anchor[idx] {
            Some(w) => {
                let host_w = assignment[w as usize];
                let mut c: Vec<Vertex> = Vec::new();
                if let Some(edges) = self.incidence.get(&host_w) {
                    let mut seen = HashSet::new();
                    for e in edges {
                        for v in e.iter() {
                            if v != host_w && !used.contains(&v) && seen.insert(v) {
                                c.push(v);
                            }
                        }
                    }
                }
                c
            }
            None => self
                .host_support
                .iter()
                .copied()
                .filter(|v| !used.contains(v))
                .collect(),
        };
        for cand in candidates {
            assignment[pv as usize] = cand;
            used.insert(cand);
            let ok = self.check_at[idx].iter().all(|e| {
                let image =
                    Edge::new(e.iter().map(|v| assignment[v as usize]).collect()).expect("distinct");
                self.host.contains_edge(&image)
            });
            if ok && self.backtrack(idx + 1, assignment, used) {
                return true;
            }
            used.remove(&cand);
            assignment[pv as usize] = 0;
        }
        false
    }
}

/// Searches for a copy of `pattern` in `host`, returning an injective vertex
/// map if one exists. Multiplicities in the host are irrelevant beyond
/// presence; the pattern must be simple.
pub fn contains_copy(host: &MultiHypergraph, pattern: &MultiHypergraph) -> Result<Option<Embedding>> {
    if host.s() != pattern.s() {
        return Err(Error::parameter(format!(
            "uniformity mismatch: host s={}, pattern s={}",
            host.s(),
            pattern.s()
        )));
    }
    if !pattern.is_simple() {
        return Err(Error::parameter("pattern must be simple"));
    }
    if pattern.n() > host.n() || pattern.distinct_edge_count() > host.distinct_edge_count() {
        return Ok(None);
    }
    Ok(Search::new(host, pattern).run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{build_target, TargetSpec};
    use itertools::Itertools;

    /// Oracle: tries every injective map from pattern support to host
    /// vertices. Exponential; only for tiny instances.
    fn contains_copy_naive(host: &MultiHypergraph, pattern: &MultiHypergraph) -> bool {
        let pn = pattern.n() as usize;
        if pn > host.n() as usize {
            return false;
        }
        for perm in (1..=host.n()).permutations(pn) {
            let phi = Embedding { map: perm };
            if verify_embedding(host, pattern, &phi) {
                return true;
            }
        }
        false
    }

    #[test]
    fn identity_embedding_on_cycle() {
        let c7 = build_target(&TargetSpec::TightCycle { m: 7, s: 3, ell: 2 }).unwrap();
        let phi = contains_copy(&c7, &c7).unwrap().expect("self copy");
        assert!(verify_embedding(&c7, &c7, &phi));
    }

    #[test]
    fn cycle_contains_its_paths() {
        let c7 = build_target(&TargetSpec::TightCycle { m: 7, s: 3, ell: 2 }).unwrap();
        let p2 = build_target(&TargetSpec::TightPath { m: 2, s: 3, ell: 2 }).unwrap();
        let phi = contains_copy(&c7, &p2).unwrap().expect("path in cycle");
        assert!(verify_embedding(&c7, &p2, &phi));
    }

    #[test]
    fn loose_cycle_not_in_loose_path() {
        let c = build_target(&TargetSpec::TightCycle { m: 4, s: 3, ell: 1 }).unwrap();
        let p = build_target(&TargetSpec::TightPath { m: 4, s: 3, ell: 1 }).unwrap();
        assert!(contains_copy(&p, &c).unwrap().is_none());
        assert!(!contains_copy_naive(&p, &c));
    }

    #[test]
    fn uniformity_mismatch_is_error() {
        let c = build_target(&TargetSpec::TightCycle { m: 4, s: 3, ell: 1 }).unwrap();
        let k = build_target(&TargetSpec::Clique { k: 4, s: 2 }).unwrap();
        assert!(contains_copy(&c, &k).is_err());
    }

    #[test]
    fn agrees_with_naive_oracle_on_small_pairs() {
        // Hosts and patterns over s in {2, 3} with v_G <= 7, v_H <= 5.
        let hosts: Vec<MultiHypergraph> = vec![
            build_target(&TargetSpec::TightCycle { m: 7, s: 3, ell: 2 }).unwrap(),
            build_target(&TargetSpec::TightCycle { m: 5, s: 2, ell: 1 }).unwrap(),
            build_target(&TargetSpec::Clique { k: 5, s: 3 }).unwrap(),
            build_target(&TargetSpec::Clique { k: 6, s: 2 }).unwrap(),
            build_target(&TargetSpec::TightPath { m: 5, s: 2, ell: 1 }).unwrap(),
            build_target(&TargetSpec::Custom {
                s: 3,
                edges: vec![vec![1, 2, 3], vec![1, 2, 4], vec![3, 4, 5], vec![5, 6, 7]],
            })
            .unwrap(),
        ];
        let patterns: Vec<MultiHypergraph> = vec![
            build_target(&TargetSpec::Clique { k: 3, s: 2 }).unwrap(),
            build_target(&TargetSpec::Clique { k: 4, s: 3 }).unwrap(),
            build_target(&TargetSpec::TightPath { m: 3, s: 2, ell: 1 }).unwrap(),
            build_target(&TargetSpec::TightPath { m: 2, s: 3, ell: 1 }).unwrap(),
            build_target(&TargetSpec::TightCycle { m: 4, s: 2, ell: 1 }).unwrap(),
            build_target(&TargetSpec::Custom {
                s: 3,
                edges: vec![vec![1, 2, 3], vec![2, 3, 4], vec![3, 4, 5]],
            })
            .unwrap(),
        ];
        for host in &hosts {
            for pattern in &patterns {
                if host.s() != pattern.s() {
                    continue;
                }
                let got = contains_copy(host, pattern).unwrap();
                let want = contains_copy_naive(host, pattern);
                assert_eq!(got.is_some(), want, "host {host:?} pattern {pattern:?}");
                if let Some(phi) = got {
                    assert!(verify_embedding(host, pattern, &phi));
                }
            }
        }
    }

    #[test]
    fn monotone_under_host_edge_additions() {
        let pattern = build_target(&TargetSpec::Clique { k: 4, s: 3 }).unwrap();
        let mut host = MultiHypergraph::new(3, 6).unwrap();
        let full = build_target(&TargetSpec::Clique { k: 6, s: 3 }).unwrap();
        let mut present = false;
        for e in full.distinct_edges() {
            host.insert(e.clone()).unwrap();
            let now = contains_copy(&host, &pattern).unwrap().is_some();
            assert!(now || !present, "embedding vanished after adding an edge");
            present = now;
        }
        assert!(present);
    }
}
