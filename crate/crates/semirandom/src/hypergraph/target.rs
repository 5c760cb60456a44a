//! Symbolic target families and their canonical labeled copies.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{Edge, MultiHypergraph, Vertex};
use crate::error::{Error, Result};

/// A symbolic description of a target family from which the canonical
/// labeled copy on vertices `1..v_H` is generated.
///
/// `TightPath`/`TightCycle` are the `ell`-tight families: consecutive edges
/// of size `s` overlap in exactly `ell` vertices along a linear or cyclic
/// vertex order. `Starplus` families have every ray edge containing a fixed
/// center set while cap edges do not contain it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    TightPath {
        m: u32,
        s: u32,
        ell: u32,
    },
    TightCycle {
        m: u32,
        s: u32,
        ell: u32,
    },
    Clique {
        k: u32,
        s: u32,
    },
    FullStarplus {
        k: u32,
        s: u32,
        c: u32,
        cap: Vec<Vec<Vertex>>,
    },
    Starplus {
        s: u32,
        center: Vec<Vertex>,
        rays: Vec<Vec<Vertex>>,
        cap: Vec<Vec<Vertex>>,
    },
    Wheel {
        k: u32,
        s: u32,
        c: u32,
    },
    Custom {
        s: u32,
        edges: Vec<Vec<Vertex>>,
    },
}

impl TargetSpec {
    pub fn s(&self) -> u32 {
        match self {
            TargetSpec::TightPath { s, .. }
            | TargetSpec::TightCycle { s, .. }
            | TargetSpec::Clique { s, .. }
            | TargetSpec::FullStarplus { s, .. }
            | TargetSpec::Starplus { s, .. }
            | TargetSpec::Wheel { s, .. }
            | TargetSpec::Custom { s, .. } => *s,
        }
    }
}

fn check_path_params(m: u32, s: u32, ell: u32) -> Result<()> {
    if s < 2 {
        return Err(Error::parameter("uniformity s must be at least 2"));
    }
    if ell < 1 || ell >= s {
        return Err(Error::parameter(format!(
            "ell={ell} violates 1 <= ell < s={s}"
        )));
    }
    if m < 1 {
        return Err(Error::parameter("path needs m >= 1 edges"));
    }
    Ok(())
}

/// Segment of `s` consecutive positions starting at `start` (0-based) in a
/// cyclic order of `v` vertices, returned as 1-based labels.
fn cyclic_segment(start: u32, s: u32, v: u32) -> Edge {
    Edge::new((0..s).map(|i| (start + i) % v + 1).collect()).expect("distinct when v > s")
}

/// Builds the canonical labeled copy of `spec` on vertices `1..v_H`.
pub fn build_target(spec: &TargetSpec) -> Result<MultiHypergraph> {
    match spec {
        TargetSpec::TightPath { m, s, ell } => {
            check_path_params(*m, *s, *ell)?;
            let v = (s - ell) * m + ell;
            let mut g = MultiHypergraph::new(*s as usize, v)?;
            for i in 0..*m {
                let start = i * (s - ell) + 1;
                g.insert(Edge::from_sorted((start..start + s).collect()))?;
            }
            Ok(g)
        }
        TargetSpec::TightCycle { m, s, ell } => {
            check_path_params(*m, *s, *ell)?;
            if *m < (s + 1) / (s - ell) {
                return Err(Error::parameter(format!(
                    "cycle too short: m={m} < floor((s+1)/(s-ell))={}",
                    (s + 1) / (s - ell)
                )));
            }
            let v = (s - ell) * m;
            if v <= *s {
                return Err(Error::parameter(
                    "cycle too short: (s-ell)*m must exceed s for distinct edges",
                ));
            }
            let mut g = MultiHypergraph::new(*s as usize, v)?;
            for i in 0..*m {
                g.insert(cyclic_segment(i * (s - ell), *s, v))?;
            }
            Ok(g)
        }
        TargetSpec::Clique { k, s } => {
            if s < &1 || k < s {
                return Err(Error::parameter(format!("clique needs 1 <= s <= k, got s={s}, k={k}")));
            }
            let mut g = MultiHypergraph::new(*s as usize, *k)?;
            for combo in (1..=*k).combinations(*s as usize) {
                g.insert(Edge::from_sorted(combo))?;
            }
            Ok(g)
        }
        TargetSpec::FullStarplus { k, s, c, cap } => {
            if !(1 <= *c && c < s && s <= k) {
                return Err(Error::parameter(format!(
                    "full starplus needs 1 <= c < s <= k, got c={c}, s={s}, k={k}"
                )));
            }
            let center: Vec<Vertex> = (1..=*c).collect();
            let rays: Vec<Vec<Vertex>> = (*c + 1..=*k)
                .combinations((*s - *c) as usize)
                .map(|tail| center.iter().copied().chain(tail).collect())
                .collect();
            build_starplus(*s, &center, &rays, cap, Some(*k))
        }
        TargetSpec::Starplus { s, center, rays, cap } => {
            if center.is_empty() || center.len() >= *s as usize {
                return Err(Error::parameter("starplus needs 1 <= |center| < s"));
            }
            build_starplus(*s, center, rays, cap, None)
        }
        TargetSpec::Wheel { k, s, c } => {
            if !(1 <= *c && *c < *s && *s < *k) {
                return Err(Error::parameter(format!(
                    "wheel needs 1 <= c < s < k, got c={c}, s={s}, k={k}"
                )));
            }
            // Flower and cap are tight cycles on the k-c non-center vertices,
            // sharing the same cyclic order.
            let fl = k - c;
            if fl <= *s {
                return Err(Error::parameter(
                    "wheel too small: cap cycle needs k - c > s",
                ));
            }
            if *s - *c < 2 {
                return Err(Error::parameter("wheel flower needs s - c >= 2"));
            }
            let center: Vec<Vertex> = (1..=*c).collect();
            let mut rays = Vec::new();
            for i in 0..fl {
                let residue = cyclic_segment(i, s - c, fl);
                let ray: Vec<Vertex> = center
                    .iter()
                    .copied()
                    .chain(residue.iter().map(|v| v + c))
                    .collect();
                rays.push(ray);
            }
            let mut cap = Vec::new();
            for i in 0..fl {
                let seg = cyclic_segment(i, *s, fl);
                cap.push(seg.iter().map(|v| v + c).collect());
            }
            build_starplus(*s, &center, &rays, &cap, Some(*k))
        }
        TargetSpec::Custom { s, edges } => {
            if edges.is_empty() {
                return Err(Error::parameter("custom target needs at least one edge"));
            }
            let mut parsed = Vec::new();
            let mut max_v = 0;
            for e in edges {
                let edge = Edge::new(e.clone())?;
                if edge.len() != *s as usize {
                    return Err(Error::parameter(format!(
                        "custom edge {:?} has size {}, expected {}",
                        edge,
                        edge.len(),
                        s
                    )));
                }
                max_v = max_v.max(*edge.vertices().last().unwrap());
                parsed.push(edge);
            }
            let mut g = MultiHypergraph::new(*s as usize, max_v)?;
            for e in parsed {
                if g.contains_edge(&e) {
                    return Err(Error::parameter(format!("custom edge {:?} repeated", e)));
                }
                g.insert(e)?;
            }
            Ok(g)
        }
    }
}

fn build_starplus(
    s: u32,
    center: &[Vertex],
    rays: &[Vec<Vertex>],
    cap: &[Vec<Vertex>],
    declared_k: Option<u32>,
) -> Result<MultiHypergraph> {
    let center_edge = Edge::new(center.to_vec())?;
    if rays.is_empty() {
        return Err(Error::parameter("starplus needs at least one ray"));
    }
    let mut edges = Vec::new();
    let mut max_v = *center_edge.vertices().last().unwrap();
    for r in rays {
        let e = Edge::new(r.clone())?;
        if e.len() != s as usize {
            return Err(Error::parameter(format!(
                "ray {:?} has size {}, expected {}",
                e,
                e.len(),
                s
            )));
        }
        if !e.contains_set(&center_edge) {
            return Err(Error::parameter(format!(
                "ray {:?} does not contain the center {:?}",
                e, center_edge
            )));
        }
        max_v = max_v.max(*e.vertices().last().unwrap());
        edges.push(e);
    }
    for c in cap {
        let e = Edge::new(c.clone())?;
        if e.len() != s as usize {
            return Err(Error::parameter(format!(
                "cap edge {:?} has size {}, expected {}",
                e,
                e.len(),
                s
            )));
        }
        if e.contains_set(&center_edge) {
            return Err(Error::parameter(format!(
                "cap edge {:?} contains the center {:?}",
                e, center_edge
            )));
        }
        max_v = max_v.max(*e.vertices().last().unwrap());
        edges.push(e);
    }
    let n = match declared_k {
        Some(k) => {
            if max_v > k {
                return Err(Error::parameter(format!(
                    "edge vertex {max_v} exceeds declared k={k}"
                )));
            }
            k
        }
        None => max_v,
    };
    let mut g = MultiHypergraph::new(s as usize, n)?;
    for e in edges {
        if g.contains_edge(&e) {
            return Err(Error::parameter(format!("starplus edge {:?} repeated", e)));
        }
        g.insert(e)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(v: &[Vertex]) -> Edge {
        Edge::new(v.to_vec()).unwrap()
    }

    #[test]
    fn tight_cycle_c7_3() {
        let g = build_target(&TargetSpec::TightCycle { m: 7, s: 3, ell: 2 }).unwrap();
        assert_eq!(g.n(), 7);
        assert_eq!(g.edge_count(), 7);
        for e in [
            [1, 2, 3],
            [2, 3, 4],
            [3, 4, 5],
            [4, 5, 6],
            [5, 6, 7],
            [6, 7, 1],
            [7, 1, 2],
        ] {
            assert!(g.contains_edge(&edge(&e)), "missing {e:?}");
        }
    }

    #[test]
    fn loose_cycle_c4_31() {
        let g = build_target(&TargetSpec::TightCycle { m: 4, s: 3, ell: 1 }).unwrap();
        assert_eq!(g.n(), 8);
        assert_eq!(g.edge_count(), 4);
        for e in [[1, 2, 3], [3, 4, 5], [5, 6, 7], [7, 8, 1]] {
            assert!(g.contains_edge(&edge(&e)), "missing {e:?}");
        }
    }

    #[test]
    fn degenerate_clique_is_single_edge() {
        let g = build_target(&TargetSpec::Clique { k: 3, s: 3 }).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.contains_edge(&edge(&[1, 2, 3])));
    }

    #[test]
    fn fano_capped_star_counts() {
        // Seven triples on vertices 2..8 pairwise sharing one vertex.
        let fano: Vec<Vec<Vertex>> = vec![
            vec![2, 3, 4],
            vec![2, 5, 6],
            vec![2, 7, 8],
            vec![3, 5, 7],
            vec![3, 6, 8],
            vec![4, 5, 8],
            vec![4, 6, 7],
        ];
        let g = build_target(&TargetSpec::FullStarplus {
            k: 8,
            s: 3,
            c: 1,
            cap: fano,
        })
        .unwrap();
        assert_eq!(g.edge_count(), 21 + 7);
        let through_center = g.distinct_edges().filter(|e| e.contains(1)).count();
        assert_eq!(through_center, 21);
    }

    #[test]
    fn full_starplus_edge_count_formula() {
        // C(k-c, s-c) + lambda edges for every admissible (k, s, c, lambda).
        for (k, s, c, cap) in [
            (5u32, 3u32, 1u32, vec![vec![2, 3, 4], vec![3, 4, 5]]),
            (6, 4, 2, vec![vec![1, 3, 4, 5]]),
        ] {
            let lambda = cap.len() as u64;
            let g = build_target(&TargetSpec::FullStarplus { k, s, c, cap }).unwrap();
            let binom = |n: u64, k: u64| -> u64 {
                if k > n {
                    return 0;
                }
                (1..=k).fold(1u64, |acc, i| acc * (n - k + i) / i)
            };
            assert_eq!(
                g.edge_count(),
                binom((k - c) as u64, (s - c) as u64) + lambda
            );
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(build_target(&TargetSpec::TightPath { m: 2, s: 3, ell: 3 }).is_err());
        assert!(build_target(&TargetSpec::TightCycle { m: 3, s: 3, ell: 2 }).is_err());
        // (s-ell)*m == s cannot have m distinct edges.
        assert!(build_target(&TargetSpec::TightCycle { m: 2, s: 4, ell: 2 }).is_err());
        // Cap edge containing the center.
        assert!(build_target(&TargetSpec::FullStarplus {
            k: 5,
            s: 3,
            c: 1,
            cap: vec![vec![1, 2, 3]],
        })
        .is_err());
    }

    #[test]
    fn wheel_w8_51() {
        let g = build_target(&TargetSpec::Wheel { k: 8, s: 5, c: 1 }).unwrap();
        assert_eq!(g.n(), 8);
        // 7 rays through the center plus a 7-edge tight-cycle cap.
        assert_eq!(g.edge_count(), 14);
        assert_eq!(g.distinct_edges().filter(|e| e.contains(1)).count(), 7);
    }

    #[test]
    fn path_and_cycle_counts_on_grid() {
        for s in 2u32..=6 {
            for ell in 1..s {
                for m in 1..=6 {
                    let p = build_target(&TargetSpec::TightPath { m, s, ell }).unwrap();
                    assert_eq!(p.n(), (s - ell) * m + ell);
                    assert_eq!(p.edge_count(), m as u64);
                    if m >= (s + 1) / (s - ell) && (s - ell) * m > s {
                        let c = build_target(&TargetSpec::TightCycle { m, s, ell }).unwrap();
                        assert_eq!(c.n(), (s - ell) * m);
                        assert_eq!(c.edge_count(), m as u64, "cycle m={m} s={s} ell={ell}");
                    }
                }
            }
        }
    }

    #[test]
    fn target_spec_json_round_trip() {
        let spec = TargetSpec::TightCycle { m: 4, s: 3, ell: 1 };
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"family":"tight_cycle","m":4,"s":3,"ell":1}"#);
        let back: TargetSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
