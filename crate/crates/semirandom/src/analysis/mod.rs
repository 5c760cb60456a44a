//! Exact-rational densities, balance notions, and threshold exponents.
//!
//! Everything in this module computes with arbitrary-precision rationals;
//! floating point is never used for a comparison. The density maxima (`mu_r`,
//! `balance_report`) enumerate induced sub-hypergraphs only: at a fixed
//! vertex set, adding edges can only increase `f` and `g`, so the induced
//! sub-hypergraph realizes the maximum over all subgraphs on that vertex set.

mod cliques;
mod starplus;
mod threshold;

pub use cliques::{clique_upper_exponent, ell_k, ell_k_closed_form_23, ell_k_quadratic_23, excess_bound, f_s_kl};
pub use starplus::{starplus_decompose, Condition14, StarplusDecomposition};
pub use threshold::{rsl_threshold, threshold_report, Bound, BoundSource, CycleKind, ThresholdReport};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, MultiHypergraph, Vertex};

/// Exact rational with arbitrary-precision integer parts.
pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc = acc * BigInt::from(n - k + i) / BigInt::from(i);
    }
    acc
}

/// Falling factorial `(n)_k = n (n-1) ... (n-k+1)` over the integers.
pub fn falling_factorial(n: i64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k as i64 {
        acc *= BigInt::from(n - i);
    }
    acc
}

/// Serialized form of a rational: exact numerator/denominator strings plus a
/// 12-significant-digit decimal approximation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
    pub approx: String,
}

impl RationalJson {
    pub fn from_rational(q: &Rational) -> RationalJson {
        RationalJson {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
            approx: approx_decimal(q, 12),
        }
    }
}

/// Decimal rendering of a rational with `sig` significant digits.
pub fn approx_decimal(q: &Rational, sig: u32) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.is_negative();
    let mut a = q.abs();
    // Scale into [1, 10) by powers of ten, tracking the decimal exponent.
    let ten = Rational::from(BigInt::from(10));
    let mut exp10: i32 = 0;
    while a >= ten {
        a /= ten.clone();
        exp10 += 1;
    }
    while a < Rational::one() {
        a *= ten.clone();
        exp10 -= 1;
    }
    // Round to sig digits: digits = round(a * 10^(sig-1)).
    let scale = num::pow::pow(BigInt::from(10), (sig - 1) as usize);
    let scaled = a * Rational::from(scale);
    let digits = (scaled.numer() + scaled.denom() / BigInt::from(2)) / scaled.denom();
    let mut ds = digits.to_string();
    if ds.len() as u32 > sig {
        // Rounding carried over, e.g. 9.99 -> 10.0.
        ds.truncate(sig as usize);
        exp10 += 1;
    }
    let mantissa = if ds.len() > 1 {
        format!("{}.{}", &ds[..1], &ds[1..])
    } else {
        ds.clone()
    };
    let sign = if neg { "-" } else { "" };
    if (-4..6).contains(&exp10) {
        // Plain decimal for moderate magnitudes.
        let digits_only = ds;
        let point = exp10 + 1;
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), digits_only)
        } else if (point as usize) < digits_only.len() {
            format!(
                "{}.{}",
                &digits_only[..point as usize],
                &digits_only[point as usize..]
            )
        } else {
            format!(
                "{}{}",
                digits_only,
                "0".repeat(point as usize - digits_only.len())
            )
        };
        format!("{sign}{body}")
    } else {
        format!("{sign}{mantissa}e{exp10}")
    }
}

/// `f^(r)(H) = e_H / (v_H - s + r)`, exactly.
pub fn f_r(h: &MultiHypergraph, r: u32) -> Result<Rational> {
    if (h.n() as i64) < h.s() as i64 {
        return Err(Error::parameter(format!(
            "f_r needs v_H >= s, got v={} s={}",
            h.n(),
            h.s()
        )));
    }
    let den = h.n() as i64 - h.s() as i64 + r as i64;
    debug_assert!(den > 0, "v_H >= s > s - r makes the denominator positive");
    Ok(Rational::new(
        BigInt::from(h.edge_count()),
        BigInt::from(den),
    ))
}

/// A witness sub-hypergraph: the induced subgraph on `vertices`, already
/// relabeled onto `[1, |vertices|]`.
#[derive(Debug, Clone)]
pub struct SubgraphWitness {
    /// Original vertex labels, sorted.
    pub vertices: Vec<Vertex>,
    pub subgraph: MultiHypergraph,
}

fn induced(h: &MultiHypergraph, vertices: &[Vertex]) -> MultiHypergraph {
    let mut index = std::collections::HashMap::new();
    for (i, &v) in vertices.iter().enumerate() {
        index.insert(v, i as u32 + 1);
    }
    let within = Edge::from_sorted(vertices.to_vec());
    let mut g = MultiHypergraph::new(h.s(), vertices.len() as u32).expect("valid s");
    for (e, m) in h.edges() {
        if within.contains_set(e) {
            let mapped = Edge::new(e.iter().map(|v| index[&v]).collect()).expect("distinct");
            for _ in 0..m {
                g.insert(mapped.clone()).expect("in range");
            }
        }
    }
    g
}

fn subsets_of(items: &[Vertex]) -> impl Iterator<Item = Vec<Vertex>> + '_ {
    let n = items.len();
    assert!(n <= 24, "subset enumeration capped at 24 vertices");
    (0u32..(1 << n)).map(move |mask| {
        (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| items[i])
            .collect()
    })
}

/// `mu^(r)(H)`: the maximum of `f^(r)` over induced sub-hypergraphs with at
/// least `s` vertices, together with one maximizer.
pub fn mu_r(h: &MultiHypergraph, r: u32) -> Result<(Rational, SubgraphWitness)> {
    if (h.n() as usize) < h.s() {
        return Err(Error::parameter(format!(
            "mu_r needs v_H >= s, got v={} s={}",
            h.n(),
            h.s()
        )));
    }
    let all: Vec<Vertex> = (1..=h.n()).collect();
    let mut best: Option<(Rational, Vec<Vertex>)> = None;
    for vs in subsets_of(&all) {
        if vs.len() < h.s() {
            continue;
        }
        let within = Edge::from_sorted(vs.clone());
        let e = h.edges_within(&within);
        let den = vs.len() as i64 - h.s() as i64 + r as i64;
        let f = Rational::new(BigInt::from(e), BigInt::from(den));
        if best.as_ref().map_or(true, |(b, _)| f > *b) {
            best = Some((f, vs));
        }
    }
    let (mu, vertices) = best.expect("v_H >= s guarantees a candidate");
    let subgraph = induced(h, &vertices);
    Ok((
        mu,
        SubgraphWitness {
            vertices,
            subgraph,
        },
    ))
}

/// `g(F)`: `1/u` for a single edge, `(e_F - 1)/(v_F - u)` otherwise, where
/// `u` is the uniformity of `F`.
pub fn density_g(f: &MultiHypergraph) -> Result<Rational> {
    let e = f.edge_count();
    if e == 0 {
        return Err(Error::parameter("density g needs at least one edge"));
    }
    if e == 1 {
        return Ok(Rational::new(BigInt::one(), BigInt::from(f.s() as i64)));
    }
    let den = f.n() as i64 - f.s() as i64;
    if den <= 0 {
        return Err(Error::parameter(
            "density g needs v_F > uniformity when e_F > 1",
        ));
    }
    Ok(Rational::new(BigInt::from(e - 1), BigInt::from(den)))
}

/// Balance diagnostics for a hypergraph `F`.
#[derive(Debug, Clone)]
pub struct BalanceReport {
    /// `g(F)`.
    pub g: Rational,
    /// No proper sub-hypergraph has larger `g`.
    pub is_edge_balanced: bool,
    /// No sub-hypergraph has larger `e/v`.
    pub is_balanced: bool,
    /// `mu^(r)` is attained at `F` itself (only when `r` was supplied).
    pub is_r_balanced: Option<bool>,
    /// A sub-hypergraph violating the first failed inequality, if any.
    pub witness: Option<SubgraphWitness>,
}

/// Computes `g`, edge-balancedness, balancedness, and (when `r` is given)
/// `r`-balancedness of `F` by exhaustive enumeration of induced
/// sub-hypergraphs.
pub fn balance_report(f: &MultiHypergraph, r_for_r_balanced: Option<u32>) -> Result<BalanceReport> {
    let g_f = density_g(f)?;
    let ratio_f = Rational::new(BigInt::from(f.edge_count()), BigInt::from(f.n() as i64));
    let all: Vec<Vertex> = (1..=f.n()).collect();
    let u = f.s() as i64;

    let mut edge_witness: Option<Vec<Vertex>> = None;
    let mut bal_witness: Option<Vec<Vertex>> = None;
    for vs in subsets_of(&all) {
        if vs.is_empty() || vs.len() == f.n() as usize {
            continue;
        }
        let within = Edge::from_sorted(vs.clone());
        let e = f.edges_within(&within);
        if e == 0 {
            continue;
        }
        // g of the induced subgraph; a single edge has g = 1/u independent of
        // the chosen vertex set.
        let g_sub = if e == 1 {
            Rational::new(BigInt::one(), BigInt::from(u))
        } else {
            let den = vs.len() as i64 - u;
            if den <= 0 {
                continue;
            }
            Rational::new(BigInt::from(e - 1), BigInt::from(den))
        };
        if g_sub > g_f && edge_witness.is_none() {
            edge_witness = Some(vs.clone());
        }
        let ratio = Rational::new(BigInt::from(e), BigInt::from(vs.len() as i64));
        if ratio > ratio_f && bal_witness.is_none() {
            bal_witness = Some(vs.clone());
        }
        if edge_witness.is_some() && bal_witness.is_some() {
            break;
        }
    }
    // A single proper edge subgraph always exists when e_F >= 2 and has
    // g = 1/u; covered above via induced sets (an edge's own vertex set
    // induces at least that edge, and g of one edge ignores extra vertices).
    let is_edge_balanced = edge_witness.is_none();
    let is_balanced = bal_witness.is_none();

    let is_r_balanced = match r_for_r_balanced {
        Some(r) => {
            let (mu, _) = mu_r(f, r)?;
            Some(mu == f_r(f, r)?)
        }
        None => None,
    };

    let witness_set = edge_witness.or(bal_witness);
    let witness = witness_set.map(|vs| SubgraphWitness {
        subgraph: induced(f, &vs),
        vertices: vs,
    });
    Ok(BalanceReport {
        g: g_f,
        is_edge_balanced,
        is_balanced,
        is_r_balanced,
        witness,
    })
}

/// Degeneracy `d(H)` by iterative min-degree peeling: the answer is the
/// maximum min-degree observed, which equals the max over sub-hypergraphs of
/// their minimum degree.
pub fn degeneracy(h: &MultiHypergraph) -> Result<u64> {
    if h.n() == 0 {
        return Err(Error::parameter("degeneracy needs a non-empty hypergraph"));
    }
    let mut alive_edges: Vec<(Edge, u64)> = h.edges().map(|(e, m)| (e.clone(), m)).collect();
    let mut alive: Vec<bool> = vec![true; h.n() as usize + 1];
    let mut remaining = h.n() as usize;
    let mut best = 0u64;
    while remaining > 0 {
        let mut min_v = 0u32;
        let mut min_deg = u64::MAX;
        for v in 1..=h.n() {
            if !alive[v as usize] {
                continue;
            }
            let deg: u64 = alive_edges
                .iter()
                .filter(|(e, _)| e.contains(v))
                .map(|(_, m)| m)
                .sum();
            if deg < min_deg {
                min_deg = deg;
                min_v = v;
            }
        }
        best = best.max(min_deg);
        alive[min_v as usize] = false;
        remaining -= 1;
        alive_edges.retain(|(e, _)| !e.contains(min_v));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{build_target, TargetSpec};

    /// The 5-vertex, 5-edge example: all triples of {1,2,3,4} plus {3,4,5}.
    pub(crate) fn example_five() -> MultiHypergraph {
        build_target(&TargetSpec::Custom {
            s: 3,
            edges: vec![
                vec![1, 2, 3],
                vec![1, 2, 4],
                vec![1, 3, 4],
                vec![2, 3, 4],
                vec![3, 4, 5],
            ],
        })
        .unwrap()
    }

    #[test]
    fn f_r_examples() {
        let h = example_five();
        assert_eq!(f_r(&h, 2).unwrap(), rational(5, 4));
        let k4 = build_target(&TargetSpec::Clique { k: 4, s: 3 }).unwrap();
        assert_eq!(f_r(&k4, 2).unwrap(), rational(4, 3));
        let single = build_target(&TargetSpec::Clique { k: 3, s: 3 }).unwrap();
        for r in 1..=3 {
            assert_eq!(f_r(&single, r).unwrap(), rational(1, r as i64));
        }
    }

    #[test]
    fn mu_r_example_five() {
        let h = example_five();
        let (mu, witness) = mu_r(&h, 2).unwrap();
        assert_eq!(mu, rational(4, 3));
        assert_eq!(witness.vertices, vec![1, 2, 3, 4]);
        assert_eq!(witness.subgraph.edge_count(), 4);
    }

    #[test]
    fn mu_r_tight_path_is_one_for_r1() {
        for m in 1..=4u32 {
            let p = build_target(&TargetSpec::TightPath { m, s: 3, ell: 2 }).unwrap();
            let (mu, _) = mu_r(&p, 1).unwrap();
            assert_eq!(mu, rational(1, 1));
        }
    }

    #[test]
    fn mu_r_c4_42() {
        let c = build_target(&TargetSpec::TightCycle { m: 4, s: 4, ell: 2 }).unwrap();
        let (mu, _) = mu_r(&c, 2).unwrap();
        assert_eq!(mu, rational(4, 6));
        // Closed form m / ((s - ell) m - s + r) for this regime.
        assert_eq!(mu, rational(2, 3));
    }

    /// Oracle: brute-force mu over all subgraphs (every vertex subset and
    /// every edge subset), not just induced ones.
    #[cfg(test)]
    fn mu_r_all_subgraphs(h: &MultiHypergraph, r: u32) -> Rational {
        use itertools::Itertools;
        let edges: Vec<Edge> = h.distinct_edges().cloned().collect();
        let all: Vec<Vertex> = (1..=h.n()).collect();
        let mut best: Option<Rational> = None;
        for vs in subsets_of(&all) {
            if vs.len() < h.s() {
                continue;
            }
            let within = Edge::from_sorted(vs.clone());
            let inside: Vec<&Edge> = edges.iter().filter(|e| within.contains_set(e)).collect();
            for take in 0..=inside.len() {
                for _chosen in inside.iter().combinations(take) {
                    let den = vs.len() as i64 - h.s() as i64 + r as i64;
                    let f = Rational::new(BigInt::from(take as i64), BigInt::from(den));
                    if best.as_ref().map_or(true, |b| f > *b) {
                        best = Some(f);
                    }
                }
            }
        }
        best.expect("some subgraph")
    }

    #[test]
    fn induced_enumeration_matches_full_subgraph_oracle() {
        let targets = [
            example_five(),
            build_target(&TargetSpec::TightCycle { m: 4, s: 3, ell: 1 }).unwrap(),
            build_target(&TargetSpec::Clique { k: 5, s: 3 }).unwrap(),
        ];
        for h in &targets {
            for r in 1..=2 {
                let (mu, _) = mu_r(h, r).unwrap();
                assert_eq!(mu, mu_r_all_subgraphs(h, r), "target {h:?} r={r}");
            }
        }
    }

    #[test]
    fn tight_cycles_are_edge_balanced() {
        for (m, s) in [(4u32, 3u32), (5, 3), (6, 4)] {
            let c = build_target(&TargetSpec::TightCycle { m, s, ell: s - 1 }).unwrap();
            let rep = balance_report(&c, None).unwrap();
            assert!(rep.is_edge_balanced, "C_{m}^({s})");
            assert!(rep.is_balanced);
        }
    }

    #[test]
    fn cliques_are_edge_balanced() {
        for r in 2u32..=3 {
            for t in (r + 1)..=6 {
                let k = build_target(&TargetSpec::Clique { k: t, s: r }).unwrap();
                let rep = balance_report(&k, None).unwrap();
                assert!(rep.is_edge_balanced, "K_{t}^({r})");
            }
        }
    }

    #[test]
    fn g_of_c7_3() {
        let c = build_target(&TargetSpec::TightCycle { m: 7, s: 3, ell: 2 }).unwrap();
        let rep = balance_report(&c, None).unwrap();
        assert_eq!(rep.g, rational(3, 2));
    }

    #[test]
    fn non_edge_balanced_has_witness() {
        // Triangle plus pendant edge: the triangle has larger g.
        let f = build_target(&TargetSpec::Custom {
            s: 2,
            edges: vec![vec![1, 2], vec![1, 3], vec![2, 3], vec![3, 4]],
        })
        .unwrap();
        let rep = balance_report(&f, None).unwrap();
        assert!(!rep.is_edge_balanced);
        let w = rep.witness.unwrap();
        assert_eq!(w.vertices, vec![1, 2, 3]);
    }

    #[test]
    fn degeneracy_examples() {
        for (m, s, ell) in [(4u32, 3u32, 1u32), (5, 3, 2), (4, 4, 2), (3, 5, 2), (6, 4, 3)] {
            let c = build_target(&TargetSpec::TightCycle { m, s, ell }).unwrap();
            assert_eq!(
                degeneracy(&c).unwrap(),
                (s / (s - ell)) as u64,
                "C_{m}^({s},{ell})"
            );
            let p = build_target(&TargetSpec::TightPath { m, s, ell }).unwrap();
            assert_eq!(degeneracy(&p).unwrap(), 1);
        }
        for s in 2u32..=4 {
            let k = build_target(&TargetSpec::Clique { k: s + 1, s }).unwrap();
            assert_eq!(degeneracy(&k).unwrap(), s as u64);
        }
    }

    #[test]
    fn approx_decimal_formatting() {
        assert_eq!(approx_decimal(&rational(8, 5), 12), "1.60000000000");
        assert_eq!(approx_decimal(&rational(-1, 3), 3), "-0.333");
        assert_eq!(approx_decimal(&rational(0, 1), 12), "0");
        assert_eq!(approx_decimal(&rational(1, 1_000_000_000), 3), "1.00e-9");
    }
}
