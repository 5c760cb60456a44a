//! The subgraph-count scale `min over F' of n^{v'} p^{e'}`: its minimizer
//! governs which sub-hypergraph is the bottleneck for edge-disjoint copies.

use num::bigint::BigInt;
use num::pow::pow;
use num::{One, ToPrimitive, Zero};

use crate::analysis::Rational;
use crate::error::{Error, Result};
use crate::hypergraph::{Edge, MultiHypergraph, Vertex};

#[derive(Debug, Clone)]
pub struct PhiResult {
    /// The exact minimum n^v p^e.
    pub value: Rational,
    /// Vertex and edge counts of the minimizer.
    pub v: u32,
    pub e: u64,
    /// Vertex set of the minimizing sub-hypergraph.
    pub minimizer: Vec<Vertex>,
    /// log10 of the value, for display.
    pub log10: f64,
}

/// Minimizes `n^{v'} p^{e'}` over sub-hypergraphs of `f` with at least one
/// edge: induced enumeration over vertex subsets plus a sweep over possible
/// edge counts (for p < 1 the induced edge count always wins the sweep).
pub fn phi_f(f: &MultiHypergraph, n: u64, p: &Rational) -> Result<PhiResult> {
    if f.edge_count() == 0 {
        return Err(Error::parameter("phi needs at least one edge"));
    }
    if p <= &Rational::zero() || p >= &Rational::one() {
        return Err(Error::parameter("phi needs 0 < p < 1"));
    }
    if f.n() > 24 {
        return Err(Error::resource("phi enumeration capped at 24 vertices"));
    }
    let all: Vec<Vertex> = (1..=f.n()).collect();
    let n_big = Rational::from(BigInt::from(n));
    let mut best: Option<(Rational, u32, u64, Vec<Vertex>)> = None;
    for mask in 1u32..(1 << all.len()) {
        let vs: Vec<Vertex> = (0..all.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| all[i])
            .collect();
        let within = Edge::from_sorted(vs.clone());
        let e_max = f.edges_within(&within);
        if e_max == 0 {
            continue;
        }
        for e in 1..=e_max {
            let value = pow(n_big.clone(), vs.len()) * pow(p.clone(), e as usize);
            if best.as_ref().map_or(true, |(b, _, _, _)| value < *b) {
                best = Some((value, vs.len() as u32, e, vs.clone()));
            }
        }
    }
    let (value, v, e, minimizer) = best.expect("at least one edge");
    let log10 = value.numer().to_f64().map_or(f64::NEG_INFINITY, f64::log10)
        - value.denom().to_f64().map_or(0.0, f64::log10);
    Ok(PhiResult {
        value,
        v,
        e,
        minimizer,
        log10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{balance_report, density_g, rational};
    use crate::hypergraph::{build_target, TargetSpec};

    #[test]
    fn single_edge() {
        let f = build_target(&TargetSpec::Clique { k: 3, s: 3 }).unwrap();
        let got = phi_f(&f, 50, &rational(1, 100)).unwrap();
        assert_eq!(got.v, 3);
        assert_eq!(got.e, 1);
        assert_eq!(got.value, rational(50 * 50 * 50, 100));
    }

    #[test]
    fn edge_balanced_pattern_minimizes_at_itself() {
        // For edge-balanced F and p strictly below n^{-1/g(F)}, the whole
        // pattern is the unique minimizer.
        let targets = [
            build_target(&TargetSpec::TightCycle { m: 5, s: 3, ell: 2 }).unwrap(),
            build_target(&TargetSpec::Clique { k: 4, s: 2 }).unwrap(),
            build_target(&TargetSpec::Clique { k: 5, s: 3 }).unwrap(),
        ];
        for f in &targets {
            let rep = balance_report(f, None).unwrap();
            assert!(rep.is_edge_balanced);
            let g = density_g(f).unwrap();
            // p = 1 / (2 * ceil(n^{1/g})) < n^{-1/g}.
            let n: u64 = 1000;
            let exp = (g.denom().to_f64().unwrap() / g.numer().to_f64().unwrap())
                .min(f.s() as f64);
            let den = 2 * (1000f64.powf(exp).ceil() as i64);
            let p = rational(1, den);
            let got = phi_f(f, n, &p).unwrap();
            assert_eq!(got.v, f.n(), "target {f:?}");
            assert_eq!(got.e, f.edge_count());
        }
    }

    #[test]
    fn unbalanced_pattern_minimizes_at_dense_part() {
        // Triangle plus pendant edge: for 1/n < p < n^{-1/2} the triangle is
        // the bottleneck (it beats both the single edge and the whole graph).
        let f = build_target(&TargetSpec::Custom {
            s: 2,
            edges: vec![vec![1, 2], vec![1, 3], vec![2, 3], vec![3, 4]],
        })
        .unwrap();
        let got = phi_f(&f, 100, &rational(1, 20)).unwrap();
        assert_eq!(got.minimizer, vec![1, 2, 3]);
        assert_eq!(got.e, 3);
        assert_eq!(got.value, rational(125, 1));
    }

    #[test]
    fn parameter_errors() {
        let f = build_target(&TargetSpec::Clique { k: 3, s: 3 }).unwrap();
        assert!(phi_f(&f, 10, &rational(0, 1)).is_err());
        assert!(phi_f(&f, 10, &rational(3, 2)).is_err());
    }
}
