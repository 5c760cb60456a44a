//! Threshold-exponent reports: all applicable lower and upper bounds on the
//! exponent `e` such that the target's appearance threshold is `n^e`, with
//! per-bound applicability certificates.

use num::bigint::BigInt;
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::cliques::{clique_upper_exponent, ell_k, excess_bound};
use super::starplus::{starplus_decompose, Condition14};
use super::{big_binomial, degeneracy, mu_r, Rational, RationalJson};
use crate::error::{Error, Result};
use crate::hypergraph::{build_target, contains_copy, MultiHypergraph, TargetSpec};

/// Which result produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// Lower bound from the vertex/edge counts of the whole target.
    CountLower,
    /// Lower bound from the densest sub-hypergraph.
    DensityLower,
    /// Exact threshold via degeneracy (the r = 1 case).
    DegeneracyExact,
    /// Exact threshold for starpluses with edge-balanced flower.
    StarplusExact,
    /// Exact threshold for full starpluses with small excess.
    FullStarplusExact,
    /// Generic upper bound by embedding into a full starplus.
    GenericUpper,
    /// Clique upper bound via the seed-size solver.
    CliqueUpper,
    /// Exact threshold for loose paths and cycles.
    PathCycleExact,
}

/// One bound with its provenance and an applicability certificate.
#[derive(Debug, Clone)]
pub struct Bound {
    pub source: BoundSource,
    pub exponent: Rational,
    pub certificate: String,
}

impl Bound {
    fn to_json(&self) -> serde_json::Value {
        json!({
            "source": serde_json::to_value(self.source).expect("enum"),
            "exponent": RationalJson::from_rational(&self.exponent),
            "certificate": self.certificate,
        })
    }
}

/// Exact-rational threshold exponent bounds for one target and `r`.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub r: u32,
    pub s: usize,
    pub v: u32,
    pub e: u64,
    /// Count-based lower bound exponent (clamped at 0).
    pub lower_general: Rational,
    /// Density-based lower bound exponent.
    pub lower_mu: Rational,
    pub mu: Rational,
    /// All lower bounds, including the exact ones.
    pub lower_bounds: Vec<Bound>,
    pub upper_bounds: Vec<Bound>,
    /// Set when the best lower bound equals the best upper bound.
    pub tight: bool,
}

impl ThresholdReport {
    pub fn best_lower(&self) -> Rational {
        self.lower_bounds
            .iter()
            .map(|b| b.exponent.clone())
            .max()
            .expect("count and density bounds always present")
    }

    pub fn best_upper(&self) -> Option<Rational> {
        self.upper_bounds.iter().map(|b| b.exponent.clone()).min()
    }

    pub fn upper_from(&self, source: BoundSource) -> Option<Rational> {
        self.upper_bounds
            .iter()
            .find(|b| b.source == source)
            .map(|b| b.exponent.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "r": self.r,
            "s": self.s,
            "v": self.v,
            "e": self.e,
            "mu": RationalJson::from_rational(&self.mu),
            "lower_general": RationalJson::from_rational(&self.lower_general),
            "lower_mu": RationalJson::from_rational(&self.lower_mu),
            "lower_bounds": self.lower_bounds.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
            "upper_bounds": self.upper_bounds.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
            "tight": self.tight,
        })
    }

    /// CSV rows carrying the same numeric content as the JSON form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,source,num,den,approx,certificate\n");
        let mut push = |kind: &str, source: &str, q: &Rational, cert: &str| {
            let j = RationalJson::from_rational(q);
            out.push_str(&format!(
                "{},{},{},{},{},\"{}\"\n",
                kind, source, j.num, j.den, j.approx, cert
            ));
        };
        push("mu", "", &self.mu, "");
        for b in &self.lower_bounds {
            push(
                "lower",
                &source_tag(b.source),
                &b.exponent,
                &b.certificate,
            );
        }
        for b in &self.upper_bounds {
            push(
                "upper",
                &source_tag(b.source),
                &b.exponent,
                &b.certificate,
            );
        }
        out.push_str(&format!("tight,,{},1,{},\"\"\n", u8::from(self.tight), u8::from(self.tight)));
        out
    }
}

fn source_tag(source: BoundSource) -> String {
    serde_json::to_value(source)
        .expect("enum")
        .as_str()
        .expect("string")
        .to_string()
}

/// Kind selector for the loose path/cycle exact thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    Path,
    Cycle,
}

/// Exact threshold exponent for `ell`-tight paths and cycles in the regime
/// `m >= 3`, `s >= 3`, `1 <= ell <= s/2`, `s - r >= ell`: paths give 0;
/// cycles give 0, 1/2 or `(r - s + 2 ell)/3` depending on `s - r` vs `2 ell`.
pub fn rsl_threshold(kind: CycleKind, m: u32, s: u32, ell: u32, r: u32) -> Result<Rational> {
    if m < 3 || s < 3 || ell < 1 || 2 * ell > s || s < r + ell {
        return Err(Error::parameter(format!(
            "not covered: need m >= 3, s >= 3, 1 <= ell <= s/2, s - r >= ell \
             (got m={m}, s={s}, ell={ell}, r={r})"
        )));
    }
    match kind {
        CycleKind::Path => Ok(Rational::zero()),
        CycleKind::Cycle => {
            let sr = s - r;
            if sr >= 2 * ell {
                Ok(Rational::zero())
            } else if sr == 2 * ell - 1 {
                Ok(Rational::new(BigInt::one(), BigInt::from(2)))
            } else {
                Ok(Rational::new(
                    BigInt::from((r + 2 * ell - s) as i64),
                    BigInt::from(3),
                ))
            }
        }
    }
}

/// Structural detection of the canonical families.
fn detect_clique(h: &MultiHypergraph) -> bool {
    h.is_simple()
        && h.support().len() == h.n() as usize
        && BigInt::from(h.edge_count()) == big_binomial(h.n() as u64, h.s() as u64)
        && h.distinct_edge_count() as u64 == h.edge_count()
}

fn detect_path(h: &MultiHypergraph) -> Option<(u32, u32)> {
    if !h.is_simple() || h.support().len() != h.n() as usize {
        return None;
    }
    let m = h.edge_count() as u32;
    if m < 2 {
        return None;
    }
    let (s, v) = (h.s() as u32, h.n());
    // v = (s - ell) m + ell  =>  ell = (s m - v)/(m - 1).
    let num = (s * m) as i64 - v as i64;
    if num <= 0 || num % (m as i64 - 1) != 0 {
        return None;
    }
    let ell = (num / (m as i64 - 1)) as u32;
    if !(1..s).contains(&ell) {
        return None;
    }
    let canon = build_target(&TargetSpec::TightPath { m, s, ell }).ok()?;
    contains_copy(h, &canon).ok()?.map(|_| (m, ell))
}

fn detect_cycle(h: &MultiHypergraph) -> Option<(u32, u32)> {
    if !h.is_simple() || h.support().len() != h.n() as usize {
        return None;
    }
    let m = h.edge_count() as u32;
    if m < 3 {
        return None;
    }
    let (s, v) = (h.s() as u32, h.n());
    if v % m != 0 || v / m >= s {
        return None;
    }
    let ell = s - v / m;
    if ell < 1 {
        return None;
    }
    let canon = build_target(&TargetSpec::TightCycle { m, s, ell }).ok()?;
    contains_copy(h, &canon).ok()?.map(|_| (m, ell))
}

/// Assembles every applicable exponent bound for the appearance threshold of
/// `h` in the process with `r` random vertices per step.
pub fn threshold_report(h: &MultiHypergraph, r: u32) -> Result<ThresholdReport> {
    let s = h.s();
    if r < 1 || r as usize >= s {
        return Err(Error::parameter(format!(
            "threshold report needs 1 <= r < s, got r={r}, s={s}"
        )));
    }
    if h.edge_count() == 0 || (h.n() as usize) < s {
        return Err(Error::parameter(
            "threshold report needs a target with at least one edge and v >= s",
        ));
    }
    let v = h.n();
    let e = h.edge_count();
    let k = v as i64;
    let r_big = Rational::from(BigInt::from(r as i64));

    let raw_general = r_big.clone()
        - Rational::new(
            BigInt::from(k - s as i64 + r as i64),
            BigInt::from(e as i64),
        );
    let lower_general = raw_general.max(Rational::zero());
    let (mu, mu_witness) = mu_r(h, r)?;
    let lower_mu = r_big.clone() - mu.recip();

    let mut lower_bounds = vec![
        Bound {
            source: BoundSource::CountLower,
            exponent: lower_general.clone(),
            certificate: format!("v={v}, e={e}: exponent r - (v - s + r)/e"),
        },
        Bound {
            source: BoundSource::DensityLower,
            exponent: lower_mu.clone(),
            certificate: format!(
                "densest sub-hypergraph on {:?} has f = {}",
                mu_witness.vertices, mu
            ),
        },
    ];
    let mut upper_bounds = Vec::new();

    if r == 1 {
        let d = degeneracy(h)?;
        debug_assert!(d >= 1);
        let exact = Rational::one() - Rational::new(BigInt::one(), BigInt::from(d as i64));
        let cert = format!("degeneracy d = {d}");
        lower_bounds.push(Bound {
            source: BoundSource::DegeneracyExact,
            exponent: exact.clone(),
            certificate: cert.clone(),
        });
        upper_bounds.push(Bound {
            source: BoundSource::DegeneracyExact,
            exponent: exact,
            certificate: cert,
        });
    } else {
        // Starplus decompositions with center size s - r.
        if let Some(d) = starplus_decompose(h, s - r as usize)? {
            let cond_ok = matches!(d.condition14, Condition14::Strict | Condition14::Equality);
            if cond_ok && d.flower_edge_balanced {
                let strictness = match d.condition14 {
                    Condition14::Strict => "strictly",
                    Condition14::Equality => "with equality",
                    Condition14::Violated => unreachable!(),
                };
                upper_bounds.push(Bound {
                    source: BoundSource::StarplusExact,
                    exponent: d.threshold_exponent(),
                    certificate: format!(
                        "center {:?}, rays={}, excess={}; ray-excess ratio condition holds {}; \
                         flower edge-balanced",
                        d.center, d.lambda1, d.lambda2, strictness
                    ),
                });
                if d.is_full() && v as usize > s {
                    let bound = excess_bound(r, s as u32, v)?;
                    if Rational::from(BigInt::from(d.lambda2 as i64)) <= bound {
                        upper_bounds.push(Bound {
                            source: BoundSource::FullStarplusExact,
                            exponent: d.threshold_exponent(),
                            certificate: format!(
                                "full starplus, excess {} within bound {}",
                                d.lambda2, bound
                            ),
                        });
                    }
                }
            }
        }

        // Generic upper bound: embed into a full starplus on the smallest
        // admissible vertex count. The excess bound grows with k, so the scan
        // terminates.
        let delta = h.delta_d(s - r as usize)?;
        let lambda = e - delta;
        let mut kk = v.max(s as u32 + 1);
        let generic_k = loop {
            if Rational::from(BigInt::from(lambda as i64)) <= excess_bound(r, s as u32, kk)? {
                break kk;
            }
            kk += 1;
        };
        let x = (generic_k as i64 - s as i64 + r as i64) as u64;
        let generic_exp = r_big.clone()
            - Rational::new(
                BigInt::from(x as i64),
                big_binomial(x, r as u64) + BigInt::from(lambda as i64),
            );
        upper_bounds.push(Bound {
            source: BoundSource::GenericUpper,
            exponent: generic_exp,
            certificate: format!(
                "embeds in a full starplus on k={generic_k} vertices with excess {lambda}"
            ),
        });

        // Clique upper bound via the seed-size solver.
        if detect_clique(h) {
            let ell = ell_k(r, s as u32, v)?;
            debug_assert!(ell >= s as u32 - r && ell <= v - r);
            upper_bounds.push(Bound {
                source: BoundSource::CliqueUpper,
                exponent: clique_upper_exponent(r, s as u32, v, ell),
                certificate: format!("clique on k={v} vertices, seed size ell={ell}"),
            });
        }

        // Exact loose path/cycle thresholds.
        if let Some((m, ell)) = detect_path(h) {
            if let Ok(exact) = rsl_threshold(CycleKind::Path, m, s as u32, ell, r) {
                let cert = format!("loose path, m={m}, ell={ell}");
                lower_bounds.push(Bound {
                    source: BoundSource::PathCycleExact,
                    exponent: exact.clone(),
                    certificate: cert.clone(),
                });
                upper_bounds.push(Bound {
                    source: BoundSource::PathCycleExact,
                    exponent: exact,
                    certificate: cert,
                });
            }
        } else if let Some((m, ell)) = detect_cycle(h) {
            if let Ok(exact) = rsl_threshold(CycleKind::Cycle, m, s as u32, ell, r) {
                let cert = format!("loose cycle, m={m}, ell={ell}");
                lower_bounds.push(Bound {
                    source: BoundSource::PathCycleExact,
                    exponent: exact.clone(),
                    certificate: cert.clone(),
                });
                upper_bounds.push(Bound {
                    source: BoundSource::PathCycleExact,
                    exponent: exact,
                    certificate: cert,
                });
            }
        }
    }

    let best_lower = lower_bounds
        .iter()
        .map(|b| b.exponent.clone())
        .max()
        .expect("nonempty");
    let best_upper = upper_bounds.iter().map(|b| b.exponent.clone()).min();
    let tight = best_upper.as_ref() == Some(&best_lower);

    Ok(ThresholdReport {
        r,
        s,
        v,
        e,
        lower_general,
        lower_mu,
        mu,
        lower_bounds,
        upper_bounds,
        tight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rational;
    use crate::hypergraph::{build_target, TargetSpec};

    fn clique(k: u32, s: u32) -> MultiHypergraph {
        build_target(&TargetSpec::Clique { k, s }).unwrap()
    }

    #[test]
    fn k5_is_tight() {
        let rep = threshold_report(&clique(5, 3), 2).unwrap();
        assert_eq!(rep.best_lower(), rational(8, 5));
        assert_eq!(rep.best_upper(), Some(rational(8, 5)));
        assert!(rep.tight);
    }

    #[test]
    fn k6_bounds() {
        let rep = threshold_report(&clique(6, 3), 2).unwrap();
        assert_eq!(rep.lower_general, rational(7, 4));
        assert_eq!(rep.best_lower(), rational(7, 4));
        assert_eq!(
            rep.upper_from(BoundSource::CliqueUpper),
            Some(rational(9, 5))
        );
        assert_eq!(
            rep.upper_from(BoundSource::GenericUpper),
            Some(rational(2, 1) - rational(2, 11))
        );
        assert!(!rep.tight);
    }

    #[test]
    fn k7_bounds() {
        let rep = threshold_report(&clique(7, 3), 2).unwrap();
        assert_eq!(rep.best_lower(), rational(64, 35));
        assert_eq!(
            rep.upper_from(BoundSource::CliqueUpper),
            Some(rational(13, 7))
        );
    }

    #[test]
    fn k8_follows_the_seed_formula() {
        let rep = threshold_report(&clique(8, 3), 2).unwrap();
        assert_eq!(
            rep.upper_from(BoundSource::CliqueUpper),
            Some(rational(21, 11))
        );
        assert_ne!(
            rep.upper_from(BoundSource::CliqueUpper),
            Some(rational(107, 56))
        );
        assert_eq!(rep.lower_general, rational(105, 56));
    }

    #[test]
    fn example_five_lower_bounds() {
        let h = crate::analysis::tests::example_five();
        let rep = threshold_report(&h, 2).unwrap();
        assert_eq!(rep.lower_general, rational(6, 5));
        assert_eq!(rep.lower_mu, rational(5, 4));
    }

    #[test]
    fn loose_cycle_42_exact() {
        for m in 4..=6u32 {
            let c = build_target(&TargetSpec::TightCycle { m, s: 4, ell: 2 }).unwrap();
            let rep = threshold_report(&c, 2).unwrap();
            assert_eq!(rep.best_lower(), rational(2, 3), "m={m}");
            assert_eq!(rep.best_upper(), Some(rational(2, 3)));
            assert!(rep.tight);
            assert_eq!(rep.lower_mu, rational(2, m as i64));
        }
    }

    #[test]
    fn wheel_exact() {
        let w = build_target(&TargetSpec::Wheel { k: 8, s: 5, c: 1 }).unwrap();
        let rep = threshold_report(&w, 4).unwrap();
        assert_eq!(rep.best_lower(), rational(7, 2));
        assert_eq!(rep.best_upper(), Some(rational(7, 2)));
        assert!(rep.tight);
    }

    #[test]
    fn r1_degeneracy_threshold() {
        // Loose cycles under r = 1: exponent 0, 1/2 or 1 - 1/s by degeneracy.
        let c = build_target(&TargetSpec::TightCycle { m: 4, s: 3, ell: 1 }).unwrap();
        let rep = threshold_report(&c, 1).unwrap();
        assert_eq!(rep.best_upper(), Some(rational(0, 1)));
        assert!(rep.tight);
        let t = build_target(&TargetSpec::TightCycle { m: 5, s: 3, ell: 2 }).unwrap();
        let rep = threshold_report(&t, 1).unwrap();
        assert_eq!(rep.best_upper(), Some(rational(2, 3)));
        let h = build_target(&TargetSpec::TightCycle { m: 4, s: 4, ell: 2 }).unwrap();
        let rep = threshold_report(&h, 1).unwrap();
        assert_eq!(rep.best_upper(), Some(rational(1, 2)));
    }

    #[test]
    fn bounds_are_consistent() {
        let targets = vec![
            clique(4, 3),
            clique(5, 3),
            clique(6, 3),
            clique(5, 4),
            build_target(&TargetSpec::TightCycle { m: 4, s: 3, ell: 1 }).unwrap(),
            build_target(&TargetSpec::TightPath { m: 4, s: 5, ell: 2 }).unwrap(),
            build_target(&TargetSpec::Wheel { k: 8, s: 5, c: 1 }).unwrap(),
            crate::analysis::tests::example_five(),
        ];
        for h in &targets {
            for r in 1..h.s() as u32 {
                let rep = threshold_report(h, r).unwrap();
                assert!(rep.lower_mu >= rep.lower_general, "{h:?} r={r}");
                let best_lower = rep.best_lower();
                for u in &rep.upper_bounds {
                    assert!(
                        u.exponent >= best_lower,
                        "{h:?} r={r}: upper {:?} < lower {}",
                        u,
                        best_lower
                    );
                }
                for b in rep.lower_bounds.iter().chain(&rep.upper_bounds) {
                    assert!(b.exponent >= rational(0, 1));
                    assert!(b.exponent <= rational(r as i64, 1));
                }
            }
        }
    }

    #[test]
    fn rsl_regimes() {
        assert_eq!(
            rsl_threshold(CycleKind::Path, 5, 5, 2, 2).unwrap(),
            rational(0, 1)
        );
        assert_eq!(
            rsl_threshold(CycleKind::Cycle, 4, 3, 1, 2).unwrap(),
            rational(1, 2)
        );
        assert_eq!(
            rsl_threshold(CycleKind::Cycle, 4, 4, 2, 2).unwrap(),
            rational(2, 3)
        );
        assert_eq!(
            rsl_threshold(CycleKind::Cycle, 4, 5, 1, 2).unwrap(),
            rational(0, 1)
        );
        assert!(rsl_threshold(CycleKind::Cycle, 2, 4, 2, 2).is_err());
        assert!(rsl_threshold(CycleKind::Cycle, 4, 4, 3, 2).is_err());
        assert!(rsl_threshold(CycleKind::Cycle, 4, 6, 2, 5).is_err());
    }

    #[test]
    fn detection() {
        assert!(detect_clique(&clique(5, 3)));
        assert!(!detect_clique(
            &build_target(&TargetSpec::TightCycle { m: 4, s: 3, ell: 1 }).unwrap()
        ));
        let p = build_target(&TargetSpec::TightPath { m: 4, s: 5, ell: 2 }).unwrap();
        assert_eq!(detect_path(&p), Some((4, 2)));
        let c = build_target(&TargetSpec::TightCycle { m: 5, s: 4, ell: 2 }).unwrap();
        assert_eq!(detect_cycle(&c), Some((5, 2)));
        assert_eq!(detect_path(&c), None);
    }
}
