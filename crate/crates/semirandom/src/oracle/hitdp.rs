//! Exact probability that t i.i.d. uniform r-set draws cover a fixed
//! multiset requirement: the i-th listed r-set must be drawn at least m_i
//! times. Dynamic program over capped count vectors; each step hits any
//! listed set with probability 1/C(n, r) and "something else" with the
//! remaining mass.

use num::bigint::BigInt;
use num::{One, ToPrimitive, Zero};

use crate::analysis::{big_binomial, Rational};
use crate::error::{Error, Result};
use crate::hypergraph::Edge;

/// Arithmetic mode for the dynamic program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpMode {
    /// Exact rationals when the state space is at most 10^4 and t at most
    /// 10^4, floating point otherwise.
    Auto,
    Rational,
    Float,
}

#[derive(Debug, Clone)]
pub struct HitProbability {
    pub value: f64,
    /// Present in rational mode.
    pub exact: Option<Rational>,
    /// "rational" or "float".
    pub mode: &'static str,
    /// Crude bound on the accumulated relative floating-point error
    /// (operations times machine epsilon); 0 in rational mode.
    pub error_bound: f64,
}

const MAX_STATES: u128 = 10_000_000;
const RATIONAL_STATES: u128 = 10_000;
const RATIONAL_T: u64 = 10_000;

fn state_space(required: &[(Edge, u32)]) -> u128 {
    required
        .iter()
        .fold(1u128, |acc, (_, m)| acc.saturating_mul(*m as u128 + 1))
}

fn validate(required: &[(Edge, u32)], n: u32, r: u32) -> Result<()> {
    if r > n {
        return Err(Error::parameter("r exceeds n"));
    }
    let mut seen = std::collections::HashSet::new();
    for (e, m) in required {
        if e.len() != r as usize {
            return Err(Error::parameter(format!(
                "required set {e:?} has size {}, expected r={r}",
                e.len()
            )));
        }
        if let Some(&max) = e.vertices().last() {
            if max > n {
                return Err(Error::parameter(format!("required set {e:?} outside [1, {n}]")));
            }
        }
        if *m < 1 {
            return Err(Error::parameter("multiplicities must be at least 1"));
        }
        if !seen.insert(e.clone()) {
            return Err(Error::parameter(format!("required set {e:?} listed twice")));
        }
    }
    Ok(())
}

/// Probability that `t` draws hit every listed set at least its required
/// multiplicity.
pub fn exact_hit_probability(
    required: &[(Edge, u32)],
    n: u32,
    r: u32,
    t: u64,
    mode: DpMode,
) -> Result<HitProbability> {
    let curve = hit_probability_curve(required, n, r, t, mode)?;
    Ok(curve.into_iter().last().expect("curve has t+1 entries"))
}

/// The whole curve `P(requirement met by time tau)` for `tau = 0..=t_max`.
/// One pass of the same dynamic program; useful for tuning step counts.
pub fn hit_probability_curve(
    required: &[(Edge, u32)],
    n: u32,
    r: u32,
    t_max: u64,
    mode: DpMode,
) -> Result<Vec<HitProbability>> {
    validate(required, n, r)?;
    let states = state_space(required);
    if states > MAX_STATES {
        return Err(Error::resource(format!(
            "state space {states} exceeds the {MAX_STATES} cap"
        )));
    }
    let rational = match mode {
        DpMode::Rational => true,
        DpMode::Float => false,
        DpMode::Auto => states <= RATIONAL_STATES && t_max <= RATIONAL_T,
    };
    if rational {
        run_rational(required, n, r, t_max, states as usize)
    } else {
        run_float(required, n, r, t_max, states as usize)
    }
}

/// Mixed-radix layout of the count vector: set i contributes a digit in
/// [0, m_i] with stride prod_{j < i} (m_j + 1).
struct Layout {
    strides: Vec<usize>,
    caps: Vec<u32>,
    full: usize,
}

impl Layout {
    fn new(required: &[(Edge, u32)], states: usize) -> Layout {
        let mut strides = Vec::with_capacity(required.len());
        let mut caps = Vec::with_capacity(required.len());
        let mut acc = 1usize;
        for (_, m) in required {
            strides.push(acc);
            caps.push(*m);
            acc *= *m as usize + 1;
        }
        Layout {
            strides,
            caps,
            full: states - 1,
        }
    }

    fn digit(&self, state: usize, i: usize) -> u32 {
        ((state / self.strides[i]) % (self.caps[i] as usize + 1)) as u32
    }
}

fn run_rational(
    required: &[(Edge, u32)],
    n: u32,
    r: u32,
    t_max: u64,
    states: usize,
) -> Result<Vec<HitProbability>> {
    let layout = Layout::new(required, states);
    let q = required.len();
    let pi = Rational::new(BigInt::one(), big_binomial(n as u64, r as u64));
    let stay = Rational::one() - Rational::from(BigInt::from(q as i64)) * pi.clone();
    if stay < Rational::zero() {
        return Err(Error::parameter("more required sets than possible draws"));
    }
    let mut dp: Vec<Rational> = vec![Rational::zero(); states];
    dp[0] = Rational::one();
    let mut out = Vec::with_capacity(t_max as usize + 1);
    let snapshot = |dp: &Vec<Rational>| {
        let exact = dp[layout.full].clone();
        HitProbability {
            value: exact.to_f64().unwrap_or(0.0),
            exact: Some(exact),
            mode: "rational",
            error_bound: 0.0,
        }
    };
    out.push(snapshot(&dp));
    for _ in 0..t_max {
        let mut next: Vec<Rational> = vec![Rational::zero(); states];
        for state in 0..states {
            if dp[state].is_zero() {
                continue;
            }
            let mass = &dp[state];
            next[state] += mass * stay.clone();
            for i in 0..q {
                let d = layout.digit(state, i);
                let target = if d < layout.caps[i] {
                    state + layout.strides[i]
                } else {
                    state
                };
                next[target] += mass * pi.clone();
            }
        }
        dp = next;
        out.push(snapshot(&dp));
    }
    Ok(out)
}

fn run_float(
    required: &[(Edge, u32)],
    n: u32,
    r: u32,
    t_max: u64,
    states: usize,
) -> Result<Vec<HitProbability>> {
    let layout = Layout::new(required, states);
    let q = required.len();
    let cnr = big_binomial(n as u64, r as u64)
        .to_f64()
        .ok_or_else(|| Error::resource("C(n, r) overflows f64"))?;
    let pi = 1.0 / cnr;
    let stay = 1.0 - q as f64 * pi;
    if stay < 0.0 {
        return Err(Error::parameter("more required sets than possible draws"));
    }
    let mut dp: Vec<f64> = vec![0.0; states];
    dp[0] = 1.0;
    let mut next: Vec<f64> = vec![0.0; states];
    let mut ops: f64 = 0.0;
    let mut out = Vec::with_capacity(t_max as usize + 1);
    let snapshot = |dp: &Vec<f64>, ops: f64| HitProbability {
        value: dp[layout.full],
        exact: None,
        mode: "float",
        error_bound: ops * f64::EPSILON,
    };
    out.push(snapshot(&dp, ops));
    for _ in 0..t_max {
        next.iter_mut().for_each(|x| *x = 0.0);
        for state in 0..states {
            let mass = dp[state];
            if mass == 0.0 {
                continue;
            }
            next[state] += mass * stay;
            for i in 0..q {
                let d = layout.digit(state, i);
                let target = if d < layout.caps[i] {
                    state + layout.strides[i]
                } else {
                    state
                };
                next[target] += mass * pi;
            }
        }
        std::mem::swap(&mut dp, &mut next);
        ops += (states * (q + 1)) as f64;
        out.push(snapshot(&dp, ops));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::pow::pow;

    fn edge(v: &[u32]) -> Edge {
        Edge::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_set_closed_form() {
        // One r-set with multiplicity 1: P = 1 - (1 - 1/C(n,r))^t, exactly.
        let required = vec![(edge(&[1, 2]), 1u32)];
        for (n, t) in [(10u32, 7u64), (30, 50), (12, 0)] {
            let got = exact_hit_probability(&required, n, 2, t, DpMode::Rational).unwrap();
            let pi = Rational::new(BigInt::one(), big_binomial(n as u64, 2));
            let expect = Rational::one() - pow(Rational::one() - pi, t as usize);
            assert_eq!(got.exact.unwrap(), expect, "n={n}, t={t}");
        }
    }

    #[test]
    fn doubled_triangle_exact_vs_asymptotic() {
        // Pairs 12 (twice), 13, 23 at n=100, t=99. Against the leading-order
        // p^4/2 the exact value sits near 0.911: the draw-ordering factor
        // (t)_4/t^4 and the no-extra-hit factor (1 - 3/C(n,2))^t each cost
        // about 6%. Against the sharper C(t,4) (4!/2) pi^4 form the ratio is
        // within 5% of 1. Both are pinned here; the value itself is verified
        // against an independent inclusion-exclusion computation.
        let required = vec![
            (edge(&[1, 2]), 2u32),
            (edge(&[1, 3]), 1),
            (edge(&[2, 3]), 1),
        ];
        let got = exact_hit_probability(&required, 100, 2, 99, DpMode::Rational).unwrap();
        assert!((got.value - 7.287475954597484e-8).abs() < 1e-18);
        let p: f64 = 99.0 / 4950.0;
        let leading = p.powi(4) / 2.0;
        let ratio_leading = got.value / leading;
        assert!((0.90..0.92).contains(&ratio_leading), "ratio {ratio_leading}");
        let t = 99.0f64;
        let pi: f64 = 1.0 / 4950.0;
        let combinatorial = t * (t - 1.0) * (t - 2.0) * (t - 3.0) / 2.0 * pi.powi(4);
        let ratio_comb = got.value / combinatorial;
        assert!((0.95..=1.05).contains(&ratio_comb), "ratio {ratio_comb}");
    }

    #[test]
    fn monotone_in_t_and_n() {
        let required = vec![(edge(&[1, 2]), 2u32), (edge(&[2, 3]), 1)];
        let curve = hit_probability_curve(&required, 20, 2, 60, DpMode::Rational).unwrap();
        for w in curve.windows(2) {
            assert!(w[0].exact.as_ref().unwrap() <= w[1].exact.as_ref().unwrap());
        }
        let p_small = exact_hit_probability(&required, 15, 2, 40, DpMode::Rational).unwrap();
        let p_large = exact_hit_probability(&required, 40, 2, 40, DpMode::Rational).unwrap();
        assert!(p_small.exact.unwrap() >= p_large.exact.unwrap());
    }

    #[test]
    fn transition_mass_is_conserved() {
        // In rational mode the state masses sum to exactly 1 at every step.
        let required = vec![(edge(&[1, 2]), 2u32), (edge(&[1, 3]), 2)];
        let states = state_space(&required) as usize;
        let layout = Layout::new(&required, states);
        let pi = Rational::new(BigInt::one(), big_binomial(12, 2));
        let stay = Rational::one() - Rational::from(BigInt::from(2)) * pi.clone();
        let mut dp: Vec<Rational> = vec![Rational::zero(); states];
        dp[0] = Rational::one();
        for _ in 0..25 {
            let mut next = vec![Rational::zero(); states];
            for state in 0..states {
                let mass = dp[state].clone();
                next[state] += mass.clone() * stay.clone();
                for i in 0..2 {
                    let d = layout.digit(state, i);
                    let target = if d < layout.caps[i] {
                        state + layout.strides[i]
                    } else {
                        state
                    };
                    next[target] += mass.clone() * pi.clone();
                }
            }
            dp = next;
            let total: Rational = dp.iter().cloned().sum();
            assert_eq!(total, Rational::one());
        }
    }

    #[test]
    fn float_mode_agrees_with_rational() {
        let required = vec![
            (edge(&[1, 2]), 2u32),
            (edge(&[1, 3]), 1),
            (edge(&[2, 3]), 1),
        ];
        let a = exact_hit_probability(&required, 60, 2, 200, DpMode::Rational).unwrap();
        let b = exact_hit_probability(&required, 60, 2, 200, DpMode::Float).unwrap();
        assert!((a.value - b.value).abs() <= 1e-10 * a.value.max(1e-300));
    }

    #[test]
    fn parameter_errors() {
        assert!(exact_hit_probability(&[(edge(&[1, 2, 3]), 1)], 10, 2, 5, DpMode::Auto).is_err());
        assert!(exact_hit_probability(&[(edge(&[1, 2]), 0)], 10, 2, 5, DpMode::Auto).is_err());
        let dup = vec![(edge(&[1, 2]), 1u32), (edge(&[1, 2]), 1)];
        assert!(exact_hit_probability(&dup, 10, 2, 5, DpMode::Auto).is_err());
    }

    #[test]
    fn ratio_approaches_one_under_scaling() {
        // For a fixed requirement and t = C(n,r)/sqrt(n), the exact value
        // over p^m / prod(m_i!) tends to 1 from below as n grows.
        let instances: Vec<Vec<(Edge, u32)>> = vec![
            vec![(edge(&[1, 2]), 2u32)],
            vec![
                (edge(&[1, 2]), 2),
                (edge(&[1, 3]), 1),
                (edge(&[2, 3]), 1),
            ],
            vec![(edge(&[1, 2]), 1), (edge(&[3, 4]), 1), (edge(&[1, 4]), 2)],
        ];
        for required in &instances {
            let m: u32 = required.iter().map(|(_, m)| *m).sum();
            let fact: f64 = required
                .iter()
                .map(|(_, mi)| (1..=*mi).map(|x| x as f64).product::<f64>())
                .product();
            let mut prev_gap = f64::INFINITY;
            for n in [50u32, 100, 200] {
                let cnr = big_binomial(n as u64, 2).to_f64().unwrap();
                let t = (cnr / (n as f64).sqrt()).round() as u64;
                let got = exact_hit_probability(required, n, 2, t, DpMode::Float).unwrap();
                let p = t as f64 / cnr;
                let asym = p.powi(m as i32) / fact;
                let ratio = got.value / asym;
                let gap = (ratio - 1.0).abs();
                assert!(gap < prev_gap, "n={n}: gap {gap} did not shrink from {prev_gap}");
                prev_gap = gap;
            }
            assert!(prev_gap < 0.2);
        }
    }
}
