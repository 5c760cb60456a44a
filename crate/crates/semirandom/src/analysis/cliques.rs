//! The clique-strategy constraint solver: the smallest seed-clique size
//! `ell` for which the recursive clique strategy's second-moment bookkeeping
//! closes, plus the closed forms available in the (2, 3) case.

use num::bigint::BigInt;
use num::Zero;

use super::{big_binomial, falling_factorial, Rational};
use crate::error::{Error, Result};

/// Left-hand side of the seed-size constraint at a given `ell`:
/// `k - ell - r - (k - ell)/(C(k,s) - C(ell,s)) * sum_j C(ell, s-j) [C(k-ell, j) - C(r, j)]`.
fn constraint_lhs(r: u64, s: u64, k: u64, ell: u64) -> Rational {
    let mut sum = BigInt::zero();
    for j in 1..=r {
        let term = big_binomial(ell, s - j.min(s)) * (big_binomial(k - ell, j) - big_binomial(r, j));
        sum += term;
    }
    let den = big_binomial(k, s) - big_binomial(ell, s);
    debug_assert!(den > BigInt::zero());
    let linear = Rational::from(BigInt::from((k as i64) - (ell as i64) - (r as i64)));
    linear - Rational::new(BigInt::from((k - ell) as i64) * sum, den)
}

/// Smallest `ell` in `[max(1, s - r), k - r]` satisfying the seed-size
/// constraint, evaluated in exact rational arithmetic. `ell = k - r` always
/// satisfies it, so the search is total.
pub fn ell_k(r: u32, s: u32, k: u32) -> Result<u32> {
    if !(2 <= r && r < s && s <= k) {
        return Err(Error::parameter(format!(
            "ell_k needs 2 <= r < s <= k, got r={r}, s={s}, k={k}"
        )));
    }
    let (r, s, k) = (r as u64, s as u64, k as u64);
    let lo = 1.max(s - r);
    for ell in lo..=(k - r) {
        if constraint_lhs(r, s, k, ell) <= Rational::zero() {
            return Ok(ell as u32);
        }
    }
    unreachable!("ell = k - r always satisfies the constraint");
}

/// Closed form for the (2, 3) case: `ceil(k + 3/2 - sqrt(6k + 1/4))`,
/// evaluated by exact integer comparisons (no floating point). The ceiling is
/// the smallest integer `t` with `2t >= 2k + 3` or `(2k + 3 - 2t)^2 <= 24k + 1`.
pub fn ell_k_closed_form_23(k: u32) -> Result<u32> {
    if k < 3 {
        return Err(Error::parameter("closed form needs k >= s = 3"));
    }
    let k = k as i64;
    for t in 1..=k {
        let gap = 2 * k + 3 - 2 * t;
        if gap <= 0 || gap * gap <= 24 * k + 1 {
            return Ok(t as u32);
        }
    }
    unreachable!("t = k satisfies the bracketing inequality");
}

/// Quadratic criterion for the (2, 3) case: the smallest `ell` with
/// `ell^2 - (2k + 3) ell + k^2 - 3k + 2 <= 0`.
pub fn ell_k_quadratic_23(k: u32) -> Result<u32> {
    if k < 3 {
        return Err(Error::parameter("quadratic criterion needs k >= 3"));
    }
    let k = k as i64;
    for ell in 1..=k {
        if ell * ell - (2 * k + 3) * ell + k * k - 3 * k + 2 <= 0 {
            return Ok(ell as u32);
        }
    }
    Err(Error::parameter(format!(
        "no ell in [1, {k}] satisfies the quadratic criterion"
    )))
}

/// The falling-factorial quotient `f_s(k, ell) = ((k)_s - (ell)_s)/(k - ell)`,
/// strictly increasing in both variables. Appears in the exponent of the
/// clique upper bound.
pub fn f_s_kl(k: i64, ell: i64, s: u32) -> Result<Rational> {
    if k <= ell || ell < 0 {
        return Err(Error::parameter(format!(
            "f_s needs k > ell >= 0, got k={k}, ell={ell}"
        )));
    }
    let num = falling_factorial(k, s as u64) - falling_factorial(ell, s as u64);
    Ok(Rational::new(num, BigInt::from(k - ell)))
}

/// Exponent of the clique upper bound at seed size `ell`:
/// `r - (k - ell) / (C(k, s) - C(ell, s))`.
pub fn clique_upper_exponent(r: u32, s: u32, k: u32, ell: u32) -> Rational {
    let num = BigInt::from((k - ell) as i64);
    let den = big_binomial(k as u64, s as u64) - big_binomial(ell as u64, s as u64);
    Rational::from(BigInt::from(r as i64)) - Rational::new(num, den)
}

/// Right-hand side of the full-starplus excess bound:
/// `(r * C(k - s + r, r) - (k - s + r)) / (k - s)`, increasing in `k`.
pub fn excess_bound(r: u32, s: u32, k: u32) -> Result<Rational> {
    if k <= s {
        return Err(Error::parameter("excess bound needs k > s"));
    }
    let x = (k - s + r) as u64;
    let num = BigInt::from(r as i64) * big_binomial(x, r as u64) - BigInt::from(x as i64);
    Ok(Rational::new(num, BigInt::from((k - s) as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    #[test]
    fn spot_values() {
        assert_eq!(ell_k(2, 3, 6).unwrap(), 2);
        assert_eq!(ell_k(2, 3, 7).unwrap(), 2);
        assert_eq!(ell_k(2, 3, 8).unwrap(), 3);
        assert_eq!(ell_k(2, 3, 20).unwrap(), 11);
        assert_eq!(ell_k(2, 3, 4).unwrap(), 1);
        assert_eq!(ell_k(2, 3, 5).unwrap(), 1);
    }

    #[test]
    fn trivial_case_k_equals_s() {
        for r in 2u32..=4 {
            for s in (r + 1)..=6 {
                assert_eq!(ell_k(r, s, s).unwrap(), s - r);
            }
        }
    }

    #[test]
    fn closed_form_matches_search() {
        for k in 4..=200u32 {
            assert_eq!(
                ell_k(2, 3, k).unwrap(),
                ell_k_closed_form_23(k).unwrap(),
                "k={k}"
            );
        }
    }

    #[test]
    fn closed_form_matches_float_ceiling() {
        for k in 3..=2000u32 {
            let x = k as f64 + 1.5 - (6.0 * k as f64 + 0.25).sqrt();
            assert_eq!(ell_k_closed_form_23(k).unwrap() as f64, x.ceil(), "k={k}");
        }
    }

    #[test]
    fn quadratic_matches_search() {
        for k in 4..=200u32 {
            assert_eq!(ell_k(2, 3, k).unwrap(), ell_k_quadratic_23(k).unwrap());
        }
    }

    #[test]
    fn f_s_examples() {
        assert_eq!(f_s_kl(6, 2, 3).unwrap(), Rational::from_i64(30).unwrap());
        // Denominator 1 when ell = k - 1.
        for k in 2..=8i64 {
            for s in 1..=4u32 {
                let direct = falling_factorial(k, s as u64) - falling_factorial(k - 1, s as u64);
                assert_eq!(f_s_kl(k, k - 1, s).unwrap(), Rational::from(direct));
            }
        }
        assert!(f_s_kl(3, 3, 2).is_err());
        assert!(f_s_kl(2, 3, 2).is_err());
    }

    #[test]
    fn parameter_checks() {
        assert!(ell_k(1, 3, 5).is_err());
        assert!(ell_k(3, 3, 5).is_err());
        assert!(ell_k(2, 3, 2).is_err());
    }
}
