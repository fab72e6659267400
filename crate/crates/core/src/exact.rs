//! Exact rational helpers.
//!
//! Every law check in this crate compares exact rationals. The only place
//! irrational quantities show up is the `ℓp` combine operation, whose values
//! are carried around as their `p`-th powers; comparing a root against a sum
//! of roots is done here without ever leaving the rationals.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow(r: &Rational, p: u32) -> Rational {
    num_traits::pow(r.clone(), p as usize)
}

/// Parses `"p/q"` or `"p"`. Decimal points and exponents are rejected.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() || s.contains(['.', 'e', 'E']) {
        return None;
    }
    let r = Rational::from_str(s).ok()?;
    Some(r)
}

/// Renders `p/q`, or `p` when the denominator is one.
pub fn render(r: &Rational) -> String {
    r.to_string()
}

/// Exact `p`-th root of a nonnegative rational, when it is rational.
pub fn perfect_root(r: &Rational, p: u32) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    if p == 1 {
        return Some(r.clone());
    }
    let n = r.numer().nth_root(p);
    let d = r.denom().nth_root(p);
    let cand = Rational::new(n, d);
    (pow(&cand, p) == *r).then_some(cand)
}

/// Decides `a^(1/p) <= b^(1/p) + c^(1/p)` exactly for nonnegative `a, b, c`.
///
/// When `b` and `c` differ by a rational `p`-th power factor the right side
/// collapses to a single root and the comparison is between rationals.
/// Otherwise equality is impossible (real radicals from distinct classes
/// are linearly independent over the rationals), so refining dyadic
/// enclosures of the three roots always separates the two sides.
pub fn root_le_sum(a: &Rational, b: &Rational, c: &Rational, p: u32) -> bool {
    debug_assert!(!a.is_negative() && !b.is_negative() && !c.is_negative());
    if p == 1 {
        return *a <= b + c;
    }
    if b.is_zero() {
        return a <= c;
    }
    if c.is_zero() {
        return a <= b;
    }
    // b + c <= (b^(1/p) + c^(1/p))^p <= 2^(p-1) (b + c)
    let sum = b + c;
    if *a <= sum {
        return true;
    }
    if *a > Rational::from_integer(BigInt::one() << (p - 1)) * &sum {
        return false;
    }
    if let Some(lambda) = perfect_root(&(b / c), p) {
        // b^(1/p) + c^(1/p) = (lambda + 1) c^(1/p)
        return *a <= pow(&(lambda + Rational::one()), p) * c;
    }
    let mut bits = 16u64;
    loop {
        let (a_lo, a_hi) = root_enclosure(a, p, bits);
        let (b_lo, b_hi) = root_enclosure(b, p, bits);
        let (c_lo, c_hi) = root_enclosure(c, p, bits);
        if a_hi < &b_lo + &c_lo {
            return true;
        }
        if a_lo > &b_hi + &c_hi {
            return false;
        }
        bits *= 2;
    }
}

/// Integers `lo, hi` with `lo <= r^(1/p) * 2^bits <= hi`.
fn root_enclosure(r: &Rational, p: u32, bits: u64) -> (BigInt, BigInt) {
    let scaled: BigInt = (r.numer() << (bits * p as u64)).div_floor(r.denom());
    let lo = scaled.nth_root(p);
    let hi = &lo + BigInt::one();
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_render() {
        assert_eq!(parse_rational("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("-4"), Some(int(-4)));
        assert_eq!(parse_rational("0.5"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational(""), None);
        assert_eq!(render(&ratio(6, 4)), "3/2");
        assert_eq!(render(&int(7)), "7");
    }

    #[test]
    fn perfect_roots() {
        assert_eq!(perfect_root(&ratio(8, 27), 3), Some(ratio(2, 3)));
        assert_eq!(perfect_root(&int(2), 2), None);
        assert_eq!(perfect_root(&int(0), 5), Some(int(0)));
    }

    #[test]
    fn root_sums_with_equality() {
        // 2 = 1 + 1 in cube roots of 8, 1, 1
        assert!(root_le_sum(&int(8), &int(1), &int(1), 3));
        assert!(!root_le_sum(&ratio(8001, 1000), &int(1), &int(1), 3));
        // cbrt 16 = 2 cbrt 2
        assert!(root_le_sum(&int(16), &int(2), &int(2), 3));
        assert!(!root_le_sum(&ratio(16001, 1000), &int(2), &int(2), 3));
    }

    #[test]
    fn root_sums_irrational() {
        // sqrt 5 ~ 2.236 vs sqrt 2 + sqrt 3 ~ 3.146
        assert!(root_le_sum(&int(5), &int(2), &int(3), 2));
        // sqrt 10 ~ 3.162 > 3.146
        assert!(!root_le_sum(&int(10), &int(2), &int(3), 2));
        // sqrt(2)+sqrt(3) squared = 5 + 2 sqrt 6 ~ 9.89898
        assert!(root_le_sum(&ratio(98989, 10000), &int(2), &int(3), 2));
        assert!(!root_le_sum(&ratio(98990, 10000), &int(2), &int(3), 2));
    }

    proptest! {
        #[test]
        fn root_sum_agrees_with_floats(a in 0u32..500, b in 0u32..500, c in 0u32..500, p in 1u32..4) {
            let lhs = (a as f64).powf(1.0 / p as f64);
            let rhs = (b as f64).powf(1.0 / p as f64) + (c as f64).powf(1.0 / p as f64);
            prop_assume!((lhs - rhs).abs() > 1e-9);
            prop_assert_eq!(root_le_sum(&int(a as i64), &int(b as i64), &int(c as i64), p), lhs <= rhs);
        }
    }
}
