//! Exact integer and rational helpers: integer square root, perfect-square
//! testing, divisor counting, triangular numbers.
//!
//! Everything here is exact; no floating point.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Reduced rational with positive denominator (`num-rational` normalizes
/// eagerly on construction).
pub type Rational = num_rational::BigRational;

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(Error::Domain(format!("isqrt of negative {n}")));
    }
    Ok(n.sqrt())
}

/// Tests whether `n` is a perfect square, returning the nonnegative root.
/// Negative inputs are simply not squares.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Perfect-square test on machine words, used by the survey fast path.
pub fn is_perfect_square_u64(n: u64) -> Option<u64> {
    // quick residue filter: squares mod 16 are 0,1,4,9
    if !matches!(n & 15, 0 | 1 | 4 | 9) {
        return None;
    }
    let r = isqrt_u64(n);
    if r * r == n {
        Some(r)
    } else {
        None
    }
}

/// Floor square root for `u64`, float guess plus correction.
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |sq| sq <= n) {
        r += 1;
    }
    r
}

/// Number of positive divisors of `n`, by trial division up to `isqrt(n)`.
pub fn count_divisors(n: &BigInt) -> Result<u64> {
    if n < &BigInt::one() {
        return Err(Error::Domain(format!("count_divisors of {n} < 1")));
    }
    let n: u64 = n
        .try_into()
        .map_err(|_| Error::Unsupported("count_divisors limited to u64 range".into()))?;
    Ok(count_divisors_u64(n))
}

/// Divisor count via trial division, exponent-of-prime form.
pub fn count_divisors_u64(mut n: u64) -> u64 {
    let mut count = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u64;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            count *= e + 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        count *= 2;
    }
    count
}

/// The `i`th triangular number `i(i+1)/2`.
pub fn triangular(i: &BigInt) -> Result<BigInt> {
    if i.is_negative() {
        return Err(Error::Domain(format!("triangular index {i} < 0")));
    }
    Ok(i * (i + BigInt::one()) / BigInt::from(2))
}

/// Exact halving; errors if `n` is odd. Theorem-style conversions rely on
/// parity, so silent truncation would hide invariant violations.
pub fn half_exact(n: &BigInt) -> Result<BigInt> {
    if (n % BigInt::from(2)).is_zero() {
        Ok(n / BigInt::from(2))
    } else {
        Err(Error::Invariant(format!("{n} is not even")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&big(729)).unwrap(), big(27));
        assert_eq!(isqrt(&big(0)).unwrap(), big(0));
        assert_eq!(isqrt(&big(170)).unwrap(), big(13));
        assert!(isqrt(&big(-1)).is_err());
    }

    #[test]
    fn perfect_square_examples() {
        assert_eq!(is_perfect_square(&big(169)), Some(big(13)));
        assert_eq!(is_perfect_square(&big(161)), None);
        assert_eq!(is_perfect_square(&big(-4)), None);
        // radicand of the (20, 47) pair at k = 9
        let radicand = big(8 * 400 + 8 * (1 - 9) * 20 + 17 * 17);
        assert_eq!(radicand, big(2209));
        assert_eq!(is_perfect_square(&radicand), Some(big(47)));
    }

    /// Brute-force divisor enumeration, the independent oracle for
    /// `count_divisors`.
    fn divisors_brute(n: u64) -> u64 {
        (1..=n).filter(|d| n % d == 0).count() as u64
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(count_divisors(&big(1)).unwrap(), 1);
        assert_eq!(count_divisors(&big(161)).unwrap(), divisors_brute(161));
        assert_eq!(count_divisors(&big(161)).unwrap(), 4);
        assert_eq!(count_divisors(&big(49)).unwrap(), divisors_brute(49));
        assert_eq!(count_divisors(&big(49)).unwrap(), 3);
        assert!(count_divisors(&big(0)).is_err());
    }

    #[test]
    fn divisor_oracle_range() {
        for n in 1..5000u64 {
            assert_eq!(count_divisors_u64(n), divisors_brute(n), "n = {n}");
        }
    }

    #[test]
    fn triangular_examples() {
        assert_eq!(triangular(&big(0)).unwrap(), big(0));
        assert_eq!(triangular(&big(20)).unwrap(), big(210));
        let (a, b, c) = (
            triangular(&big(11)).unwrap(),
            triangular(&big(20)).unwrap(),
            triangular(&big(23)).unwrap(),
        );
        assert_eq!((&a, &b), (&big(66), &big(210)));
        assert_eq!(a + b, c);
        assert!(triangular(&big(-1)).is_err());
    }

    #[test]
    fn rational_normalizes() {
        let q = Rational::new(big(-6), big(-8));
        assert_eq!(q.numer(), &big(3));
        assert_eq!(q.denom(), &big(4));
    }

    proptest! {
        #[test]
        fn isqrt_bracket(n in 0u64..u64::MAX / 4) {
            let r = isqrt_u64(n);
            prop_assert!(r * r <= n);
            prop_assert!((r + 1) * (r + 1) > n);
        }

        #[test]
        fn isqrt_big_bracket(n in any::<u128>()) {
            let n = BigInt::from(n);
            let r = isqrt(&n).unwrap();
            prop_assert!(&r * &r <= n);
            let r1 = &r + 1;
            prop_assert!(&r1 * &r1 > n);
        }

        #[test]
        fn square_detection(r in 0u64..u32::MAX as u64) {
            prop_assert_eq!(is_perfect_square_u64(r * r), Some(r));
            if r > 1 {
                prop_assert_eq!(is_perfect_square_u64(r * r - 1), None);
            }
        }
    }
}
