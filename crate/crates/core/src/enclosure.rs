//! Certified rational enclosures of the irrational constants the predicates
//! need (`ln n`, `π²`), with outward rounding so comparisons are never
//! decided the wrong way.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::{rat, Rat};

/// `Σ_{k<terms} z^{2k+1}/(2k+1)` plus a geometric tail bound, giving
/// `lo ≤ atanh(z) ≤ hi` for `0 ≤ z ≤ 1/3`.
fn atanh_enclosure(z: &Rat, terms: usize) -> (Rat, Rat) {
    debug_assert!(!z.is_negative() && *z <= rat(1, 3));
    let z2 = z * z;
    let mut sum = Rat::zero();
    let mut pow = z.clone();
    for k in 0..terms {
        sum += &pow / rat(2 * k as i64 + 1, 1);
        pow *= &z2;
    }
    let tail = &pow / (rat(2 * terms as i64 + 1, 1) * (Rat::one() - &z2));
    let hi = &sum + tail;
    (sum, hi)
}

/// `lo ≤ ln n ≤ hi`; exact `(0, 0)` for `n = 1`. Splits `n = 2^a·r` with
/// `r ∈ [1, 2)` so both series arguments stay at most `1/3`.
pub fn ln_enclosure(n: u64, terms: usize) -> (Rat, Rat) {
    assert!(n >= 1, "ln needs a positive integer");
    if n == 1 {
        return (Rat::zero(), Rat::zero());
    }
    let a = u64::BITS - 1 - n.leading_zeros();
    let pow2 = 1u64 << a;
    let (t_lo, t_hi) = atanh_enclosure(&rat(1, 3), terms);
    let (ln2_lo, ln2_hi) = (rat(2, 1) * t_lo, rat(2, 1) * t_hi);
    let r = Rat::new(BigInt::from(n), BigInt::from(pow2));
    let z = (&r - Rat::one()) / (&r + Rat::one());
    let (s_lo, s_hi) = atanh_enclosure(&z, terms);
    let a_rat = rat(a as i64, 1);
    (
        &a_rat * ln2_lo + rat(2, 1) * s_lo,
        &a_rat * ln2_hi + rat(2, 1) * s_hi,
    )
}

/// Ordering of `ln n` against the rational `x`, refined until decided.
/// Returns `None` only if the enclosure cannot separate them within the
/// term cap, which for irrational `ln n` (every `n ≥ 2`) needs an `x`
/// astronomically close to it.
pub fn cmp_ln(n: u64, x: &Rat) -> Option<Ordering> {
    if n == 1 {
        return Some(Rat::zero().cmp(x));
    }
    let mut terms = 8;
    while terms <= 4096 {
        let (lo, hi) = ln_enclosure(n, terms);
        if hi < *x {
            return Some(Ordering::Less);
        }
        if lo > *x {
            return Some(Ordering::Greater);
        }
        terms *= 2;
    }
    None
}

/// `lo < π² < hi` from the decimal bounds `3.14159 < π < 3.1416`.
pub fn pi_squared_enclosure() -> (Rat, Rat) {
    let pi_lo = rat(314_159, 100_000);
    let pi_hi = rat(31_416, 10_000);
    (&pi_lo * &pi_lo, &pi_hi * &pi_hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_brackets_known_values() {
        // ln 2 = 0.693147..., ln 10 = 2.302585...
        let (lo, hi) = ln_enclosure(2, 16);
        assert!(lo < rat(693_148, 1_000_000));
        assert!(hi > rat(693_147, 1_000_000));
        assert!(lo < hi);
        let (lo, hi) = ln_enclosure(10, 16);
        assert!(lo < rat(2_302_586, 1_000_000));
        assert!(hi > rat(2_302_585, 1_000_000));
    }

    #[test]
    fn enclosure_tightens() {
        let (lo1, hi1) = ln_enclosure(3, 4);
        let (lo2, hi2) = ln_enclosure(3, 16);
        assert!(lo1 <= lo2 && hi2 <= hi1);
        assert!(&hi2 - &lo2 < rat(1, 1_000_000_000));
    }

    #[test]
    fn comparisons_decide() {
        assert_eq!(cmp_ln(1, &rat(1, 2)), Some(Ordering::Less));
        assert_eq!(cmp_ln(1, &rat(0, 1)), Some(Ordering::Equal));
        assert_eq!(cmp_ln(2, &rat(7, 10)), Some(Ordering::Less));
        assert_eq!(cmp_ln(2, &rat(69, 100)), Some(Ordering::Greater));
        assert_eq!(cmp_ln(100, &rat(5, 1)), Some(Ordering::Less));
        assert_eq!(cmp_ln(100, &rat(46, 10)), Some(Ordering::Greater));
    }

    #[test]
    fn pi_squared_brackets() {
        let (lo, hi) = pi_squared_enclosure();
        // π² = 9.8696044...
        assert!(lo < rat(98_696_045, 10_000_000));
        assert!(hi > rat(98_696_044, 10_000_000));
        assert!(lo < hi);
    }

    #[test]
    fn power_of_two_reduction_is_exact_at_one() {
        let (lo, hi) = ln_enclosure(8, 12);
        let (l2, h2) = ln_enclosure(2, 12);
        assert!(lo >= rat(3, 1) * l2 && hi <= rat(3, 1) * h2);
    }
}
