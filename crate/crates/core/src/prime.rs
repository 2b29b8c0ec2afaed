//! Gap multipliers modulo a prime power.
//!
//! For `n` speeds with `p = 2n − 3` prime and larger than 7, there is a
//! multiplier `λ` coprime to `p` such that at time `t = λ/p^{m+1}`, where `m`
//! is the largest power of `p` dividing any speed, every runner keeps
//! circular distance at least `1/p` from the origin. The certificate stores
//! `λ` and the exact gap; verification replays the modular arithmetic.
//!
//! Working base `p`, write `x mod p^{m+1}` with digits `π_0, …, π_m`. If the
//! top digit `π_m(λv)` avoids `{0, p−1}` then `λv mod p^{m+1}` lies at least
//! `p^m` away from both ends, which is the `1/p` gap after scaling. The
//! search runs over the multiplicative structure: a top-level multiplier is
//! corrected level by level using `λ ← (1 + μ·p^{m−j})·λ`, which shifts the
//! top digit of `λv` by `μ·π_j(λv)` and leaves every deeper level alone.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::Error;
use crate::exact::{format_rat, Rat};
use crate::speeds::SpeedSet;

/// Largest `e` with `p^e` dividing `x`. Needs `x ≥ 1` and `p ≥ 2`.
pub fn padic_valuation(x: u64, p: u64) -> u32 {
    assert!(x >= 1 && p >= 2, "valuation needs x >= 1 and p >= 2");
    let mut x = x;
    let mut e = 0;
    while x % p == 0 {
        x /= p;
        e += 1;
    }
    e
}

/// Digit `j` of `x mod modulus` in base `p`, where `modulus` is a power
/// of `p`.
pub fn base_digit(x: u128, j: u32, p: u64, modulus: u128) -> u64 {
    let r = x % modulus;
    ((r / (p as u128).pow(j)) % p as u128) as u64
}

/// Distance from `x mod modulus` to the nearest multiple of `modulus`.
pub fn circular_distance(x: u128, modulus: u128) -> u128 {
    let r = x % modulus;
    r.min(modulus - r)
}

fn add_mod(a: u128, b: u128, n: u128) -> u128 {
    if a >= n - b {
        a - (n - b)
    } else {
        a + b
    }
}

fn mul_mod(a: u128, b: u128, n: u128) -> u128 {
    let (mut a, mut b) = (a % n, b % n);
    if n <= u64::MAX as u128 {
        return a * b % n;
    }
    let mut out = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            out = add_mod(out, a, n);
        }
        a = add_mod(a, a, n);
        b >>= 1;
    }
    out
}

fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x < 4 {
        return true;
    }
    if x % 2 == 0 || x % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d * d <= x {
        if x % d == 0 || x % (d + 2) == 0 {
            return false;
        }
        d += if d % 6 == 5 { 2 } else { 4 };
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeCase {
    /// No speed is divisible by `p`; `λ = 1` already works.
    AllCoprime,
    /// Digit-by-digit correction from the top level down.
    Descent,
    /// All but one speed coprime to `p`; smallest unit found by direct scan.
    Exhaustive,
}

impl std::fmt::Display for PrimeCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PrimeCase::AllCoprime => "all-coprime",
            PrimeCase::Descent => "descent",
            PrimeCase::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCertificate {
    pub p: u64,
    /// Largest `p`-adic valuation among the speeds.
    pub m: u32,
    /// `p^{m+1}`, the modulus the multiplier lives in.
    pub modulus: u128,
    pub lambda: u128,
    /// `λ / p^{m+1}` as a point of the unit circle.
    pub t_real: Rat,
    /// Exact smallest circular distance over all speeds at `t_real`.
    pub min_gap: Rat,
    pub case_used: PrimeCase,
}

fn rat_u128(num: u128, den: u128) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

fn top_digit_good(x: u128, p: u64, m: u32, modulus: u128) -> bool {
    let d = base_digit(x, m, p, modulus);
    d != 0 && d != p - 1
}

fn min_distance(speeds: &SpeedSet, lambda: u128, modulus: u128) -> u128 {
    speeds
        .iter()
        .map(|v| circular_distance(mul_mod(lambda, v as u128, modulus), modulus))
        .min()
        .expect("speed set is nonempty")
}

/// Finds the smallest multiplier certifying a `1/p` gap for `p = 2n − 3`.
pub fn prime_gap_multiplier(speeds: &SpeedSet) -> Result<PrimeCertificate, Error> {
    let n = speeds.n();
    if n < 6 {
        return Err(Error::Domain(format!(
            "prime gap construction needs 2n − 3 > 7, so at least 6 speeds, got {n}"
        )));
    }
    let p = 2 * n as u64 - 3;
    if !is_prime(p) {
        return Err(Error::Domain(format!("2n − 3 = {p} is not prime")));
    }
    let m = speeds.iter().map(|v| padic_valuation(v, p)).max().expect("nonempty");
    let modulus = (p as u128)
        .checked_pow(m + 1)
        .ok_or_else(|| Error::Internal(format!("modulus {p}^{} overflows", m + 1)))?;
    let coprime_count = speeds.iter().filter(|&v| v % p != 0).count();

    let (lambda, case_used) = if m == 0 {
        // every residue λ·v mod p is nonzero, so each distance is already
        // at least 1 = p^m
        (1u128, PrimeCase::AllCoprime)
    } else if coprime_count == n - 1 {
        (exhaustive_multiplier(speeds, p, m, modulus)?, PrimeCase::Exhaustive)
    } else {
        (descent_multiplier(speeds, p, m, modulus)?, PrimeCase::Descent)
    };

    let gap = min_distance(speeds, lambda, modulus);
    let floor = (p as u128).pow(m);
    if gap < floor {
        return Err(Error::Internal(format!(
            "multiplier {lambda} leaves a gap of {gap}/{modulus}, below 1/{p}"
        )));
    }
    Ok(PrimeCertificate {
        p,
        m,
        modulus,
        lambda,
        t_real: rat_u128(lambda, modulus),
        min_gap: rat_u128(gap, modulus),
        case_used,
    })
}

fn descent_multiplier(
    speeds: &SpeedSet,
    p: u64,
    m: u32,
    modulus: u128,
) -> Result<u128, Error> {
    let valuations: Vec<u32> = speeds.iter().map(|v| padic_valuation(v, p)).collect();
    let top: Vec<u128> = speeds
        .iter()
        .zip(&valuations)
        .filter(|&(_, &e)| e == m)
        .map(|(v, _)| v as u128)
        .collect();
    let mut lambda = (1..p as u128)
        .find(|&l| top.iter().all(|&v| top_digit_good(mul_mod(l, v, modulus), p, m, modulus)))
        .ok_or_else(|| {
            Error::Internal("no top-level multiplier clears the highest valuation class".into())
        })?;
    for j in (0..m).rev() {
        let shift = (p as u128).pow(m - j);
        let relevant: Vec<u128> = speeds
            .iter()
            .zip(&valuations)
            .filter(|&(_, &e)| e >= j)
            .map(|(v, _)| v as u128)
            .collect();
        lambda = (0..p as u128)
            .map(|mu| mul_mod(1 + mu * shift, lambda, modulus))
            .find(|&cand| {
                relevant
                    .iter()
                    .all(|&v| top_digit_good(mul_mod(cand, v, modulus), p, m, modulus))
            })
            .ok_or_else(|| {
                Error::Internal(format!("no correction multiplier works at level {j}"))
            })?;
    }
    Ok(lambda)
}

fn exhaustive_multiplier(
    speeds: &SpeedSet,
    p: u64,
    m: u32,
    modulus: u128,
) -> Result<u128, Error> {
    let floor = (p as u128).pow(m);
    let good = |l: u128| l % p as u128 != 0 && min_distance(speeds, l, modulus) >= floor;
    let found = if modulus <= u64::MAX as u128 {
        (1..modulus as u64)
            .into_par_iter()
            .find_first(|&l| good(l as u128))
            .map(|l| l as u128)
    } else {
        (1..modulus).find(|&l| good(l))
    };
    found.ok_or_else(|| {
        Error::Falsified(format!(
            "no unit modulo {modulus} keeps every speed of {speeds} at distance 1/{p}"
        ))
    })
}

/// Fraction of units `λ` modulo `p^{m+1}` whose product `λ·v` has top digit
/// in `{0, p − 1}`. Exactly `2/p` whenever `m ≥ 1` and `v` is coprime
/// to `p`.
pub fn bad_multiplier_fraction(v: u64, p: u64, m: u32) -> Result<Rat, Error> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    crate::exact::check_speed(v)?;
    let modulus = (p as u128)
        .checked_pow(m + 1)
        .ok_or_else(|| Error::Domain(format!("{p}^{} overflows", m + 1)))?;
    if modulus > 20_000_000 {
        return Err(Error::Domain(format!(
            "modulus {modulus} is too large to enumerate"
        )));
    }
    let bad = (1..modulus)
        .filter(|&l| l % p as u128 != 0)
        .filter(|&l| !top_digit_good(mul_mod(l, v as u128, modulus), p, m, modulus))
        .count();
    let totient = (p as u128).pow(m) * (p as u128 - 1);
    Ok(rat_u128(bad as u128, totient))
}

impl PrimeCertificate {
    /// Recomputes every field from the speed set and checks the gap claim.
    pub fn verify(&self, speeds: &SpeedSet) -> Result<(), Error> {
        let n = speeds.n();
        let fail = |what: &str| {
            Err(Error::Falsified(format!(
                "prime certificate for {speeds} is invalid: {what}"
            )))
        };
        if n < 6 || self.p != 2 * n as u64 - 3 || !is_prime(self.p) {
            return fail("p does not match 2n − 3");
        }
        let m = speeds
            .iter()
            .map(|v| padic_valuation(v, self.p))
            .max()
            .expect("nonempty");
        if m != self.m || self.modulus != (self.p as u128).pow(m + 1) {
            return fail("modulus does not match the speed valuations");
        }
        if self.lambda == 0 || self.lambda >= self.modulus || self.lambda % self.p as u128 == 0
        {
            return fail("multiplier is not a unit in the modulus");
        }
        if self.t_real != rat_u128(self.lambda, self.modulus) {
            return fail("time does not equal lambda over the modulus");
        }
        let gap = min_distance(speeds, self.lambda, self.modulus);
        if self.min_gap != rat_u128(gap, self.modulus) {
            return fail("recorded gap does not match the recomputed one");
        }
        if gap < (self.p as u128).pow(m) {
            return fail(&format!(
                "gap {} is below 1/{}",
                format_rat(&self.min_gap),
                self.p
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn set(xs: &[u64]) -> SpeedSet {
        SpeedSet::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(49, 7), 2);
        assert_eq!(padic_valuation(18, 3), 2);
        assert_eq!(padic_valuation(5, 7), 0);
    }

    #[test]
    fn digit_examples() {
        assert_eq!(base_digit(123, 0, 11, 121), 2);
        assert_eq!(base_digit(25, 1, 11, 121), 2);
        assert_eq!(base_digit(121, 2, 11, 1331), 1);
    }

    #[test]
    fn circular_distance_examples() {
        assert_eq!(circular_distance(110, 121), 11);
        assert_eq!(circular_distance(60, 121), 60);
        assert_eq!(circular_distance(121, 121), 0);
    }

    #[test]
    fn modular_product_matches_wide_arithmetic() {
        let n = (1u128 << 97) - 61;
        let a = (1u128 << 96) + 12345;
        let b = (1u128 << 90) + 678;
        let slow = mul_mod(a, b, n);
        // same product through BigInt
        let wide = (BigInt::from(a) * BigInt::from(b)) % BigInt::from(n);
        assert_eq!(BigInt::from(slow), wide);
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(2) && is_prime(11) && is_prime(97));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(91));
    }

    #[test]
    fn seven_consecutive_speeds_use_lambda_one() {
        let s = set(&[1, 2, 3, 4, 5, 6, 7]);
        let cert = prime_gap_multiplier(&s).unwrap();
        assert_eq!(cert.case_used, PrimeCase::AllCoprime);
        assert_eq!(cert.p, 11);
        assert_eq!(cert.m, 0);
        assert_eq!(cert.lambda, 1);
        assert_eq!(cert.t_real, rat(1, 11));
        assert_eq!(cert.min_gap, rat(1, 11));
        cert.verify(&s).unwrap();
    }

    #[test]
    fn descent_walks_down_one_level() {
        let s = set(&[1, 2, 3, 4, 11, 22, 55]);
        let cert = prime_gap_multiplier(&s).unwrap();
        assert_eq!(cert.case_used, PrimeCase::Descent);
        assert_eq!(cert.modulus, 121);
        assert_eq!(cert.lambda, 12);
        assert_eq!(cert.t_real, rat(12, 121));
        assert_eq!(cert.min_gap, rat(1, 11));
        cert.verify(&s).unwrap();
    }

    #[test]
    fn descent_walks_down_two_levels() {
        let s = set(&[1, 2, 3, 4, 5, 121, 242]);
        let cert = prime_gap_multiplier(&s).unwrap();
        assert_eq!(cert.case_used, PrimeCase::Descent);
        assert_eq!(cert.modulus, 1331);
        assert_eq!(cert.lambda, 122);
        assert_eq!(cert.min_gap, rat(1, 11));
        cert.verify(&s).unwrap();
    }

    #[test]
    fn exhaustive_case_scans_units() {
        let s = set(&[1, 2, 3, 4, 5, 6, 11]);
        let cert = prime_gap_multiplier(&s).unwrap();
        assert_eq!(cert.case_used, PrimeCase::Exhaustive);
        assert_eq!(cert.lambda, 12);
        assert_eq!(cert.t_real, rat(12, 121));
        assert_eq!(cert.min_gap, rat(1, 11));
        cert.verify(&s).unwrap();

        let s = set(&[1, 2, 3, 4, 5, 6, 7, 13]);
        let cert = prime_gap_multiplier(&s).unwrap();
        assert_eq!(cert.case_used, PrimeCase::Exhaustive);
        assert_eq!(cert.p, 13);
        assert_eq!(cert.lambda, 14);
        assert_eq!(cert.min_gap, rat(1, 13));
        cert.verify(&s).unwrap();
    }

    #[test]
    fn small_or_composite_settings_are_rejected() {
        // five speeds give p = 7, which the construction excludes
        let err = prime_gap_multiplier(&set(&[1, 2, 3, 4, 5])).unwrap_err();
        assert!(err.to_string().contains("at least 6"));
        // six speeds give p = 9
        let err = prime_gap_multiplier(&set(&[1, 2, 3, 4, 5, 6])).unwrap_err();
        assert!(err.to_string().contains("9"));
    }

    #[test]
    fn certificate_rejects_tampering() {
        let s = set(&[1, 2, 3, 4, 11, 22, 55]);
        let mut cert = prime_gap_multiplier(&s).unwrap();
        cert.lambda = 13;
        assert!(cert.verify(&s).is_err());
    }

    #[test]
    fn bad_multiplier_fraction_examples() {
        assert_eq!(bad_multiplier_fraction(1, 11, 1).unwrap(), rat(2, 11));
        assert_eq!(bad_multiplier_fraction(7, 13, 2).unwrap(), rat(2, 13));
        // with m = 0 the zero digit is unreachable for units
        assert_eq!(bad_multiplier_fraction(1, 11, 0).unwrap(), rat(1, 10));
        assert!(bad_multiplier_fraction(1, 9, 1).is_err());
    }

    #[test]
    fn correction_shifts_only_the_top_digit() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &(p, m) in &[(3u64, 2u32), (5, 2), (11, 1), (11, 2)] {
            let modulus = (p as u128).pow(m + 1);
            for _ in 0..200 {
                let j = rng.gen_range(0..m);
                let step = (p as u128).pow(j);
                // x with valuation at least j
                let x = step * rng.gen_range(1..(modulus / step) as u64) as u128;
                let mu = rng.gen_range(0..p) as u128;
                let shift = (p as u128).pow(m - j);
                let moved = mul_mod(1 + mu * shift, x, modulus);
                let expected =
                    (base_digit(x, m, p, modulus) + mu as u64 * base_digit(x, j, p, modulus))
                        % p;
                assert_eq!(base_digit(moved, m, p, modulus), expected);
                for lower in 0..m {
                    assert_eq!(
                        base_digit(moved, lower, p, modulus),
                        base_digit(x, lower, p, modulus)
                    );
                }
            }
        }
    }
}
