//! Exact rational scalar and the circle primitives built on it.
//!
//! Every quantity in this crate is a [`Rat`]: an arbitrary-precision rational
//! kept reduced with positive denominator. The canonical serialized form is
//! `p/q` (produced by [`format_rat`], accepted back by [`parse_rat`]), so any
//! value that leaves the library can be re-read and compared exactly.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Scalar used for every exact computation.
pub type Rat = BigRational;

/// Small-constant constructor. Panics on `q == 0`; use [`parse_rat`] for
/// untrusted input.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub(crate) fn from_u64(v: u64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Parses `p` or `p/q` (optionally signed, whitespace-trimmed) into a reduced
/// rational with positive denominator.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let raw = s.trim();
    if raw.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    let mut parts = raw.splitn(2, '/');
    let num_txt = parts.next().unwrap().trim();
    let num = BigInt::from_str(num_txt)
        .map_err(|e| Error::Parse(format!("'{raw}': bad numerator '{num_txt}': {e}")))?;
    let den = match parts.next() {
        None => BigInt::one(),
        Some(d) => {
            let d = d.trim();
            BigInt::from_str(d)
                .map_err(|e| Error::Parse(format!("'{raw}': bad denominator '{d}': {e}")))?
        }
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("'{raw}': denominator is zero")));
    }
    Ok(Rat::new(num, den))
}

/// Canonical `p/q` rendering, including `q = 1` (so `2` prints as `2/1`).
pub fn format_rat(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Fractional part `{x} = x − ⌊x⌋`, in `[0, 1)` for every rational.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

/// Distance to the nearest integer `‖x‖ = min({x}, 1 − {x})`, in `[0, 1/2]`.
pub fn dist_nearest_int(x: &Rat) -> Rat {
    let fr = frac(x);
    let co = Rat::one() - &fr;
    std::cmp::min(fr, co)
}

/// Correction term `f(x, y) = min(x, y) + max(x + y − 1, 0) − 2xy` for
/// `x, y ∈ [0, 1)`. The first summand measures same-side overlap of two
/// aligned windows, the second the wrap-around overlap, and `2xy` the
/// product expected under independence.
pub fn f_correction(x: &Rat, y: &Rat) -> Result<Rat, Error> {
    check_unit(x)?;
    check_unit(y)?;
    let overlap = std::cmp::min(x.clone(), y.clone());
    let wrap = std::cmp::max(x + y - Rat::one(), Rat::zero());
    Ok(overlap + wrap - rat(2, 1) * x * y)
}

fn check_unit(x: &Rat) -> Result<(), Error> {
    if x.is_negative() || *x >= Rat::one() {
        return Err(Error::Domain(format!(
            "correction arguments must lie in [0, 1), got {}",
            format_rat(x)
        )));
    }
    Ok(())
}

/// Offset `ε_ij = {(v_i / gcd(v_i, v_j)) · δ}` of the reduced speed against
/// the window width. Note the order: the first speed is the one that gets
/// reduced and multiplied.
pub fn eps_pair(v_i: u64, v_j: u64, delta: &Rat) -> Result<Rat, Error> {
    check_speed(v_i)?;
    check_speed(v_j)?;
    if !delta.is_positive() || *delta >= Rat::one() {
        return Err(Error::Domain(format!(
            "eps_pair needs 0 < delta < 1, got {}",
            format_rat(delta)
        )));
    }
    let g = num_integer::gcd(v_i, v_j);
    Ok(frac(&(from_u64(v_i / g) * delta)))
}

pub(crate) fn check_speed(v: u64) -> Result<(), Error> {
    if v == 0 {
        return Err(Error::Domain("speeds must be positive integers".into()));
    }
    Ok(())
}
