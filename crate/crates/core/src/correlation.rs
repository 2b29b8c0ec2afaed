//! Joint close-approach probabilities for speed pairs, and second moments.
//!
//! For a speed `v` and window half-width `δ`, the runner is δ-close to the
//! start at time `t` when `‖t·v‖ < δ`; over a uniform random `t ∈ (0, 1)`
//! that event has probability `2δ`. For two speeds the joint probability has
//! the closed form
//!
//! ```text
//! Pr = 4δ² + 2·gcd(v_i, v_j)²·f(ε_ij, ε_ji) / (v_i·v_j)
//! ```
//!
//! valid for `δ ∈ (0, 1/4]`. [`pair_probability_oracle`] computes the same
//! measure by explicit interval arithmetic, shares no code with the formula,
//! and stays valid on all of `(0, 1/2)`; the two routes are checked against
//! each other in the test suite and by `--check` in the CLI.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::Error;
use crate::exact::{check_speed, eps_pair, f_correction, format_rat, from_u64, rat, Rat};
use crate::speeds::SpeedSet;

/// Exact per-pair correlation data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairStats {
    pub v_i: u64,
    pub v_j: u64,
    pub gcd: u64,
    pub eps_ij: Rat,
    pub eps_ji: Rat,
    pub f_value: Rat,
    /// `gcd²·f / (v_i·v_j)`; the joint probability is `4δ² + 2·error_term`.
    pub error_term: Rat,
    pub probability: Rat,
}

fn check_delta_quarter(delta: &Rat) -> Result<(), Error> {
    if !delta.is_positive() || *delta > rat(1, 4) {
        return Err(Error::Domain(format!(
            "closed form needs 0 < delta <= 1/4, got {}; pair_probability_oracle covers (0, 1/2)",
            format_rat(delta)
        )));
    }
    Ok(())
}

/// Closed-form joint probability for `δ ∈ (0, 1/4]`.
pub fn pair_probability(v_i: u64, v_j: u64, delta: &Rat) -> Result<PairStats, Error> {
    check_speed(v_i)?;
    check_speed(v_j)?;
    check_delta_quarter(delta)?;
    let g = num_integer::gcd(v_i, v_j);
    let eps_ij = eps_pair(v_i, v_j, delta)?;
    let eps_ji = eps_pair(v_j, v_i, delta)?;
    let f_value = f_correction(&eps_ij, &eps_ji)?;
    let error_term = from_u64(g) * from_u64(g) * &f_value / (from_u64(v_i) * from_u64(v_j));
    let probability = rat(4, 1) * delta * delta + rat(2, 1) * &error_term;
    Ok(PairStats {
        v_i,
        v_j,
        gcd: g,
        eps_ij,
        eps_ji,
        f_value,
        error_term,
        probability,
    })
}

/// `{t ∈ (0, 1) : ‖t·v‖ < δ}` as disjoint sorted intervals: a window of
/// radius `δ/v` around each multiple of `1/v`, with the wrap-around window
/// split at 0. Disjointness needs exactly `δ < 1/2`.
fn close_times(v: u64, delta: &Rat) -> Vec<(Rat, Rat)> {
    let radius = delta / from_u64(v);
    let mut out = Vec::with_capacity(v as usize + 1);
    out.push((Rat::zero(), radius.clone()));
    for k in 1..v {
        let center = Rat::new(BigInt::from(k), BigInt::from(v));
        out.push((&center - &radius, &center + &radius));
    }
    out.push((Rat::one() - &radius, Rat::one()));
    out
}

/// Total length of the intersection of two disjoint sorted interval lists.
fn intersection_measure(a: &[(Rat, Rat)], b: &[(Rat, Rat)]) -> Rat {
    let mut total = Rat::zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = std::cmp::max(&a[i].0, &b[j].0);
        let hi = std::cmp::min(&a[i].1, &b[j].1);
        if lo < hi {
            total += hi - lo;
        }
        if a[i].1 <= b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

/// Joint probability measured directly as the Lebesgue measure of the
/// intersection of the two close-time sets. Valid for `δ ∈ (0, 1/2)`.
pub fn pair_probability_oracle(v_i: u64, v_j: u64, delta: &Rat) -> Result<Rat, Error> {
    check_speed(v_i)?;
    check_speed(v_j)?;
    if !delta.is_positive() || *delta >= rat(1, 2) {
        return Err(Error::Domain(format!(
            "oracle needs 0 < delta < 1/2, got {}",
            format_rat(delta)
        )));
    }
    let a = close_times(v_i, delta);
    let b = close_times(v_j, delta);
    Ok(intersection_measure(&a, &b))
}

/// The two elementary lower bounds `(2δ², 2δ·gcd/max(v_i, v_j))` on the
/// joint probability.
pub fn corollary_bounds(v_i: u64, v_j: u64, delta: &Rat) -> Result<(Rat, Rat), Error> {
    check_speed(v_i)?;
    check_speed(v_j)?;
    check_delta_quarter(delta)?;
    let g = num_integer::gcd(v_i, v_j);
    let first = rat(2, 1) * delta * delta;
    let second = rat(2, 1) * delta * from_u64(g) / from_u64(v_i.max(v_j));
    Ok((first, second))
}

/// Whether the joint probability is within a factor `1 − ε` of the
/// independent value `4δ²`.
pub fn is_eps_good(v_i: u64, v_j: u64, delta: &Rat, eps: &Rat) -> Result<bool, Error> {
    if !eps.is_positive() || *eps >= Rat::one() {
        return Err(Error::Domain(format!(
            "eps must lie in (0, 1), got {}",
            format_rat(eps)
        )));
    }
    let stats = pair_probability(v_i, v_j, delta)?;
    Ok(stats.probability >= (Rat::one() - eps) * rat(4, 1) * delta * delta)
}

/// Ratio test guaranteeing `error_term ≥ −γδ²`: the faster speed is either
/// within factor `(1 − γ)⁻¹` of the slower one, or at least `(γδ)⁻¹` times
/// it. Requires `v_j < v_i` and `γ = 1/M` for an integer `M ≥ 2`.
pub fn good_pair_condition(v_i: u64, v_j: u64, delta: &Rat, gamma: &Rat) -> Result<bool, Error> {
    check_speed(v_i)?;
    check_speed(v_j)?;
    check_delta_quarter(delta)?;
    if v_j >= v_i {
        return Err(Error::Domain(format!(
            "good_pair_condition needs v_j < v_i, got v_i = {v_i}, v_j = {v_j}"
        )));
    }
    if !gamma.numer().is_one() || *gamma.denom() < BigInt::from(2) {
        return Err(Error::Domain(format!(
            "gamma must be 1/M for an integer M >= 2, got {}",
            format_rat(gamma)
        )));
    }
    let close = (Rat::one() - gamma) * from_u64(v_i) <= from_u64(v_j);
    let far = gamma * delta * from_u64(v_i) >= from_u64(v_j);
    Ok(close || far)
}

/// First pair `(i, j)`, `i < j`, in a descending positive sequence whose
/// ratio `x_i/x_j` is either `≤ c` or `≥ t_threshold`. Existence needs
/// `c^m ≥ t_threshold` where `m = len − 1`, checked exactly. Scans adjacent
/// pairs from the largest values down and falls back to the extreme pair,
/// whose ratio then exceeds `c^m`.
pub fn lemma_aux_pair(values: &[Rat], c: &Rat, t_threshold: &Rat) -> Result<(usize, usize), Error> {
    if values.len() < 2 {
        return Err(Error::Domain("need at least two values".into()));
    }
    if values.iter().any(|x| !x.is_positive()) {
        return Err(Error::Domain("values must be positive".into()));
    }
    if let Some(w) = values.windows(2).position(|w| w[0] < w[1]) {
        return Err(Error::Domain(format!(
            "values must be descending, position {w} increases"
        )));
    }
    if *c <= Rat::one() || t_threshold <= c {
        return Err(Error::Domain(format!(
            "need 1 < c < T, got c = {}, T = {}",
            format_rat(c),
            format_rat(t_threshold)
        )));
    }
    let m = values.len() - 1;
    let mut c_pow = Rat::one();
    for _ in 0..m {
        c_pow *= c;
    }
    if c_pow < *t_threshold {
        return Err(Error::Domain(format!(
            "need c^m >= T for a guaranteed pair: c^{m} = {} < T = {}",
            format_rat(&c_pow),
            format_rat(t_threshold)
        )));
    }
    for i in 0..m {
        if &values[i] / &values[i + 1] <= *c {
            return Ok((i, i + 1));
        }
    }
    Ok((0, m))
}

/// First and second moments of the number of δ-close runners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentReport {
    pub delta: Rat,
    /// `E X = 2δn`.
    pub e_x: Rat,
    /// `E X² = Σ_{i≠j} Pr(both close) + 2δn`.
    pub e_x2: Rat,
    /// `2δn(δ(n−1) + 1)`, implied by the `2δ²` per-pair bound.
    pub var_lower: Rat,
}

pub fn moments(speeds: &SpeedSet, delta: &Rat) -> Result<MomentReport, Error> {
    check_delta_quarter(delta)?;
    let n = speeds.n();
    let pairs: Vec<(u64, u64)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (speeds[i], speeds[j]))
        .collect();
    let cross = pairs
        .par_iter()
        .map(|&(a, b)| {
            pair_probability(a, b, delta)
                .expect("delta validated")
                .probability
        })
        .reduce(Rat::zero, |x, y| x + y)
        * rat(2, 1);
    let n_rat = from_u64(n as u64);
    let e_x = rat(2, 1) * delta * &n_rat;
    let e_x2 = cross + &e_x;
    let var_lower = &e_x * (delta * (&n_rat - Rat::one()) + Rat::one());
    Ok(MomentReport {
        delta: delta.clone(),
        e_x,
        e_x2,
        var_lower,
    })
}
