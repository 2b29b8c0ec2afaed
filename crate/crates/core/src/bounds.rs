//! Lower bounds on the probability that every runner stays δ-far from the
//! start, and exact certificates witnessing the gaps those bounds promise.
//!
//! Three bound families are implemented: the union bound `1 − 2δn`, the
//! Hunter-style correction `1 − 2δn + Σ_{ij∈T} Pr(both close)` over a tree
//! `T`, and the divergence-tuned variant whose threshold `1/(2(n − c))`
//! beats `1/(2n)` by the tree sum `c = Σ gcd/max`. Every positive bound is
//! backed by [`best_gap`]: the piecewise-linear envelope `t ↦ min_i ‖t·v_i‖`
//! attains its maximum at one of finitely many candidate times, so the
//! certificate search is exact.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::correlation::pair_probability;
use crate::enclosure::cmp_ln;
use crate::error::Error;
use crate::exact::{dist_nearest_int, format_rat, from_u64, rat, Rat};
use crate::speeds::SpeedSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Union,
    Hunter,
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub kind: BoundKind,
    /// Tree edges as index pairs into the speed set; empty for the union
    /// bound.
    pub tree_edges: Vec<(usize, usize)>,
    pub delta: Rat,
    pub lower_bound_value: Rat,
    /// Largest verified δ with a positive bound of this kind.
    pub delta_star: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapCertificate {
    pub time: Rat,
    pub gap: Rat,
    pub is_global_max: bool,
}

fn check_delta_open_unit(delta: &Rat) -> Result<(), Error> {
    if !delta.is_positive() || *delta >= Rat::one() {
        return Err(Error::Domain(format!(
            "delta must lie in (0, 1), got {}",
            format_rat(delta)
        )));
    }
    Ok(())
}

fn check_delta_quarter(delta: &Rat) -> Result<(), Error> {
    if !delta.is_positive() || *delta > rat(1, 4) {
        return Err(Error::Domain(format!(
            "tree bounds need 0 < delta <= 1/4, got {}",
            format_rat(delta)
        )));
    }
    Ok(())
}

/// `1 − 2δn`, positive below `δ* = 1/(2n)`.
pub fn union_bound(speeds: &SpeedSet, delta: &Rat) -> Result<BoundReport, Error> {
    check_delta_open_unit(delta)?;
    let n = from_u64(speeds.n() as u64);
    Ok(BoundReport {
        kind: BoundKind::Union,
        tree_edges: Vec::new(),
        delta: delta.clone(),
        lower_bound_value: Rat::one() - rat(2, 1) * delta * &n,
        delta_star: (rat(2, 1) * n).recip(),
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

fn validate_tree(n: usize, edges: &[(usize, usize)]) -> Result<Vec<(usize, usize)>, Error> {
    if edges.len() + 1 != n {
        return Err(Error::Domain(format!(
            "a spanning tree on {n} vertices needs {} edges, got {}",
            n - 1,
            edges.len()
        )));
    }
    let mut uf = UnionFind::new(n);
    let mut out = Vec::with_capacity(edges.len());
    for &(i, j) in edges {
        if i >= n || j >= n || i == j {
            return Err(Error::Domain(format!("bad tree edge ({i}, {j})")));
        }
        if !uf.union(i, j) {
            return Err(Error::Domain(format!("tree edge ({i}, {j}) closes a cycle")));
        }
        out.push((i.min(j), i.max(j)));
    }
    out.sort_unstable();
    Ok(out)
}

/// Maximum-weight spanning tree under the exact joint probabilities at `δ`,
/// Kruskal with ties broken by lexicographic edge index.
pub fn max_weight_spanning_tree(
    speeds: &SpeedSet,
    delta: &Rat,
) -> Result<Vec<(usize, usize)>, Error> {
    check_delta_quarter(delta)?;
    let n = speeds.n();
    if n < 2 {
        return Ok(Vec::new());
    }
    let mut edges: Vec<(usize, usize, Rat)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let w = pair_probability(speeds[i], speeds[j], delta)?.probability;
            edges.push((i, j, w));
        }
    }
    edges.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| (a.0, a.1).cmp(&(b.0, b.1))));
    let mut uf = UnionFind::new(n);
    let mut tree = Vec::with_capacity(n - 1);
    for (i, j, _) in edges {
        if uf.union(i, j) {
            tree.push((i, j));
            if tree.len() == n - 1 {
                break;
            }
        }
    }
    tree.sort_unstable();
    Ok(tree)
}

fn hunter_value(speeds: &SpeedSet, delta: &Rat, edges: &[(usize, usize)]) -> Result<Rat, Error> {
    let n = from_u64(speeds.n() as u64);
    let mut value = Rat::one() - rat(2, 1) * delta * n;
    for &(i, j) in edges {
        value += pair_probability(speeds[i], speeds[j], delta)?.probability;
    }
    Ok(value)
}

/// Bisection for the largest `δ ≤ 1/4` keeping `eval` positive, starting
/// from the always-positive `1/(2n)` and refining while midpoints stay
/// within the denominator cap. The returned value is verified positive.
fn bisect_positive(
    mut eval: impl FnMut(&Rat) -> Result<Rat, Error>,
    n: usize,
) -> Result<Rat, Error> {
    let quarter = rat(1, 4);
    if eval(&quarter)?.is_positive() {
        return Ok(quarter);
    }
    let mut lo = Rat::new(BigInt::one(), BigInt::from(2 * n as u64));
    if !eval(&lo)?.is_positive() {
        return Err(Error::Internal(format!(
            "tree bound not positive at the union threshold 1/{}",
            2 * n
        )));
    }
    let mut hi = quarter;
    let cap = BigInt::from(1_000_000u64);
    loop {
        let mid = (&lo + &hi) / rat(2, 1);
        if *mid.denom() > cap {
            break;
        }
        if eval(&mid)?.is_positive() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn hunter_delta_star(
    speeds: &SpeedSet,
    tree: Option<&[(usize, usize)]>,
) -> Result<Rat, Error> {
    bisect_positive(
        |d| {
            let edges = match tree {
                Some(t) => t.to_vec(),
                None => max_weight_spanning_tree(speeds, d)?,
            };
            hunter_value(speeds, d, &edges)
        },
        speeds.n(),
    )
}

/// Tree-corrected bound at `δ`. With no tree supplied the maximum-weight
/// spanning tree at `δ` is used; `delta_star` re-optimizes the tree at each
/// probed δ in that case and keeps the supplied tree fixed otherwise.
pub fn hunter_bound(
    speeds: &SpeedSet,
    delta: &Rat,
    tree: Option<&[(usize, usize)]>,
) -> Result<BoundReport, Error> {
    check_delta_quarter(delta)?;
    let edges = match tree {
        Some(t) => validate_tree(speeds.n(), t)?,
        None => max_weight_spanning_tree(speeds, delta)?,
    };
    let value = hunter_value(speeds, delta, &edges)?;
    let delta_star = match tree {
        Some(_) => hunter_delta_star(speeds, Some(&edges))?,
        None => hunter_delta_star(speeds, None)?,
    };
    Ok(BoundReport {
        kind: BoundKind::Hunter,
        tree_edges: edges,
        delta: delta.clone(),
        lower_bound_value: value,
        delta_star,
    })
}

/// Largest `δ ≤ 1/4` with a positive tree-corrected bound, never below the
/// union threshold `1/(2n)`.
pub fn max_delta_hunter(speeds: &SpeedSet) -> Result<Rat, Error> {
    hunter_delta_star(speeds, None)
}

/// Threshold bound `δ* = 1/(2(n − c))` with `c = Σ_{ij∈T} gcd/max` over a
/// tree; the default tree is the star centered at the slowest runner, which
/// for normalized sets containing speed 1 gives `c = Σ_{i≥2} 1/v_i`.
pub fn divergent_bound(
    speeds: &SpeedSet,
    tree: Option<&[(usize, usize)]>,
) -> Result<BoundReport, Error> {
    let n = speeds.n();
    let edges = match tree {
        Some(t) => validate_tree(n, t)?,
        None => (1..n).map(|i| (0, i)).collect(),
    };
    let mut c = Rat::zero();
    for &(i, j) in &edges {
        let g = num_integer::gcd(speeds[i], speeds[j]);
        c += from_u64(g) / from_u64(speeds[i].max(speeds[j]));
    }
    let n_rat = from_u64(n as u64);
    if c >= n_rat {
        return Err(Error::Internal(format!(
            "tree estimate c = {} reached n = {n}",
            format_rat(&c)
        )));
    }
    let delta_star = (rat(2, 1) * (&n_rat - &c)).recip();
    let lower_bound_value = Rat::one() - rat(2, 1) * &delta_star * (&n_rat - &c);
    Ok(BoundReport {
        kind: BoundKind::Divergent,
        tree_edges: edges,
        delta: delta_star.clone(),
        lower_bound_value,
        delta_star,
    })
}

/// Greedy forest of ratio-good pairs: with `γ = 1/M` for the smallest
/// `M > ⌈(2ε′)⁻¹⌉`, repeatedly take a pair whose ratio is at most
/// `c = (1−γ)⁻¹` (preferring the fastest adjacent pair) or at least
/// `T = (γδ)⁻¹` (extreme pair), record the edge, and drop the faster
/// endpoint. Every recorded edge passes `good_pair_condition` and the
/// procedure only stops once fewer than `⌈log_c T⌉ + 1` runners remain.
pub fn greedy_good_forest(
    speeds: &SpeedSet,
    delta: &Rat,
    eps_prime: &Rat,
) -> Result<Vec<(usize, usize)>, Error> {
    check_delta_quarter(delta)?;
    if !eps_prime.is_positive() || *eps_prime >= Rat::one() {
        return Err(Error::Domain(format!(
            "eps_prime must lie in (0, 1), got {}",
            format_rat(eps_prime)
        )));
    }
    let m_int = (rat(2, 1) * eps_prime).recip().ceil().to_integer() + BigInt::one();
    let gamma = Rat::new(BigInt::one(), m_int.clone());
    let c = Rat::new(m_int.clone(), &m_int - BigInt::one());
    let t_threshold = Rat::new(m_int, BigInt::one()) / delta;

    let mut live: Vec<usize> = (0..speeds.n()).collect();
    let mut edges = Vec::new();
    while live.len() >= 2 {
        let ratio = |hi: usize, lo: usize| from_u64(speeds[hi]) / from_u64(speeds[lo]);
        let close = (1..live.len())
            .rev()
            .find(|&k| ratio(live[k], live[k - 1]) <= c)
            .map(|k| (k, k - 1));
        let picked = close.or_else(|| {
            let last = live.len() - 1;
            (ratio(live[last], live[0]) >= t_threshold).then_some((last, 0))
        });
        let Some((hi_pos, lo_pos)) = picked else {
            break;
        };
        let (hi, lo) = (live[hi_pos], live[lo_pos]);
        debug_assert!(good_pair_holds(speeds, hi, lo, delta, &gamma));
        edges.push((lo, hi));
        live.remove(hi_pos);
    }
    Ok(edges)
}

fn good_pair_holds(speeds: &SpeedSet, hi: usize, lo: usize, delta: &Rat, gamma: &Rat) -> bool {
    crate::correlation::good_pair_condition(speeds[hi], speeds[lo], delta, gamma)
        .unwrap_or(false)
}

/// The `γ = 1/M` used by [`greedy_good_forest`] for a given `ε′`.
pub fn forest_gamma(eps_prime: &Rat) -> Result<Rat, Error> {
    if !eps_prime.is_positive() || *eps_prime >= Rat::one() {
        return Err(Error::Domain(format!(
            "eps_prime must lie in (0, 1), got {}",
            format_rat(eps_prime)
        )));
    }
    let m_int = (rat(2, 1) * eps_prime).recip().ceil().to_integer() + BigInt::one();
    Ok(Rat::new(BigInt::one(), m_int))
}

/// True when every consecutive speed ratio is at least `1 + 22·ln(n)/n`.
/// The threshold is irrational, so the comparison runs against a certified
/// enclosure of `ln n` and refuses to answer `true` unless the ratio clears
/// the upper end.
pub fn dubickas_condition(speeds: &SpeedSet) -> bool {
    let n = speeds.n() as u64;
    if n < 2 {
        return true;
    }
    speeds.speeds().windows(2).all(|w| {
        // v_{i+1}/v_i ≥ 1 + 22·ln(n)/n  ⟺  n·(v_{i+1} − v_i)/(22·v_i) ≥ ln n
        let lhs = Rat::new(
            BigInt::from(n) * BigInt::from(w[1] - w[0]),
            BigInt::from(22u64) * BigInt::from(w[0]),
        );
        matches!(cmp_ln(n, &lhs), Some(std::cmp::Ordering::Less))
    })
}

/// `min_i ‖t·v_i‖` at an exact time.
pub fn min_gap_at(speeds: &SpeedSet, t: &Rat) -> Rat {
    speeds
        .iter()
        .map(|v| dist_nearest_int(&(t * from_u64(v))))
        .min()
        .expect("speed sets are nonempty")
}

/// Candidate times where the lower envelope of the `‖t·v_i‖` can peak:
/// vertices of single curves (`k/2v_i`) and crossings of two curves with
/// opposite slopes (`k/(v_i+v_j)`, `k/|v_i−v_j|`), all within `(0, 1)`.
fn candidate_times(speeds: &SpeedSet) -> Vec<Rat> {
    let mut set = BTreeSet::new();
    for v in speeds.iter() {
        let two_v = 2 * v as u128;
        for k in 1..two_v {
            set.insert(Rat::new(BigInt::from(k), BigInt::from(two_v)));
        }
    }
    let list = speeds.speeds();
    for (a_pos, &a) in list.iter().enumerate() {
        for &b in &list[a_pos + 1..] {
            let sum = a as u128 + b as u128;
            for k in 1..sum {
                set.insert(Rat::new(BigInt::from(k), BigInt::from(sum)));
            }
            let diff = (b - a) as u128;
            for k in 1..diff {
                set.insert(Rat::new(BigInt::from(k), BigInt::from(diff)));
            }
        }
    }
    set.into_iter().collect()
}

/// Exact global maximizer of `t ↦ min_i ‖t·v_i‖` over `(0, 1)`; ties go to
/// the smallest time.
pub fn best_gap(speeds: &SpeedSet) -> GapCertificate {
    let (time, gap) = candidate_times(speeds)
        .into_par_iter()
        .map(|t| {
            let gap = min_gap_at(speeds, &t);
            (t, gap)
        })
        .reduce_with(|a, b| match a.1.cmp(&b.1) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => {
                if a.0 <= b.0 {
                    a
                } else {
                    b
                }
            }
        })
        .expect("candidate set is never empty");
    GapCertificate {
        time,
        gap,
        is_global_max: true,
    }
}

/// Certificate with `gap ≥ delta` when one exists; the global maximizer is
/// returned, so `None` proves no such time exists.
pub fn gap_at_least(speeds: &SpeedSet, delta: &Rat) -> Result<Option<GapCertificate>, Error> {
    check_delta_open_unit(delta)?;
    let best = best_gap(speeds);
    Ok((best.gap >= *delta).then_some(best))
}

/// Exact check of `min_i ‖t·v_i‖ ≥ delta` at a caller-supplied time.
pub fn verify_gap_at(speeds: &SpeedSet, t: &Rat, delta: &Rat) -> Result<bool, Error> {
    if !t.is_positive() || *t >= Rat::one() {
        return Err(Error::Domain(format!(
            "witness time must lie in (0, 1), got {}",
            format_rat(t)
        )));
    }
    check_delta_open_unit(delta)?;
    Ok(min_gap_at(speeds, t) >= *delta)
}
