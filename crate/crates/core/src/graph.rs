//! The moving intersection graph of runner arcs.
//!
//! At time `t`, runner `i` occupies the half-open arc `[{t·v_i}, {t·v_i} + 1/n)`
//! on the unit circle. Two arcs meet exactly when their start points are at
//! circular distance strictly below `1/n`, so the edge relation is
//! `‖t·(v_i − v_j)‖ < 1/n`; distance exactly `1/n` (abutting arcs) is a
//! non-edge, coincident starts are an edge. Components of this graph are the
//! groups of runners whose arcs form one connected cluster.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::Error;
use crate::exact::{dist_nearest_int, format_rat, frac, from_u64, rat, Rat};
use crate::speeds::SpeedSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSnapshot {
    pub t: Rat,
    pub n: usize,
    /// Arc start `{t·v_i}` per runner.
    pub starts: Vec<Rat>,
    /// Lexicographically sorted pairs `i < j`.
    pub edges: Vec<(usize, usize)>,
    pub degrees: Vec<usize>,
    /// Connected components, each sorted, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
}

/// Exact snapshot of the arc graph at `t ∈ [0, 1)`. At `t = 0` all starts
/// coincide and the graph is complete.
pub fn snapshot(speeds: &SpeedSet, t: &Rat) -> Result<GraphSnapshot, Error> {
    if t.is_negative() || *t >= Rat::one() {
        return Err(Error::Domain(format!(
            "snapshot time must lie in [0, 1), got {}",
            format_rat(t)
        )));
    }
    let n = speeds.n();
    let threshold = Rat::new(BigInt::one(), BigInt::from(n as u64));
    let starts: Vec<Rat> = speeds.iter().map(|v| frac(&(t * from_u64(v)))).collect();
    let mut edges = Vec::new();
    let mut degrees = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            let diff = from_u64(speeds[j] - speeds[i]);
            if dist_nearest_int(&(t * diff)) < threshold {
                edges.push((i, j));
                degrees[i] += 1;
                degrees[j] += 1;
            }
        }
    }
    let components = connected_components(n, &edges);
    Ok(GraphSnapshot {
        t: t.clone(),
        n,
        starts,
        edges,
        degrees,
        components,
    })
}

fn connected_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut queue = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(v) = queue.pop() {
            comp.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push(w);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

/// Component vertex sets: each is a maximal group of runners whose arcs
/// cluster together, isolated from the rest of the circle.
pub fn isolated_sets(snap: &GraphSnapshot) -> Vec<Vec<usize>> {
    snap.components.clone()
}

/// Exact measure of the union of the arcs of `subset`.
pub fn occupied_measure(snap: &GraphSnapshot, subset: &[usize]) -> Result<Rat, Error> {
    let chosen: BTreeSet<usize> = subset.iter().copied().collect();
    if chosen.len() != subset.len() {
        return Err(Error::Domain("subset contains duplicate indices".into()));
    }
    if let Some(&bad) = chosen.iter().find(|&&i| i >= snap.n) {
        return Err(Error::Domain(format!(
            "runner index {bad} out of range for n = {}",
            snap.n
        )));
    }
    let len = Rat::new(BigInt::one(), BigInt::from(snap.n as u64));
    let mut pieces: Vec<(Rat, Rat)> = Vec::new();
    for &i in &chosen {
        let lo = snap.starts[i].clone();
        let hi = &lo + &len;
        if hi <= Rat::one() {
            pieces.push((lo, hi));
        } else {
            pieces.push((lo, Rat::one()));
            pieces.push((Rat::zero(), hi - Rat::one()));
        }
    }
    Ok(union_measure(pieces))
}

fn union_measure(mut pieces: Vec<(Rat, Rat)>) -> Rat {
    pieces.sort();
    let mut total = Rat::zero();
    let mut current: Option<(Rat, Rat)> = None;
    for (lo, hi) in pieces {
        match current {
            Some((clo, chi)) if lo <= chi => {
                current = Some((clo, std::cmp::max(chi, hi)));
            }
            Some((clo, chi)) => {
                total += chi - clo;
                current = Some((lo, hi));
            }
            None => current = Some((lo, hi)),
        }
    }
    if let Some((clo, chi)) = current {
        total += chi - clo;
    }
    total
}

/// The time `t = (n−1)/(n·(v_max − v_min))` at which the fastest runner has
/// lapped the slowest by exactly `1 − 1/n`, making their arcs abut. All
/// starts are then sorted by speed inside an interval of length `1 − 1/n`,
/// and a counting argument over the gaps forces at least two components;
/// connectivity here would be a falsification.
pub fn weakest_time(speeds: &SpeedSet) -> Result<(Rat, GraphSnapshot), Error> {
    let n = speeds.n();
    if n < 2 {
        return Err(Error::Domain("weakest time needs at least two speeds".into()));
    }
    let t = Rat::new(
        BigInt::from(n as u64 - 1),
        BigInt::from(n as u64) * BigInt::from(speeds.max_speed() - speeds.min_speed()),
    );
    let snap = snapshot(speeds, &t)?;
    if snap.components.len() < 2 {
        return Err(Error::Falsified(format!(
            "arc graph of {speeds} is connected at its weakest time {}",
            format_rat(&t)
        )));
    }
    Ok((t, snap))
}

/// Measure of times in `(0, 1)` at which the arcs of two speeds meet:
/// windows of radius `1/(n·d)` around each multiple of `1/d`,
/// `d = |v_i − v_j|`, clipped to the open interval. Always `2/n` exactly;
/// anything else is a falsification.
pub fn edge_measure(v_i: u64, v_j: u64, n: usize) -> Result<Rat, Error> {
    crate::exact::check_speed(v_i)?;
    crate::exact::check_speed(v_j)?;
    if v_i == v_j {
        return Err(Error::Domain("edge measure needs two distinct speeds".into()));
    }
    if n < 2 {
        return Err(Error::Domain("edge measure needs n >= 2".into()));
    }
    let d = v_i.abs_diff(v_j);
    let radius = Rat::new(BigInt::one(), BigInt::from(n as u64) * BigInt::from(d));
    let mut pieces = Vec::with_capacity(d as usize + 1);
    pieces.push((Rat::zero(), radius.clone()));
    for k in 1..d {
        let center = Rat::new(BigInt::from(k), BigInt::from(d));
        pieces.push((&center - &radius, &center + &radius));
    }
    pieces.push((Rat::one() - &radius, Rat::one()));
    let total = union_measure(pieces);
    let expected = rat(2, 1) / from_u64(n as u64);
    if total != expected {
        return Err(Error::Falsified(format!(
            "edge measure for ({v_i}, {v_j}) at n = {n} is {}, expected 2/{n}",
            format_rat(&total)
        )));
    }
    Ok(total)
}

/// Expected number of edges over a uniform random time: the pair measures
/// sum to exactly `n − 1`.
pub fn expected_edges(speeds: &SpeedSet) -> Result<Rat, Error> {
    let n = speeds.n();
    if n < 2 {
        return Err(Error::Domain("expected edges needs n >= 2".into()));
    }
    let mut total = Rat::zero();
    for i in 0..n {
        for j in i + 1..n {
            total += edge_measure(speeds[i], speeds[j], n)?;
        }
    }
    let expected = from_u64(n as u64 - 1);
    if total != expected {
        return Err(Error::Falsified(format!(
            "edge measures for {speeds} sum to {}, expected n − 1 = {}",
            format_rat(&total),
            n - 1
        )));
    }
    Ok(total)
}

/// One maximal interval of times over which the edge set is constant,
/// together with the snapshot at its midpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepCell {
    pub t_lo: Rat,
    pub t_hi: Rat,
    pub snapshot: GraphSnapshot,
}

/// Cuts `(0, 1)` at every time where some pair's start distance crosses
/// `1/n` (`t = (k ± 1/n)/d`) or touches zero (`t = k/d`), and evaluates the
/// graph at each cell midpoint. The cells tile `(0, 1)`.
pub fn sweep(speeds: &SpeedSet) -> Result<Vec<SweepCell>, Error> {
    let n = speeds.n();
    let n_big = BigInt::from(n as u64);
    let mut cuts: BTreeSet<Rat> = BTreeSet::new();
    let list = speeds.speeds();
    for (i, &a) in list.iter().enumerate() {
        for &b in &list[i + 1..] {
            let d = BigInt::from(b - a);
            let dn = &d * &n_big;
            let mut k_n = BigInt::zero();
            loop {
                // k·n ± 1 and k·n over denominator n·d
                for numer in [&k_n - BigInt::one(), k_n.clone(), &k_n + BigInt::one()] {
                    if numer.is_positive() && numer < dn {
                        cuts.insert(Rat::new(numer, dn.clone()));
                    }
                }
                k_n += &n_big;
                if k_n > dn {
                    break;
                }
            }
        }
    }
    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(Rat::zero());
    bounds.extend(cuts);
    bounds.push(Rat::one());
    let cells: Vec<(Rat, Rat)> = bounds.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    cells
        .into_par_iter()
        .map(|(t_lo, t_hi)| {
            let mid = (&t_lo + &t_hi) / rat(2, 1);
            Ok(SweepCell {
                snapshot: snapshot(speeds, &mid)?,
                t_lo,
                t_hi,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvisibleKind {
    /// Some runner's arc touches no other arc.
    Lonely,
    /// At least four runners each touch exactly one other arc.
    FourAlmostAlone,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvisibleCertificate {
    pub kind: InvisibleKind,
    /// Cell midpoint at which the structure was found.
    pub time: Rat,
    pub cell: (Rat, Rat),
    pub lonely: Option<usize>,
    /// `(leaf, removable unique neighbor)` pairs; four entries for
    /// [`InvisibleKind::FourAlmostAlone`].
    pub almost_alone: Vec<(usize, usize)>,
}

/// Scans sweep cells in time order for the structure forced by the expected
/// edge count `n − 1`: some cell has at most `n − 2` edges, hence an
/// isolated arc or at least four arcs of degree one. Needs `n ≥ 5`; an
/// exhaustive scan without a hit is reported as a falsification.
pub fn invisible_certificate(speeds: &SpeedSet) -> Result<InvisibleCertificate, Error> {
    if speeds.n() < 5 {
        return Err(Error::Domain(
            "invisibility certificates need at least five runners".into(),
        ));
    }
    for cell in sweep(speeds)? {
        let snap = &cell.snapshot;
        if let Some(i) = snap.degrees.iter().position(|&d| d == 0) {
            return Ok(InvisibleCertificate {
                kind: InvisibleKind::Lonely,
                time: snap.t.clone(),
                cell: (cell.t_lo, cell.t_hi),
                lonely: Some(i),
                almost_alone: Vec::new(),
            });
        }
        let leaves: Vec<usize> = (0..snap.n).filter(|&i| snap.degrees[i] == 1).collect();
        if leaves.len() >= 4 {
            let almost_alone = leaves[..4]
                .iter()
                .map(|&leaf| (leaf, unique_neighbor(snap, leaf)))
                .collect();
            return Ok(InvisibleCertificate {
                kind: InvisibleKind::FourAlmostAlone,
                time: snap.t.clone(),
                cell: (cell.t_lo, cell.t_hi),
                lonely: None,
                almost_alone,
            });
        }
    }
    Err(Error::Falsified(format!(
        "no sweep cell of {speeds} has an isolated arc or four degree-one arcs"
    )))
}

fn unique_neighbor(snap: &GraphSnapshot, leaf: usize) -> usize {
    snap.edges
        .iter()
        .find_map(|&(i, j)| {
            if i == leaf {
                Some(j)
            } else if j == leaf {
                Some(i)
            } else {
                None
            }
        })
        .expect("degree-one vertex has a neighbor")
}

impl InvisibleCertificate {
    /// Re-derives the claimed structure from a fresh snapshot at the
    /// certificate time.
    pub fn verify(&self, speeds: &SpeedSet) -> Result<(), Error> {
        let snap = snapshot(speeds, &self.time)?;
        match self.kind {
            InvisibleKind::Lonely => {
                let i = self
                    .lonely
                    .ok_or_else(|| Error::Falsified("lonely certificate without a runner".into()))?;
                if snap.degrees.get(i) != Some(&0) {
                    return Err(Error::Falsified(format!(
                        "runner {i} is not isolated at {}",
                        format_rat(&self.time)
                    )));
                }
            }
            InvisibleKind::FourAlmostAlone => {
                if self.almost_alone.len() != 4 {
                    return Err(Error::Falsified(
                        "certificate must name four degree-one runners".into(),
                    ));
                }
                let distinct: BTreeSet<usize> =
                    self.almost_alone.iter().map(|&(leaf, _)| leaf).collect();
                if distinct.len() != 4 {
                    return Err(Error::Falsified("repeated degree-one runner".into()));
                }
                for &(leaf, neighbor) in &self.almost_alone {
                    if snap.degrees.get(leaf) != Some(&1)
                        || unique_neighbor(&snap, leaf) != neighbor
                    {
                        return Err(Error::Falsified(format!(
                            "runner {leaf} does not have unique neighbor {neighbor} at {}",
                            format_rat(&self.time)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[u64]) -> SpeedSet {
        SpeedSet::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn snapshot_at_zero_is_complete() {
        let snap = snapshot(&set(&[1, 2, 3, 4]), &rat(0, 1)).unwrap();
        assert_eq!(snap.edges.len(), 6);
        assert_eq!(snap.components.len(), 1);
    }

    #[test]
    fn abutting_arcs_are_not_adjacent() {
        // {1, 2} at t = 1/2: start distance exactly 1/2 = 1/n
        let snap = snapshot(&set(&[1, 2]), &rat(1, 2)).unwrap();
        assert!(snap.edges.is_empty());
        assert_eq!(snap.components.len(), 2);
    }

    #[test]
    fn empty_graph_example() {
        let snap = snapshot(&set(&[1, 2, 3]), &rat(1, 3)).unwrap();
        assert!(snap.edges.is_empty());
        assert_eq!(snap.components.len(), 3);
        // the three arcs exactly tile the circle
        let m = occupied_measure(&snap, &[0, 1, 2]).unwrap();
        assert_eq!(m, rat(1, 1));
    }

    #[test]
    fn snapshot_allows_single_runner() {
        let snap = snapshot(&set(&[1]), &rat(1, 3)).unwrap();
        assert_eq!(snap.n, 1);
        assert!(snap.edges.is_empty());
    }

    #[test]
    fn occupied_measure_counts_overlap_once() {
        let snap = snapshot(&set(&[1, 2, 3, 4]), &rat(0, 1)).unwrap();
        // all four arcs coincide
        assert_eq!(occupied_measure(&snap, &[0, 1, 2, 3]).unwrap(), rat(1, 4));
        assert!(occupied_measure(&snap, &[0, 0]).is_err());
        assert!(occupied_measure(&snap, &[9]).is_err());
    }

    #[test]
    fn connected_subgraphs_leave_slack() {
        // any component with an edge occupies strictly less than size/n
        for speeds in [set(&[1, 2, 3]), set(&[1, 3, 4, 7]), set(&[2, 5, 8, 9, 11])] {
            for cell in sweep(&speeds).unwrap() {
                for comp in &cell.snapshot.components {
                    if comp.len() >= 2 {
                        let m = occupied_measure(&cell.snapshot, comp).unwrap();
                        let cap = Rat::new(
                            BigInt::from(comp.len() as u64),
                            BigInt::from(speeds.n() as u64),
                        );
                        assert!(m < cap);
                    }
                }
            }
        }
    }

    #[test]
    fn weakest_time_examples() {
        let (t, snap) = weakest_time(&set(&[1, 2])).unwrap();
        assert_eq!(t, rat(1, 2));
        assert!(snap.components.len() >= 2);

        let (t, _) = weakest_time(&set(&[1, 2, 3])).unwrap();
        assert_eq!(t, rat(1, 3));

        let (t, snap) = weakest_time(&set(&[1, 3, 4])).unwrap();
        assert_eq!(t, rat(2, 9));
        assert_eq!(snap.components.len(), 2);

        assert!(weakest_time(&set(&[5])).is_err());
    }

    #[test]
    fn edge_measure_examples() {
        assert_eq!(edge_measure(1, 2, 2).unwrap(), rat(1, 1));
        assert_eq!(edge_measure(1, 4, 3).unwrap(), rat(2, 3));
        assert_eq!(edge_measure(2, 7, 5).unwrap(), rat(2, 5));
        assert!(edge_measure(3, 3, 4).is_err());
        assert!(edge_measure(1, 2, 1).is_err());
    }

    #[test]
    fn expected_edges_is_n_minus_one() {
        for speeds in [set(&[1, 2]), set(&[1, 2, 3]), set(&[2, 3, 5, 7, 11])] {
            let total = expected_edges(&speeds).unwrap();
            assert_eq!(total, from_u64(speeds.n() as u64 - 1));
        }
    }

    #[test]
    fn sweep_tiles_the_interval() {
        let cells = sweep(&set(&[1, 2, 3])).unwrap();
        assert_eq!(cells.first().unwrap().t_lo, rat(0, 1));
        assert_eq!(cells.last().unwrap().t_hi, rat(1, 1));
        for w in cells.windows(2) {
            assert_eq!(w[0].t_hi, w[1].t_lo);
        }
    }

    #[test]
    fn sweep_cells_have_constant_edge_sets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for speeds in [set(&[1, 2, 3]), set(&[1, 3, 4, 7])] {
            for cell in sweep(&speeds).unwrap() {
                for _ in 0..3 {
                    let offset = rat(rng.gen_range(1..1000), 1000);
                    let t = &cell.t_lo + (&cell.t_hi - &cell.t_lo) * offset;
                    let snap = snapshot(&speeds, &t).unwrap();
                    assert_eq!(snap.edges, cell.snapshot.edges);
                }
            }
        }
    }

    #[test]
    fn two_runner_cells_always_carry_the_edge() {
        // edge measure is 2/n = 1 for n = 2, so no open cell is edge-free
        let cells = sweep(&set(&[1, 2])).unwrap();
        assert_eq!(cells.len(), 2);
        for cell in &cells {
            assert_eq!(cell.snapshot.edges, vec![(0, 1)]);
        }
    }

    #[test]
    fn some_cell_is_sparse_for_three_runners() {
        let cells = sweep(&set(&[1, 2, 3])).unwrap();
        assert!(cells.iter().any(|c| c.snapshot.edges.len() <= 1));
    }

    #[test]
    fn certificate_for_five_consecutive() {
        let s = set(&[1, 2, 3, 4, 5]);
        let cert = invisible_certificate(&s).unwrap();
        cert.verify(&s).unwrap();
        assert!(invisible_certificate(&set(&[1, 2, 3, 4])).is_err());
    }

    #[test]
    fn certificate_survives_tampering() {
        let s = set(&[1, 2, 3, 4, 5]);
        let mut cert = invisible_certificate(&s).unwrap();
        cert.time = rat(0, 1);
        assert!(cert.verify(&s).is_err());
    }
}
