//! Seeded random speed sets for batch verification.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::speeds::SpeedSet;

/// Draws `count` speed sets with sizes in `[size_min, size_max]` and speeds
/// in `[1, max_speed]`. The same seed always yields the same sets.
pub fn random_speed_sets(
    seed: u64,
    count: usize,
    size_min: usize,
    size_max: usize,
    max_speed: u64,
) -> Result<Vec<SpeedSet>, Error> {
    if size_min == 0 || size_min > size_max {
        return Err(Error::Domain(format!(
            "set sizes must satisfy 1 <= size_min <= size_max, got [{size_min}, {size_max}]"
        )));
    }
    if (size_max as u64) > max_speed {
        return Err(Error::Domain(format!(
            "cannot draw {size_max} distinct speeds from [1, {max_speed}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = Vec::with_capacity(count);
    for _ in 0..count {
        let size = rng.gen_range(size_min..=size_max);
        let mut chosen = BTreeSet::new();
        while chosen.len() < size {
            chosen.insert(rng.gen_range(1..=max_speed));
        }
        sets.push(SpeedSet::new(chosen.into_iter().collect::<Vec<_>>())?);
    }
    Ok(sets)
}
