//! Validated runner speed sets.

use std::fmt;
use std::ops::Index;

use crate::error::Error;
use crate::exact::{from_u64, Rat};

/// Strictly increasing positive speeds with overall gcd 1.
///
/// Construction sorts the input, rejects zeros and duplicates, and divides
/// out the common gcd, so `{2, 4, 6}` and `{1, 2, 3}` build the same set.
/// All downstream quantities are invariant under that normalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpeedSet {
    speeds: Vec<u64>,
}

impl SpeedSet {
    pub fn new(input: impl Into<Vec<u64>>) -> Result<Self, Error> {
        let mut speeds: Vec<u64> = input.into();
        if speeds.is_empty() {
            return Err(Error::InvalidSpeeds("no speeds given".into()));
        }
        if speeds.contains(&0) {
            return Err(Error::InvalidSpeeds("speed 0 is not allowed".into()));
        }
        speeds.sort_unstable();
        if let Some(w) = speeds.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpeeds(format!("duplicate speed {}", w[0])));
        }
        let g = speeds.iter().fold(0u64, |acc, &v| num_integer::gcd(acc, v));
        for v in &mut speeds {
            *v /= g;
        }
        Ok(Self { speeds })
    }

    /// Parses a comma-separated list such as `1,3,4`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut speeds = Vec::new();
        for (idx, item) in text.split(',').enumerate() {
            let item = item.trim();
            let v: u64 = item.parse().map_err(|e| {
                Error::Parse(format!("speed {} ('{item}'): {e}", idx + 1))
            })?;
            speeds.push(v);
        }
        Self::new(speeds)
    }

    pub fn n(&self) -> usize {
        self.speeds.len()
    }

    pub fn speeds(&self) -> &[u64] {
        &self.speeds
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.speeds.iter().copied()
    }

    pub fn min_speed(&self) -> u64 {
        self.speeds[0]
    }

    pub fn max_speed(&self) -> u64 {
        *self.speeds.last().unwrap()
    }

    /// Speed `i` as an exact rational.
    pub fn rat(&self, i: usize) -> Rat {
        from_u64(self.speeds[i])
    }
}

impl Index<usize> for SpeedSet {
    type Output = u64;

    fn index(&self, i: usize) -> &u64 {
        &self.speeds[i]
    }
}

impl fmt::Display for SpeedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.speeds.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}
