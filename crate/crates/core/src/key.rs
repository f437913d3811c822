//! Genus and correlator indices shared by every computation path.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Augmented genus stored as `2g`, so half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenusIndex {
    twice: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("genus must be a non-negative integer or p/2, got {0:?}")]
pub struct GenusParseError(pub String);

impl GenusIndex {
    pub const fn from_twice(twice: u32) -> Self {
        GenusIndex { twice }
    }

    pub const fn twice(self) -> u32 {
        self.twice
    }

    pub const fn is_integral(self) -> bool {
        self.twice % 2 == 0
    }
}

impl fmt::Display for GenusIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for GenusIndex {
    type Err = GenusParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GenusParseError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((p, "2")) => Ok(GenusIndex::from_twice(p.trim().parse().map_err(|_| bad())?)),
            Some(_) => Err(bad()),
            None => {
                let g: u32 = s.parse().map_err(|_| bad())?;
                Ok(GenusIndex::from_twice(2 * g))
            }
        }
    }
}

/// Index `(g, n)` of a correlator `W_{g,n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorrelatorKey {
    pub genus: GenusIndex,
    pub n: u32,
}

impl CorrelatorKey {
    pub const fn new(twice_genus: u32, n: u32) -> Self {
        CorrelatorKey {
            genus: GenusIndex::from_twice(twice_genus),
            n,
        }
    }

    pub const fn twice_genus(self) -> u32 {
        self.genus.twice()
    }

    /// `2g - 2 + n`, positive exactly for stable keys.
    pub const fn complexity(self) -> i64 {
        self.genus.twice() as i64 - 2 + self.n as i64
    }

    /// `2g - 2 + n > 0`; the unstable keys are (0,1), (1/2,1) and (0,2).
    pub const fn is_stable(self) -> bool {
        self.n >= 1 && self.genus.twice() + self.n > 2
    }

    /// `4g + n`, the grading the recursion and the budgets are ordered by.
    pub const fn level(self) -> u32 {
        2 * self.genus.twice() + self.n
    }

    /// Sum of pole orders of every term of `W_{g,n}`: `6g - 6 + 4n`.
    pub const fn total_pole_order(self) -> i64 {
        3 * self.genus.twice() as i64 - 6 + 4 * self.n as i64
    }

    /// `t`-weight `sum k_i` of every monomial of `F_{g,n}`: `6g - 6 + 3n`.
    pub const fn t_weight(self) -> i64 {
        3 * self.genus.twice() as i64 - 6 + 3 * self.n as i64
    }

    /// All stable keys with `4g + n <= budget`, ordered by level then genus.
    pub fn stable_keys(budget: u32) -> Vec<CorrelatorKey> {
        let mut keys = Vec::new();
        for level in 1..=budget {
            for twice in 0..=level / 2 {
                let n = level.saturating_sub(2 * twice);
                let key = CorrelatorKey::new(twice, n);
                if n >= 1 && key.level() == level && key.is_stable() {
                    keys.push(key);
                }
            }
        }
        keys
    }

    /// Largest `t`-index occurring in any stable `F_{g,n}` with `4g + n <= budget`.
    pub fn max_t_index(budget: u32) -> u32 {
        Self::stable_keys(budget)
            .into_iter()
            .map(|k| (k.t_weight() - (k.n as i64 - 1)) as u32)
            .max()
            .unwrap_or(0)
    }
}

impl Ord for CorrelatorKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.level(), self.genus, self.n).cmp(&(other.level(), other.genus, other.n))
    }
}

impl PartialOrd for CorrelatorKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.genus, self.n)
    }
}
