//! Queries and residues modulo `2d`.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// A `(n, d)` pair: `n` Bernoulli trials, candidate divisor `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Query {
    pub n: u64,
    pub d: u64,
}

impl Query {
    /// Builds a query, rejecting `n = 0`, `d = 0`, and divisors so large
    /// that `2d` would overflow.
    pub fn new(n: u64, d: u64) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::domain("n must be at least 1"));
        }
        if d == 0 {
            return Err(CoreError::domain("d must be at least 1"));
        }
        if d > u64::MAX / 2 {
            return Err(CoreError::domain("d too large: 2d overflows"));
        }
        Ok(Query { n, d })
    }
}

/// The residue `r = n mod 2d` together with its complement `rbar = 2d - r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResiduePair {
    pub r: u64,
    pub rbar: u64,
}

/// Returns `r = n mod 2d` in `[0, 2d)` and `rbar = 2d - r` in `(0, 2d]`.
#[must_use]
pub fn residue_pair(q: Query) -> ResiduePair {
    let two_d = 2 * q.d;
    let r = q.n % two_d;
    ResiduePair { r, rbar: two_d - r }
}
