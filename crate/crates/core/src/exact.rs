//! Ground truth for `P{d | S_n}`: exact big-integer arithmetic, a
//! root-of-unity character sum, and seeded Monte Carlo.
//!
//! The exact probability is the rational number
//! `2^{-n} sum_{k = 0 mod d} C(n, k)`; the numerator is accumulated with an
//! incremental binomial recurrence, never recomputing a coefficient from
//! scratch.  The character sum filters the same residue class with the
//! d-th roots of unity:
//!
//! ```text
//! P{d | S_n} = (1/d) sum_{j=0}^{d-1} cos^n(pi j / d) cos(pi j n / d)
//! ```
//!
//! accumulated in compensated (Neumaier) summation, accurate to ~1e-12
//! absolute through `n = 20000`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::residues::Query;

/// Default cap on `n` for exact big-integer evaluation.
pub const DEFAULT_N_MAX: u64 = 20_000;

/// The exact probability `numerator / 2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactProbability {
    pub numerator: BigUint,
    /// The denominator is `2^n`.
    pub n: u64,
    /// `numerator / 2^n` rounded to f64.
    pub value: f64,
}

/// `sum_{k = c mod d, 0 <= k <= n} C(n, k)` by stepping the binomial
/// recurrence `C(n, k+1) = C(n, k) (n-k) / (k+1)` across the whole row.
fn binomial_class_sum(n: u64, d: u64, c: u64) -> BigUint {
    debug_assert!(d >= 1 && c < d);
    let mut coeff = BigUint::one();
    let mut total = if c == 0 {
        BigUint::one()
    } else {
        BigUint::zero()
    };
    for k in 0..n {
        coeff = coeff * (n - k) / (k + 1);
        if (k + 1) % d == c {
            total += &coeff;
        }
    }
    total
}

/// `numerator / 2^n` correctly scaled into f64 (top 64 bits of the
/// numerator, then an exact power-of-two rescale).
fn big_ratio_to_f64(numerator: &BigUint, n: u64) -> f64 {
    if numerator.is_zero() {
        return 0.0;
    }
    let bits = numerator.bits();
    let shift = bits.saturating_sub(64);
    let top = (numerator >> shift).to_u64().expect("top word fits u64");
    let mut v = top as f64;
    let mut e = shift as i64 - n as i64;
    while e < -900 {
        v *= 2f64.powi(-900);
        e += 900;
        if v == 0.0 {
            return 0.0;
        }
    }
    v * 2f64.powi(e as i32)
}

/// Exact `P{d | S_n}` with the default capacity cap.
pub fn exact_probability(q: Query) -> Result<ExactProbability> {
    exact_probability_capped(q, DEFAULT_N_MAX)
}

/// Exact `P{d | S_n}` for `n <= n_max`.  The cost is `O(n)` big-integer
/// multiply/divide steps on numbers of at most `n` bits.
pub fn exact_probability_capped(q: Query, n_max: u64) -> Result<ExactProbability> {
    if q.n > n_max {
        return Err(CoreError::capacity(format!(
            "exact probability needs n <= {n_max}, got n = {}",
            q.n
        )));
    }
    let numerator = binomial_class_sum(q.n, q.d, 0);
    let value = big_ratio_to_f64(&numerator, q.n);
    Ok(ExactProbability {
        numerator,
        n: q.n,
        value,
    })
}

/// Exact partition check helper: per-residue-class numerators.
pub fn residue_class_numerators(n: u64, d: u64) -> Vec<BigUint> {
    (0..d).map(|c| binomial_class_sum(n, d, c)).collect()
}

/// Exact probabilities for many divisors of the same `n`, sharing one
/// incremental pass over the binomial row.  Much cheaper than calling
/// [`exact_probability`] per divisor when the divisor list is long.
pub fn exact_probabilities_shared_row(
    n: u64,
    divisors: &[u64],
    n_max: u64,
) -> Result<Vec<ExactProbability>> {
    if n > n_max {
        return Err(CoreError::capacity(format!(
            "exact probability needs n <= {n_max}, got n = {n}"
        )));
    }
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut coeff = BigUint::one();
    row.push(coeff.clone());
    for k in 0..n {
        coeff = coeff * (n - k) / (k + 1);
        row.push(coeff.clone());
    }
    divisors
        .iter()
        .map(|&d| {
            if d == 0 {
                return Err(CoreError::domain("d must be at least 1"));
            }
            let mut numerator = BigUint::zero();
            let mut k = 0u64;
            while k <= n {
                numerator += &row[k as usize];
                k += d;
            }
            let value = big_ratio_to_f64(&numerator, n);
            Ok(ExactProbability {
                numerator,
                n,
                value,
            })
        })
        .collect()
}

/// `P{d | S_n}` as a root-of-unity character sum in f64.
///
/// Runs in `O(d)`; the cosine arguments are reduced modulo `2d` in integer
/// arithmetic before conversion, so no precision is lost to large angles.
pub fn char_sum_probability(q: Query) -> Result<f64> {
    if q.n > i32::MAX as u64 {
        return Err(CoreError::capacity(format!(
            "character sum needs n <= {}, got n = {}",
            i32::MAX,
            q.n
        )));
    }
    let n_i = q.n as i32;
    let df = q.d as f64;
    let two_d = 2 * q.d as u128;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in 0..q.d {
        let base = (std::f64::consts::PI * j as f64 / df).cos();
        let t = ((j as u128 * q.n as u128) % two_d) as f64;
        let term = base.powi(n_i) * (std::f64::consts::PI * t / df).cos();
        let y = term + comp;
        let next = sum + y;
        comp = if sum.abs() >= y.abs() {
            (sum - next) + y
        } else {
            (y - next) + sum
        };
        sum = next;
    }
    Ok((sum + comp) / df)
}

/// A Monte Carlo estimate of `P{d | S_n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub estimate: f64,
    /// `sqrt(estimate (1 - estimate) / samples)`.
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// SplitMix64: a counter-based 64-bit generator.  Output `i` is a fixed
/// bijective mix of `seed + (i + 1) * 0x9E3779B97F4A7C15`, so streams are
/// reproducible across platforms and trivially seekable.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    #[must_use]
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Seeded Monte Carlo estimate of `P{d | S_n}`.
///
/// Each sample draws `ceil(n / 64)` words and takes the total popcount of
/// `n` bits as the Bernoulli sum.  Identical `(q, samples, seed)` inputs
/// produce bitwise identical estimates.
pub fn monte_carlo_probability(q: Query, samples: u64, seed: u64) -> Result<MCEstimate> {
    if samples == 0 {
        return Err(CoreError::domain("samples must be at least 1"));
    }
    let full_words = q.n / 64;
    let rem = (q.n % 64) as u32;
    let mask = if rem == 0 { 0u64 } else { (1u64 << rem) - 1 };
    let mut rng = SplitMix64::new(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut s = 0u64;
        for _ in 0..full_words {
            s += u64::from(rng.next_u64().count_ones());
        }
        if rem != 0 {
            s += u64::from((rng.next_u64() & mask).count_ones());
        }
        if s % q.d == 0 {
            hits += 1;
        }
    }
    let estimate = hits as f64 / samples as f64;
    Ok(MCEstimate {
        estimate,
        std_error: (estimate * (1.0 - estimate) / samples as f64).sqrt(),
        samples,
        seed,
    })
}
