//! Demonstration of the residue-window regime where the approximation
//! beats the central-limit scale `1/sqrt(n)`.
//!
//! With threshold functions `phi_i(n) = sqrt(2 A_i log n)`, a divisor d is
//! admissible when `2d >= sqrt(n) phi_2(n)` and the residue `r = n mod 2d`
//! lies in `[sqrt(n) phi_1(n), c sqrt(n) phi_2(n)]`.  On that window
//! `E(n, d) <= C max(n^{-1/2 - A1}, n^{-1/2 - (1-c)^2 A2})` with
//! `C = 64 / sqrt(2 pi)`, a polynomial factor below `n^{-1/2}`.  The window
//! can be empty (it is nonempty only when `A1 <= c^2 A2` gives the residue
//! interval positive length and n is large enough); emptiness is reported
//! as data, not as an error.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::residues::Query;
use crate::special::ApproxValue;
use crate::theta::{approx_e, theorem_ratio};

/// One admissible divisor with its approximation value and sandwich ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePoint {
    pub d: u64,
    pub r: u64,
    pub rbar: u64,
    /// `E(n, d)`.
    pub e_value: f64,
    /// `E(n, d) / beta_half(n, d)`, for cross-checking the main sandwich.
    pub envelope_ratio: f64,
}

/// Outcome of one regime demonstration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeDemoReport {
    pub n: u64,
    pub a1: f64,
    pub a2: f64,
    pub c: f64,
    /// `sqrt(2 a1 log n)` and `sqrt(2 a2 log n)`.
    pub phi1: f64,
    pub phi2: f64,
    /// Smallest d satisfying `2d >= sqrt(n) phi2`.
    pub d_min: u64,
    /// Admissible residue window `[r_lo, r_hi]`.
    pub r_lo: f64,
    pub r_hi: f64,
    /// `64 / sqrt(2 pi)`.
    pub bound_constant: f64,
    /// `bound_constant * max(n^{-1/2 - a1}, n^{-1/2 - (1-c)^2 a2})`.
    pub bound: f64,
    pub inv_sqrt_n: f64,
    /// Empty when the window contains no divisor.
    pub admissible: Vec<AdmissiblePoint>,
}

/// Scans every divisor `d in [2, n]` for the admissible window and reports
/// `E(n, d)` against the regime bound.  Cost is `O(n)` plus a few series
/// terms per admissible point.
pub fn regime_demo(n: u64, a1: f64, a2: f64, c: f64, eps: f64) -> Result<RegimeDemoReport> {
    if n < 2 {
        return Err(CoreError::domain(format!("regime demo requires n >= 2, got {n}")));
    }
    if n > 10_000_000 {
        return Err(CoreError::capacity(format!(
            "regime demo scans all divisors up to n; n = {n} is above the 1e7 cap"
        )));
    }
    if !(a1 > 0.0 && a1.is_finite() && a2.is_finite() && a1 <= a2) {
        return Err(CoreError::domain(format!(
            "thresholds must satisfy 0 < a1 <= a2, got a1={a1}, a2={a2}"
        )));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(CoreError::domain(format!("c must lie in (0, 1), got {c}")));
    }
    let nf = n as f64;
    let log_n = nf.ln();
    let sq = nf.sqrt();
    let phi1 = (2.0 * a1 * log_n).sqrt();
    let phi2 = (2.0 * a2 * log_n).sqrt();
    let r_lo = sq * phi1;
    let r_hi = c * sq * phi2;
    let d_min = (((sq * phi2 / 2.0).ceil() as u64).max(2)).min(n);
    let bound_constant = 64.0 / (2.0 * std::f64::consts::PI).sqrt();
    let bound = bound_constant
        * nf.powf(-0.5 - a1).max(nf.powf(-0.5 - (1.0 - c) * (1.0 - c) * a2));
    let mut admissible = Vec::new();
    for d in d_min..=n {
        if ((2 * d) as f64) < sq * phi2 {
            continue;
        }
        let r = n % (2 * d);
        let rf = r as f64;
        if rf < r_lo || rf > r_hi {
            continue;
        }
        let q = Query::new(n, d)?;
        let e: ApproxValue = approx_e(q, eps)?;
        admissible.push(AdmissiblePoint {
            d,
            r,
            rbar: 2 * d - r,
            e_value: e.value,
            envelope_ratio: theorem_ratio(q, eps)?,
        });
    }
    Ok(RegimeDemoReport {
        n,
        a1,
        a2,
        c,
        phi1,
        phi2,
        d_min,
        r_lo,
        r_hi,
        bound_constant,
        bound,
        inv_sqrt_n: 1.0 / sq,
        admissible,
    })
}
