//! Grid-based verification of the analytic estimates.
//!
//! Each suite sweeps a parameter grid and returns the points where an
//! asserted inequality fails beyond its slack; an empty list means the
//! property holds everywhere on the grid.  Scans compare the approximation
//! against the exact oracle and fit the constants the estimates leave
//! unspecified.  All outputs are plain data, deterministic for a given
//! configuration regardless of worker count.

pub mod demo;
pub mod grids;
pub mod scan;
pub mod suites;

pub use demo::{regime_demo, AdmissiblePoint, RegimeDemoReport};
pub use scan::{fit_deviation_constant, sup_error_scan, verify_deviation_bound, ScanOutcome};
pub use suites::{
    verify_gauss_tail_chain, verify_one_sided_tail_bounds, verify_residue_sandwich,
    verify_symmetrized_envelope, verify_theorem_sandwich,
};

use serde::{Deserialize, Serialize};

/// A failed inequality: `lhs <= rhs + slack` did not hold at `inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub suite: String,
    pub inputs: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Per-n supremum of `|P - E|` over `d in [2, n]`, with the rate
/// normalisation `sup * n^{3/2} / (log n)^{5/2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupErrorReport {
    pub n: u64,
    pub sup_abs_error: f64,
    /// Smallest d attaining the supremum.
    pub argmax_d: u64,
    pub normalized: f64,
}

/// One record of a scan: the compared quantities at a single `(n, d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: u64,
    pub d: u64,
    pub r: u64,
    pub rbar: u64,
    pub p_exact: f64,
    pub e_approx: f64,
    pub beta_half: f64,
    pub abs_error: f64,
    pub ratio: f64,
}
