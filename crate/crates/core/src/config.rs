//! Runtime defaults: series accuracy, grid shapes, tolerances, and the
//! frozen regression constants, loaded from an embedded TOML file.
//!
//! User config files override any subset of the defaults: the file is
//! parsed as TOML, deep-merged over the built-in table, and the merged
//! result is deserialized and validated.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

const DEFAULTS_TOML: &str = include_str!("../defaults.toml");

/// Grid shapes for the verification suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Number of log-spaced n values in `[n_lo, n_hi]`.
    pub n_count: usize,
    pub n_lo: u64,
    pub n_hi: u64,
    /// Take every d in `[2, n]` when `n <= d_full_max`.
    pub d_full_max: u64,
    /// Otherwise take this many stratified divisors.
    pub d_strata: usize,
    /// Number of steps for the offset grid on `[0, 1]`.
    pub mu_steps: usize,
    /// Log-spaced decay-parameter grid.
    pub a_count: usize,
    pub a_lo: f64,
    pub a_hi: f64,
    /// Uniform grid `{0, x_step, ..., x_max}` for the tail-ratio chain.
    pub x_max: f64,
    pub x_step: f64,
}

/// Supremum-error scan shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub n_list: Vec<u64>,
}

/// Slacks and tolerances for the verification suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute slack added to analytic inequalities.
    pub ineq_slack: f64,
    /// Slack for the Gaussian tail-ratio chain.
    pub mills_slack: f64,
    /// Relative tolerance for series-vs-series identities.
    pub rel_tol: f64,
    /// Absolute tolerance for exact-vs-float oracle agreement.
    pub oracle_abs_tol: f64,
}

/// Fitted constants frozen for regression testing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrozenConstants {
    /// Normalized supremum-error constant from the scan.
    pub c_prop: f64,
    /// Fitted constant for the two-regime deviation bound.
    pub c_eq210: f64,
    /// Safety factor applied on top of `c_eq210`.
    pub eq210_safety: f64,
}

/// The full runtime configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    /// Relative truncation target for series evaluations.
    pub eps: f64,
    /// Capacity cap for exact big-integer evaluation.
    pub n_max: u64,
    /// Worker threads for scans; 0 means all available cores.
    pub workers: usize,
    pub samples: u64,
    pub seed: u64,
    pub grid: GridConfig,
    pub scan: ScanConfig,
    pub tolerances: Tolerances,
    pub frozen: FrozenConstants,
}

fn merge_toml(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge_toml(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl Defaults {
    /// The built-in defaults shipped with the library.
    pub fn builtin() -> Self {
        let d: Defaults =
            toml::from_str(DEFAULTS_TOML).expect("embedded defaults must parse");
        d.validate().expect("embedded defaults must validate");
        d
    }

    /// Built-in defaults overridden by the TOML text `overrides` (which may
    /// set any subset of the fields).
    pub fn from_toml_str(overrides: &str) -> Result<Self> {
        let mut base: toml::Value = toml::from_str(DEFAULTS_TOML)
            .map_err(|e| CoreError::config(format!("embedded defaults: {e}")))?;
        let over: toml::Value = toml::from_str(overrides)
            .map_err(|e| CoreError::config(format!("parse: {e}")))?;
        merge_toml(&mut base, over);
        let d: Defaults = base
            .try_into()
            .map_err(|e| CoreError::config(format!("deserialize: {e}")))?;
        d.validate()?;
        Ok(d)
    }

    /// Built-in defaults overridden by a TOML file.
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CoreError::config(format!("read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Sanity checks on the merged configuration.  Negative tolerance
    /// slacks are permitted (they make every check stricter than strict).
    pub fn validate(&self) -> Result<()> {
        fn bad(msg: String) -> Result<()> {
            Err(CoreError::config(msg))
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if self.n_max < 2 {
            return bad(format!("n_max must be at least 2, got {}", self.n_max));
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        let g = &self.grid;
        if g.n_count < 2 || g.n_lo < 2 || g.n_hi < g.n_lo {
            return bad(format!(
                "grid n range invalid: count {}, [{}, {}]",
                g.n_count, g.n_lo, g.n_hi
            ));
        }
        if g.n_hi > 1_000_000 {
            return bad(format!("grid n_hi too large: {}", g.n_hi));
        }
        if g.d_full_max < 2 || g.d_strata < 4 {
            return bad(format!(
                "grid d coverage invalid: d_full_max {}, d_strata {}",
                g.d_full_max, g.d_strata
            ));
        }
        if g.mu_steps < 2 || g.a_count < 2 {
            return bad(format!(
                "grid mu/a coverage invalid: mu_steps {}, a_count {}",
                g.mu_steps, g.a_count
            ));
        }
        if !(g.a_lo > 0.0 && g.a_hi > g.a_lo && g.a_hi.is_finite()) {
            return bad(format!("grid a range invalid: [{}, {}]", g.a_lo, g.a_hi));
        }
        if !(g.x_step > 0.0 && g.x_max >= g.x_step && g.x_max.is_finite()) {
            return bad(format!(
                "grid x range invalid: max {}, step {}",
                g.x_max, g.x_step
            ));
        }
        if self.scan.n_list.is_empty() || self.scan.n_list.iter().any(|&n| n < 2) {
            return bad(format!("scan n_list invalid: {:?}", self.scan.n_list));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("ineq_slack", t.ineq_slack),
            ("mills_slack", t.mills_slack),
            ("rel_tol", t.rel_tol),
            ("oracle_abs_tol", t.oracle_abs_tol),
        ] {
            if !v.is_finite() {
                return bad(format!("tolerance {name} must be finite, got {v}"));
            }
        }
        let f = &self.frozen;
        if !(f.c_prop > 0.0 && f.c_eq210 > 0.0 && f.eq210_safety >= 1.0) {
            return bad(format!(
                "frozen constants invalid: c_prop {}, c_eq210 {}, eq210_safety {}",
                f.c_prop, f.c_eq210, f.eq210_safety
            ));
        }
        Ok(())
    }

    /// The worker count to use: `workers`, or all available cores when 0.
    pub fn resolved_workers(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        }
    }
}
