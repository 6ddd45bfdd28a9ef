//! Deterministic parameter grids for the verification suites.
//!
//! The query grids are log-spaced in n.  Divisor coverage is exhaustive for
//! small n and stratified for large n, always including the divisors whose
//! residue `r = n mod 2d` is extreme (`0`, `1`, `d`, `2d - 1`) and the ones
//! near `sqrt(n)`, since those drive every case split in the residue
//! bounds.

use crate::config::GridConfig;
use crate::residues::{residue_pair, Query};

/// `count` log-spaced integers spanning `[lo, hi]`, sorted and deduplicated.
pub fn log_spaced(count: usize, lo: u64, hi: u64) -> Vec<u64> {
    if count <= 1 || lo >= hi {
        return vec![lo.min(hi)];
    }
    let (lf, hf) = (lo as f64, hi as f64);
    let mut out: Vec<u64> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            ((lf * (hf / lf).powf(t)).round() as u64).clamp(lo, hi)
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Like [`log_spaced`], but oversamples until at least `count` distinct
/// values survive deduplication (or the whole integer range is exhausted).
fn log_spaced_at_least(count: usize, lo: u64, hi: u64) -> Vec<u64> {
    let span = (hi.saturating_sub(lo) + 1) as usize;
    let target = count.min(span);
    let mut c = count.max(2);
    loop {
        let v = log_spaced(c, lo, hi);
        if v.len() >= target || c >= 64 * count.max(2) {
            return v;
        }
        c *= 2;
    }
}

fn isqrt(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

fn divisors(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let mut i = 1;
    while i * i <= m {
        if m % i == 0 {
            out.push(i);
            out.push(m / i);
        }
        i += 1;
    }
    out
}

/// Divisors of n-adjacent numbers whose residue `r = n mod 2d` is one of
/// the extremes `0`, `1`, `d`, `2d - 1`, plus the case-boundary divisors
/// near `sqrt(n)/2` and `sqrt(n)`.  Restricted to `2 <= d <= n`.
pub fn special_residue_divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n % 2 == 0 {
        // r = 0 needs 2d | n
        out.extend(divisors(n / 2));
    } else {
        // r = 1 needs 2d | n - 1, r = 2d - 1 needs 2d | n + 1
        out.extend(divisors((n - 1) / 2));
        out.extend(divisors((n + 1) / 2));
    }
    // r = d needs d | n with odd quotient
    out.extend(divisors(n).into_iter().filter(|&d| (n / d) % 2 == 1));
    let s = isqrt(n);
    out.extend([s / 2, s / 2 + 1, s, s + 1]);
    out.retain(|&d| d >= 2 && d <= n);
    out.sort_unstable();
    out.dedup();
    out
}

/// Divisor coverage for one n: everything in `[2, n]` when n is small,
/// otherwise a log-spaced stratum joined with the special divisors.
pub fn divisor_values(n: u64, cfg: &GridConfig) -> Vec<u64> {
    if n <= cfg.d_full_max {
        return (2..=n).collect();
    }
    let mut out = special_residue_divisors(n);
    out.extend(log_spaced_at_least(cfg.d_strata, 2, n));
    out.sort_unstable();
    out.dedup();
    out
}

/// The default verification grid: log-spaced n, divisor coverage per n.
pub fn default_query_grid(cfg: &GridConfig) -> Vec<Query> {
    let mut out = Vec::new();
    for n in log_spaced(cfg.n_count, cfg.n_lo.max(2), cfg.n_hi) {
        for d in divisor_values(n, cfg) {
            out.push(Query::new(n, d).expect("grid within Query domain"));
        }
    }
    out
}

/// Grid for the dual-series identity check.  Candidate divisors cluster
/// around the form-switch boundary `d = sqrt(pi n / 2)` and the extremes.
///
/// Points are kept only when the forced theta series is well conditioned:
/// its partial sums are O(1), so with `m* = min(r, rbar)^2 / (2n)` the
/// computed value `Theta ~ max(1, d/sqrt(n)) e^{-m*}` must stay above the
/// f64 cancellation floor for a relative comparison to be meaningful.  The
/// filter `m* <= log(max(1, d/sqrt(n))) + 8` keeps the identity residual
/// orders of magnitude under the 1e-9 test tolerance.
pub fn identity_grid(cfg: &GridConfig) -> Vec<Query> {
    let count = (cfg.n_count / 2).max(8);
    let mut out = Vec::new();
    for n in log_spaced(count, cfg.n_lo.max(2), cfg.n_hi) {
        let b = (std::f64::consts::PI * n as f64 / 2.0).sqrt() as u64;
        let mut cands = vec![
            2,
            3,
            5,
            isqrt(n),
            n / 2,
            n - 1,
            n,
            b / 2,
            b.saturating_sub(1),
            b,
            b + 1,
            2 * b + 1,
        ];
        cands.retain(|&d| d >= 2 && d <= n);
        cands.sort_unstable();
        cands.dedup();
        for d in cands {
            let q = Query::new(n, d).expect("grid within Query domain");
            let p = residue_pair(q);
            let m_star = (p.r.min(p.rbar) as f64).powi(2) / (2.0 * n as f64);
            let floor = (d as f64 / (n as f64).sqrt()).max(1.0).ln() + 8.0;
            if m_star <= floor {
                out.push(q);
            }
        }
    }
    out
}

/// Uniform offset grid `{0, 1/steps, ..., 1}`.
pub fn offset_grid(steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

/// Log-spaced decay parameters spanning `[lo, hi]`.
pub fn decay_grid(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Uniform grid `{0, step, ..., ~max}` for the tail-ratio chain.
pub fn ratio_argument_grid(max: f64, step: f64) -> Vec<f64> {
    let steps = (max / step).round() as usize;
    (0..=steps).map(|i| i as f64 * step).collect()
}
