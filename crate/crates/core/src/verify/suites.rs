//! Inequality suites.  Each function sweeps a grid and records every point
//! where an asserted bound fails beyond the given slack.
//!
//! Checks are written as `lhs <= rhs + slack`; a NaN on either side fails
//! the comparison and is recorded, so silent non-finite results cannot slip
//! through.  Slack may be negative, which makes every check stricter than
//! the mathematical statement (useful for exercising the machinery).

use crate::error::{CoreError, Result};
use crate::residues::{residue_pair, Query};
use crate::special::{lattice_gauss_sum, mills_ratio, phi, scaled_gauss_sum, GaussParams};
use crate::theta::{approx_e, theorem_ratio};

use super::ViolationRecord;

fn check(
    out: &mut Vec<ViolationRecord>,
    suite: &str,
    inputs: String,
    lhs: f64,
    rhs: f64,
    slack: f64,
) {
    if !(lhs <= rhs + slack) {
        out.push(ViolationRecord {
            suite: suite.to_string(),
            inputs,
            lhs,
            rhs,
            slack,
        });
    }
}

/// The algebraic envelope chain around the Gaussian tail ratio
/// `R(x) = e^{x^2/2} int_x^inf e^{-t^2/2} dt`:
///
/// ```text
/// 1/(1+x) <= 2/(sqrt(x^2+4)+x) <= R(x) <= 2/(sqrt(x^2+8/pi)+x) <= 2/(1+x)
/// ```
///
/// plus strict monotonicity of R along the grid.
pub fn verify_gauss_tail_chain(xs: &[f64], slack: f64) -> Result<Vec<ViolationRecord>> {
    const SUITE: &str = "mills_chain";
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in xs {
        let r = mills_ratio(x)?;
        let outer_lo = 1.0 / (1.0 + x);
        let inner_lo = 2.0 / ((x * x + 4.0).sqrt() + x);
        let inner_hi = 2.0 / ((x * x + 8.0 / std::f64::consts::PI).sqrt() + x);
        let outer_hi = 2.0 / (1.0 + x);
        check(&mut out, SUITE, format!("x={x} link=outer_lower"), outer_lo, inner_lo, slack);
        check(&mut out, SUITE, format!("x={x} link=lower"), inner_lo, r, slack);
        check(&mut out, SUITE, format!("x={x} link=upper"), r, inner_hi, slack);
        check(&mut out, SUITE, format!("x={x} link=outer_upper"), inner_hi, outer_hi, slack);
        if let Some((px, pr)) = prev {
            if !(r < pr) {
                out.push(ViolationRecord {
                    suite: SUITE.to_string(),
                    inputs: format!("x={px}..{x} link=monotone"),
                    lhs: r,
                    rhs: pr,
                    slack: 0.0,
                });
            }
        }
        prev = Some((x, r));
    }
    Ok(out)
}

/// Brute-force `sum_{h >= 1} e^{-a (mu + h)^2}` with a geometric tail
/// majorant, accurate to ~1e-15 relative.
fn one_sided_tail(mu: f64, a: f64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut h = 1u64;
    loop {
        let u = mu + h as f64;
        let term = (-a * u * u).exp();
        if term == 0.0 {
            break;
        }
        let y = term + comp;
        let next = sum + y;
        comp = if sum.abs() >= y.abs() {
            (sum - next) + y
        } else {
            (y - next) + sum
        };
        sum = next;
        h += 1;
        let v = mu + h as f64;
        let head = (-a * v * v).exp();
        let tail = head / (-(-2.0 * a * v).exp_m1());
        if tail <= 1e-16 * sum.max(f64::MIN_POSITIVE) || h > 2_000_000 {
            break;
        }
    }
    sum + comp
}

/// One-sided lattice Gaussian tail sandwich:
/// `(phi - 1) e^{-a mu^2} <= sum_{h>=1} e^{-a(mu+h)^2} <= 2 phi e^{-a mu^2}`,
/// with the middle sum brute-forced independently of the library series.
pub fn verify_one_sided_tail_bounds(
    offsets: &[f64],
    decays: &[f64],
    slack: f64,
) -> Result<Vec<ViolationRecord>> {
    const SUITE: &str = "one_sided_tail";
    let mut out = Vec::new();
    for &a in decays {
        for &mu in offsets {
            let p = GaussParams::new(mu, a)?;
            let weight = (-a * mu * mu).exp();
            let middle = one_sided_tail(mu, a);
            let lower = (phi(p) - 1.0) * weight;
            let upper = 2.0 * phi(p) * weight;
            let base = format!("mu={mu} a={a:e}");
            check(&mut out, SUITE, format!("{base} side=lower"), lower, middle, slack);
            check(&mut out, SUITE, format!("{base} side=upper"), middle, upper, slack);
        }
    }
    Ok(out)
}

/// Factor-2 envelope for the full lattice sum,
/// `1/2 <= S(mu, a) / (psi(mu, a) + psi(1 - mu, a)) <= 2`, evaluated with
/// the dominant exponential scale divided out of numerator and denominator
/// so the quotient survives where both underflow f64.  Also checks the
/// zero-offset bounds `(1/2)(1 + 1/sqrt(2a)) <= S(0, a) <= 4 (1 + 1/sqrt(2a))`.
pub fn verify_symmetrized_envelope(
    offsets: &[f64],
    decays: &[f64],
    eps: f64,
    slack: f64,
) -> Result<Vec<ViolationRecord>> {
    const SUITE: &str = "symmetrized_envelope";
    let mut out = Vec::new();
    for &a in decays {
        for &mu in offsets {
            let p = GaussParams::new(mu, a)?;
            let m = a * mu.min(1.0 - mu).powi(2);
            let s_scaled = scaled_gauss_sum(p.mu(), p.a(), m, eps).value;
            let near = (1.0 + phi(p)) * (m - a * mu * mu).exp();
            let far = (1.0 + phi(p.reflected())) * (m - a * (1.0 - mu) * (1.0 - mu)).exp();
            let ratio = s_scaled / (near + far);
            let base = format!("mu={mu} a={a:e}");
            check(&mut out, SUITE, format!("{base} side=lower"), 0.5, ratio, slack);
            check(&mut out, SUITE, format!("{base} side=upper"), ratio, 2.0, slack);
        }
        let s0 = lattice_gauss_sum(GaussParams::new(0.0, a)?, eps)?.value;
        let unit = 1.0 + 1.0 / (2.0 * a).sqrt();
        let base = format!("mu=0 a={a:e}");
        check(&mut out, SUITE, format!("{base} side=zero_offset_lower"), 0.5 * unit, s0, slack);
        check(&mut out, SUITE, format!("{base} side=zero_offset_upper"), s0, 4.0 * unit, slack);
    }
    Ok(out)
}

/// Residue-dependent sandwich for `psi(r/(2d), 2d^2/n) / sqrt(n)` against
/// `max(1/(2d), 1/sqrt(n)) e^{-r^2/(2n)}`, globally within `[1/2, 2]` and
/// with the tighter per-case constants:
///
/// * case a, `2d <= sqrt(n)`: between `1/(4d)` and `1/d`;
/// * case b, `2d >= sqrt(n)` and `r <= sqrt(n)`: between `1` and `2` times `1/sqrt(n)`;
/// * case c, `2d >= sqrt(n)` and `r >= sqrt(n)`: between `1` and `3/2` times `1/sqrt(n)`.
///
/// Both residues of each query are tested (`r` taken as `2d` when the
/// residue vanishes, matching the sandwich's `1 <= r <= 2d` convention).
/// Since `(2d^2/n)(r/(2d))^2 = r^2/(2n)` identically, the exponential
/// weight cancels from both sides and the comparison is made on the
/// reduced quantity `(1 + phi) / sqrt(n)`, which never underflows.
pub fn verify_residue_sandwich(grid: &[Query], slack: f64) -> Result<Vec<ViolationRecord>> {
    const SUITE: &str = "residue_sandwich";
    let mut out = Vec::new();
    for &q in grid {
        if q.d < 2 || q.d > q.n {
            return Err(CoreError::domain(format!(
                "residue sandwich requires 2 <= d <= n, got d={}, n={}",
                q.d, q.n
            )));
        }
        let pair = residue_pair(q);
        let two_d = 2 * q.d;
        let mut residues = vec![if pair.r == 0 { two_d } else { pair.r }];
        if pair.rbar != residues[0] {
            residues.push(pair.rbar);
        }
        let nf = q.n as f64;
        let sq = nf.sqrt();
        let a = 2.0 * (q.d as f64) * (q.d as f64) / nf;
        let env = (0.5 / q.d as f64).max(1.0 / sq);
        for r in residues {
            let mu = r as f64 / two_d as f64;
            let reduced = (1.0 + phi(GaussParams::new(mu, a)?)) / sq;
            let base = format!("n={} d={} r={r}", q.n, q.d);
            check(&mut out, SUITE, format!("{base} case=global side=lower"), 0.5 * env, reduced, slack);
            check(&mut out, SUITE, format!("{base} case=global side=upper"), reduced, 2.0 * env, slack);
            let rf = r as f64;
            let td = two_d as f64;
            if td <= sq {
                check(&mut out, SUITE, format!("{base} case=a side=lower"), 0.25 / q.d as f64, reduced, slack);
                check(&mut out, SUITE, format!("{base} case=a side=upper"), reduced, 1.0 / q.d as f64, slack);
            }
            if td >= sq && rf <= sq {
                check(&mut out, SUITE, format!("{base} case=b side=lower"), 1.0 / sq, reduced, slack);
                check(&mut out, SUITE, format!("{base} case=b side=upper"), reduced, 2.0 / sq, slack);
            }
            if td >= sq && rf >= sq {
                check(&mut out, SUITE, format!("{base} case=c side=lower"), 1.0 / sq, reduced, slack);
                check(&mut out, SUITE, format!("{base} case=c side=upper"), reduced, 1.5 / sq, slack);
            }
        }
    }
    Ok(out)
}

/// The main sandwich `E(n, d) / beta_half(n, d)` within
/// `[1/(2 sqrt(2 pi)), 32/sqrt(2 pi)]` on every point, refined per residue
/// class: when `2d | n` the ratio of E to the bare prefactor
/// `max(1/(2d), 1/sqrt(n))` lies in `[1/sqrt(2 pi), 16/sqrt(2 pi)]`, and
/// otherwise `E / beta_half` is bounded above by `8/sqrt(2 pi)`.
pub fn verify_theorem_sandwich(
    grid: &[Query],
    eps: f64,
    slack: f64,
) -> Result<Vec<ViolationRecord>> {
    const SUITE: &str = "theorem_sandwich";
    let sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt();
    let lo_global = 0.5 / sqrt_2pi;
    let hi_global = 32.0 / sqrt_2pi;
    let lo_zero = 1.0 / sqrt_2pi;
    let hi_zero = 16.0 / sqrt_2pi;
    let hi_nonzero = 8.0 / sqrt_2pi;
    let mut out = Vec::new();
    for &q in grid {
        let pair = residue_pair(q);
        let ratio = theorem_ratio(q, eps)?;
        let base = format!("n={} d={} r={}", q.n, q.d, pair.r);
        check(&mut out, SUITE, format!("{base} case=global side=lower"), lo_global, ratio, slack);
        check(&mut out, SUITE, format!("{base} case=global side=upper"), ratio, hi_global, slack);
        if pair.r == 0 {
            let e = approx_e(q, eps)?.value;
            let prefactor = (0.5 / q.d as f64).max(1.0 / (q.n as f64).sqrt());
            let bare = e / prefactor;
            check(&mut out, SUITE, format!("{base} case=residue_zero side=lower"), lo_zero, bare, slack);
            check(&mut out, SUITE, format!("{base} case=residue_zero side=upper"), bare, hi_zero, slack);
        } else {
            check(&mut out, SUITE, format!("{base} case=residue_nonzero side=upper"), ratio, hi_nonzero, slack);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::grids;

    fn small_queries() -> Vec<Query> {
        let mut out = Vec::new();
        for n in 2..=40u64 {
            for d in 2..=n {
                out.push(Query::new(n, d).unwrap());
            }
        }
        // case boundary 2d = sqrt(n) exactly, and deep case-a points
        for (n, d) in [(400u64, 10u64), (400, 9), (400, 11), (10_000, 10), (10_000, 3)] {
            out.push(Query::new(n, d).unwrap());
        }
        out
    }

    #[test]
    fn tail_chain_clean_on_sample_grid() {
        let xs = grids::ratio_argument_grid(50.0, 0.5);
        let v = verify_gauss_tail_chain(&xs, 1e-12).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn tail_chain_machinery_detects_violations() {
        let xs = [0.0, 1.0, 2.0];
        let v = verify_gauss_tail_chain(&xs, -1.0).unwrap();
        assert!(!v.is_empty());
        assert!(v.iter().all(|r| r.suite == "mills_chain" && r.slack == -1.0));
        assert!(v[0].inputs.contains("x=0"));
    }

    #[test]
    fn one_sided_bounds_clean_on_sample_grid() {
        let mus = grids::offset_grid(20);
        let decays = grids::decay_grid(25, 1e-4, 1e4);
        let v = verify_one_sided_tail_bounds(&mus, &decays, 1e-9).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn symmetrized_envelope_clean_on_sample_grid() {
        let mus = grids::offset_grid(20);
        let decays = grids::decay_grid(25, 1e-4, 1e4);
        let v = verify_symmetrized_envelope(&mus, &decays, 1e-13, 1e-9).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn residue_sandwich_clean_on_small_grid() {
        let v = verify_residue_sandwich(&small_queries(), 1e-9).unwrap();
        assert!(v.is_empty(), "{v:?}");
        assert!(verify_residue_sandwich(&[Query::new(5, 6).unwrap()], 1e-9).is_err());
    }

    #[test]
    fn residue_sandwich_machinery_detects_violations() {
        let v = verify_residue_sandwich(&small_queries()[..5], -1.0).unwrap();
        assert!(!v.is_empty());
        assert!(v[0].inputs.contains("case=global"));
    }

    #[test]
    fn theorem_sandwich_clean_on_small_grid() {
        let v = verify_theorem_sandwich(&small_queries(), 1e-13, 1e-9).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn theorem_sandwich_covers_both_residue_cases() {
        // a harsh negative slack trips the per-case checks on both a
        // vanishing-residue and a nonzero-residue point
        let grid = [Query::new(60, 6).unwrap(), Query::new(100, 7).unwrap()];
        let v = verify_theorem_sandwich(&grid, 1e-13, -5.0).unwrap();
        assert!(v.iter().any(|r| r.inputs.contains("case=residue_zero")));
        assert!(v.iter().any(|r| r.inputs.contains("case=residue_nonzero")));
    }
}
