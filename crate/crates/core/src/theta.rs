//! Theta-function approximation of the divisibility probability.
//!
//! The central object is
//!
//! ```text
//! Theta(d, m) = sum_{l in Z} e^{i m pi l / d - m pi^2 l^2 / (2 d^2)}
//!             = 1 + 2 sum_{l >= 1} cos(m pi l / d) e^{-m pi^2 l^2 / (2 d^2)}
//! ```
//!
//! and the approximation `E(n, d) = Theta(d, n) / d` to `P{d | S_n}`.
//! Poisson summation turns the same quantity into a lattice Gaussian sum,
//!
//! ```text
//! E(n, d) = sqrt(2 / (pi n)) * S(r / (2d), 2 d^2 / n),    r = n mod 2d,
//! ```
//!
//! which converges fast exactly where the theta series converges slowly and
//! vice versa.  [`approx_e`] switches form at `d^2 >= pi n / 2`, the point
//! where the two quadratic decay rates cross; the chosen side always has
//! decay coefficient at least `pi` per squared index, so a handful of terms
//! suffice and the summation is cancellation-free where values are tiny.
//!
//! The residue envelope
//! `beta(n, d) = max(1/(2d), 1/sqrt(n)) [e^{-r^2/(2n)} + e^{-rbar^2/(2n)}]`
//! brackets `E(n, d)` between fixed constants; [`theorem_ratio`] evaluates
//! `E / beta` with the shared exponential scale factored out so the quotient
//! stays finite even where both sides underflow f64.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::residues::{residue_pair, Query};
use crate::special::{check_eps, scaled_gauss_sum, ApproxValue};

/// Which series evaluates `E(n, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesForm {
    /// Pick the fast-converging side automatically.
    Auto,
    /// Force the theta series in the form `Theta(d, n) / d`.
    ThetaDirect,
    /// Force the Poisson-dual lattice Gaussian form.
    GaussianDual,
}

/// Residue envelope values for a query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    /// `max(1/(2d), 1/sqrt(n)) [e^{-r^2/(2n)} + e^{-rbar^2/(2n)}]`.
    pub beta_half: f64,
    /// Same bracket scaled by `max(1/d, 1/sqrt(n))` instead.
    pub beta_abs: f64,
}

/// Direct evaluation of `Theta(d, m)`.
///
/// Terms are added in increasing `|l|` (the `+l` and `-l` terms are equal, so
/// each index contributes `2 cos(m pi l / d) e^{-c l^2}`), and the loop stops
/// once the geometric tail majorant drops below `eps` relative to the partial
/// sum.  The cosine argument is reduced exactly in integer arithmetic before
/// conversion to radians.
pub fn theta_direct(d: u64, m: u64, eps: f64) -> Result<ApproxValue> {
    if d == 0 || m == 0 {
        return Err(CoreError::domain("theta_direct requires d >= 1 and m >= 1"));
    }
    check_eps(eps)?;
    let df = d as f64;
    let c = m as f64 * std::f64::consts::PI * std::f64::consts::PI / (2.0 * df * df);
    let two_d = 2 * d as u128;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut l = 1u64;
    let tail_bound;
    loop {
        let head = (-c * (l as f64) * (l as f64)).exp();
        if head == 0.0 {
            tail_bound = 0.0;
            break;
        }
        let tail = 2.0 * head / (-(-2.0 * c * l as f64).exp_m1());
        if tail <= eps * sum.abs().max(f64::MIN_POSITIVE) || l > 5_000_000 {
            tail_bound = tail;
            break;
        }
        let t = ((m as u128 * l as u128) % two_d) as f64;
        let term = 2.0 * (std::f64::consts::PI * t / df).cos() * head;
        let y = term + comp;
        let next = sum + y;
        comp = if sum.abs() >= y.abs() {
            (sum - next) + y
        } else {
            (y - next) + sum
        };
        sum = next;
        l += 1;
    }
    Ok(ApproxValue {
        value: sum + comp,
        tail_bound,
        terms_used: l as u32,
    })
}

fn gauss_dual_params(q: Query) -> (f64, f64) {
    let r = residue_pair(q).r;
    let mu = r as f64 / (2.0 * q.d as f64);
    let a = 2.0 * q.d as f64 * q.d as f64 / q.n as f64;
    (mu, a)
}

fn use_gaussian_dual(q: Query) -> bool {
    // decay coefficients cross at 2 d^2 / n = pi^2 n / (2 d^2)
    2.0 * (q.d as f64) * (q.d as f64) >= std::f64::consts::PI * q.n as f64
}

/// The series form automatic selection would pick for this query.
pub fn auto_series_form(q: Query) -> SeriesForm {
    if use_gaussian_dual(q) {
        SeriesForm::GaussianDual
    } else {
        SeriesForm::ThetaDirect
    }
}

fn eval_e(q: Query, eps: f64, form: SeriesForm) -> Result<ApproxValue> {
    let gaussian = match form {
        SeriesForm::Auto => use_gaussian_dual(q),
        SeriesForm::GaussianDual => true,
        SeriesForm::ThetaDirect => false,
    };
    if gaussian {
        check_eps(eps)?;
        let (mu, a) = gauss_dual_params(q);
        let scale = (2.0 / (std::f64::consts::PI * q.n as f64)).sqrt();
        let s = scaled_gauss_sum(mu, a, 0.0, eps);
        Ok(ApproxValue {
            value: scale * s.value,
            tail_bound: scale * s.tail_bound,
            terms_used: s.terms_used,
        })
    } else {
        let t = theta_direct(q.d, q.n, eps)?;
        let df = q.d as f64;
        Ok(ApproxValue {
            value: t.value / df,
            tail_bound: t.tail_bound / df,
            terms_used: t.terms_used,
        })
    }
}

/// `E(n, d) = Theta(d, n) / d` for `1 <= d <= n`.
pub fn approx_e(q: Query, eps: f64) -> Result<ApproxValue> {
    if q.d > q.n {
        return Err(CoreError::domain(format!(
            "approx_e requires d <= n (got d={}, n={}); use approx_e_any to override",
            q.d, q.n
        )));
    }
    eval_e(q, eps, SeriesForm::Auto)
}

/// `E(n, d)` without the `d <= n` range check.
pub fn approx_e_any(q: Query, eps: f64) -> Result<ApproxValue> {
    eval_e(q, eps, SeriesForm::Auto)
}

/// `E(n, d)` with the series form pinned, for cross-checking the two dual
/// evaluations against each other.
pub fn approx_e_forced(q: Query, eps: f64, form: SeriesForm) -> Result<ApproxValue> {
    eval_e(q, eps, form)
}

/// Relative disagreement between the two dual series, both truncated at
/// `eps = 1e-14`.  Zero when both sides evaluate to zero.
pub fn poisson_identity_residual(q: Query) -> Result<f64> {
    let a = eval_e(q, 1e-14, SeriesForm::ThetaDirect)?.value;
    let b = eval_e(q, 1e-14, SeriesForm::GaussianDual)?.value;
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((a - b).abs() / scale)
}

fn check_envelope_range(q: Query) -> Result<()> {
    if q.d < 2 || q.d > q.n {
        return Err(CoreError::domain(format!(
            "envelope requires 2 <= d <= n, got d={}, n={}",
            q.d, q.n
        )));
    }
    Ok(())
}

/// Residue envelope `beta(n, d)` in both normalisations, for `2 <= d <= n`.
pub fn envelope_beta(q: Query) -> Result<Envelope> {
    check_envelope_range(q)?;
    let p = residue_pair(q);
    let nf = q.n as f64;
    let bracket = (-(p.r as f64).powi(2) / (2.0 * nf)).exp()
        + (-(p.rbar as f64).powi(2) / (2.0 * nf)).exp();
    let inv_sqrt_n = 1.0 / nf.sqrt();
    Ok(Envelope {
        beta_half: (0.5 / q.d as f64).max(inv_sqrt_n) * bracket,
        beta_abs: (1.0 / q.d as f64).max(inv_sqrt_n) * bracket,
    })
}

/// `E(n, d) / beta_half(n, d)`, evaluated with the common exponential scale
/// `e^{-min(r, rbar)^2 / (2n)}` divided out of both numerator and
/// denominator.  Algebraically identical to the plain quotient, but immune
/// to the f64 underflow both sides suffer when `min(r, rbar) >> sqrt(n)`.
pub fn theorem_ratio(q: Query, eps: f64) -> Result<f64> {
    check_envelope_range(q)?;
    check_eps(eps)?;
    let p = residue_pair(q);
    let nf = q.n as f64;
    let e1 = (p.r as f64).powi(2) / (2.0 * nf);
    let e2 = (p.rbar as f64).powi(2) / (2.0 * nf);
    let m = e1.min(e2);
    let scaled_bracket = (m - e1).exp() + (m - e2).exp();
    let envelope_scale = (0.5 / q.d as f64).max(1.0 / nf.sqrt());
    let scaled_e = if use_gaussian_dual(q) {
        let (mu, a) = gauss_dual_params(q);
        (2.0 / (std::f64::consts::PI * nf)).sqrt() * scaled_gauss_sum(mu, a, m, eps).value
    } else {
        // theta regime has a < pi, so the scale factor cannot overflow
        eval_e(q, eps, SeriesForm::ThetaDirect)?.value * m.exp()
    };
    Ok(scaled_e / (envelope_scale * scaled_bracket))
}
