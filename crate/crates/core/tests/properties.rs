//! Randomized invariants for the numeric kernels.

use proptest::prelude::*;

use bdiv_core::exact::{char_sum_probability, exact_probability};
use bdiv_core::residues::{residue_pair, Query};
use bdiv_core::special::{lattice_gauss_sum, mills_ratio, GaussParams};
use bdiv_core::theta::{approx_e, approx_e_forced, envelope_beta, theorem_ratio, SeriesForm};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn residue_pair_invariants(n in 1u64..1_000_000_000, d in 1u64..1_000_000_000) {
        let q = Query::new(n, d).unwrap();
        let p = residue_pair(q);
        prop_assert_eq!(p.r + p.rbar, 2 * d);
        prop_assert_eq!(p.r, n % (2 * d));
        prop_assert!(p.r < 2 * d);
        prop_assert!(p.rbar >= 1 && p.rbar <= 2 * d);
        prop_assert_eq!((n - p.r) % (2 * d), 0);
    }

    #[test]
    fn degenerate_queries_are_rejected(n in 1u64..100) {
        prop_assert!(Query::new(0, n).is_err());
        prop_assert!(Query::new(n, 0).is_err());
    }

    #[test]
    fn gauss_sum_is_symmetric_in_the_offset(
        mu in 0.0f64..=1.0,
        log_a in -4.0f64..=4.0,
    ) {
        let a = 10f64.powf(log_a);
        let s1 = lattice_gauss_sum(GaussParams::new(mu, a).unwrap(), 1e-13).unwrap().value;
        let s2 = lattice_gauss_sum(GaussParams::new(1.0 - mu, a).unwrap(), 1e-13).unwrap().value;
        prop_assert!((s1 - s2).abs() <= 1e-12 * s1, "S({mu},{a})={s1} vs {s2}");
    }

    #[test]
    fn gauss_sum_tail_bound_is_honest(
        mu in 0.0f64..=1.0,
        log_a in -4.0f64..=4.0,
    ) {
        let a = 10f64.powf(log_a);
        let p = GaussParams::new(mu, a).unwrap();
        let coarse = lattice_gauss_sum(p, 1e-6).unwrap();
        let fine = lattice_gauss_sum(p, 1e-14).unwrap();
        let allowance = coarse.tail_bound + fine.tail_bound + 1e-12 * fine.value;
        prop_assert!((coarse.value - fine.value).abs() <= allowance);
    }

    #[test]
    fn mills_ratio_respects_algebraic_envelopes(x in 0.0f64..=50.0) {
        let r = mills_ratio(x).unwrap();
        prop_assert!(2.0 / ((x * x + 4.0).sqrt() + x) <= r + 1e-12);
        prop_assert!(r <= 2.0 / ((x * x + 8.0 / std::f64::consts::PI).sqrt() + x) + 1e-12);
    }

    #[test]
    fn approximation_is_positive_and_sandwiched(n in 2u64..3000, d_seed in 0u64..10_000) {
        let d = 2 + d_seed % (n - 1);
        let q = Query::new(n, d).unwrap();
        let e = approx_e(q, 1e-13).unwrap();
        prop_assert!(e.value >= 0.0, "E({n},{d}) = {}", e.value);
        // strict positivity wherever the exponential scale is representable
        // in f64 at all (it decays like e^{-min(r, rbar)^2 / (2n)})
        let p = residue_pair(q);
        if (p.r.min(p.rbar) as f64).powi(2) / (2.0 * n as f64) < 700.0 {
            prop_assert!(e.value > 0.0, "E({n},{d}) = 0 unexpectedly");
        }
        // the scaled ratio stays inside the sandwich even past that point
        let ratio = theorem_ratio(q, 1e-13).unwrap();
        let sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt();
        prop_assert!(ratio >= 0.5 / sqrt_2pi - 1e-9 && ratio <= 32.0 / sqrt_2pi + 1e-9,
            "ratio({n},{d}) = {ratio}");
    }

    #[test]
    fn dual_series_forms_agree_where_conditioned(n in 2u64..3000, d_seed in 0u64..10_000) {
        let d = 2 + d_seed % (n - 1);
        let q = Query::new(n, d).unwrap();
        let p = residue_pair(q);
        // the forced theta series loses relative accuracy to cancellation
        // when the value is far below its O(1) partial sums; skip there
        let m_star = (p.r.min(p.rbar) as f64).powi(2) / (2.0 * q.n as f64);
        prop_assume!(m_star <= (d as f64 / (n as f64).sqrt()).max(1.0).ln() + 8.0);
        let t = approx_e_forced(q, 1e-14, SeriesForm::ThetaDirect).unwrap().value;
        let g = approx_e_forced(q, 1e-14, SeriesForm::GaussianDual).unwrap().value;
        prop_assert!(rel(t, g) <= 1e-9, "theta={t:e} dual={g:e} at ({n},{d})");
    }

    #[test]
    fn envelope_normalisations_differ_by_at_most_two(n in 2u64..100_000, d_seed in 0u64..10_000) {
        let d = 2 + d_seed % (n - 1).max(1);
        prop_assume!(d <= n);
        let env = envelope_beta(Query::new(n, d).unwrap()).unwrap();
        // comparable only where the shared bracket has not underflowed f64
        prop_assume!(env.beta_half > 0.0);
        let ratio = env.beta_abs / env.beta_half;
        prop_assert!((1.0..=2.0 + 1e-12).contains(&ratio));
    }

    #[test]
    fn envelope_bracket_is_symmetric_under_residue_swap(
        r in 0u64..2000,
        d in 2u64..1000,
        n in 2u64..100_000,
    ) {
        // the bracket as a function of the residue pair is order-invariant
        prop_assume!(r <= 2 * d);
        let nf = n as f64;
        let rbar = 2 * d - r;
        let fwd = (-(r as f64).powi(2) / (2.0 * nf)).exp()
            + (-(rbar as f64).powi(2) / (2.0 * nf)).exp();
        let swp = (-(rbar as f64).powi(2) / (2.0 * nf)).exp()
            + (-(r as f64).powi(2) / (2.0 * nf)).exp();
        prop_assert_eq!(fwd.to_bits(), swp.to_bits());
    }

    #[test]
    fn character_sum_tracks_exact_oracle(n in 1u64..400, d_seed in 0u64..10_000) {
        let d = 1 + d_seed % n;
        let q = Query::new(n, d).unwrap();
        let exact = exact_probability(q).unwrap();
        let cs = char_sum_probability(q).unwrap();
        prop_assert!((exact.value - cs).abs() <= 1e-12, "({n},{d}): {} vs {cs}", exact.value);
        prop_assert!(exact.value >= 2f64.powi(-(n as i32)));
    }
}
