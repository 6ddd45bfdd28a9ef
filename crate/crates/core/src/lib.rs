//! Divisibility of Bernoulli sums.
//!
//! Let `S_n` be a sum of `n` independent fair Bernoulli variables, so that
//! `S_n` is Binomial(n, 1/2).  This crate computes the probability that an
//! integer `d` divides `S_n` three independent ways, and machine-checks the
//! analytic estimates that relate them:
//!
//! * exactly, as a big-integer numerator over `2^n` ([`exact_probability`]),
//! * as a root-of-unity character sum in floating point
//!   ([`char_sum_probability`]),
//! * through a theta-function approximation `E(n, d) = Theta(d, n) / d`
//!   with a Poisson-dual lattice Gaussian form ([`approx_e`]).
//!
//! The [`verify`] module turns the supporting inequalities (Mills-ratio
//! envelopes, lattice Gaussian sandwiches, residue-dependent bounds on
//! `E(n, d)`, and the error estimates against the exact probability) into
//! grid-based checkers that report violations as data.

pub mod config;
mod error;
pub mod exact;
pub mod residues;
pub mod special;
pub mod theta;
pub mod verify;

pub use config::Defaults;
pub use error::{CoreError, Result};
pub use exact::{
    char_sum_probability, exact_probability, exact_probability_capped, monte_carlo_probability,
    ExactProbability, MCEstimate, SplitMix64, DEFAULT_N_MAX,
};
pub use residues::{residue_pair, Query, ResiduePair};
pub use special::{lattice_gauss_sum, mills_ratio, phi, psi, ApproxValue, GaussParams};
pub use theta::{
    approx_e, approx_e_any, approx_e_forced, auto_series_form, envelope_beta,
    poisson_identity_residual, theorem_ratio, theta_direct, Envelope, SeriesForm,
};
pub use verify::{RegimeDemoReport, ScanOutcome, ScanRow, SupErrorReport, ViolationRecord};
