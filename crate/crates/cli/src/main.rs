//! `bdiv`: divisibility probabilities of Bernoulli sums from the command
//! line.
//!
//! Subcommands evaluate single queries (`prob`, `approx`, `residues`), run
//! the supremum-error scan (`scan`), execute the verification suites
//! (`verify`), and demonstrate the residue-window regime (`demo-regime`).
//! Defaults come from the configuration shipped with the library; `--config`
//! merges a TOML file over them and individual flags override both.
//!
//! Exit status: 0 on success with zero violations, 1 when any suite reports
//! a violation, 2 on usage or domain errors, 3 on capacity errors.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::bail;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bdiv_core::config::Defaults;
use bdiv_core::verify::grids::{decay_grid, default_query_grid, offset_grid, ratio_argument_grid};
use bdiv_core::verify::{
    regime_demo, sup_error_scan, verify_deviation_bound, verify_gauss_tail_chain,
    verify_one_sided_tail_bounds, verify_residue_sandwich, verify_symmetrized_envelope,
    verify_theorem_sandwich,
};
use bdiv_core::{
    approx_e_forced, auto_series_form, char_sum_probability, envelope_beta,
    exact_probability_capped, monte_carlo_probability, residue_pair, theorem_ratio, CoreError,
    Query, SeriesForm, ViolationRecord,
};

use report::{emit, real, Format, Report};

#[derive(Parser)]
#[command(
    name = "bdiv",
    version,
    about = "Divisibility probabilities of Bernoulli sums: exact oracles, \
             theta-function approximation, and grid verification suites"
)]
struct Cli {
    /// TOML file overriding any subset of the built-in defaults
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Relative series truncation target, in (0, 1)
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Worker threads for parallel scans
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Capacity cap for exact big-integer evaluation
    #[arg(long, global = true)]
    n_max: Option<u64>,

    /// Monte Carlo sample count
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Monte Carlo seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Report file (stdout when omitted)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and character-sum probability that d divides the Bernoulli sum
    Prob {
        /// Number of Bernoulli trials
        #[arg(long)]
        n: u64,
        /// Candidate divisor
        #[arg(long)]
        d: u64,
        /// Attach a seeded Monte Carlo estimate
        #[arg(long)]
        mc: bool,
    },
    /// Theta-function approximation E(n, d) with residues and envelope
    Approx {
        /// Number of Bernoulli trials
        #[arg(long)]
        n: u64,
        /// Candidate divisor
        #[arg(long)]
        d: u64,
        /// Evaluate even when d > n, outside the estimates' stated range
        #[arg(long)]
        allow_large_d: bool,
        /// Pin the series form instead of picking by decay rate
        #[arg(long, value_enum, default_value_t = FormArg::Auto)]
        force: FormArg,
    },
    /// Residues r = n mod 2d and rbar = 2d - r
    Residues {
        /// Number of Bernoulli trials
        #[arg(long)]
        n: u64,
        /// Candidate divisor
        #[arg(long)]
        d: u64,
    },
    /// Supremum of |P - E| over d in [2, n] for each requested n
    Scan {
        /// Comma-separated n values (defaults to the configured scan list)
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<u64>>,
    },
    /// Run verification suites on the default grids
    Verify {
        /// Which suite to run
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
    /// Search the residue window where E(n, d) beats 1/sqrt(n)
    DemoRegime {
        /// Number of Bernoulli trials
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        /// Lower threshold coefficient in phi_1 = sqrt(2 a1 log n)
        #[arg(long, default_value_t = 1.0)]
        a1: f64,
        /// Upper threshold coefficient in phi_2 = sqrt(2 a2 log n)
        #[arg(long, default_value_t = 1.0)]
        a2: f64,
        /// Window shrink factor in (0, 1)
        #[arg(long, default_value_t = 0.5)]
        c: f64,
    },
}

/// Series form selector for `approx --force`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormArg {
    /// Pick the faster-converging side automatically
    Auto,
    /// Direct theta series Theta(d, n) / d
    Theta,
    /// Poisson-dual lattice Gaussian series
    Gaussian,
}

/// Verification suite selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    /// Gaussian tail-ratio chain of algebraic envelopes
    #[value(name = "mills")]
    Mills,
    /// One-sided lattice Gaussian tail sandwich
    #[value(name = "lemma1")]
    Lemma1,
    /// Factor-2 symmetrized envelope plus zero-offset bounds
    #[value(name = "corollary1")]
    Corollary1,
    /// Residue-dependent sandwich, global and per proof case
    #[value(name = "lemma3")]
    Lemma3,
    /// Approximation-vs-envelope sandwich with the main constants
    #[value(name = "theorem")]
    Theorem,
    /// Two-regime deviation bound with the frozen fitted constant
    #[value(name = "eq210")]
    Eq210,
    /// Every suite above, in order
    #[value(name = "all")]
    All,
}

fn suite_name(s: SuiteArg) -> &'static str {
    match s {
        SuiteArg::Mills => "mills",
        SuiteArg::Lemma1 => "lemma1",
        SuiteArg::Corollary1 => "corollary1",
        SuiteArg::Lemma3 => "lemma3",
        SuiteArg::Theorem => "theorem",
        SuiteArg::Eq210 => "eq210",
        SuiteArg::All => "all",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap prints help and version to stdout with status 0, and usage
        // errors to stderr with status 2
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            let capacity = err
                .chain()
                .any(|c| matches!(c.downcast_ref::<CoreError>(), Some(CoreError::Capacity(_))));
            ExitCode::from(if capacity { 3 } else { 2 })
        }
    }
}

/// Loads and overrides the configuration, dispatches the subcommand, and
/// writes the report.  Returns whether any suite recorded violations.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => Defaults::from_path(path)?,
        None => Defaults::builtin(),
    };
    if let Some(eps) = cli.eps {
        cfg.eps = eps;
    }
    if let Some(workers) = cli.workers {
        if workers == 0 {
            bail!("--workers must be at least 1");
        }
        cfg.workers = workers;
    }
    if let Some(n_max) = cli.n_max {
        cfg.n_max = n_max;
    }
    if let Some(samples) = cli.samples {
        cfg.samples = samples;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;

    let (report, violations) = match cli.command {
        Command::Prob { n, d, mc } => (cmd_prob(&cfg, n, d, mc)?, false),
        Command::Approx {
            n,
            d,
            allow_large_d,
            force,
        } => (cmd_approx(&cfg, n, d, allow_large_d, force)?, false),
        Command::Residues { n, d } => (cmd_residues(&cfg, n, d)?, false),
        Command::Scan { n_list } => (cmd_scan(&cfg, n_list)?, false),
        Command::Verify { suite } => cmd_verify(&cfg, suite)?,
        Command::DemoRegime { n, a1, a2, c } => (cmd_demo(&cfg, n, a1, a2, c)?, false),
    };
    emit(&report, cli.format, cli.out.as_deref())?;
    Ok(violations)
}

fn config_echo(cfg: &Defaults) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(cfg)?)
}

fn cmd_prob(cfg: &Defaults, n: u64, d: u64, mc: bool) -> anyhow::Result<Report> {
    let q = Query::new(n, d)?;
    let exact = exact_probability_capped(q, cfg.n_max)?;
    let char_sum = char_sum_probability(q)?;
    let numerator = exact.numerator.to_string();
    let mut doc = json!({
        "command": "prob",
        "n": n,
        "d": d,
        "numerator": numerator,
        "p": exact.value,
        "char_sum": char_sum,
        "config": config_echo(cfg)?,
    });
    let mut header = vec!["n", "d", "numerator", "p", "char_sum"];
    let mut row = vec![
        n.to_string(),
        d.to_string(),
        numerator,
        real(exact.value),
        real(char_sum),
    ];
    if mc {
        let est = monte_carlo_probability(q, cfg.samples, cfg.seed)?;
        doc["mc"] = serde_json::to_value(&est)?;
        header.extend(["mc_estimate", "mc_std_error", "mc_samples", "mc_seed"]);
        row.extend([
            real(est.estimate),
            real(est.std_error),
            est.samples.to_string(),
            est.seed.to_string(),
        ]);
    }
    Ok(Report {
        json: doc,
        csv_header: header,
        csv_rows: vec![row],
    })
}

fn cmd_approx(
    cfg: &Defaults,
    n: u64,
    d: u64,
    allow_large_d: bool,
    force: FormArg,
) -> anyhow::Result<Report> {
    let q = Query::new(n, d)?;
    if q.d > q.n && !allow_large_d {
        bail!(
            "approx evaluates E(n, d) for d <= n (got d={d}, n={n}); \
             pass --allow-large-d to evaluate outside that range"
        );
    }
    let form = match force {
        FormArg::Auto => auto_series_form(q),
        FormArg::Theta => SeriesForm::ThetaDirect,
        FormArg::Gaussian => SeriesForm::GaussianDual,
    };
    let form_name = match form {
        SeriesForm::ThetaDirect => "theta_direct",
        SeriesForm::GaussianDual => "gaussian_dual",
        SeriesForm::Auto => "auto",
    };
    let e = approx_e_forced(q, cfg.eps, form)?;
    let pair = residue_pair(q);
    // the envelope and sandwich ratio are defined for 2 <= d <= n only
    let (beta_half, beta_abs, ratio) = if q.d >= 2 && q.d <= q.n {
        let env = envelope_beta(q)?;
        (
            Some(env.beta_half),
            Some(env.beta_abs),
            Some(theorem_ratio(q, cfg.eps)?),
        )
    } else {
        (None, None, None)
    };
    let doc = json!({
        "command": "approx",
        "n": n,
        "d": d,
        "r": pair.r,
        "rbar": pair.rbar,
        "series_form": form_name,
        "e_value": e.value,
        "tail_bound": e.tail_bound,
        "terms_used": e.terms_used,
        "beta_half": beta_half,
        "beta_abs": beta_abs,
        "ratio": ratio,
        "config": config_echo(cfg)?,
    });
    let opt = |v: Option<f64>| v.map(real).unwrap_or_default();
    let row = vec![
        n.to_string(),
        d.to_string(),
        pair.r.to_string(),
        pair.rbar.to_string(),
        form_name.to_string(),
        real(e.value),
        real(e.tail_bound),
        e.terms_used.to_string(),
        opt(beta_half),
        opt(beta_abs),
        opt(ratio),
    ];
    Ok(Report {
        json: doc,
        csv_header: vec![
            "n",
            "d",
            "r",
            "rbar",
            "series_form",
            "e_value",
            "tail_bound",
            "terms_used",
            "beta_half",
            "beta_abs",
            "ratio",
        ],
        csv_rows: vec![row],
    })
}

fn cmd_residues(cfg: &Defaults, n: u64, d: u64) -> anyhow::Result<Report> {
    let q = Query::new(n, d)?;
    let pair = residue_pair(q);
    let doc = json!({
        "command": "residues",
        "n": n,
        "d": d,
        "r": pair.r,
        "rbar": pair.rbar,
        "config": config_echo(cfg)?,
    });
    let row = vec![
        n.to_string(),
        d.to_string(),
        pair.r.to_string(),
        pair.rbar.to_string(),
    ];
    Ok(Report {
        json: doc,
        csv_header: vec!["n", "d", "r", "rbar"],
        csv_rows: vec![row],
    })
}

fn cmd_scan(cfg: &Defaults, n_list: Option<Vec<u64>>) -> anyhow::Result<Report> {
    let list = n_list.unwrap_or_else(|| cfg.scan.n_list.clone());
    if list.is_empty() {
        bail!("--n-list must contain at least one value");
    }
    let out = sup_error_scan(&list, cfg.eps, cfg.workers, cfg.n_max)?;
    let doc = json!({
        "command": "scan",
        "n_list": list,
        "reports": out.reports,
        "fitted_c": out.fitted_c,
        "spot_checks": out.spot_checks,
        "spot_check_max_abs_error": out.spot_check_max_abs_error,
        "rows": out.rows,
        "config": config_echo(cfg)?,
    });
    let rows = out
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.d.to_string(),
                r.r.to_string(),
                r.rbar.to_string(),
                real(r.p_exact),
                real(r.e_approx),
                real(r.beta_half),
                real(r.abs_error),
                real(r.ratio),
            ]
        })
        .collect();
    Ok(Report {
        json: doc,
        csv_header: vec![
            "n", "d", "r", "rbar", "p_exact", "e_approx", "beta_half", "abs_error", "ratio",
        ],
        csv_rows: rows,
    })
}

fn run_suite(cfg: &Defaults, s: SuiteArg) -> anyhow::Result<Vec<ViolationRecord>> {
    let g = &cfg.grid;
    let t = &cfg.tolerances;
    Ok(match s {
        SuiteArg::Mills => {
            verify_gauss_tail_chain(&ratio_argument_grid(g.x_max, g.x_step), t.mills_slack)?
        }
        SuiteArg::Lemma1 => verify_one_sided_tail_bounds(
            &offset_grid(g.mu_steps),
            &decay_grid(g.a_count, g.a_lo, g.a_hi),
            t.ineq_slack,
        )?,
        SuiteArg::Corollary1 => verify_symmetrized_envelope(
            &offset_grid(g.mu_steps),
            &decay_grid(g.a_count, g.a_lo, g.a_hi),
            cfg.eps,
            t.ineq_slack,
        )?,
        SuiteArg::Lemma3 => verify_residue_sandwich(&default_query_grid(g), t.ineq_slack)?,
        SuiteArg::Theorem => verify_theorem_sandwich(&default_query_grid(g), cfg.eps, t.ineq_slack)?,
        SuiteArg::Eq210 => verify_deviation_bound(
            &default_query_grid(g),
            cfg.frozen.c_eq210 * cfg.frozen.eq210_safety,
            t.ineq_slack,
            cfg.workers,
        )?,
        SuiteArg::All => unreachable!("the all token is expanded before dispatch"),
    })
}

fn cmd_verify(cfg: &Defaults, suite: SuiteArg) -> anyhow::Result<(Report, bool)> {
    let tokens = match suite {
        SuiteArg::All => vec![
            SuiteArg::Mills,
            SuiteArg::Lemma1,
            SuiteArg::Corollary1,
            SuiteArg::Lemma3,
            SuiteArg::Theorem,
            SuiteArg::Eq210,
        ],
        s => vec![s],
    };
    let mut violations: Vec<ViolationRecord> = Vec::new();
    for &s in &tokens {
        violations.extend(run_suite(cfg, s)?);
    }
    let names: Vec<&str> = tokens.iter().map(|&s| suite_name(s)).collect();
    let doc = json!({
        "command": "verify",
        "suites": names,
        "violation_count": violations.len(),
        "violations": violations,
        "config": config_echo(cfg)?,
    });
    let rows = violations
        .iter()
        .map(|v| {
            vec![
                v.suite.clone(),
                v.inputs.clone(),
                real(v.lhs),
                real(v.rhs),
                real(v.slack),
            ]
        })
        .collect();
    let any = !violations.is_empty();
    Ok((
        Report {
            json: doc,
            csv_header: vec!["suite", "inputs", "lhs", "rhs", "slack"],
            csv_rows: rows,
        },
        any,
    ))
}

fn cmd_demo(cfg: &Defaults, n: u64, a1: f64, a2: f64, c: f64) -> anyhow::Result<Report> {
    let rep = regime_demo(n, a1, a2, c, cfg.eps)?;
    let mut doc = serde_json::to_value(&rep)?;
    let obj = doc
        .as_object_mut()
        .expect("regime demo report serializes to an object");
    obj.insert("command".into(), json!("demo-regime"));
    obj.insert("config".into(), config_echo(cfg)?);
    let rows = rep
        .admissible
        .iter()
        .map(|p| {
            vec![
                p.d.to_string(),
                p.r.to_string(),
                p.rbar.to_string(),
                real(p.e_value),
                real(p.envelope_ratio),
            ]
        })
        .collect();
    Ok(Report {
        json: doc,
        csv_header: vec!["d", "r", "rbar", "e_value", "envelope_ratio"],
        csv_rows: rows,
    })
}
