//! The five subcommands. Each returns the stdout payload as a string; all
//! diagnostics travel through [`CliError`].

use crate::report::{csv_num, kind_of, num, num_opt, CliError, SCHEMA_VERSION};
use obayes::intrinsic::{IntrinsicOptions, Method, TestDecision};
use obayes::{
    build_posterior, default_estimation_prior, draw_sample, fisher_information, jeffreys_prior,
    lindley_sweep, mixed_test, named_prior, Family, NamedPrior, PriorSpec, Sample, SampleData,
};
use rand::SeedableRng;
use rayon::prelude::*;
use serde_json::json;

pub fn build_prior(label: &str, fam: &Family) -> Result<PriorSpec, CliError> {
    match label {
        "jeffreys" => Ok(jeffreys_prior(fam)?),
        "uniform" => Ok(named_prior(NamedPrior::Uniform, fam.param_space()[0])?),
        "scale_invariant" => Ok(named_prior(
            NamedPrior::ScaleInvariant,
            fam.param_space()[0],
        )?),
        other => Err(CliError::config(format!(
            "unknown prior label {other:?}; expected jeffreys, uniform or scale_invariant"
        ))),
    }
}

pub fn build_spread(
    label: &str,
    fam: &Family,
    null: f64,
    loc: Option<f64>,
    scale: Option<f64>,
) -> Result<PriorSpec, CliError> {
    match label {
        "cauchy" => {
            let location = loc.unwrap_or(null);
            let scale = scale.unwrap_or(match fam {
                Family::NormalKnownSigma { sigma } => *sigma,
                _ => 1.0,
            });
            Ok(named_prior(
                NamedPrior::CauchyProper { location, scale },
                fam.param_space()[0],
            )?)
        }
        "uniform" | "scale_invariant" | "jeffreys" => build_prior(label, fam),
        other => Err(CliError::config(format!(
            "unknown spread label {other:?}; expected cauchy, uniform, scale_invariant or jeffreys"
        ))),
    }
}

fn require_scalar(fam: &Family) -> Result<(), CliError> {
    if fam.param_dim() != 1 {
        return Err(CliError::config(format!(
            "{} has {} parameters; this command covers one-parameter families",
            fam.name(),
            fam.param_dim()
        )));
    }
    Ok(())
}

pub fn cmd_prior(fam: &Family, grid: &[f64], label: &str) -> Result<String, CliError> {
    require_scalar(fam)?;
    if grid.is_empty() {
        return Err(CliError::config("--grid needs at least one point"));
    }
    let prior = build_prior(label, fam)?;
    // log density up to its additive constant, anchored to 0 at the first
    // grid point
    let base = prior.log_density1(grid[0]);
    if !base.is_finite() {
        return Err(CliError {
            kind: crate::report::ErrorKind::Numerical,
            message: format!("prior log density is not finite at {}", grid[0]),
        });
    }
    let mut log_density = Vec::with_capacity(grid.len());
    let mut fisher = Vec::with_capacity(grid.len());
    for &g in grid {
        let ld = prior.log_density1(g) - base;
        if !ld.is_finite() {
            return Err(CliError {
                kind: crate::report::ErrorKind::Numerical,
                message: format!("prior log density is not finite at {g}"),
            });
        }
        log_density.push(num(ld));
        fisher.push(num(fisher_information(fam, &[g])?.get(0, 0)));
    }
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "prior",
        "family": fam.name(),
        "label": prior.label(),
        "grid": grid.iter().map(|&g| num(g)).collect::<Vec<_>>(),
        "log_density": log_density,
        "fisher": fisher,
    })
    .to_string())
}

pub fn cmd_test_intrinsic(
    fam: &Family,
    data: SampleData,
    null: f64,
    prior_label: Option<&str>,
    threshold: Option<f64>,
) -> Result<String, CliError> {
    require_scalar(fam)?;
    let threshold = threshold.unwrap_or(obayes::DEFAULT_THRESHOLD);
    if !threshold.is_finite() {
        return Err(CliError::config("--threshold must be finite"));
    }
    let named;
    let prior = match prior_label {
        Some(l) => {
            named = build_prior(l, fam)?;
            Some(&named)
        }
        None => None,
    };
    let opts = IntrinsicOptions {
        threshold,
        force_quadrature: false,
    };
    let n = data.n();
    let r = obayes::intrinsic_statistic_with(fam, data, null, prior, &opts)?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "test-intrinsic",
        "family": fam.name(),
        "n": n,
        "null": num(null),
        "d": num(r.d),
        "z": num_opt(r.z),
        "threshold": num(r.threshold),
        "decision": match r.decision { TestDecision::Reject => "reject", TestDecision::Accept => "accept" },
        "method": match r.method { Method::ClosedForm => "closed_form", Method::Quadrature => "quadrature" },
        "quadrature_error": num_opt(r.quadrature_error),
        "prior": r.prior_label,
    })
    .to_string())
}

pub fn cmd_test_mixed(
    fam: &Family,
    data: SampleData,
    null: f64,
    spread_label: &str,
    spread_loc: Option<f64>,
    spread_scale: Option<f64>,
    p: f64,
) -> Result<String, CliError> {
    require_scalar(fam)?;
    let spread = build_spread(spread_label, fam, null, spread_loc, spread_scale)?;
    let n = data.n();
    let r = mixed_test(fam, data, null, &spread, p)?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "test-mixed",
        "family": fam.name(),
        "n": n,
        "null": num(null),
        "p": num(r.prior_null_mass),
        "bayes_factor_01": num(r.bayes_factor_01),
        "log_bayes_factor_01": num(r.log_bayes_factor_01),
        "posterior_null_prob": num(r.posterior_null_prob),
        "spread": r.spread_label,
    })
    .to_string())
}

pub fn cmd_lindley(
    fam: &Family,
    null: f64,
    z: f64,
    n_list: &[u64],
    spread_label: &str,
    spread_loc: Option<f64>,
    spread_scale: Option<f64>,
    p: f64,
) -> Result<String, CliError> {
    let spread = build_spread(spread_label, fam, null, spread_loc, spread_scale)?;
    let rows = lindley_sweep(fam, null, z, n_list, &spread, p)?;
    let mut out = String::from("n,bayes_factor_01,posterior_null_prob,intrinsic_d,z_fixed\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            csv_num(r.bayes_factor_01),
            csv_num(r.posterior_null_prob),
            csv_num(r.intrinsic_d),
            csv_num(r.z_fixed),
        ));
    }
    // drop the trailing newline; the caller's println restores it
    out.pop();
    Ok(out)
}

pub fn cmd_coverage(
    fam: &Family,
    true_param: f64,
    n: u64,
    reps: u64,
    mass: f64,
    seed: u64,
) -> Result<String, CliError> {
    require_scalar(fam)?;
    fam.check_param(&[true_param])?;
    if reps == 0 {
        return Err(CliError::config("--reps must be at least 1"));
    }
    if !(mass > 0.0 && mass < 1.0) {
        return Err(CliError::config(format!(
            "--mass must lie strictly inside (0,1), got {mass}"
        )));
    }
    let prior = default_estimation_prior(fam)?;

    // replicate substreams: seed XOR index, so results are independent of
    // scheduling and assembly stays in index order
    let results: Vec<Result<bool, obayes::Error>> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ i);
            let xs = draw_sample(fam, &[true_param], n, &mut rng)?;
            let post = build_posterior(fam, Sample::new(xs)?, &prior)?;
            let (lo, hi) = post.credible_interval(mass)?;
            Ok(lo <= true_param && true_param <= hi)
        })
        .collect();

    for (i, r) in results.iter().enumerate() {
        if let Err(e) = r {
            return Err(CliError {
                kind: kind_of(e),
                message: format!("replicate {i}: {e}"),
            });
        }
    }
    let contained = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let coverage = contained as f64 / reps as f64;
    let std_error = (coverage * (1.0 - coverage) / reps as f64).sqrt();
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "coverage",
        "family": fam.name(),
        "true_param": num(true_param),
        "n": n,
        "reps": reps,
        "mass": num(mass),
        "seed": seed,
        "contained": contained,
        "coverage": num(coverage),
        "std_error": num(std_error),
    })
    .to_string())
}
