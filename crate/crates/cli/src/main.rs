//! Command line front end: objective priors, intrinsic and mixed-prior
//! tests, Lindley sweeps, and a Monte Carlo coverage study.
//!
//! Reports go to standard output (JSON, or CSV for `lindley`); error
//! envelopes go to the error stream. Exit codes: 0 success, 2 bad
//! configuration, 3 numerical failure.

mod commands;
mod ingest;
mod report;

use clap::{Args, Parser, Subcommand};
use obayes::{Family, SampleData};
use report::CliError;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "obayes",
    version,
    about = "Objective Bayesian estimation and hypothesis testing"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a reference prior and the Fisher information on a grid
    Prior(PriorCmd),
    /// Intrinsic test of a point null (posterior expected discrepancy)
    #[command(name = "test-intrinsic")]
    TestIntrinsic(IntrinsicCmd),
    /// Mixed-prior test: point mass on the null plus a proper spread
    #[command(name = "test-mixed")]
    TestMixed(MixedCmd),
    /// Sweep the mixed test over n at fixed standardized distance (CSV)
    Lindley(LindleyCmd),
    /// Monte Carlo coverage of equal-tail credible intervals
    Coverage(CoverageCmd),
}

#[derive(Args)]
struct FamilyArgs {
    /// Sampling family: normal_known_sigma, poisson, bernoulli, binomial
    /// or exponential
    #[arg(long)]
    family: String,
    /// Known standard deviation (normal_known_sigma)
    #[arg(long)]
    sigma: Option<f64>,
    /// Number of trials (binomial)
    #[arg(long)]
    trials: Option<f64>,
}

impl FamilyArgs {
    fn build(&self) -> Result<Family, CliError> {
        let mut hyper = BTreeMap::new();
        if let Some(s) = self.sigma {
            hyper.insert("sigma".to_string(), s);
        }
        if let Some(t) = self.trials {
            hyper.insert("trials".to_string(), t);
        }
        Ok(Family::make_builtin(&self.family, &hyper)?)
    }
}

#[derive(Args)]
struct DataArgs {
    /// CSV file of observations, one per line, optional header
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
    /// Sample size, for inline sufficient statistics
    #[arg(long)]
    n: Option<u64>,
    /// Sample mean (with --n)
    #[arg(long, allow_negative_numbers = true)]
    mean: Option<f64>,
    /// Sample sum (with --n)
    #[arg(long, allow_negative_numbers = true)]
    sum: Option<f64>,
}

impl DataArgs {
    fn load(&self) -> Result<SampleData, CliError> {
        match (&self.data, self.n, self.mean, self.sum) {
            (Some(path), None, None, None) => {
                Ok(obayes::Sample::new(ingest::read_csv(path)?)?.into())
            }
            (None, Some(n), Some(mean), None) => {
                Ok(obayes::SuffStats::from_mean(n, mean)?.into())
            }
            (None, Some(n), None, Some(sum)) => Ok(obayes::SuffStats::from_sum(n, sum)?.into()),
            _ => Err(CliError::config(
                "provide exactly one data source: --data PATH, or --n with one of --mean/--sum",
            )),
        }
    }
}

#[derive(Args)]
struct PriorCmd {
    #[command(flatten)]
    family: FamilyArgs,
    /// Parameter grid, comma separated
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    grid: String,
    /// Prior label: jeffreys, uniform or scale_invariant
    #[arg(long, default_value = "jeffreys")]
    prior: String,
    /// Report format (json)
    #[arg(long, default_value = "json")]
    out: String,
}

#[derive(Args)]
struct IntrinsicCmd {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    data: DataArgs,
    /// Null parameter value under test
    #[arg(long, allow_negative_numbers = true)]
    null: f64,
    /// Estimation prior label; defaults to the family's estimation prior
    #[arg(long)]
    prior: Option<String>,
    /// Rejection threshold in nats; defaults to log(100)
    #[arg(long)]
    threshold: Option<f64>,
    /// Report format (json)
    #[arg(long, default_value = "json")]
    out: String,
}

#[derive(Args)]
struct MixedCmd {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    data: DataArgs,
    /// Null parameter value under test
    #[arg(long, allow_negative_numbers = true)]
    null: f64,
    /// Prior mass on the null point
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Spread prior over the alternatives: cauchy, uniform,
    /// scale_invariant or jeffreys (must be proper on the support)
    #[arg(long, default_value = "cauchy")]
    spread: String,
    /// Spread location; defaults to the null value
    #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
    spread_loc: Option<f64>,
    /// Spread scale; defaults to sigma for normal_known_sigma, else 1
    #[arg(long, value_name = "REAL")]
    spread_scale: Option<f64>,
    /// Report format (json)
    #[arg(long, default_value = "json")]
    out: String,
}

#[derive(Args)]
struct LindleyCmd {
    #[command(flatten)]
    family: FamilyArgs,
    /// Null parameter value
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    null: f64,
    /// Fixed standardized distance from the null
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
    /// Sample sizes, comma separated and strictly increasing
    #[arg(long, value_name = "LIST")]
    n_list: String,
    /// Prior mass on the null point
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Spread prior over the alternatives
    #[arg(long, default_value = "cauchy")]
    spread: String,
    /// Spread location; defaults to the null value
    #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
    spread_loc: Option<f64>,
    /// Spread scale; defaults to sigma for normal_known_sigma, else 1
    #[arg(long, value_name = "REAL")]
    spread_scale: Option<f64>,
    /// Report format (csv)
    #[arg(long, default_value = "csv")]
    out: String,
}

#[derive(Args)]
struct CoverageCmd {
    #[command(flatten)]
    family: FamilyArgs,
    /// Parameter value generating the data
    #[arg(long, allow_negative_numbers = true)]
    true_param: f64,
    /// Observations per replicate
    #[arg(long)]
    n: u64,
    /// Number of replicates
    #[arg(long, default_value_t = 2000)]
    reps: u64,
    /// Credible mass of the equal-tail interval
    #[arg(long, default_value_t = 0.95)]
    mass: f64,
    /// Seed of the replicate substreams
    #[arg(long)]
    seed: u64,
    /// Report format (json)
    #[arg(long, default_value = "json")]
    out: String,
}

fn parse_f64_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("{flag}: not a number: {t:?}")))
        })
        .collect()
}

fn parse_u64_list(text: &str, flag: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| CliError::config(format!("{flag}: not a sample size: {t:?}")))
        })
        .collect()
}

fn require_out(actual: &str, expected: &str, cmd: &str) -> Result<(), CliError> {
    if actual != expected {
        return Err(CliError::config(format!(
            "{cmd} emits {expected} only; got --out {actual}"
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.cmd {
        Cmd::Prior(a) => {
            require_out(&a.out, "json", "prior")?;
            let fam = a.family.build()?;
            let grid = parse_f64_list(&a.grid, "--grid")?;
            commands::cmd_prior(&fam, &grid, &a.prior)
        }
        Cmd::TestIntrinsic(a) => {
            require_out(&a.out, "json", "test-intrinsic")?;
            let fam = a.family.build()?;
            let data = a.data.load()?;
            commands::cmd_test_intrinsic(&fam, data, a.null, a.prior.as_deref(), a.threshold)
        }
        Cmd::TestMixed(a) => {
            require_out(&a.out, "json", "test-mixed")?;
            let fam = a.family.build()?;
            let data = a.data.load()?;
            commands::cmd_test_mixed(
                &fam,
                data,
                a.null,
                &a.spread,
                a.spread_loc,
                a.spread_scale,
                a.p,
            )
        }
        Cmd::Lindley(a) => {
            require_out(&a.out, "csv", "lindley")?;
            let fam = a.family.build()?;
            let ns = parse_u64_list(&a.n_list, "--n-list")?;
            commands::cmd_lindley(
                &fam,
                a.null,
                a.z,
                &ns,
                &a.spread,
                a.spread_loc,
                a.spread_scale,
                a.p,
            )
        }
        Cmd::Coverage(a) => {
            require_out(&a.out, "json", "coverage")?;
            let fam = a.family.build()?;
            commands::cmd_coverage(&fam, a.true_param, a.n, a.reps, a.mass, a.seed)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(payload) => println!("{payload}"),
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
