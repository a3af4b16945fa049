//! Objective Bayesian estimation and hypothesis testing.
//!
//! The library builds reference analyses from parametric sampling families:
//!
//! * [`families`]: builtin and custom models, samples and sufficient
//!   statistics;
//! * [`priors`]: Fisher information, Jeffreys-rule priors, named reference
//!   priors and reparameterization pushforwards;
//! * [`divergence`]: Kullback-Leibler divergence and the intrinsic
//!   discrepancy (the minimum of the two directed divergences);
//! * [`posterior`]: posterior construction from possibly improper priors,
//!   with an explicit properness verdict, normalization, expectations and
//!   equal-tail credible intervals;
//! * [`intrinsic`]: the intrinsic test statistic (posterior expectation of
//!   the discrepancy between the null and the alternatives) with its
//!   `log(100)` rejection convention;
//! * [`mixed`]: point-mass-plus-spread testing, Bayes factors and the sample
//!   size sweep exhibiting Lindley's paradox;
//! * [`simulate`]: sampling from the families, for coverage studies;
//! * [`quad`]: the adaptive Gauss-Kronrod engine underneath it all.

pub(crate) mod density;
pub mod divergence;
pub mod error;
pub mod families;
pub mod intrinsic;
pub mod mixed;
pub mod posterior;
pub mod priors;
pub mod quad;
pub mod simulate;

pub use divergence::{intrinsic_discrepancy, intrinsic_discrepancy_numeric, kl, kl_numeric, DistRef};
pub use error::{Error, Result};
pub use families::{
    CustomFamily, DataSupport, Family, InfoMatrix, Interval, Sample, SampleData, SuffStats,
};
pub use intrinsic::{
    default_estimation_prior, discrepancy_at, discrepancy_posterior_summary,
    intrinsic_statistic, intrinsic_statistic_with, IntrinsicOptions, IntrinsicTestResult,
    Method, TestDecision, DEFAULT_THRESHOLD,
};
pub use mixed::{default_spread, lindley_sweep, mixed_test, LindleyPoint, MixedTestResult};
pub use simulate::draw_sample;
pub use posterior::{
    build_posterior, credible_interval, posterior_expectation, PosteriorDensity, Properness,
};
pub use priors::{
    fisher_information, fisher_information_numeric, jeffreys_prior, named_prior,
    prior_pushforward, MonotoneMap, NamedPrior, PriorSpec,
};
