//! Posterior construction and summaries for one-parameter families.
//!
//! The posterior is kept unnormalized in the log domain; normalization,
//! expectations, the CDF, and quantiles all run through the windowed
//! density analysis in [`crate::density`], anchored at the posterior mode
//! so that exponentiation cannot overflow. Construction always succeeds on
//! valid inputs and records a properness verdict; summaries that require a
//! proper posterior return an error otherwise.

use crate::density::{analyze, DensityAnalysis, NumericOptions, Verdict};
use crate::error::{Error, Result};
use crate::families::{Family, Interval, SampleData};
use crate::priors::PriorSpec;
use crate::quad::{integrate, Tolerance};

/// Three-way properness verdict for a numerically normalized posterior.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Properness {
    Proper,
    Improper,
    Undetermined,
}

/// A posterior over a scalar parameter, normalized numerically.
#[derive(Clone, Debug)]
pub struct PosteriorDensity {
    family: Family,
    data: SampleData,
    prior: PriorSpec,
    support: Interval,
    analysis: DensityAnalysis,
    /// Cumulative anchored mass strictly before each segment.
    prefix: Vec<f64>,
    log_norm_const: Option<f64>,
    properness: Properness,
    diagnostic: Option<String>,
}

/// Builds the posterior `prior × likelihood` for a one-parameter family,
/// normalizes it by adaptive quadrature, and assigns a properness verdict.
///
/// Improper or undetermined posteriors are still returned (the verdict is
/// part of the result); only summaries on them fail.
pub fn build_posterior(
    fam: &Family,
    data: impl Into<SampleData>,
    prior: &PriorSpec,
) -> Result<PosteriorDensity> {
    build_posterior_with(fam, data, prior, &NumericOptions::default())
}

pub(crate) fn build_posterior_with(
    fam: &Family,
    data: impl Into<SampleData>,
    prior: &PriorSpec,
    opts: &NumericOptions,
) -> Result<PosteriorDensity> {
    let data = data.into();
    if fam.param_dim() != 1 {
        return Err(Error::Unsupported(format!(
            "posterior construction covers one-parameter families only; {} has {} parameters",
            fam.name(),
            fam.param_dim()
        )));
    }
    if prior.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: prior.dim(),
        });
    }
    let support = fam.param_space()[0];
    if prior.support()[0] != support {
        return Err(Error::InvalidPrior(format!(
            "prior support {:?} does not match the parameter space {:?} of {}",
            prior.support()[0],
            support,
            fam.name()
        )));
    }
    fam.check_data(&data)?;

    let hints: Vec<f64> = fam.mle_hint(&data).unwrap_or_default();
    let analysis = {
        let log_unnorm = make_log_unnorm(fam, &data, prior);
        analyze(&log_unnorm, support, &hints, opts)
    };

    let (properness, diagnostic, log_norm_const) = match &analysis.verdict {
        Verdict::Proper => (Properness::Proper, None, analysis.log_integral()),
        Verdict::Improper { diagnostic } => {
            (Properness::Improper, Some(diagnostic.clone()), None)
        }
        Verdict::Undetermined { diagnostic } => {
            (Properness::Undetermined, Some(diagnostic.clone()), None)
        }
    };

    let mut prefix = Vec::with_capacity(analysis.segments.len());
    let mut acc = 0.0;
    for s in &analysis.segments {
        prefix.push(acc);
        acc += s.mass;
    }

    Ok(PosteriorDensity {
        family: fam.clone(),
        data,
        prior: prior.clone(),
        support,
        analysis,
        prefix,
        log_norm_const,
        properness,
        diagnostic,
    })
}

fn make_log_unnorm<'a>(
    fam: &'a Family,
    data: &'a SampleData,
    prior: &'a PriorSpec,
) -> impl Fn(f64) -> f64 + 'a {
    move |a: f64| match fam.log_likelihood_data(data, &[a]) {
        Ok(ll) => ll + prior.log_density1(a),
        Err(_) => f64::NAN,
    }
}

impl PosteriorDensity {
    pub fn properness(&self) -> Properness {
        self.properness
    }

    /// Diagnostic accompanying an improper or undetermined verdict.
    pub fn diagnostic(&self) -> Option<&str> {
        self.diagnostic.as_deref()
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn prior(&self) -> &PriorSpec {
        &self.prior
    }

    /// Log of `prior × likelihood` at a parameter value.
    pub fn log_unnorm(&self, alpha: f64) -> f64 {
        make_log_unnorm(&self.family, &self.data, &self.prior)(alpha)
    }

    /// The log normalization constant, available when proper.
    pub fn log_norm_const(&self) -> Option<f64> {
        self.log_norm_const
    }

    /// Estimated absolute error of the normalization integral, relative to
    /// its value.
    pub fn norm_rel_error(&self) -> f64 {
        if self.analysis.total > 0.0 {
            self.analysis.err / self.analysis.total
        } else {
            f64::INFINITY
        }
    }

    /// Location of the posterior mode found during normalization, when the
    /// density was successfully normalized.
    pub fn mode(&self) -> Option<f64> {
        match self.properness {
            Properness::Proper => Some(self.analysis.anchor_x),
            _ => None,
        }
    }

    /// Whether every quadrature panel of the normalization integral met its
    /// tolerance. Summaries remain available either way; a `false` here means
    /// the reported error bound, not the value, should be trusted.
    pub fn norm_converged(&self) -> bool {
        self.analysis.converged
    }

    pub(crate) fn segments(&self) -> &[crate::density::Segment] {
        &self.analysis.segments
    }

    pub(crate) fn total_mass(&self) -> f64 {
        self.analysis.total
    }

    /// `exp(log_unnorm - anchor)`, the overflow-safe integrand.
    pub(crate) fn anchored_density(&self, x: f64) -> f64 {
        (self.log_unnorm(x) - self.analysis.anchor).exp()
    }

    fn require_proper(&self) -> Result<()> {
        match self.properness {
            Properness::Proper => Ok(()),
            Properness::Improper => Err(Error::ImproperPosterior {
                diagnostic: self.diagnostic.clone().unwrap_or_default(),
            }),
            Properness::Undetermined => Err(Error::UndeterminedPosterior {
                diagnostic: self.diagnostic.clone().unwrap_or_default(),
            }),
        }
    }

    /// Normalized log posterior density at an interior parameter value.
    pub fn log_pdf(&self, alpha: f64) -> Result<f64> {
        self.require_proper()?;
        self.family.check_param(&[alpha])?;
        Ok(self.log_unnorm(alpha) - self.log_norm_const.unwrap())
    }

    fn anchored(&self) -> impl Fn(f64) -> f64 + '_ {
        let anchor = self.analysis.anchor;
        let f = make_log_unnorm(&self.family, &self.data, &self.prior);
        move |a: f64| (f(a) - anchor).exp()
    }

    /// Posterior expectation of `g`, with its absolute error estimate.
    pub fn expectation_with_error<G: Fn(f64) -> f64>(&self, g: G) -> Result<(f64, f64)> {
        self.require_proper()?;
        let phi = self.anchored();
        let total = self.analysis.total;
        let tol = Tolerance::new(1e-13 * total, 1e-9);
        let mut num = 0.0;
        let mut err = 0.0;
        for s in &self.analysis.segments {
            let r = integrate(|a| g(a) * phi(a), s.a, s.b, tol)?;
            num += r.value;
            err += r.abs_error;
        }
        let value = num / total;
        let bound = (err + value.abs() * self.analysis.err) / total;
        if !value.is_finite() {
            return Err(Error::NonFinite {
                context: "posterior expectation".into(),
            });
        }
        Ok((value, bound))
    }

    /// Posterior expectation of `g`.
    pub fn expectation<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        Ok(self.expectation_with_error(g)?.0)
    }

    /// Posterior mean.
    pub fn mean(&self) -> Result<f64> {
        self.expectation(|a| a)
    }

    /// Numeric posterior CDF at a parameter value.
    pub fn cdf(&self, alpha: f64) -> Result<f64> {
        self.require_proper()?;
        let segs = &self.analysis.segments;
        let total = self.analysis.total;
        if alpha <= segs[0].a {
            return Ok(0.0);
        }
        if alpha >= segs[segs.len() - 1].b {
            return Ok(1.0);
        }
        let phi = self.anchored();
        let tol = Tolerance::new(1e-13 * total, 1e-9);
        let mut acc = 0.0;
        for (i, s) in segs.iter().enumerate() {
            if alpha >= s.b {
                acc = self.prefix[i] + s.mass;
            } else if alpha > s.a {
                let part = integrate(&phi, s.a, alpha, tol)?;
                return Ok(((self.prefix[i] + part.value) / total).clamp(0.0, 1.0));
            } else {
                break;
            }
        }
        Ok((acc / total).clamp(0.0, 1.0))
    }

    /// Posterior quantile by bisection on the numeric CDF.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.require_proper()?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Unsupported(format!(
                "quantile probability must lie strictly inside (0,1), got {p}"
            )));
        }
        let segs = &self.analysis.segments;
        let total = self.analysis.total;
        let target = p * total;
        // locate the segment holding the target mass
        let mut idx = segs.len() - 1;
        for (i, s) in segs.iter().enumerate() {
            if self.prefix[i] + s.mass >= target {
                idx = i;
                break;
            }
        }
        let s = segs[idx];
        let base = self.prefix[idx];
        let phi = self.anchored();
        let tol = Tolerance::new(1e-13 * total, 1e-9);
        let (mut lo, mut hi) = (s.a, s.b);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let part = integrate(&phi, s.a, mid, tol)?.value;
            let cum = base + part;
            if (cum - target).abs() <= 1e-9 * total {
                return Ok(mid);
            }
            if cum < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * (1.0 + mid.abs()) {
                return Ok(mid);
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Equal-tail credible interval holding the given posterior mass.
    pub fn credible_interval(&self, mass: f64) -> Result<(f64, f64)> {
        self.require_proper()?;
        if !(mass > 0.0 && mass < 1.0) {
            return Err(Error::Unsupported(format!(
                "credible mass must lie strictly inside (0,1), got {mass}"
            )));
        }
        let tail = 0.5 * (1.0 - mass);
        Ok((self.quantile(tail)?, self.quantile(1.0 - tail)?))
    }
}

/// Posterior expectation of `g` under a proper posterior.
pub fn posterior_expectation<G: Fn(f64) -> f64>(post: &PosteriorDensity, g: G) -> Result<f64> {
    post.expectation(g)
}

/// Equal-tail credible interval holding the given posterior mass.
pub fn credible_interval(post: &PosteriorDensity, mass: f64) -> Result<(f64, f64)> {
    post.credible_interval(mass)
}
