//! Parametric sampling families and their sufficient statistics.
//!
//! A [`Family`] is a parametric model `{ f(x | alpha) }` with an open
//! parameter space and a declared data support. Six builtins cover the usual
//! one- and two-parameter exponential-family suspects; [`CustomFamily`] admits
//! user models given a log-density closure.
//!
//! Parameter points are slices `&[f64]`; every builtin except the
//! location-scale normal is one-dimensional.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Open interval (lo, hi); either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidPrior(format!(
                "({lo}, {hi}) is not a valid interval"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn whole_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn positive() -> Self {
        Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    /// Strict interior membership; parameter spaces are open.
    pub fn contains_interior(&self, x: f64) -> bool {
        x.is_finite() && x > self.lo && x < self.hi
    }

    /// Closed membership at finite endpoints; used for data validation, where
    /// boundary observations (an exponential draw of exactly 0.0, say) are
    /// legitimate.
    pub fn contains_closed(&self, x: f64) -> bool {
        x.is_finite() && x >= self.lo && x <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.lo >= other.lo && self.hi <= other.hi
    }
}

/// Observation support of a family.
#[derive(Clone, Debug, PartialEq)]
pub enum DataSupport {
    Continuous(Interval),
    /// Non-negative integer counts, optionally bounded above.
    Counts { max: Option<u64> },
}

impl DataSupport {
    pub fn contains(&self, x: f64) -> bool {
        match self {
            DataSupport::Continuous(iv) => iv.contains_closed(x),
            DataSupport::Counts { max } => {
                x.is_finite()
                    && x >= 0.0
                    && x.fract() == 0.0
                    && max.map_or(true, |m| x <= m as f64)
            }
        }
    }

    pub fn same_kind(&self, other: &DataSupport) -> bool {
        matches!(
            (self, other),
            (DataSupport::Continuous(_), DataSupport::Continuous(_))
                | (DataSupport::Counts { .. }, DataSupport::Counts { .. })
        )
    }

    /// Whether every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &DataSupport) -> bool {
        match (self, other) {
            (DataSupport::Continuous(a), DataSupport::Continuous(b)) => a.is_subset_of(b),
            (DataSupport::Counts { max: a }, DataSupport::Counts { max: b }) => match (a, b) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(a), Some(b)) => a <= b,
            },
            _ => false,
        }
    }
}

/// Sufficient summary (n, sum, sum of squares) of a sample.
///
/// For the builtin families every consuming operation depends on the data
/// only through these three numbers, up to additive constants that do not
/// involve the parameter. See [`Family::log_likelihood_stats`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuffStats {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl SuffStats {
    /// Build from a sample size and mean, taking `sum_sq = sum^2 / n` (as if
    /// the sample had zero spread). Every parameter-dependent quantity for the
    /// one-parameter builtins is unchanged by this choice; only additive
    /// data constants shift, and those cancel in posteriors, Bayes factors
    /// and divergences.
    pub fn from_mean(n: u64, mean: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSample("sample size must be >= 1".into()));
        }
        if !mean.is_finite() {
            return Err(Error::InvalidSample("mean must be finite".into()));
        }
        let sum = mean * n as f64;
        Ok(SuffStats {
            n,
            sum,
            sum_sq: sum * sum / n as f64,
        })
    }

    pub fn from_sum(n: u64, sum: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSample("sample size must be >= 1".into()));
        }
        if !sum.is_finite() {
            return Err(Error::InvalidSample("sum must be finite".into()));
        }
        Ok(SuffStats {
            n,
            sum,
            sum_sq: sum * sum / n as f64,
        })
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }
}

/// A raw i.i.d. sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("sample must contain n >= 1 values".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!("non-finite value {v}")));
        }
        Ok(Sample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn suff_stats(&self) -> SuffStats {
        let n = self.values.len() as u64;
        let sum = self.values.iter().sum();
        let sum_sq = self.values.iter().map(|v| v * v).sum();
        SuffStats { n, sum, sum_sq }
    }
}

/// Either a raw sample or its sufficient summary.
#[derive(Clone, Debug)]
pub enum SampleData {
    Raw(Sample),
    Stats(SuffStats),
}

impl SampleData {
    pub fn n(&self) -> u64 {
        match self {
            SampleData::Raw(s) => s.n(),
            SampleData::Stats(st) => st.n,
        }
    }

    pub fn stats(&self) -> SuffStats {
        match self {
            SampleData::Raw(s) => s.suff_stats(),
            SampleData::Stats(st) => *st,
        }
    }

    pub fn mean(&self) -> f64 {
        self.stats().mean()
    }
}

impl From<Sample> for SampleData {
    fn from(s: Sample) -> Self {
        SampleData::Raw(s)
    }
}

impl From<SuffStats> for SampleData {
    fn from(st: SuffStats) -> Self {
        SampleData::Stats(st)
    }
}

/// Small dense symmetric matrix holding Fisher information.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoMatrix {
    dim: usize,
    data: Vec<f64>, // row major
}

impl InfoMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim, "info matrix shape");
        InfoMatrix { dim, data }
    }

    pub fn scalar(v: f64) -> Self {
        InfoMatrix {
            dim: 1,
            data: vec![v],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    /// Determinant by LU with partial pivoting (dims here are tiny).
    pub fn det(&self) -> f64 {
        let n = self.dim;
        match n {
            1 => self.data[0],
            2 => self.data[0] * self.data[3] - self.data[1] * self.data[2],
            _ => {
                let mut a = self.data.clone();
                let mut det = 1.0;
                for col in 0..n {
                    let mut p = col;
                    for r in (col + 1)..n {
                        if a[r * n + col].abs() > a[p * n + col].abs() {
                            p = r;
                        }
                    }
                    if a[p * n + col] == 0.0 {
                        return 0.0;
                    }
                    if p != col {
                        for c in 0..n {
                            a.swap(p * n + c, col * n + c);
                        }
                        det = -det;
                    }
                    let piv = a[col * n + col];
                    det *= piv;
                    for r in (col + 1)..n {
                        let f = a[r * n + col] / piv;
                        for c in col..n {
                            a[r * n + c] -= f * a[col * n + c];
                        }
                    }
                }
                det
            }
        }
    }

    /// Largest |a_ij - a_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Cholesky feasibility test.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.dim;
        let mut l = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return false;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        true
    }
}

type LogDensityFn = dyn Fn(f64, &[f64]) -> f64 + Send + Sync;
type FisherFn = dyn Fn(&[f64]) -> InfoMatrix + Send + Sync;
type WindowFn = dyn Fn(&[f64], f64) -> (f64, f64) + Send + Sync;

/// User-supplied family.
#[derive(Clone)]
pub struct CustomFamily {
    pub name: String,
    pub param_space: Vec<Interval>,
    pub data_support: DataSupport,
    pub log_density: Arc<LogDensityFn>,
    /// Analytic per-observation Fisher information, if known.
    pub analytic_fisher: Option<Arc<FisherFn>>,
    /// For continuous supports: a `(lo, hi)` window outside which the density
    /// mass at the given parameter is below the given tail epsilon. Required
    /// for numerical expectations when no builtin window applies.
    pub data_window: Option<Arc<WindowFn>>,
}

impl fmt::Debug for CustomFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFamily")
            .field("name", &self.name)
            .field("param_space", &self.param_space)
            .field("data_support", &self.data_support)
            .finish_non_exhaustive()
    }
}

/// A parametric sampling family.
#[derive(Clone, Debug)]
pub enum Family {
    NormalKnownSigma { sigma: f64 },
    /// Location-scale normal, parameter (mu, sigma).
    Normal,
    Poisson,
    Bernoulli,
    Binomial { trials: u64 },
    Exponential,
    Custom(Arc<CustomFamily>),
}

impl Family {
    /// Construct a builtin by name with its fixed hyperparameters:
    /// `normal_known_sigma` needs `sigma`, `binomial` needs `trials`, the
    /// rest take none. Unknown names and unknown or missing hyperparameters
    /// are errors.
    pub fn make_builtin(name: &str, fixed: &BTreeMap<String, f64>) -> Result<Family> {
        let expect_none = |fixed: &BTreeMap<String, f64>| -> Result<()> {
            if let Some(key) = fixed.keys().next() {
                return Err(Error::UnknownHyperparameter {
                    family: name.into(),
                    name: key.clone(),
                });
            }
            Ok(())
        };
        match name {
            "normal_known_sigma" => {
                let mut sigma = None;
                for (k, v) in fixed {
                    if k == "sigma" {
                        sigma = Some(*v);
                    } else {
                        return Err(Error::UnknownHyperparameter {
                            family: name.into(),
                            name: k.clone(),
                        });
                    }
                }
                let sigma = sigma.ok_or_else(|| Error::InvalidHyperparameter {
                    family: name.into(),
                    message: "`sigma` is required".into(),
                })?;
                Family::normal_known_sigma(sigma)
            }
            "normal" => {
                expect_none(fixed)?;
                Ok(Family::Normal)
            }
            "poisson" => {
                expect_none(fixed)?;
                Ok(Family::Poisson)
            }
            "bernoulli" => {
                expect_none(fixed)?;
                Ok(Family::Bernoulli)
            }
            "binomial" => {
                let mut trials = None;
                for (k, v) in fixed {
                    if k == "trials" {
                        trials = Some(*v);
                    } else {
                        return Err(Error::UnknownHyperparameter {
                            family: name.into(),
                            name: k.clone(),
                        });
                    }
                }
                let t = trials.ok_or_else(|| Error::InvalidHyperparameter {
                    family: name.into(),
                    message: "`trials` is required".into(),
                })?;
                if !t.is_finite() || t < 1.0 || t.fract() != 0.0 || t > 2f64.powi(53) {
                    return Err(Error::InvalidHyperparameter {
                        family: name.into(),
                        message: format!("`trials` must be a positive integer, got {t}"),
                    });
                }
                Ok(Family::Binomial { trials: t as u64 })
            }
            "exponential" => {
                expect_none(fixed)?;
                Ok(Family::Exponential)
            }
            other => Err(Error::UnknownFamily(other.into())),
        }
    }

    pub fn normal_known_sigma(sigma: f64) -> Result<Family> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidHyperparameter {
                family: "normal_known_sigma".into(),
                message: format!("`sigma` must be positive and finite, got {sigma}"),
            });
        }
        Ok(Family::NormalKnownSigma { sigma })
    }

    pub fn binomial(trials: u64) -> Result<Family> {
        if trials == 0 {
            return Err(Error::InvalidHyperparameter {
                family: "binomial".into(),
                message: "`trials` must be >= 1".into(),
            });
        }
        Ok(Family::Binomial { trials })
    }

    pub fn name(&self) -> &str {
        match self {
            Family::NormalKnownSigma { .. } => "normal_known_sigma",
            Family::Normal => "normal",
            Family::Poisson => "poisson",
            Family::Bernoulli => "bernoulli",
            Family::Binomial { .. } => "binomial",
            Family::Exponential => "exponential",
            Family::Custom(c) => &c.name,
        }
    }

    pub fn param_dim(&self) -> usize {
        match self {
            Family::Normal => 2,
            Family::Custom(c) => c.param_space.len(),
            _ => 1,
        }
    }

    pub fn param_space(&self) -> Vec<Interval> {
        match self {
            Family::NormalKnownSigma { .. } => vec![Interval::whole_line()],
            Family::Normal => vec![Interval::whole_line(), Interval::positive()],
            Family::Poisson | Family::Exponential => vec![Interval::positive()],
            Family::Bernoulli | Family::Binomial { .. } => vec![Interval::unit()],
            Family::Custom(c) => c.param_space.clone(),
        }
    }

    pub fn data_support(&self) -> DataSupport {
        match self {
            Family::NormalKnownSigma { .. } | Family::Normal => {
                DataSupport::Continuous(Interval::whole_line())
            }
            Family::Poisson => DataSupport::Counts { max: None },
            Family::Bernoulli => DataSupport::Counts { max: Some(1) },
            Family::Binomial { trials } => DataSupport::Counts {
                max: Some(*trials),
            },
            Family::Exponential => DataSupport::Continuous(Interval::positive()),
            Family::Custom(c) => c.data_support.clone(),
        }
    }

    /// Validate a parameter point: right dimension, every component strictly
    /// inside its open interval. Boundary values are rejected.
    pub fn check_param(&self, alpha: &[f64]) -> Result<()> {
        let space = self.param_space();
        if alpha.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                got: alpha.len(),
            });
        }
        for (i, (&v, iv)) in alpha.iter().zip(space.iter()).enumerate() {
            if !iv.contains_interior(v) {
                return Err(Error::ParameterOutOfDomain {
                    index: i,
                    value: v,
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        Ok(())
    }

    pub fn check_sample(&self, s: &Sample) -> Result<()> {
        let support = self.data_support();
        for &v in s.values() {
            if !support.contains(v) {
                return Err(Error::InvalidSample(format!(
                    "value {v} is outside the data support of `{}`",
                    self.name()
                )));
            }
        }
        Ok(())
    }

    pub fn check_stats(&self, st: &SuffStats) -> Result<()> {
        if st.n == 0 {
            return Err(Error::InvalidSample("sample size must be >= 1".into()));
        }
        if !st.sum.is_finite() || !st.sum_sq.is_finite() {
            return Err(Error::InvalidSample("non-finite sufficient statistic".into()));
        }
        let n = st.n as f64;
        match self {
            Family::Poisson if st.sum < 0.0 => Err(Error::InvalidSample(
                "poisson counts cannot have a negative sum".into(),
            )),
            Family::Bernoulli if st.sum < 0.0 || st.sum > n => Err(Error::InvalidSample(
                format!("bernoulli sum must lie in [0, n], got {}", st.sum),
            )),
            Family::Binomial { trials } if st.sum < 0.0 || st.sum > n * *trials as f64 => {
                Err(Error::InvalidSample(format!(
                    "binomial sum must lie in [0, n*trials], got {}",
                    st.sum
                )))
            }
            Family::Exponential if st.sum < 0.0 => Err(Error::InvalidSample(
                "exponential data cannot have a negative sum".into(),
            )),
            Family::NormalKnownSigma { .. } | Family::Normal
                if st.sum_sq < st.sum * st.sum / n - 1e-9 * (1.0 + st.sum_sq.abs()) =>
            {
                Err(Error::InvalidSample(
                    "sum of squares is below the minimum implied by the sum".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn check_data(&self, data: &SampleData) -> Result<()> {
        match data {
            SampleData::Raw(s) => self.check_sample(s),
            SampleData::Stats(st) => self.check_stats(st),
        }
    }

    /// Per-observation log density `log f(x | alpha)`.
    ///
    /// Callers are expected to have validated `alpha` (see [`check_param`])
    /// and to evaluate only at `x` inside the data support; this is the hot
    /// inner loop and performs no checking of its own.
    ///
    /// [`check_param`]: Family::check_param
    pub fn log_density(&self, x: f64, alpha: &[f64]) -> f64 {
        match self {
            Family::NormalKnownSigma { sigma } => {
                let z = (x - alpha[0]) / sigma;
                -sigma.ln() - 0.5 * LN_2PI - 0.5 * z * z
            }
            Family::Normal => {
                let (mu, sigma) = (alpha[0], alpha[1]);
                let z = (x - mu) / sigma;
                -sigma.ln() - 0.5 * LN_2PI - 0.5 * z * z
            }
            Family::Poisson => {
                let lambda = alpha[0];
                -lambda + x * lambda.ln() - ln_gamma(x + 1.0)
            }
            Family::Bernoulli => {
                let theta = alpha[0];
                x * theta.ln() + (1.0 - x) * (1.0 - theta).ln()
            }
            Family::Binomial { trials } => {
                let theta = alpha[0];
                let m = *trials as f64;
                ln_gamma(m + 1.0) - ln_gamma(x + 1.0) - ln_gamma(m - x + 1.0)
                    + x * theta.ln()
                    + (m - x) * (1.0 - theta).ln()
            }
            Family::Exponential => {
                let lambda = alpha[0];
                lambda.ln() - lambda * x
            }
            Family::Custom(c) => (c.log_density)(x, alpha),
        }
    }

    /// Exact log likelihood of a raw sample.
    pub fn log_likelihood(&self, s: &Sample, alpha: &[f64]) -> Result<f64> {
        self.check_param(alpha)?;
        self.check_sample(s)?;
        let mut total = 0.0;
        for &x in s.values() {
            let l = self.log_density(x, alpha);
            if !l.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("log density of `{}` at x = {x}", self.name()),
                });
            }
            total += l;
        }
        Ok(total)
    }

    /// Log likelihood from sufficient statistics.
    ///
    /// Exact for the normal families, bernoulli and exponential. For poisson
    /// and binomial the additive data constants (`-sum log x_i!` and
    /// `sum log C(m, x_i)`) are not recoverable from `(n, sum, sum_sq)` and
    /// are omitted; they do not involve the parameter, so posteriors, Bayes
    /// factors and divergences are unaffected.
    pub fn log_likelihood_stats(&self, st: &SuffStats, alpha: &[f64]) -> Result<f64> {
        self.check_param(alpha)?;
        self.check_stats(st)?;
        let n = st.n as f64;
        let value = match self {
            Family::NormalKnownSigma { sigma } => {
                let mu = alpha[0];
                let ss = st.sum_sq - 2.0 * mu * st.sum + n * mu * mu;
                -n * (sigma.ln() + 0.5 * LN_2PI) - 0.5 * ss / (sigma * sigma)
            }
            Family::Normal => {
                let (mu, sigma) = (alpha[0], alpha[1]);
                let ss = st.sum_sq - 2.0 * mu * st.sum + n * mu * mu;
                -n * (sigma.ln() + 0.5 * LN_2PI) - 0.5 * ss / (sigma * sigma)
            }
            Family::Poisson => {
                let lambda = alpha[0];
                -n * lambda + st.sum * lambda.ln()
            }
            Family::Bernoulli => {
                let theta = alpha[0];
                st.sum * theta.ln() + (n - st.sum) * (1.0 - theta).ln()
            }
            Family::Binomial { trials } => {
                let theta = alpha[0];
                let m = *trials as f64;
                st.sum * theta.ln() + (n * m - st.sum) * (1.0 - theta).ln()
            }
            Family::Exponential => {
                let lambda = alpha[0];
                n * lambda.ln() - lambda * st.sum
            }
            Family::Custom(_) => {
                return Err(Error::Unsupported(format!(
                    "family `{}` has no sufficient-statistic likelihood; supply a raw sample",
                    self.name()
                )))
            }
        };
        if !value.is_finite() {
            return Err(Error::NonFinite {
                context: format!("log likelihood of `{}`", self.name()),
            });
        }
        Ok(value)
    }

    pub fn log_likelihood_data(&self, data: &SampleData, alpha: &[f64]) -> Result<f64> {
        match data {
            SampleData::Raw(s) => self.log_likelihood(s, alpha),
            SampleData::Stats(st) => self.log_likelihood_stats(st, alpha),
        }
    }

    /// The sufficient summary of a sample (after validating it).
    pub fn sufficient_summary(&self, s: &Sample) -> Result<SuffStats> {
        self.check_sample(s)?;
        Ok(s.suff_stats())
    }

    /// Analytic per-observation Fisher information, where known.
    pub fn analytic_fisher(&self, alpha: &[f64]) -> Option<InfoMatrix> {
        match self {
            Family::NormalKnownSigma { sigma } => Some(InfoMatrix::scalar(1.0 / (sigma * sigma))),
            Family::Normal => {
                let s2 = alpha[1] * alpha[1];
                Some(InfoMatrix::new(2, vec![1.0 / s2, 0.0, 0.0, 2.0 / s2]))
            }
            Family::Poisson => Some(InfoMatrix::scalar(1.0 / alpha[0])),
            Family::Bernoulli => {
                let t = alpha[0];
                Some(InfoMatrix::scalar(1.0 / (t * (1.0 - t))))
            }
            Family::Binomial { trials } => {
                let t = alpha[0];
                Some(InfoMatrix::scalar(*trials as f64 / (t * (1.0 - t))))
            }
            Family::Exponential => Some(InfoMatrix::scalar(1.0 / (alpha[0] * alpha[0]))),
            Family::Custom(c) => c.analytic_fisher.as_ref().map(|f| f(alpha)),
        }
    }

    /// For continuous families: a window `(lo, hi)` holding all but `eps` of
    /// the density mass at `alpha`. Errors for count families.
    pub fn data_window(&self, alpha: &[f64], eps: f64) -> Result<(f64, f64)> {
        match self {
            Family::NormalKnownSigma { sigma } => {
                let z = (-2.0 * eps.ln()).sqrt() + 1.0;
                Ok((alpha[0] - z * sigma, alpha[0] + z * sigma))
            }
            Family::Normal => {
                let z = (-2.0 * eps.ln()).sqrt() + 1.0;
                Ok((alpha[0] - z * alpha[1], alpha[0] + z * alpha[1]))
            }
            Family::Exponential => Ok((0.0, -eps.ln() / alpha[0])),
            Family::Custom(c) => match &c.data_window {
                Some(w) => Ok(w(alpha, eps)),
                None => Err(Error::Unsupported(format!(
                    "family `{}` has no data window for numerical expectations",
                    self.name()
                ))),
            },
            _ => Err(Error::Unsupported(format!(
                "family `{}` is a count family; sum over its support instead",
                self.name()
            ))),
        }
    }

    /// For count families: the smallest cutoff K whose analytic tail bound
    /// (geometric for poisson) is below `eps`; sums over `0..=K` then capture
    /// all but `eps` of the mass. Errors for continuous families.
    pub fn count_cutoff(&self, alpha: &[f64], eps: f64) -> Result<u64> {
        match self {
            Family::Poisson => {
                let lambda = alpha[0];
                let mut k = lambda.floor() as u64 + 1;
                let cap = (lambda + 20.0 * lambda.sqrt() + 400.0) as u64;
                loop {
                    // tail above k is bounded by pmf(k+1) / (1 - lambda/(k+2))
                    let kp = (k + 1) as f64;
                    let log_pmf = -lambda + kp * lambda.ln() - ln_gamma(kp + 1.0);
                    let ratio = lambda / (kp + 1.0);
                    if ratio < 1.0 {
                        let bound = log_pmf.exp() / (1.0 - ratio);
                        if bound < eps {
                            return Ok(k);
                        }
                    }
                    k += 1;
                    if k > cap {
                        return Err(Error::NonFinite {
                            context: "poisson tail cutoff search".into(),
                        });
                    }
                }
            }
            Family::Bernoulli => Ok(1),
            Family::Binomial { trials } => Ok(*trials),
            Family::Custom(c) if matches!(c.data_support, DataSupport::Counts { .. }) => {
                if let DataSupport::Counts { max: Some(m) } = c.data_support {
                    return Ok(m);
                }
                // unbounded custom counts: repurpose the data window's upper
                // end as the cutoff
                match &c.data_window {
                    Some(w) => Ok(w(alpha, eps).1.ceil().max(0.0) as u64),
                    None => Err(Error::Unsupported(format!(
                        "family `{}` has unbounded counts and no data window to derive a cutoff",
                        self.name()
                    ))),
                }
            }
            _ => Err(Error::Unsupported(format!(
                "family `{}` is continuous; integrate over a data window instead",
                self.name()
            ))),
        }
    }

    /// A rough maximum-likelihood point derived from the summary, used to
    /// seed mode searches. Clamped to the open parameter space.
    pub fn mle_hint(&self, data: &SampleData) -> Option<Vec<f64>> {
        let st = data.stats();
        let n = st.n as f64;
        let mean = st.mean();
        match self {
            Family::NormalKnownSigma { .. } => Some(vec![mean]),
            Family::Normal => {
                let var = (st.sum_sq / n - mean * mean).max(1e-12);
                Some(vec![mean, var.sqrt()])
            }
            Family::Poisson => Some(vec![mean.max(1e-9)]),
            Family::Bernoulli => Some(vec![mean.clamp(1e-9, 1.0 - 1e-9)]),
            Family::Binomial { trials } => {
                Some(vec![(mean / *trials as f64).clamp(1e-9, 1.0 - 1e-9)])
            }
            Family::Exponential => Some(vec![(1.0 / mean.max(1e-12)).min(1e12)]),
            Family::Custom(_) => None,
        }
    }
}
