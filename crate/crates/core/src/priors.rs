//! Fisher information and objective priors.
//!
//! The centrepiece is the Jeffreys rule: a prior proportional to the square
//! root of the determinant of the per-observation Fisher information,
//! `pi(alpha) ∝ |I(alpha)|^(1/2)`. Its defining virtue is invariance: pushing
//! the prior through a smooth one-to-one reparameterization gives exactly the
//! Jeffreys prior of the new parameterization, so the inference does not
//! depend on which scale the model happens to be written in.
//!
//! Fisher information is taken from the family's analytic form when one is
//! registered, and otherwise computed as the variance of the score, with the
//! score obtained by central differences of the log density and the
//! expectation by quadrature (continuous data) or truncated summation
//! (counts).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::families::{DataSupport, Family, InfoMatrix, Interval};
use crate::quad::{integrate_strict, Tolerance};

type LogPriorFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// An (often unnormalized) prior density on a parameter space, stored on the
/// log scale. Improper priors are first-class citizens here: the density
/// carries no promise of integrability, and posterior construction decides
/// properness downstream.
#[derive(Clone)]
pub struct PriorSpec {
    log_density: Arc<LogPriorFn>,
    support: Vec<Interval>,
    label: String,
}

impl std::fmt::Debug for PriorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PriorSpec")
            .field("label", &self.label)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl PriorSpec {
    pub fn from_log_density<F>(label: impl Into<String>, support: Vec<Interval>, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        PriorSpec {
            log_density: Arc::new(f),
            support,
            label: label.into(),
        }
    }

    /// Unnormalized log density at a parameter point.
    pub fn log_density(&self, alpha: &[f64]) -> f64 {
        (self.log_density)(alpha)
    }

    /// One-dimensional convenience accessor.
    pub fn log_density1(&self, x: f64) -> f64 {
        (self.log_density)(&[x])
    }

    pub fn support(&self) -> &[Interval] {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.support.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// The named reference priors available by label.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedPrior {
    /// Flat on the support. Improper on unbounded supports.
    Uniform,
    /// `pi(alpha) ∝ 1/alpha` on a positive support.
    ScaleInvariant,
    /// Proper Cauchy density with the given centre and scale.
    CauchyProper { location: f64, scale: f64 },
}

/// Build a named prior over a one-dimensional support.
pub fn named_prior(which: NamedPrior, support: Interval) -> Result<PriorSpec> {
    match which {
        NamedPrior::Uniform => Ok(PriorSpec::from_log_density(
            "uniform",
            vec![support],
            |_: &[f64]| 0.0,
        )),
        NamedPrior::ScaleInvariant => {
            if support.lo < 0.0 {
                return Err(Error::InvalidPrior(
                    "the scale-invariant prior 1/alpha needs a non-negative support".into(),
                ));
            }
            Ok(PriorSpec::from_log_density(
                "scale_invariant",
                vec![support],
                |a: &[f64]| -a[0].ln(),
            ))
        }
        NamedPrior::CauchyProper { location, scale } => {
            if !location.is_finite() || !scale.is_finite() || scale <= 0.0 {
                return Err(Error::InvalidPrior(format!(
                    "cauchy_proper needs a finite location and positive scale, got ({location}, {scale})"
                )));
            }
            Ok(PriorSpec::from_log_density(
                "cauchy_proper",
                vec![support],
                move |a: &[f64]| {
                    let z = (a[0] - location) / scale;
                    -(std::f64::consts::PI * scale).ln() - (1.0 + z * z).ln()
                },
            ))
        }
    }
}

/// Per-observation Fisher information at `alpha`: the family's analytic form
/// when registered, otherwise the numerical score-variance route.
pub fn fisher_information(fam: &Family, alpha: &[f64]) -> Result<InfoMatrix> {
    fam.check_param(alpha)?;
    let info = match fam.analytic_fisher(alpha) {
        Some(m) => m,
        None => fisher_information_numeric(fam, alpha)?,
    };
    if info.max_asymmetry() > 1e-8 {
        return Err(Error::Unsupported(format!(
            "fisher information at {alpha:?} is asymmetric beyond tolerance"
        )));
    }
    if !info.is_positive_definite() {
        return Err(Error::Unsupported(format!(
            "fisher information at {alpha:?} is not positive definite"
        )));
    }
    Ok(info)
}

/// Score-variance computation of Fisher information, ignoring any analytic
/// form: `I_ij = E[ s_i(X) s_j(X) ]` with the score by central differences.
/// Exposed so the analytic forms can be cross-checked against it.
pub fn fisher_information_numeric(fam: &Family, alpha: &[f64]) -> Result<InfoMatrix> {
    fam.check_param(alpha)?;
    let d = alpha.len();
    let space = fam.param_space();

    // Step sizes: relative where the parameter is large, clipped well below
    // the distance to the boundary, since the central-difference error grows
    // like the square of step/distance once the log density bends on the
    // boundary scale.
    let mut h = vec![0.0f64; d];
    for i in 0..d {
        let mut step = 1e-5 * alpha[i].abs().max(1.0);
        let iv = space[i];
        if iv.lo.is_finite() {
            step = step.min(0.01 * (alpha[i] - iv.lo));
        }
        if iv.hi.is_finite() {
            step = step.min(0.01 * (iv.hi - alpha[i]));
        }
        if step <= 0.0 || !step.is_finite() {
            return Err(Error::NonFinite {
                context: "fisher information step size".into(),
            });
        }
        h[i] = step;
    }

    let score_component = |x: f64, i: usize| -> f64 {
        let mut up = alpha.to_vec();
        let mut dn = alpha.to_vec();
        up[i] += h[i];
        dn[i] -= h[i];
        (fam.log_density(x, &up) - fam.log_density(x, &dn)) / (2.0 * h[i])
    };

    let mut data = vec![0.0f64; d * d];
    match fam.data_support() {
        DataSupport::Continuous(_) => {
            let (lo, hi) = fam.data_window(alpha, 1e-13)?;
            for i in 0..d {
                for j in i..d {
                    let entry = integrate_strict(
                        |x| {
                            score_component(x, i)
                                * score_component(x, j)
                                * fam.log_density(x, alpha).exp()
                        },
                        lo,
                        hi,
                        Tolerance::new(1e-11, 1e-9),
                        "fisher information expectation",
                    )?
                    .value;
                    data[i * d + j] = entry;
                    data[j * d + i] = entry;
                }
            }
        }
        DataSupport::Counts { .. } => {
            let k = fam.count_cutoff(alpha, 1e-13)?;
            for i in 0..d {
                for j in i..d {
                    let mut entry = 0.0;
                    for x in 0..=k {
                        let x = x as f64;
                        entry += score_component(x, i)
                            * score_component(x, j)
                            * fam.log_density(x, alpha).exp();
                    }
                    data[i * d + j] = entry;
                    data[j * d + i] = entry;
                }
            }
        }
    }
    for v in &data {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                context: format!("fisher information at {alpha:?}"),
            });
        }
    }
    Ok(InfoMatrix::new(d, data))
}

/// The Jeffreys-rule prior of a family: `log pi(alpha) = (1/2) log |I(alpha)|`
/// up to an additive constant.
pub fn jeffreys_prior(fam: &Family) -> Result<PriorSpec> {
    let support = fam.param_space();
    // representative interior point, to surface evaluation problems eagerly
    let rep: Vec<f64> = support
        .iter()
        .map(|iv| match (iv.lo.is_finite(), iv.hi.is_finite()) {
            (true, true) => 0.5 * (iv.lo + iv.hi),
            (true, false) => iv.lo + 1.0,
            (false, true) => iv.hi - 1.0,
            (false, false) => 0.0,
        })
        .collect();

    let captured = fam.clone();
    let prior = PriorSpec::from_log_density("jeffreys", support, move |alpha: &[f64]| {
        match fisher_information(&captured, alpha) {
            Ok(info) => 0.5 * info.det().ln(),
            Err(_) => f64::NAN,
        }
    });
    let probe = prior.log_density(&rep);
    if !probe.is_finite() {
        return Err(Error::InvalidPrior(format!(
            "jeffreys prior for `{}` is not finite at the representative point {rep:?}",
            fam.name()
        )));
    }
    Ok(prior)
}

type MapFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A strictly monotone smooth map `phi -> alpha` from a new parameterization
/// onto an old one, together with its derivative.
#[derive(Clone)]
pub struct MonotoneMap {
    forward: Arc<MapFn>,
    derivative: Arc<MapFn>,
}

impl MonotoneMap {
    pub fn new<F, G>(forward: F, derivative: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        MonotoneMap {
            forward: Arc::new(forward),
            derivative: Arc::new(derivative),
        }
    }

    pub fn identity() -> Self {
        Self::new(|p| p, |_| 1.0)
    }

    /// `phi -> a*phi + b`.
    pub fn affine(a: f64, b: f64) -> Self {
        Self::new(move |p| a * p + b, move |_| a)
    }

    /// `phi -> exp(phi)`, the log-reparameterization of a positive parameter.
    pub fn exp_map() -> Self {
        Self::new(|p| p.exp(), |p| p.exp())
    }

    /// `phi -> 1/(1+exp(-phi))`, the logit reparameterization of a
    /// probability.
    pub fn logistic() -> Self {
        Self::new(
            |p| 1.0 / (1.0 + (-p).exp()),
            |p| {
                let s = 1.0 / (1.0 + (-p).exp());
                s * (1.0 - s)
            },
        )
    }

    /// `phi -> phi/(1+phi)`, mapping odds to a probability.
    pub fn odds_to_prob() -> Self {
        Self::new(
            |p| p / (1.0 + p),
            |p| 1.0 / ((1.0 + p) * (1.0 + p)),
        )
    }

    pub fn forward(&self, phi: f64) -> f64 {
        (self.forward)(phi)
    }

    pub fn derivative(&self, phi: f64) -> f64 {
        (self.derivative)(phi)
    }
}

// Probe points for the monotonicity check. Unbounded directions stop near
// magnitude 18 so that images of the usual smooth reparameterizations (exp,
// logit and friends) stay strictly inside open supports in double precision;
// beyond that, exp overflows and the logistic rounds to exactly 1.
fn monotonicity_probes(iv: Interval) -> Vec<f64> {
    let mut pts = Vec::new();
    match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => {
            let w = iv.hi - iv.lo;
            for k in 1..40 {
                pts.push(iv.lo + w * k as f64 / 40.0);
            }
        }
        (true, false) => {
            for k in -24..=5 {
                pts.push(iv.lo + 10f64.powf(k as f64 / 4.0));
            }
        }
        (false, true) => {
            for k in -24..=5 {
                pts.push(iv.hi - 10f64.powf(k as f64 / 4.0));
            }
        }
        (false, false) => {
            pts.push(0.0);
            for k in -24..=5 {
                let m = 10f64.powf(k as f64 / 4.0);
                pts.push(m);
                pts.push(-m);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts
}

/// Push a one-dimensional prior through a reparameterization: the density of
/// `phi` when `alpha = map(phi)` has prior `prior`, i.e.
/// `log pi_new(phi) = log pi(map(phi)) + log |map'(phi)|`.
///
/// The map is checked for strict monotonicity (derivative finite, nonzero and
/// of constant sign) on a probe grid over `new_support`, and each probe image
/// must land inside the prior's support.
pub fn prior_pushforward(
    prior: &PriorSpec,
    map: &MonotoneMap,
    new_support: Interval,
) -> Result<PriorSpec> {
    if prior.dim() != 1 {
        return Err(Error::Unsupported(
            "pushforward is defined for one-dimensional priors".into(),
        ));
    }
    let old_support = prior.support()[0];
    let mut sign = 0.0f64;
    for phi in monotonicity_probes(new_support) {
        let d = map.derivative(phi);
        if !d.is_finite() || d == 0.0 {
            return Err(Error::NonMonotoneTransform);
        }
        if sign == 0.0 {
            sign = d.signum();
        } else if d.signum() != sign {
            return Err(Error::NonMonotoneTransform);
        }
        let image = map.forward(phi);
        if !old_support.contains_interior(image) {
            return Err(Error::InvalidPrior(format!(
                "map image {image} at phi = {phi} leaves the prior support ({}, {})",
                old_support.lo, old_support.hi
            )));
        }
    }

    let parent = prior.clone();
    let map = map.clone();
    Ok(PriorSpec::from_log_density(
        format!("{}_pushforward", prior.label()),
        vec![new_support],
        move |phi: &[f64]| {
            parent.log_density(&[map.forward(phi[0])]) + map.derivative(phi[0]).abs().ln()
        },
    ))
}
