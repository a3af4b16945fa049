//! Kullback-Leibler divergence and the intrinsic discrepancy.
//!
//! The directed divergence `kl(p_i, p_j) = ∫ p_i log(p_i / p_j)` is computed
//! in closed form for matching builtin pairs and by quadrature or summation
//! otherwise. A direction is `+inf` whenever the support of `p_i` is not
//! contained in the support of `p_j`.
//!
//! The intrinsic discrepancy between two distributions is the smaller of the
//! two directed divergences,
//! `delta{p1, p2} = min( kl(p1, p2), kl(p2, p1) )`.
//! Taking the minimum keeps the measure finite under strictly nested
//! supports, where exactly one direction diverges, and makes it symmetric by
//! construction. It is only undefined when both directions are infinite
//! (essentially disjoint supports), which is reported as an error.
//!
//! Divergences here are between the n-fold product distributions of a
//! [`DistRef`]; for i.i.d. replication the product-measure divergence
//! factorizes exactly into `n` times the single-observation one, which is how
//! it is computed.

use crate::error::{Error, Result};
use crate::families::{DataSupport, Family};
use crate::quad::{integrate_strict, Tolerance};

/// A concrete distribution: a family, a parameter point inside its space and
/// a replication count `n >= 1` (the distribution of an i.i.d. n-vector).
#[derive(Clone, Debug)]
pub struct DistRef {
    pub family: Family,
    pub param: Vec<f64>,
    pub n: u64,
}

impl DistRef {
    pub fn new(family: Family, param: Vec<f64>, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSample("replication count must be >= 1".into()));
        }
        family.check_param(&param)?;
        Ok(DistRef { family, param, n })
    }

    /// Single observation (`n = 1`).
    pub fn single(family: Family, param: Vec<f64>) -> Result<Self> {
        Self::new(family, param, 1)
    }
}

/// View any of the normal builtins as (mu, sigma).
fn as_normal(fam: &Family, a: &[f64]) -> Option<(f64, f64)> {
    match fam {
        Family::NormalKnownSigma { sigma } => Some((a[0], *sigma)),
        Family::Normal => Some((a[0], a[1])),
        _ => None,
    }
}

fn kl_bernoulli(t1: f64, t2: f64) -> f64 {
    let mut v = 0.0;
    if t1 > 0.0 {
        v += t1 * (t1 / t2).ln();
    }
    if t1 < 1.0 {
        v += (1.0 - t1) * ((1.0 - t1) / (1.0 - t2)).ln();
    }
    v
}

/// Closed-form single-observation divergence for matching builtin pairs.
fn closed_form(pi: &DistRef, pj: &DistRef) -> Option<f64> {
    if let (Some((m1, s1)), Some((m2, s2))) = (
        as_normal(&pi.family, &pi.param),
        as_normal(&pj.family, &pj.param),
    ) {
        let r = s1 / s2;
        let dm = (m1 - m2) / s2;
        return Some((s2 / s1).ln() + 0.5 * (r * r - 1.0) + 0.5 * dm * dm);
    }
    match (&pi.family, &pj.family) {
        (Family::Poisson, Family::Poisson) => {
            let (l1, l2) = (pi.param[0], pj.param[0]);
            Some(l1 * (l1 / l2).ln() + l2 - l1)
        }
        (Family::Bernoulli, Family::Bernoulli) => {
            Some(kl_bernoulli(pi.param[0], pj.param[0]))
        }
        (Family::Binomial { trials: m1 }, Family::Binomial { trials: m2 }) if m1 == m2 => {
            Some(*m1 as f64 * kl_bernoulli(pi.param[0], pj.param[0]))
        }
        (Family::Exponential, Family::Exponential) => {
            let (l1, l2) = (pi.param[0], pj.param[0]);
            Some((l1 / l2).ln() + l2 / l1 - 1.0)
        }
        _ => None,
    }
}

/// Single-observation divergence by quadrature (continuous) or truncated
/// summation (counts). Callers have already established support nesting.
fn numeric_single(pi: &DistRef, pj: &DistRef) -> Result<f64> {
    let fi = &pi.family;
    let fj = &pj.family;
    match fi.data_support() {
        DataSupport::Continuous(supp_i) => {
            let (wlo, whi) = fi.data_window(&pi.param, 1e-13)?;
            let lo = wlo.max(supp_i.lo);
            let hi = whi.min(supp_i.hi);
            let r = integrate_strict(
                |x| {
                    let li = fi.log_density(x, &pi.param);
                    if li == f64::NEG_INFINITY {
                        return 0.0;
                    }
                    let lj = fj.log_density(x, &pj.param);
                    li.exp() * (li - lj)
                },
                lo,
                hi,
                Tolerance::default(),
                "kl divergence",
            )?;
            Ok(r.value)
        }
        DataSupport::Counts { max } => {
            let mut k = fi.count_cutoff(&pi.param, 1e-14)?;
            if let Some(m) = max {
                k = k.min(m);
            }
            let mut total = 0.0;
            for x in 0..=k {
                let x = x as f64;
                let li = fi.log_density(x, &pi.param);
                let pmf = li.exp();
                if pmf == 0.0 {
                    continue;
                }
                let lj = fj.log_density(x, &pj.param);
                let term = pmf * (li - lj);
                if !term.is_finite() {
                    return Err(Error::NonFinite {
                        context: format!("kl summand at x = {x}"),
                    });
                }
                total += term;
            }
            Ok(total)
        }
    }
}

fn precheck(pi: &DistRef, pj: &DistRef) -> Result<()> {
    pi.family.check_param(&pi.param)?;
    pj.family.check_param(&pj.param)?;
    if !pi.family.data_support().same_kind(&pj.family.data_support()) {
        return Err(Error::Unsupported(
            "kl needs both distributions on the same kind of data support (continuous vs counts)"
                .into(),
        ));
    }
    if pi.n != pj.n {
        return Err(Error::Unsupported(format!(
            "kl compares equal replication counts, got n = {} and n = {}",
            pi.n, pj.n
        )));
    }
    Ok(())
}

fn kl_impl(pi: &DistRef, pj: &DistRef, allow_closed: bool) -> Result<f64> {
    precheck(pi, pj)?;
    if !pi
        .family
        .data_support()
        .is_subset_of(&pj.family.data_support())
    {
        return Ok(f64::INFINITY);
    }
    let single = if allow_closed {
        match closed_form(pi, pj) {
            Some(v) => v,
            None => numeric_single(pi, pj)?,
        }
    } else {
        numeric_single(pi, pj)?
    };
    if single < 0.0 && single > -1e-9 {
        // quadrature noise around an exact zero
        return Ok(0.0);
    }
    if !(single >= 0.0) {
        return Err(Error::NonFinite {
            context: format!("kl divergence came out negative ({single})"),
        });
    }
    Ok(pi.n as f64 * single)
}

/// Directed divergence `∫ p_i log(p_i / p_j)` between the n-fold products;
/// `+inf` when the support of `p_i` is not contained in that of `p_j`.
pub fn kl(pi: &DistRef, pj: &DistRef) -> Result<f64> {
    kl_impl(pi, pj, true)
}

/// As [`kl`] but forcing the quadrature/summation route even where a closed
/// form exists; the dual-route agreement check in the test suites runs
/// through this.
pub fn kl_numeric(pi: &DistRef, pj: &DistRef) -> Result<f64> {
    kl_impl(pi, pj, false)
}

/// Intrinsic discrepancy `min(kl(p1, p2), kl(p2, p1))`. An error when both
/// directions are infinite.
pub fn intrinsic_discrepancy(p1: &DistRef, p2: &DistRef) -> Result<f64> {
    let a = kl(p1, p2)?;
    let b = kl(p2, p1)?;
    if a.is_infinite() && b.is_infinite() {
        return Err(Error::IncompatibleSupports);
    }
    Ok(a.min(b))
}

/// Dual-route variant of [`intrinsic_discrepancy`].
pub fn intrinsic_discrepancy_numeric(p1: &DistRef, p2: &DistRef) -> Result<f64> {
    let a = kl_numeric(p1, p2)?;
    let b = kl_numeric(p2, p1)?;
    if a.is_infinite() && b.is_infinite() {
        return Err(Error::IncompatibleSupports);
    }
    Ok(a.min(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{CustomFamily, DataSupport, Interval};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn nks(sigma: f64, mu: f64) -> DistRef {
        DistRef::single(Family::normal_known_sigma(sigma).unwrap(), vec![mu]).unwrap()
    }

    #[test]
    fn normal_closed_form() {
        // unit-variance normals a distance 1 apart: KL = 1/2
        assert_abs_diff_eq!(kl(&nks(1.0, 1.0), &nks(1.0, 0.0)).unwrap(), 0.5, epsilon = 1e-15);
        // general case against the formula
        let p = DistRef::single(Family::Normal, vec![1.0, 2.0]).unwrap();
        let q = DistRef::single(Family::Normal, vec![-1.0, 0.5]).unwrap();
        let expect = (0.5f64 / 2.0).ln() + 0.5 * (16.0 - 1.0) + 0.5 * (2.0f64 / 0.5).powi(2);
        assert_abs_diff_eq!(kl(&p, &q).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn poisson_closed_form() {
        let p2 = DistRef::single(Family::Poisson, vec![2.0]).unwrap();
        let p1 = DistRef::single(Family::Poisson, vec![1.0]).unwrap();
        assert_abs_diff_eq!(
            kl(&p2, &p1).unwrap(),
            2.0 * (2.0f64).ln() - 1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn exponential_closed_form() {
        let p = DistRef::single(Family::Exponential, vec![2.0]).unwrap();
        let q = DistRef::single(Family::Exponential, vec![1.0]).unwrap();
        assert_abs_diff_eq!(
            kl(&p, &q).unwrap(),
            (2.0f64).ln() - 0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn numeric_matches_closed() {
        let cases = vec![
            (nks(1.0, 0.7), nks(1.0, 0.0)),
            (nks(2.0, -1.0), nks(0.5, 1.0)),
            (
                DistRef::single(Family::Poisson, vec![3.3]).unwrap(),
                DistRef::single(Family::Poisson, vec![1.1]).unwrap(),
            ),
            (
                DistRef::single(Family::Bernoulli, vec![0.2]).unwrap(),
                DistRef::single(Family::Bernoulli, vec![0.7]).unwrap(),
            ),
            (
                DistRef::single(Family::binomial(8).unwrap(), vec![0.3]).unwrap(),
                DistRef::single(Family::binomial(8).unwrap(), vec![0.55]).unwrap(),
            ),
            (
                DistRef::single(Family::Exponential, vec![0.8]).unwrap(),
                DistRef::single(Family::Exponential, vec![2.4]).unwrap(),
            ),
        ];
        for (p, q) in cases {
            let c = kl(&p, &q).unwrap();
            let n = kl_numeric(&p, &q).unwrap();
            assert!(
                (c - n).abs() < 1e-9 * (1.0 + c.abs()),
                "{}: closed {c} vs numeric {n}",
                p.family.name()
            );
        }
    }

    #[test]
    fn zero_iff_identical() {
        assert_eq!(kl(&nks(1.3, 0.4), &nks(1.3, 0.4)).unwrap(), 0.0);
        let d = intrinsic_discrepancy(
            &DistRef::single(Family::Poisson, vec![2.0]).unwrap(),
            &DistRef::single(Family::Poisson, vec![2.0]).unwrap(),
        )
        .unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn poisson_intrinsic_discrepancy_picks_the_smaller_direction() {
        let p1 = DistRef::single(Family::Poisson, vec![1.0]).unwrap();
        let p2 = DistRef::single(Family::Poisson, vec![2.0]).unwrap();
        // kl(1||2) = ln(1/2) + 1 = 1 - ln 2 ~ 0.3069
        // kl(2||1) = 2 ln 2 - 1 ~ 0.3863, so the minimum is 1 - ln 2
        let d = intrinsic_discrepancy(&p1, &p2).unwrap();
        assert_abs_diff_eq!(d, 1.0 - (2.0f64).ln(), epsilon = 1e-13);
        let d_swapped = intrinsic_discrepancy(&p2, &p1).unwrap();
        assert_eq!(d, d_swapped);
    }

    #[test]
    fn replication_scales_divergence() {
        let p = DistRef::new(Family::Poisson, vec![2.5], 7).unwrap();
        let q = DistRef::new(Family::Poisson, vec![1.5], 7).unwrap();
        let p1 = DistRef::single(Family::Poisson, vec![2.5]).unwrap();
        let q1 = DistRef::single(Family::Poisson, vec![1.5]).unwrap();
        assert_abs_diff_eq!(
            kl(&p, &q).unwrap(),
            7.0 * kl(&p1, &q1).unwrap(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            intrinsic_discrepancy(&p, &q).unwrap(),
            7.0 * intrinsic_discrepancy(&p1, &q1).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn nested_supports_give_one_finite_direction() {
        // exponential support [0, inf) sits inside the normal's real line
        let e = DistRef::single(Family::Exponential, vec![1.0]).unwrap();
        let n = DistRef::single(Family::normal_known_sigma(1.0).unwrap(), vec![0.0]).unwrap();
        let fwd = kl(&e, &n).unwrap();
        let bwd = kl(&n, &e).unwrap();
        assert!(fwd.is_finite() && fwd > 0.0);
        assert!(bwd.is_infinite());
        assert_abs_diff_eq!(intrinsic_discrepancy(&e, &n).unwrap(), fwd, epsilon = 1e-12);
    }

    #[test]
    fn binomial_with_fewer_trials_nests() {
        let small = DistRef::single(Family::binomial(5).unwrap(), vec![0.4]).unwrap();
        let large = DistRef::single(Family::binomial(9).unwrap(), vec![0.35]).unwrap();
        let fwd = kl(&small, &large).unwrap();
        assert!(fwd.is_finite());
        assert!(kl(&large, &small).unwrap().is_infinite());
        assert_abs_diff_eq!(
            intrinsic_discrepancy(&small, &large).unwrap(),
            fwd,
            epsilon = 1e-12
        );
    }

    #[test]
    fn disjoint_supports_are_an_error() {
        let unif = |lo: f64, hi: f64, name: &str| {
            let width = hi - lo;
            DistRef::single(
                Family::Custom(Arc::new(CustomFamily {
                    name: name.into(),
                    param_space: vec![Interval::whole_line()],
                    data_support: DataSupport::Continuous(Interval::new(lo, hi).unwrap()),
                    log_density: Arc::new(move |_x, _a| -(width.ln())),
                    analytic_fisher: None,
                    data_window: Some(Arc::new(move |_a, _eps| (lo, hi))),
                })),
                vec![0.0],
            )
            .unwrap()
        };
        let a = unif(0.0, 1.0, "unif01");
        let b = unif(2.0, 3.0, "unif23");
        assert!(matches!(
            intrinsic_discrepancy(&a, &b),
            Err(Error::IncompatibleSupports)
        ));
    }

    #[test]
    fn mixed_support_kinds_are_an_error() {
        let p = DistRef::single(Family::Poisson, vec![1.0]).unwrap();
        let n = DistRef::single(Family::normal_known_sigma(1.0).unwrap(), vec![0.0]).unwrap();
        assert!(matches!(kl(&p, &n), Err(Error::Unsupported(_))));
    }

    #[test]
    fn unequal_replication_is_an_error() {
        let p = DistRef::new(Family::Poisson, vec![1.0], 2).unwrap();
        let q = DistRef::new(Family::Poisson, vec![1.0], 3).unwrap();
        assert!(matches!(kl(&p, &q), Err(Error::Unsupported(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn kl_nonnegative_and_discrepancy_symmetric(
            mu1 in -5.0f64..5.0, mu2 in -5.0f64..5.0,
            s1 in 0.3f64..3.0, s2 in 0.3f64..3.0,
        ) {
            let p = DistRef::single(Family::Normal, vec![mu1, s1]).unwrap();
            let q = DistRef::single(Family::Normal, vec![mu2, s2]).unwrap();
            let f = kl(&p, &q).unwrap();
            let b = kl(&q, &p).unwrap();
            prop_assert!(f >= 0.0 && b >= 0.0);
            let d12 = intrinsic_discrepancy(&p, &q).unwrap();
            let d21 = intrinsic_discrepancy(&q, &p).unwrap();
            prop_assert_eq!(d12.to_bits(), d21.to_bits());
            prop_assert!(d12 <= f && d12 <= b);
        }

        #[test]
        fn poisson_kl_positive_when_distinct(l1 in 0.2f64..15.0, l2 in 0.2f64..15.0) {
            prop_assume!((l1 - l2).abs() > 1e-6);
            let p = DistRef::single(Family::Poisson, vec![l1]).unwrap();
            let q = DistRef::single(Family::Poisson, vec![l2]).unwrap();
            prop_assert!(kl(&p, &q).unwrap() > 0.0);
            prop_assert!(intrinsic_discrepancy(&p, &q).unwrap() > 0.0);
        }
    }
}
