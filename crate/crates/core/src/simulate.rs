//! Sampling from the built-in families, for coverage simulations.

use crate::error::{Error, Result};
use crate::families::Family;
use rand::Rng;
use rand_distr::Distribution;

/// Draws `n` observations from the family at the given parameter point.
///
/// The stream of values is determined entirely by the generator state, so a
/// seeded generator makes replicates reproducible.
pub fn draw_sample<R: Rng + ?Sized>(
    fam: &Family,
    param: &[f64],
    n: u64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    fam.check_param(param)?;
    if n == 0 {
        return Err(Error::InvalidSample("cannot draw an empty sample".into()));
    }
    let n = n as usize;
    let mut out = Vec::with_capacity(n);
    match fam {
        Family::NormalKnownSigma { sigma } => {
            let d = rand_distr::Normal::new(param[0], *sigma).expect("validated");
            out.extend(d.sample_iter(rng).take(n));
        }
        Family::Normal => {
            let d = rand_distr::Normal::new(param[0], param[1]).expect("validated");
            out.extend(d.sample_iter(rng).take(n));
        }
        Family::Poisson => {
            let d = rand_distr::Poisson::new(param[0]).expect("validated");
            for _ in 0..n {
                let x: f64 = d.sample(rng);
                out.push(x);
            }
        }
        Family::Bernoulli => {
            for _ in 0..n {
                out.push(if rng.random::<f64>() < param[0] { 1.0 } else { 0.0 });
            }
        }
        Family::Binomial { trials } => {
            let d = rand_distr::Binomial::new(*trials, param[0]).expect("validated");
            for _ in 0..n {
                out.push(d.sample(rng) as f64);
            }
        }
        Family::Exponential => {
            let d = rand_distr::Exp::new(param[0]).expect("validated");
            out.extend(d.sample_iter(rng).take(n));
        }
        Family::Custom(c) => {
            return Err(Error::Unsupported(format!(
                "sampling is not defined for the custom family {}",
                c.name
            )))
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn same_seed_same_sample() {
        let fam = Family::normal_known_sigma(1.0).unwrap();
        let a = draw_sample(&fam, &[0.3], 50, &mut rng(7)).unwrap();
        let b = draw_sample(&fam, &[0.3], 50, &mut rng(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normal_sample_mean_is_near_the_parameter() {
        let fam = Family::normal_known_sigma(2.0).unwrap();
        let xs = draw_sample(&fam, &[5.0], 4000, &mut rng(11)).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 5.0).abs() < 4.0 * 2.0 / (4000f64).sqrt());
    }

    #[test]
    fn count_families_emit_integers_in_range() {
        let pois = Family::make_builtin("poisson", &Default::default()).unwrap();
        for x in draw_sample(&pois, &[3.0], 500, &mut rng(2)).unwrap() {
            assert!(x >= 0.0 && x.fract() == 0.0);
        }
        let bern = Family::make_builtin("bernoulli", &Default::default()).unwrap();
        for x in draw_sample(&bern, &[0.3], 500, &mut rng(3)).unwrap() {
            assert!(x == 0.0 || x == 1.0);
        }
        let bin = Family::binomial(6).unwrap();
        for x in draw_sample(&bin, &[0.7], 500, &mut rng(4)).unwrap() {
            assert!(x >= 0.0 && x <= 6.0 && x.fract() == 0.0);
        }
    }

    #[test]
    fn exponential_sample_is_positive_with_right_scale() {
        let fam = Family::make_builtin("exponential", &Default::default()).unwrap();
        let xs = draw_sample(&fam, &[4.0], 4000, &mut rng(5)).unwrap();
        assert!(xs.iter().all(|&x| x > 0.0));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.25).abs() < 0.02);
    }

    #[test]
    fn drawn_samples_pass_family_validation() {
        for (fam, theta) in [
            (Family::normal_known_sigma(1.0).unwrap(), 0.0),
            (Family::make_builtin("poisson", &Default::default()).unwrap(), 2.5),
            (Family::make_builtin("bernoulli", &Default::default()).unwrap(), 0.5),
            (Family::binomial(4).unwrap(), 0.25),
            (Family::make_builtin("exponential", &Default::default()).unwrap(), 1.5),
        ] {
            let xs = draw_sample(&fam, &[theta], 40, &mut rng(9)).unwrap();
            let s = crate::families::Sample::new(xs).unwrap();
            fam.check_sample(&s).unwrap();
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let fam = Family::normal_known_sigma(1.0).unwrap();
        assert!(draw_sample(&fam, &[f64::NAN], 5, &mut rng(0)).is_err());
        assert!(draw_sample(&fam, &[0.0], 0, &mut rng(0)).is_err());
        let pois = Family::make_builtin("poisson", &Default::default()).unwrap();
        assert!(draw_sample(&pois, &[-1.0], 5, &mut rng(0)).is_err());
    }
}
