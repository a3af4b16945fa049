//! The acceptance gate. One test per criterion; each prints a single
//! `ACCEPTANCE n: PASS` line on success (visible with
//! `cargo test --test acceptance -- --nocapture`); a failed assertion is the
//! corresponding FAIL.

use obayes::intrinsic::{IntrinsicOptions, Method};
use obayes::{
    build_posterior, default_spread, discrepancy_at, intrinsic_discrepancy, intrinsic_statistic_with,
    jeffreys_prior, kl, kl_numeric, lindley_sweep, named_prior, prior_pushforward, CustomFamily,
    DistRef, Family, Interval, MonotoneMap, NamedPrior, Properness, Sample, SuffStats,
    DEFAULT_THRESHOLD,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| a + (b - a) * i as f64 / (k - 1) as f64)
        .collect()
}

// criterion 1: for random normal configurations the quadrature route
// reproduces d = (1 + z^2) / 2 within 1e-6, in under 5 s
#[test]
fn criterion_1_normal_quadrature_matches_closed_form() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let opts = IntrinsicOptions {
        threshold: DEFAULT_THRESHOLD,
        force_quadrature: true,
    };
    for trial in 0..25 {
        let sigma = rng.random_range(0.4..3.0);
        let n = rng.random_range(1..=50u64);
        let null = rng.random_range(-2.0..2.0);
        let z: f64 = rng.random_range(-4.0..4.0);
        let mean = null + z * sigma / (n as f64).sqrt();
        let fam = Family::normal_known_sigma(sigma).unwrap();
        let stats = SuffStats::from_mean(n, mean).unwrap();
        let r = intrinsic_statistic_with(&fam, stats, null, None, &opts).unwrap();
        assert!(matches!(r.method, Method::Quadrature));
        let expect = 0.5 * (1.0 + z * z);
        assert!(
            (r.d - expect).abs() < 1e-6,
            "trial {trial} (sigma {sigma}, n {n}, z {z}): d = {} vs {expect}",
            r.d
        );
    }
    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 5.0, "took {dt:.2} s");
    println!("ACCEPTANCE 1: PASS");
}

// criterion 2: the normal intrinsic discrepancy is exactly the half squared
// standardized distance, to 1e-10 on a 10x10 grid of (mu - mu0, n)
#[test]
fn criterion_2_normal_discrepancy_closed_form_on_grid() {
    let sigma = 1.7;
    let fam = Family::normal_known_sigma(sigma).unwrap();
    let null = 0.4;
    for delta in linspace(-3.0, 3.3, 10) {
        for n in 1..=10u64 {
            let d = discrepancy_at(&fam, null, null + delta, n).unwrap();
            let expect = 0.5 * (delta / (sigma / (n as f64).sqrt())).powi(2);
            assert!(
                (d - expect).abs() < 1e-10,
                "delta {delta}, n {n}: {d} vs {expect}"
            );
        }
    }
    println!("ACCEPTANCE 2: PASS");
}

// criterion 3: Jeffreys-rule reproduction, as log-density differences from
// the analytic forms staying constant within 1e-5 over 10-point grids
#[test]
fn criterion_3_jeffreys_reproduction() {
    let check_constant = |diffs: &[f64], what: &str| {
        let anchor = diffs[0];
        for (i, d) in diffs.iter().enumerate() {
            assert!(
                (d - anchor).abs() < 1e-5,
                "{what}: difference drifts at point {i}: {d} vs {anchor}"
            );
        }
    };

    // poisson: pi(lambda) proportional to 1 / sqrt(lambda)
    let jp = jeffreys_prior(&Family::Poisson).unwrap();
    let diffs: Vec<f64> = linspace(0.3, 9.0, 10)
        .iter()
        .map(|&l| jp.log_density1(l) - (-0.5 * l.ln()))
        .collect();
    check_constant(&diffs, "poisson");

    // bernoulli: Beta(1/2, 1/2) shape
    let jb = jeffreys_prior(&Family::Bernoulli).unwrap();
    let diffs: Vec<f64> = linspace(0.05, 0.95, 10)
        .iter()
        .map(|&t| jb.log_density1(t) - (-0.5 * t.ln() - 0.5 * (1.0 - t).ln()))
        .collect();
    check_constant(&diffs, "bernoulli");

    // normal location-scale, multiparameter rule: pi(mu, sigma)
    // proportional to 1 / sigma^2, with no mu dependence
    let jn = jeffreys_prior(&Family::Normal).unwrap();
    let mus = linspace(-4.0, 4.0, 10);
    let sigmas = linspace(0.3, 5.0, 10);
    let diffs: Vec<f64> = mus
        .iter()
        .zip(&sigmas)
        .map(|(&m, &s)| jn.log_density(&[m, s]) - (-2.0 * s.ln()))
        .collect();
    check_constant(&diffs, "normal location-scale");

    println!("ACCEPTANCE 3: PASS");
}

// criterion 4: Poisson with a zero count sum is improper under 1/lambda and
// proper under 1/sqrt(lambda), in under a second
#[test]
fn criterion_4_properness_contrast() {
    let start = Instant::now();
    let fam = Family::Poisson;
    let s = Sample::new(vec![0.0, 0.0, 0.0]).unwrap();

    let scale_inv = named_prior(NamedPrior::ScaleInvariant, fam.param_space()[0]).unwrap();
    let post = build_posterior(&fam, s.clone(), &scale_inv).unwrap();
    assert_eq!(post.properness(), Properness::Improper);

    let jeffreys = jeffreys_prior(&fam).unwrap();
    let post = build_posterior(&fam, s, &jeffreys).unwrap();
    assert_eq!(post.properness(), Properness::Proper);

    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 1.0, "took {dt:.2} s");
    println!("ACCEPTANCE 4: PASS");
}

// criterion 5: the Lindley sweep at z = 2 with the Cauchy spread and p = 1/2;
// the posterior null probability climbs past 0.9 while the intrinsic
// statistic stays at 2.5, in under 10 s
#[test]
fn criterion_5_lindley_sweep() {
    let start = Instant::now();
    let fam = Family::normal_known_sigma(1.0).unwrap();
    let spread = default_spread(&fam, 0.0).unwrap();
    let ns = [10, 100, 1_000, 10_000, 100_000, 1_000_000];
    let rows = lindley_sweep(&fam, 0.0, 2.0, &ns, &spread, 0.5).unwrap();
    assert_eq!(rows.len(), ns.len());
    for pair in rows.windows(2) {
        assert!(
            pair[0].posterior_null_prob < pair[1].posterior_null_prob,
            "posterior null probability not strictly increasing: {} then {}",
            pair[0].posterior_null_prob,
            pair[1].posterior_null_prob
        );
    }
    let last = rows.last().unwrap();
    assert!(
        last.posterior_null_prob > 0.9,
        "null probability at n = 10^6 is {}",
        last.posterior_null_prob
    );
    for r in &rows {
        assert!(
            (r.intrinsic_d - 2.5).abs() < 1e-12,
            "intrinsic d moved to {} at n = {}",
            r.intrinsic_d,
            r.n
        );
    }
    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 10.0, "took {dt:.2} s");
    println!("ACCEPTANCE 5: PASS");
}

// criterion 6: divergence properties over 20 random pairs per family, in
// under 30 s: non-negativity, symmetry of the intrinsic discrepancy,
// additivity in n, closed form vs numerical agreement
#[test]
fn criterion_6_divergence_properties() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let cases: Vec<(Family, f64, f64)> = vec![
        (Family::normal_known_sigma(1.3).unwrap(), -5.0, 5.0),
        (Family::Poisson, 0.2, 12.0),
        (Family::Bernoulli, 0.05, 0.95),
        (Family::binomial(7).unwrap(), 0.05, 0.95),
        (Family::Exponential, 0.2, 8.0),
    ];
    for (fam, lo, hi) in cases {
        for _ in 0..20 {
            let a = rng.random_range(lo..hi);
            let b = rng.random_range(lo..hi);
            let pa = DistRef::single(fam.clone(), vec![a]).unwrap();
            let pb = DistRef::single(fam.clone(), vec![b]).unwrap();

            let k = kl(&pa, &pb).unwrap();
            assert!(k >= 0.0, "{}: kl({a}, {b}) = {k}", fam.name());

            let d_ab = intrinsic_discrepancy(&pa, &pb).unwrap();
            let d_ba = intrinsic_discrepancy(&pb, &pa).unwrap();
            assert_eq!(d_ab, d_ba, "{}: symmetry broke at ({a}, {b})", fam.name());

            let n = rng.random_range(2..=40u64);
            let k_n = kl(
                &DistRef::new(fam.clone(), vec![a], n).unwrap(),
                &DistRef::new(fam.clone(), vec![b], n).unwrap(),
            )
            .unwrap();
            assert!(
                (k_n - n as f64 * k).abs() <= 1e-10 * k_n.max(1e-300),
                "{}: additivity broke at ({a}, {b}), n {n}",
                fam.name()
            );

            let k_num = kl_numeric(&pa, &pb).unwrap();
            assert!(
                (k - k_num).abs() < 1e-6,
                "{}: closed {k} vs numeric {k_num} at ({a}, {b})",
                fam.name()
            );
        }
    }
    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 30.0, "took {dt:.2} s");
    println!("ACCEPTANCE 6: PASS");
}

// criterion 7: reparameterization invariance of the Jeffreys rule. For every
// one-parameter builtin and each applicable transform among log, logit and
// affine, the Jeffreys prior computed in the new parameterization (numerical
// Fisher route) matches the pushforward of the original one up to a single
// additive log constant, within 1e-5 on a 10-point grid.
struct InvarianceCase {
    tag: &'static str,
    base: Family,
    map: MonotoneMap,
    new_support: Interval,
    grid: Vec<f64>,
}

fn reparameterized(case: &InvarianceCase) -> Family {
    let base = case.base.clone();
    let map = case.map.clone();
    let window: Option<Arc<dyn Fn(&[f64], f64) -> (f64, f64) + Send + Sync>> = match &case.base {
        Family::NormalKnownSigma { sigma } => {
            let s = *sigma;
            let m = case.map.clone();
            Some(Arc::new(move |a: &[f64], _eps: f64| {
                let mu = m.forward(a[0]);
                (mu - 12.0 * s, mu + 12.0 * s)
            }))
        }
        Family::Poisson => {
            let m = case.map.clone();
            Some(Arc::new(move |a: &[f64], _eps: f64| {
                let lam = m.forward(a[0]);
                (0.0, lam + 20.0 * lam.sqrt() + 60.0)
            }))
        }
        Family::Exponential => {
            let m = case.map.clone();
            Some(Arc::new(move |a: &[f64], _eps: f64| {
                (0.0, 42.0 / m.forward(a[0]))
            }))
        }
        _ => None,
    };
    Family::Custom(Arc::new(CustomFamily {
        name: format!("{}_{}", case.base.name(), case.tag),
        param_space: vec![case.new_support],
        data_support: case.base.data_support(),
        log_density: Arc::new(move |x: f64, a: &[f64]| base.log_density(x, &[map.forward(a[0])])),
        analytic_fisher: None,
        data_window: window,
    }))
}

#[test]
fn criterion_7_jeffreys_reparameterization_invariance() {
    let whole = Interval::whole_line();
    let positive = Interval::positive();
    let cases = vec![
        InvarianceCase {
            tag: "affine",
            base: Family::normal_known_sigma(1.3).unwrap(),
            map: MonotoneMap::affine(0.75, -2.0),
            new_support: whole,
            grid: linspace(-3.0, 3.0, 10),
        },
        InvarianceCase {
            tag: "log",
            base: Family::Poisson,
            map: MonotoneMap::exp_map(),
            new_support: whole,
            grid: linspace(-1.5, 2.2, 10),
        },
        InvarianceCase {
            tag: "affine",
            base: Family::Poisson,
            map: MonotoneMap::affine(2.5, 0.0),
            new_support: positive,
            grid: linspace(0.2, 4.0, 10),
        },
        InvarianceCase {
            tag: "logit",
            base: Family::Bernoulli,
            map: MonotoneMap::logistic(),
            new_support: whole,
            grid: linspace(-2.5, 2.5, 10),
        },
        InvarianceCase {
            tag: "affine",
            base: Family::Bernoulli,
            map: MonotoneMap::affine(0.5, 0.0),
            new_support: Interval::new(0.0, 2.0).unwrap(),
            grid: linspace(0.15, 1.85, 10),
        },
        InvarianceCase {
            tag: "logit",
            base: Family::binomial(6).unwrap(),
            map: MonotoneMap::logistic(),
            new_support: whole,
            grid: linspace(-2.5, 2.5, 10),
        },
        InvarianceCase {
            tag: "affine",
            base: Family::binomial(6).unwrap(),
            map: MonotoneMap::affine(0.5, 0.0),
            new_support: Interval::new(0.0, 2.0).unwrap(),
            grid: linspace(0.15, 1.85, 10),
        },
        InvarianceCase {
            tag: "log",
            base: Family::Exponential,
            map: MonotoneMap::exp_map(),
            new_support: whole,
            grid: linspace(-1.5, 1.8, 10),
        },
        InvarianceCase {
            tag: "affine",
            base: Family::Exponential,
            map: MonotoneMap::affine(1.6, 0.0),
            new_support: positive,
            grid: linspace(0.2, 3.5, 10),
        },
    ];
    for case in &cases {
        let fam = reparameterized(case);
        let direct = jeffreys_prior(&fam).unwrap();
        let pushed = prior_pushforward(
            &jeffreys_prior(&case.base).unwrap(),
            &case.map,
            case.new_support,
        )
        .unwrap();
        let anchor = direct.log_density1(case.grid[0]) - pushed.log_density1(case.grid[0]);
        for &phi in &case.grid {
            let diff = direct.log_density1(phi) - pushed.log_density1(phi);
            assert!(
                (diff - anchor).abs() < 1e-5,
                "{} {}: invariance broke at {phi}: {diff} vs {anchor}",
                case.base.name(),
                case.tag
            );
        }
    }
    println!("ACCEPTANCE 7: PASS");
}

// criterion 8: empirical coverage of the 95% equal-tail interval for the
// normal known-sigma family, R = 2000 replicates, within three Monte Carlo
// standard errors of nominal, through the binary, in under 60 s
#[test]
fn criterion_8_coverage_study() {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_obayes"))
        .args([
            "coverage",
            "--family",
            "normal_known_sigma",
            "--sigma",
            "1",
            "--true-param",
            "0.3",
            "--n",
            "25",
            "--reps",
            "2000",
            "--mass",
            "0.95",
            "--seed",
            "42",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let coverage = v["coverage"].as_f64().unwrap();
    let three_se = 3.0 * (0.95f64 * 0.05 / 2000.0).sqrt();
    assert!(
        (coverage - 0.95).abs() <= three_se,
        "coverage {coverage} outside 0.95 +- {three_se:.4}"
    );
    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 60.0, "took {dt:.2} s");
    println!("ACCEPTANCE 8: PASS");
}

// criterion 9: every subcommand is byte-deterministic under a fixed seed
#[test]
fn criterion_9_cli_determinism() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["prior", "--family", "exponential", "--grid", "0.5,1,2,4"],
        vec![
            "test-intrinsic",
            "--family",
            "normal_known_sigma",
            "--sigma",
            "2",
            "--n",
            "16",
            "--mean",
            "0.9",
            "--null",
            "0",
        ],
        vec![
            "test-mixed",
            "--family",
            "normal_known_sigma",
            "--sigma",
            "1",
            "--n",
            "10",
            "--mean",
            "0.6",
            "--null",
            "0",
        ],
        vec![
            "lindley",
            "--family",
            "normal_known_sigma",
            "--sigma",
            "1",
            "--z",
            "2",
            "--n-list",
            "10,100,1000",
        ],
        vec![
            "coverage",
            "--family",
            "poisson",
            "--true-param",
            "3",
            "--n",
            "12",
            "--reps",
            "50",
            "--seed",
            "2718",
        ],
    ];
    for args in &runs {
        let once = Command::new(env!("CARGO_BIN_EXE_obayes"))
            .args(args)
            .output()
            .unwrap();
        let again = Command::new(env!("CARGO_BIN_EXE_obayes"))
            .args(args)
            .output()
            .unwrap();
        assert!(
            once.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&once.stderr)
        );
        assert_eq!(
            once.stdout, again.stdout,
            "output of {args:?} is not deterministic"
        );
    }
    println!("ACCEPTANCE 9: PASS");
}
