use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use retrade_core::tails::{
    acf, acf_report, ccdf, fit_powerlaw, fit_powerlaw_at, hill, hill_stability,
    returns_from_prices, TailError,
};

/// Inverse-CDF Pareto draws with `P{X ≥ x} = (x / xmin)^−α`.
fn pareto(alpha: f64, xmin: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| xmin * (1.0 - rng.random::<f64>()).powf(-1.0 / alpha))
        .collect()
}

fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn exponential(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect()
}

/// Least-squares slope of `ln y` on `ln x`.
fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0.ln() - mx) * (p.1.ln() - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0.ln() - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn returns_from_prices_examples() {
    assert_eq!(
        returns_from_prices(&[100.0, 110.0]).unwrap().returns.len(),
        1
    );
    assert!((returns_from_prices(&[100.0, 110.0]).unwrap().returns[0] - 0.1).abs() < 1e-15);
    assert_eq!(
        returns_from_prices(&[5.0; 4]).unwrap().returns,
        vec![0.0; 3]
    );
    assert_eq!(
        returns_from_prices(&[100.0, 50.0, 100.0]).unwrap().returns,
        vec![-0.5, 1.0]
    );
    assert_eq!(
        returns_from_prices(&[100.0, 0.0]).unwrap_err(),
        TailError::NonPositivePrice {
            index: 1,
            price: 0.0
        }
    );
    assert_eq!(
        returns_from_prices(&[100.0]).unwrap_err(),
        TailError::TooShort { needed: 2, got: 1 }
    );
}

#[test]
fn pareto_ccdf_slope_over_top_decade() {
    let xs = pareto(3.0, 1.0, 1_000_000, 1);
    let c = ccdf(&xs).unwrap();
    let slope = c.tail_decade_slope().unwrap();
    assert!((slope + 3.0).abs() <= 0.15, "slope {slope}");

    // independent oracle: regress on the sorted sample directly
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let lo = sorted[n - n / 10];
    let pts: Vec<(f64, f64)> = sorted
        .iter()
        .enumerate()
        .filter(|(_, &x)| x >= lo && x <= 10.0 * lo)
        .map(|(i, &x)| (x, (n - i) as f64 / n as f64))
        .collect();
    assert!((ls_slope(&pts) - slope).abs() < 1e-9);
}

#[test]
fn pareto_hill_top_percent() {
    let xs = pareto(3.0, 1.0, 1_000_000, 2);
    let h = hill(&xs, 10_000).unwrap();
    assert!((h.alpha - 3.0).abs() <= 0.1, "hill {}", h.alpha);
    assert!((h.stderr - h.alpha / 100.0).abs() < 1e-15);
}

#[test]
fn hill_error_shrinks_with_sample_size() {
    let mut errs = Vec::new();
    for (i, n) in [10_000, 100_000, 1_000_000].into_iter().enumerate() {
        let xs = pareto(3.0, 1.0, n, 30 + i as u64);
        let h = hill(&xs, n / 100).unwrap();
        assert!(
            (h.alpha - 3.0).abs() <= 3.0 * h.stderr,
            "n {n}: {} ± {}",
            h.alpha,
            h.stderr
        );
        errs.push(h.stderr);
    }
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn exponential_tail_is_unstable() {
    let xs = exponential(1_000_000, 3);
    let s = hill_stability(&xs).unwrap();
    assert!(!s.stable);
    assert!(s.narrow.alpha > s.wide.alpha);

    let xs = pareto(3.0, 1.0, 1_000_000, 4);
    assert!(hill_stability(&xs).unwrap().stable);
}

#[test]
fn hill_errors() {
    assert_eq!(
        hill(&[1.0; 20], 9),
        Err(TailError::TailTooSmall { k: 9, n: 20 })
    );
    assert_eq!(
        hill(&[1.0; 20], 20),
        Err(TailError::TailTooSmall { k: 20, n: 20 })
    );
    let mut xs = vec![0.0; 20];
    xs[19] = 1.0;
    assert_eq!(hill(&xs, 10), Err(TailError::ZeroMagnitudes));
}

#[test]
fn pure_pareto_fit_finds_the_cutoff() {
    // the KS-minimising cutoff is itself noisy on a pure power law, so the
    // bottom-decile claim is checked as a majority over seeds
    let seeds = 20;
    let mut in_decile = 0;
    for seed in 0..seeds {
        let xs = pareto(3.0, 1.0, 100_000, 500 + seed);
        let fit = fit_powerlaw(&xs).unwrap();
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        if fit.xmin <= sorted[sorted.len() / 10] {
            in_decile += 1;
        }
        assert!(fit.xmin >= 1.0);
        assert!(
            (fit.alpha - 3.0).abs() <= 0.15,
            "seed {seed}: alpha {}",
            fit.alpha
        );
        assert!(!fit.flags.steep && !fit.flags.small_tail, "{:?}", fit.flags);
    }
    assert!(
        2 * in_decile > seeds,
        "{in_decile} of {seeds} cutoffs in the bottom decile"
    );
}

#[test]
fn gaussian_fit_is_flagged() {
    let xs = gaussian(100_000, 6);
    let fit = fit_powerlaw(&xs).unwrap();
    assert!(fit.flags.poor_fit(), "{fit:?}");
}

/// Half-normal body below its 90% quantile spliced to a Pareto(3) tail
/// carrying the top 10% of the mass.
fn spliced(n: usize, seed: u64) -> (Vec<f64>, f64) {
    let q = 1.6448536269514722;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = (0..n)
        .map(|_| {
            if rng.random::<f64>() < 0.1 {
                q * (1.0 - rng.random::<f64>()).powf(-1.0 / 3.0)
            } else {
                loop {
                    let z: f64 = rng.sample(StandardNormal);
                    if z.abs() < q {
                        break z.abs();
                    }
                }
            }
        })
        .collect();
    (xs, q)
}

#[test]
fn mixture_fit_lands_in_the_crossover() {
    for seed in 0..5 {
        let (xs, q) = spliced(100_000, 700 + seed);
        let fit = fit_powerlaw(&xs).unwrap();
        assert!((fit.alpha - 3.0).abs() <= 0.3, "alpha {}", fit.alpha);
        assert!(
            fit.xmin >= 0.85 * q && fit.xmin <= 1.5 * q,
            "xmin {}",
            fit.xmin
        );
    }
}

#[test]
fn white_noise_raw_acf_inside_band() {
    let xs = gaussian(100_000, 8);
    let r = acf_report(&xs, 50).unwrap();
    assert!(
        r.raw_inside_fraction() >= 0.9,
        "{}",
        r.raw_inside_fraction()
    );
    assert!((r.band - 1.96 / (1e5f64).sqrt()).abs() < 1e-15);
    assert!(!r.infinite_variance);
}

#[test]
fn alternating_and_constant_series() {
    let t = 1000;
    let xs: Vec<f64> = (0..t)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let a = acf(&xs, 5).unwrap();
    // biased estimator: lag-1 sum has T − 1 terms over T
    assert!((a[0] + (t as f64 - 1.0) / t as f64).abs() < 1e-12);
    assert_eq!(acf(&[2.0; 100], 5), Err(TailError::ZeroVariance));
    let short: Vec<f64> = (0..50).map(|i| i as f64).collect();
    assert_eq!(
        acf(&short, 5),
        Err(TailError::TooShort {
            needed: 51,
            got: 50
        })
    );
}

#[test]
fn heavy_tails_attach_the_variance_caveat() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let xs: Vec<f64> = pareto(1.5, 1.0, 100_000, 10)
        .into_iter()
        .map(|x| if rng.random::<bool>() { x } else { -x })
        .collect();
    let r = acf_report(&xs, 20).unwrap();
    assert!(r.infinite_variance, "{:?}", r.tail_alpha);
    assert!(r.tail_alpha.unwrap() < 2.0);
}

/// Direct definition of the biased sample autocorrelation.
fn acf_oracle(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len() as f64;
    let mu = xs.iter().sum::<f64>() / n;
    let c0: f64 = xs.iter().map(|x| (x - mu) * (x - mu)).sum();
    let c: f64 = (0..xs.len() - lag)
        .map(|i| (xs[i] - mu) * (xs[i + lag] - mu))
        .sum();
    c / c0
}

proptest! {
    #[test]
    fn ccdf_ignores_order(xs in prop::collection::vec(-100.0f64..100.0, 1..200).prop_shuffle(), seed in any::<u64>()) {
        let mut shuffled = xs.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        prop_assert_eq!(ccdf(&xs).unwrap(), ccdf(&shuffled).unwrap());
    }

    #[test]
    fn ccdf_is_a_survival_function(xs in prop::collection::vec(-100.0f64..100.0, 1..200)) {
        let c = ccdf(&xs).unwrap();
        prop_assert_eq!(c.probs[0], 1.0);
        prop_assert!(c.probs.windows(2).all(|w| w[1] < w[0]));
        prop_assert!(c.magnitudes.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn acf_is_bounded_and_affine_invariant(
        xs in prop::collection::vec(-10.0f64..10.0, 60..300),
        a in 0.01f64..100.0,
        b in -1000.0f64..1000.0,
    ) {
        prop_assume!(xs.iter().any(|&x| x != xs[0]));
        let r = acf(&xs, 5).unwrap();
        let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let s = acf(&ys, 5).unwrap();
        for (lag, (u, v)) in r.iter().zip(&s).enumerate() {
            prop_assert!((-1.0..=1.0).contains(u));
            prop_assert!((u - v).abs() < 1e-8, "lag {}: {} vs {}", lag + 1, u, v);
            prop_assert!((u - acf_oracle(&xs, lag + 1)).abs() < 1e-9);
        }
    }

    #[test]
    fn forced_cutoff_reproduces_fit_and_hill(alpha in 1.0f64..5.0, seed in any::<u64>()) {
        let xs = pareto(alpha, 1.0, 2000, seed);
        let fit = fit_powerlaw(&xs).unwrap();
        let forced = fit_powerlaw_at(&xs, fit.xmin).unwrap();
        prop_assert_eq!(forced.alpha, fit.alpha);
        prop_assert_eq!(forced.n_tail, fit.n_tail);
        let h = hill(&xs, fit.n_tail - 1).unwrap();
        prop_assert!((h.alpha - fit.alpha).abs() <= 1e-10 * fit.alpha);
    }

    #[test]
    fn hill_matches_direct_formula(xs in prop::collection::vec(0.001f64..1000.0, 30..200), k in 10usize..29) {
        let mut m = xs.clone();
        m.sort_by(|a, b| b.total_cmp(a));
        let s: f64 = m[..k].iter().map(|x| (x / m[k]).ln()).sum();
        let h = hill(&xs, k).unwrap();
        prop_assert!((h.alpha - k as f64 / s).abs() <= 1e-9 * h.alpha);
        prop_assert_eq!(h.threshold, m[k]);
    }
}
