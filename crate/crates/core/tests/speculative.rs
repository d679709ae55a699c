use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use retrade_core::dist::Dist;
use retrade_core::speculative::kesten::simulate_kesten_with_shocks;
use retrade_core::speculative::{
    calibrate_scale, generate_news, simulate_kesten, simulate_speculative_market,
    simulate_with_news, tail_exponent_oracle, KestenParams, MarketOptions, NewsProcess,
    OracleError, TrendRule,
};
use retrade_core::tails::{acf, coefficient_variance_test, hill};

fn normal(sd: f64) -> Dist {
    Dist::Normal { mean: 0.0, sd }
}

/// Standard normal quantile: Acklam's rational approximation polished by one
/// Halley step against `erfc`.
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < 0.02425 {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - 0.02425 {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Stratified estimate of `E|σZ|^κ`: one uniform per stratum of `(0, 1)`,
/// pushed through an independent inverse normal CDF.
fn stratified_abs_moment(sigma: f64, kappa: f64, draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for i in 0..draws {
        let u = (i as f64 + rng.random::<f64>()) / draws as f64;
        acc += (sigma * normal_quantile(u)).abs().powf(kappa);
    }
    acc / draws as f64
}

/// Plain i.i.d. estimate with its standard error.
fn iid_abs_moment(sigma: f64, kappa: f64, draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..draws {
        let z: f64 = rng.sample(StandardNormal);
        let y = (sigma * z).abs().powf(kappa);
        s += y;
        s2 += y * y;
    }
    let n = draws as f64;
    let mean = s / n;
    (mean, ((s2 / n - mean * mean) / n).sqrt())
}

#[test]
fn quantile_inverts_the_normal_cdf() {
    for &p in &[1e-9, 1e-4, 0.01, 0.3, 0.5, 0.8, 0.99, 1.0 - 1e-7] {
        let x = normal_quantile(p);
        let back = 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2);
        assert!(
            (back - p).abs() <= 1e-12 * p.max(1e-3),
            "{p} -> {x} -> {back}"
        );
    }
    assert!((normal_quantile(0.975) - 1.959963984540054).abs() < 1e-12);
}

#[test]
fn zero_coefficients_give_iid_shocks() {
    let p = KestenParams::one_lag(Dist::Degenerate { value: 0.0 }, normal(1.0), 1000, 11);
    let shocks: Vec<f64> = (0..p.burn_in() + p.horizon)
        .map(|i| (i as f64).sin())
        .collect();
    let run = simulate_kesten_with_shocks(&p, &shocks).unwrap();
    assert_eq!(run.series.returns, &shocks[p.burn_in()..]);
}

#[test]
fn zero_shocks_stay_at_zero() {
    let p = KestenParams::one_lag(normal(0.8), Dist::Degenerate { value: 0.0 }, 500, 2);
    let run = simulate_kesten(&p).unwrap();
    assert!(run.series.returns.iter().all(|&r| r == 0.0));
}

#[test]
fn calibrated_kesten_has_tail_three() {
    let coef = calibrate_scale(&normal(1.0), 3.0).unwrap();
    let p = KestenParams::one_lag(coef, normal(1.0), 1_000_000, 7);
    let run = simulate_kesten(&p).unwrap();
    let h = hill(&run.series.returns, 10_000).unwrap();
    assert!((h.alpha - 3.0).abs() <= 0.3, "hill {}", h.alpha);
}

#[test]
fn oracle_error_cases() {
    assert_eq!(
        tail_exponent_oracle(&Dist::Degenerate { value: 0.5 }),
        Err(OracleError::NoRoot)
    );
    assert!(matches!(
        tail_exponent_oracle(&Dist::SymmetricTwoPoint { magnitude: 2.0 }),
        Err(OracleError::NonStationary(m)) if (m - 2f64.ln()).abs() < 1e-12
    ));
}

#[test]
fn oracle_root_solves_moment_equation_by_monte_carlo() {
    for (i, sigma) in [0.6, 0.8, 1.0].into_iter().enumerate() {
        let kappa = tail_exponent_oracle(&normal(sigma)).unwrap();
        let m = stratified_abs_moment(sigma, kappa, 10_000_000, 100 + i as u64);
        assert!(
            (m - 1.0).abs() <= 1e-3,
            "sigma {sigma}: kappa {kappa}, moment {m}"
        );
        let (mean, se) = iid_abs_moment(sigma, kappa, 1_000_000, 200 + i as u64);
        assert!(
            (mean - 1.0).abs() <= 4.0 * se,
            "sigma {sigma}: iid {mean} ± {se}"
        );
    }
    // E Z^2 = 1 for a standard normal
    assert!((tail_exponent_oracle(&normal(1.0)).unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn identical_agents_without_noise_follow_deterministic_recursion() {
    let rule = TrendRule::fixed(&[0.5, -0.2]);
    let mut shocks = vec![0.0; rule.burn_in() + 50];
    shocks[0] = 0.01;
    let s = simulate_with_news(&rule, &shocks, 7, 50, 3, MarketOptions::default()).unwrap();
    let mut r = vec![0.01];
    for t in 1..shocks.len() {
        let r2 = if t >= 2 { r[t - 2] } else { 0.0 };
        r.push(0.5 * r[t - 1] - 0.2 * r2);
    }
    assert_eq!(s.returns, &r[rule.burn_in()..]);

    let flat = TrendRule::fixed(&[0.0]);
    let s = simulate_with_news(&flat, &vec![0.0; 30], 5, 20, 1, MarketOptions::default()).unwrap();
    assert!(s.prices.unwrap().iter().all(|&p| p == 100.0));
}

#[test]
fn single_agent_reduces_to_kesten() {
    let weights = [0.4, -0.3, 0.1];
    let rule = TrendRule::fixed(&weights);
    let params = KestenParams {
        lags: 3,
        coefficients: weights
            .iter()
            .map(|&value| Dist::Degenerate { value })
            .collect(),
        shock: normal(1.0),
        horizon: 2000,
        seed: 9,
    };
    let news = generate_news(
        &NewsProcess::constant(0.01),
        params.burn_in() + params.horizon,
        9,
    )
    .unwrap();
    let k = simulate_kesten_with_shocks(&params, &news.shocks).unwrap();
    let m = simulate_with_news(
        &rule,
        &news.shocks,
        1,
        params.horizon,
        9,
        MarketOptions::default(),
    )
    .unwrap();
    assert_eq!(m.returns, k.series.returns);
    assert_eq!(m.truncations, 0);
}

fn clustered_news() -> NewsProcess {
    NewsProcess {
        stay_calm: 0.99,
        stay_turbulent: 0.99,
        calm_scale: 0.002,
        turbulent_scale: 0.02,
    }
}

fn heterogeneous_rule() -> TrendRule {
    TrendRule {
        lags: 1,
        weights: vec![normal(1.0)],
        noise_scale: 0.0,
        redraw: true,
    }
}

#[test]
fn heterogeneous_market_has_varying_coefficient_and_clustering() {
    let run = simulate_speculative_market(
        &heterogeneous_rule(),
        &clustered_news(),
        11,
        100_000,
        21,
        MarketOptions::default(),
    )
    .unwrap();
    let r = &run.series.returns;
    let v = coefficient_variance_test(r).unwrap();
    assert!(v.z > 3.0, "variance regression z {}", v.z);
    let abs: Vec<f64> = r.iter().map(|x| x.abs()).collect();
    let a = acf(&abs, 50).unwrap();
    assert!(a.iter().all(|&x| x > 0.0), "{a:?}");
}

#[test]
fn news_acf_examples() {
    let n = 100_000;
    let band = 1.96 / (n as f64).sqrt();
    let abs_acf = |p: &NewsProcess, seed| {
        let path = generate_news(p, n, seed).unwrap();
        let abs: Vec<f64> = path.shocks.iter().map(|x| x.abs()).collect();
        acf(&abs, 50).unwrap()
    };

    let equal = NewsProcess {
        stay_calm: 0.9,
        stay_turbulent: 0.9,
        calm_scale: 1.0,
        turbulent_scale: 1.0,
    };
    let a = abs_acf(&equal, 1);
    let inside = a.iter().filter(|x| x.abs() <= band).count();
    assert!(inside >= 45, "{inside} of 50 inside");

    let sticky = NewsProcess {
        stay_calm: 0.99,
        stay_turbulent: 0.99,
        calm_scale: 0.1,
        turbulent_scale: 1.0,
    };
    let a = abs_acf(&sticky, 2);
    assert!(a.iter().all(|&x| x > band), "{a:?}");

    let loose = NewsProcess {
        stay_calm: 0.5,
        stay_turbulent: 0.5,
        calm_scale: 0.1,
        turbulent_scale: 1.0,
    };
    let a = abs_acf(&loose, 3);
    assert!(a[1..].iter().all(|x| x.abs() < 0.05), "{a:?}");
}

#[test]
fn generators_are_seed_deterministic() {
    let p = KestenParams::one_lag(normal(0.8), normal(1.0), 5000, 4);
    assert_eq!(simulate_kesten(&p).unwrap(), simulate_kesten(&p).unwrap());
    let q = KestenParams {
        seed: 5,
        ..p.clone()
    };
    assert_ne!(simulate_kesten(&p).unwrap(), simulate_kesten(&q).unwrap());

    let run = |seed| {
        simulate_speculative_market(
            &heterogeneous_rule(),
            &clustered_news(),
            5,
            3000,
            seed,
            MarketOptions::default(),
        )
        .unwrap()
    };
    assert_eq!(run(8), run(8));
    assert_ne!(run(8).series, run(9).series);
    let news = clustered_news();
    assert_eq!(
        generate_news(&news, 1000, 3).unwrap(),
        generate_news(&news, 1000, 3).unwrap()
    );
}
