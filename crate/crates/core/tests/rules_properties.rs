//! Cross-module properties of the scoring rules.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use properscore::quad::mc_expect;
use properscore::rules::{
    crps, entropy_s_tilde, expected_s_tilde_closed, expected_score, p_tilde_star, properize_map_bg, s_alpha,
    s_alpha_star, s_tilde, s_tilde_star, score,
};
use properscore::{Distribution, DistributionFunction, QuadConfig, RuleSpec, WeightSpec};

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn random_family(rng: &mut ChaCha8Rng) -> Distribution {
    let loc = rng.gen_range(-2.0..2.0);
    let scale = rng.gen_range(0.4..2.5);
    match rng.gen_range(0..4) {
        0 => Distribution::gumbel(loc, scale),
        1 => Distribution::laplace(loc, scale),
        2 => Distribution::logistic(loc, scale),
        _ => Distribution::normal(loc, scale),
    }
    .unwrap()
}

/// `1 − P(x) ~ 1/(πx)` on both sides.
struct Cauchy;

impl DistributionFunction<f64> for Cauchy {
    fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            (-1.0 / x).atan() / PI
        } else {
            0.5 + x.atan() / PI
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if x > 0.0 {
            (1.0 / x).atan() / PI
        } else {
            0.5 - x.atan() / PI
        }
    }

    fn in_p01(&self) -> bool {
        true
    }

    fn breakpoints(&self, _: f64) -> Vec<f64> {
        vec![-10.0, 0.0, 10.0]
    }
}

#[test]
fn properized_rule_does_not_depend_on_alpha() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let w = WeightSpec::gaussian_pdf(0.5, 2.0).unwrap();
    for _ in 0..8 {
        let f = random_family(&mut rng);
        let y = rng.gen_range(-3.0..3.0);
        let closed = s_tilde_star(&f, y, &w, &cfg()).unwrap().value;
        for alpha in [0.5, 1.0, 2.0, 3.0, 7.0] {
            let v = s_tilde(&p_tilde_star(&f, alpha).unwrap(), y, alpha, &w, &cfg()).unwrap().value;
            assert_relative_eq!(v, closed, max_relative = 1e-8);
        }
        // fixed point of the map
        assert_relative_eq!(s_tilde(&f, y, 0.5, &w, &cfg()).unwrap().value, closed, max_relative = 1e-14);
    }
}

#[test]
fn crps_family_equivalences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let f = random_family(&mut rng);
        let y = rng.gen_range(-4.0..4.0);
        let c = crps(&f, y, &cfg()).unwrap().value;
        assert!((s_alpha(&f, y, 2.0, &cfg()).unwrap().value - c).abs() < 1e-8);
        assert!((s_alpha_star(&f, y, 2.0, &cfg()).unwrap().value - c).abs() < 1e-8);
        for alpha in [0.3, 0.8, 1.0] {
            let v = s_alpha_star(&f, y, alpha, &cfg()).unwrap().value;
            assert!((v - (f.median() - y).abs()).abs() < 1e-8);
        }
    }
}

#[test]
fn bg_map_for_alpha_above_one_is_the_pointwise_minimizer() {
    // For α > 1 the expected S_α integrand q ↦ q^α (1 − p) + (1 − q)^α p is minimised at P*.
    let f = Distribution::gumbel(0.0, 1.0).unwrap();
    for alpha in [1.5, 3.0] {
        let star = properize_map_bg(&f, alpha).unwrap();
        for x in [-1.0, 0.0, 0.7, 2.0] {
            let p = f.cdf(x);
            let h = |q: f64| q.powf(alpha) * (1.0 - p) + (1.0 - q).powf(alpha) * p;
            let best = (1..100_000).map(|k| k as f64 / 100_000.0).min_by(|a, b| h(*a).total_cmp(&h(*b))).unwrap();
            assert!((star.cdf(x) - best).abs() < 2e-5);
        }
    }
}

#[test]
fn entropy_is_self_expectation_of_the_properized_rule() {
    let star = RuleSpec::s_tilde_star(WeightSpec::default()).unwrap();
    for g in [
        Distribution::gumbel(0.0, 1.0).unwrap(),
        Distribution::laplace(0.0, 1.0).unwrap(),
        Distribution::logistic(0.3, 0.8).unwrap(),
        Distribution::normal(-1.0, 1.5).unwrap(),
    ] {
        let e = entropy_s_tilde(&g, &WeightSpec::default(), &cfg()).unwrap().value;
        let v = expected_score(&star, &g, &g, &cfg()).unwrap();
        assert!(v.converged);
        assert!((v.value - e).abs() < 1e-6, "{g:?}");
        let c = expected_s_tilde_closed(&g, &g, 0.5, &WeightSpec::default(), &cfg()).unwrap().value;
        assert!((c - e).abs() < 1e-8);
    }
}

#[test]
fn quadrature_agrees_with_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for k in 0..6 {
        let f = random_family(&mut rng);
        let g = random_family(&mut rng);
        let q = expected_score(&RuleSpec::Crps, &f, &g, &cfg()).unwrap().value;
        let mc = mc_expect(&g, |y| crps(&f, y, &cfg()).unwrap().value, 20_000, k).unwrap();
        assert!((q - mc.mean).abs() < 4.0 * mc.std_error, "{q} vs {mc:?}");
    }
}

#[test]
fn heavy_tails_are_flagged_divergent() {
    assert!(entropy_s_tilde(&Cauchy, &WeightSpec::default(), &cfg()).unwrap().divergent);
    assert!(s_tilde_star(&Cauchy, 0.0, &WeightSpec::default(), &cfg()).unwrap().divergent);
    assert!(s_alpha(&Cauchy, 1.0, 0.9, &cfg()).unwrap().divergent);
    // the square makes the CRPS tail integrable
    let c = crps(&Cauchy, 0.0, &cfg()).unwrap();
    assert!(!c.divergent && c.converged);
}

#[test]
fn mixtures_and_empirical_forecasts() {
    let m = Distribution::mixture(vec![
        (0.3, Distribution::dirac(1.0).unwrap()),
        (0.7, Distribution::normal(0.0, 1.0).unwrap()),
    ])
    .unwrap();
    // CRPS is linear in the forecast CDF only through the square, so compare against the definition
    let direct = properscore::quad::integrate(
        |x: f64| {
            let d = if x > 0.5 { m.sf(x) } else { m.cdf(x) };
            d * d
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &[0.0, 0.5, 1.0],
        &cfg(),
        properscore::NonFinitePolicy::Error,
    )
    .unwrap()
    .value;
    assert_relative_eq!(crps(&m, 0.5, &cfg()).unwrap().value, direct, max_relative = 1e-9);
    assert!(m.in_p01());
    assert!(s_tilde_star(&m, 0.5, &WeightSpec::default(), &cfg()).unwrap().value.is_finite());

    // empirical CRPS = mean |xᵢ − y| − ½ mean |xᵢ − xⱼ|
    let pts = [0.0, 1.0, 1.0, 4.0];
    let e = Distribution::empirical(&pts).unwrap();
    let y = 2.0;
    let a: f64 = pts.iter().map(|x| (x - y).abs()).sum::<f64>() / 4.0;
    let b: f64 = pts.iter().flat_map(|x| pts.iter().map(move |z| (x - z).abs())).sum::<f64>() / 16.0;
    assert_relative_eq!(crps(&e, y, &cfg()).unwrap().value, a - 0.5 * b, max_relative = 1e-12);
}

#[test]
fn single_precision_pipeline() {
    let f = properscore::Distribution32::logistic(0.0, 1.0).unwrap();
    let c = properscore::QuadConfig32::default();
    let v = crps(&f, 0.0, &c).unwrap().value;
    // 2 ln 2 − 1
    assert!((v - 0.386_294_4).abs() < 1e-5, "{v}");
    let rule = properscore::rules::RuleSpec::<f32>::s_tilde_star(properscore::WeightSpec32::default()).unwrap();
    let e = expected_score(&rule, &f, &f, &c).unwrap().value;
    assert!((e - 2.0 * std::f32::consts::PI).abs() < 1e-3, "{e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scores_are_nonnegative(seed in 0u64..10_000, y in -6.0f64..6.0, alpha in 0.2f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_family(&mut rng);
        let w = WeightSpec::gaussian_cdf(0.0, 1.0).unwrap();
        let rules = [
            RuleSpec::Crps,
            RuleSpec::wcrps(w.clone()),
            RuleSpec::s_alpha(alpha).unwrap(),
            RuleSpec::s_alpha_star(alpha).unwrap(),
            RuleSpec::s_tilde(alpha, w.clone()).unwrap(),
            RuleSpec::s_tilde_star(w).unwrap(),
            RuleSpec::remark_first(alpha).unwrap(),
            RuleSpec::remark_second(alpha).unwrap(),
        ];
        for rule in &rules {
            let v = score(rule, &f, y, &cfg()).unwrap();
            prop_assert!(v.value >= 0.0);
            prop_assert_eq!(v.divergent, v.value.is_infinite());
        }
    }

    #[test]
    fn crps_is_zero_only_for_a_point_mass_at_the_outcome(m in -5.0f64..5.0, y in -5.0f64..5.0) {
        let d = Distribution::dirac(m).unwrap();
        let v = crps(&d, y, &cfg()).unwrap().value;
        prop_assert!((v - (m - y).abs()).abs() < 1e-10 * (1.0 + (m - y).abs()));
    }

    #[test]
    fn wcrps_is_monotone_in_the_weight(seed in 0u64..10_000, y in -3.0f64..3.0, c in 1.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_family(&mut rng);
        let base = properscore::rules::wcrps(&f, y, &WeightSpec::constant(1.0).unwrap(), &cfg()).unwrap().value;
        let scaled = properscore::rules::wcrps(&f, y, &WeightSpec::constant(c).unwrap(), &cfg()).unwrap().value;
        prop_assert!((scaled - c * base).abs() <= 1e-9 * scaled.max(1.0));
    }
}
