//! Reference values checked against brute-force oracles written in this file
//! or frozen from an independent computation.

mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use renyi_hyp::exponents::family_variance;
use renyi_hyp::types::{d_s_p_u, log_alpha_of_test, log_beta_universal_bound, DEFAULT_TYPE_CAP};
use renyi_hyp::{
    build_lr_test, composite_lp, critical_rate, error_exponent, family_divergence, member_grid, np_simple,
    renyi_divergence, sc_exponent, second_order_alpha, threshold_rate, lr_threshold, FamilySpec64, JointPmf64,
    PhiCurve, Pmf64, TypeTable,
};

fn binary_pair() -> (JointPmf64, JointPmf64) {
    (JointPmf64::from_shape(&[2], vec![0.5, 0.5]).unwrap(), JointPmf64::from_shape(&[2], vec![0.25, 0.75]).unwrap())
}

fn singleton_curve() -> PhiCurve {
    let (p, q) = binary_pair();
    PhiCurve::new(p, FamilySpec64::Singleton { q }).unwrap()
}

fn sym() -> JointPmf64 {
    JointPmf64::from_shape(&[2, 2], vec![0.4, 0.1, 0.1, 0.4]).unwrap()
}

#[test]
fn product_family_matches_grid_on_symmetric_example() {
    let p = sym();
    let lib = family_divergence(&p, &FamilySpec64::general_product(1), order(2.0)).unwrap();
    let (grid, _) = box_minimize(2, 1000, |v| {
        let member = [v[0] * v[1], v[0] * (1.0 - v[1]), (1.0 - v[0]) * v[1], (1.0 - v[0]) * (1.0 - v[1])];
        renyi(p.probs(), &member, 2.0)
    });
    assert!((lib.value.finite().unwrap() - grid).abs() < 1e-5);
}

#[test]
fn markov_family_matches_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let p = random_joint(&mut rng, &[2, 2, 2]);
    let s = 1.5;
    let at = |x: usize, y: usize, z: usize| p.probs()[x * 4 + y * 2 + z];
    // Σ P^s Q^{1−s} = Σ_y Q_Y(y)^{1−s} F_y(Q_{X|y}, Q_{Z|y}); for s > 1 each F_y is minimized separately
    let f_min: Vec<f64> = (0..2)
        .map(|y| {
            box_minimize(2, 50, |ab| {
                let (qx, qz) = ([ab[0], 1.0 - ab[0]], [ab[1], 1.0 - ab[1]]);
                (0..4).map(|i| at(i / 2, y, i % 2).powf(s) * (qx[i / 2] * qz[i % 2]).powf(1.0 - s)).sum()
            })
            .0
        })
        .collect();
    let (grid, _) = box_minimize(1, 50, |v| {
        ((v[0].powf(1.0 - s) * f_min[0] + (1.0 - v[0]).powf(1.0 - s) * f_min[1]).ln()) / (s - 1.0)
    });
    let lib = family_divergence(&p, &FamilySpec64::markov_all(), order(s)).unwrap();
    assert!(lib.converged);
    assert!((lib.value.finite().unwrap() - grid).abs() < 1e-4);
}

#[test]
fn error_exponent_matches_grid_supremum() {
    let curve = singleton_curve();
    let (p, q) = binary_pair();
    let rate = 0.5 * curve.threshold();
    let sup = grid_sup(1e-6, 1.0 - 1e-6, 20_001, |s| (1.0 - s) / s * (renyi(p.probs(), q.probs(), s) - rate));
    let report = error_exponent(&curve, rate).unwrap();
    assert!((report.value - sup).abs() < 1e-8, "{} vs {sup}", report.value);
    assert!((report.direct_value - sup).abs() < 1e-8);
    assert!(report.equality_guaranteed);
}

#[test]
fn strong_converse_exponent_matches_grid_supremum() {
    let curve = singleton_curve();
    let (p, q) = binary_pair();
    let rate = 1.5 * curve.threshold();
    let sup = grid_sup(1.0 + 1e-6, 50.0, 50_001, |s| (s - 1.0) / s * (rate - renyi(p.probs(), q.probs(), s)));
    let report = sc_exponent(&curve, rate).unwrap();
    assert!((report.value - sup).abs() < 1e-8, "{} vs {sup}", report.value);
}

#[test]
fn exponents_are_zero_on_the_trivial_side() {
    let curve = singleton_curve();
    let d = curve.threshold();
    assert_eq!(error_exponent(&curve, d).unwrap().value, 0.0);
    assert_eq!(error_exponent(&curve, 1.2 * d).unwrap().value, 0.0);
    assert_eq!(sc_exponent(&curve, d).unwrap().value, 0.0);
    assert_eq!(sc_exponent(&curve, 0.7 * d).unwrap().value, 0.0);
}

#[test]
fn second_order_limit_value() {
    // Φ(1/ln 3), from an independent normal CDF
    let v = second_order_alpha(&singleton_curve(), 0.5).unwrap();
    assert!((v - 0.8186518194426818).abs() < 1e-12);
    let var = family_variance(&singleton_curve()).unwrap();
    assert!((var - 0.25 * 3f64.ln().powi(2)).abs() < 1e-14);
}

#[test]
fn critical_rates_of_a_singleton() {
    let curve = singleton_curve();
    assert!((critical_rate(&curve, 1.0).unwrap() - curve.threshold()).abs() < 1e-8);
    assert!(critical_rate(&curve, 0.0).unwrap().abs() < 1e-6);
    assert!(critical_rate(&curve, 50.0).unwrap() >= 2f64.ln() - 1e-9);
}

#[test]
fn thresholds_are_information_quantities() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let p = random_joint(&mut rng, &[3, 2]);
    let fam = FamilySpec64::fixed_marginal(p.marginal_pmf(0).unwrap());
    let curve = PhiCurve::new(p.clone(), fam).unwrap();
    assert!((threshold_rate(&curve) - mutual_information(p.probs(), 3, 2)).abs() < 1e-12);

    // I(X:Z|Y) = Σ_y P(y) I(X:Z|Y=y)
    let p = random_joint(&mut rng, &[2, 3, 2]);
    let mut cmi = 0.0;
    for y in 0..3 {
        let slice: Vec<f64> = (0..4).map(|i| p.probs()[(i / 2) * 6 + y * 2 + i % 2]).collect();
        let py: f64 = slice.iter().sum();
        let cond: Vec<f64> = slice.iter().map(|v| v / py).collect();
        cmi += py * mutual_information(&cond, 2, 2);
    }
    let curve = PhiCurve::new(p, FamilySpec64::markov_recovery()).unwrap();
    assert!((threshold_rate(&curve) - cmi).abs() < 1e-12);
}

#[test]
fn envelope_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let p = random_joint(&mut rng, &[2, 3]);
    let fam = FamilySpec64::fixed_marginal(random_pmf(&mut rng, 2));
    let curve = PhiCurve::new(p.clone(), fam.clone()).unwrap();
    for s0 in [0.5, 2.0] {
        let frozen = family_divergence(&p, &fam, order(s0)).unwrap().assembled;
        let bar = |s: f64| (s - 1.0) * renyi(p.probs(), frozen.probs(), s);
        let h = 1e-5;
        let fd = (bar(s0 + h) - bar(s0 - h)) / (2.0 * h);
        assert!((curve.phi_prime(s0).unwrap() - fd).abs() < 1e-5);
    }
}

#[test]
fn taylor_expansion_at_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let p = random_joint(&mut rng, &[2, 2]);
    let curve = PhiCurve::new(p, FamilySpec64::general_product(1)).unwrap();
    let v = family_variance(&curve).unwrap();
    for h in [1e-2, -1e-2, 1e-3, -1e-3] {
        let resid = curve.divergence(1.0 + h).unwrap() - curve.threshold() - h * v / 2.0;
        assert!(resid.abs() < 10.0 * h * h, "h = {h}: residual {resid}");
    }
}

#[test]
fn composite_sandwich_at_n6() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let p = random_joint(&mut rng, &[2, 2]);
    let fam = FamilySpec64::fixed_marginal(p.marginal_pmf(0).unwrap());
    let curve = PhiCurve::new(p.clone(), fam.clone()).unwrap();
    let (n, rate, s) = (6, 0.6 * curve.threshold(), 0.7);
    let log_mu = -(n as f64) * rate;
    let members = member_grid(&p, &fam, 11, 1000).unwrap();

    let best_single = members
        .iter()
        .map(|q| np_simple(&p, q, n, log_mu, DEFAULT_TYPE_CAP).unwrap().alpha_hat)
        .fold(0.0, f64::max);
    let lp = composite_lp(&p, &fam, n, log_mu, &members, DEFAULT_TYPE_CAP).unwrap();
    let table = TypeTable::for_family(&p, &fam, n, DEFAULT_TYPE_CAP).unwrap();
    let dpu = d_s_p_u(&table, order(s)).unwrap().finite().unwrap();
    let test = build_lr_test(&table, lr_threshold(n, rate, order(s), dpu, table.log_v).unwrap());
    let alpha_t = log_alpha_of_test(&table, &test).unwrap().exp();

    assert!(best_single <= lp.alpha_hat + 1e-9);
    assert!(lp.alpha_hat <= alpha_t + 1e-12);
    assert!(log_beta_universal_bound(&table, &test).unwrap() <= log_mu + 1e-9);
    assert!(lp.log_betas.iter().all(|&b| b <= log_mu + 1e-9));
    assert!(!lp.binding.is_empty());
}

#[test]
fn lp_with_the_null_as_member() {
    let p = sym();
    let fam = FamilySpec64::fixed_marginal(Pmf64::from_probs(vec![0.5, 0.5]).unwrap());
    let log_mu = 0.3f64.ln();
    let members = vec![p.clone(), JointPmf64::from_shape(&[2, 2], vec![0.25; 4]).unwrap()];
    let r = composite_lp(&p, &fam, 4, log_mu, &members, DEFAULT_TYPE_CAP).unwrap();
    assert!(r.alpha_hat >= 0.7 - 1e-9);
}

#[test]
fn divergence_of_grid_members_bounds_family_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let p = random_joint(&mut rng, &[2, 2, 2]);
    let fam = FamilySpec64::markov_recovery();
    for s in [0.5, 1.0, 2.5] {
        let best = family_divergence(&p, &fam, order(s)).unwrap().value.finite().unwrap();
        for q in member_grid(&p, &fam, 5, 10_000).unwrap() {
            let d = renyi_divergence(&p, &q, order(s)).unwrap().to_float();
            assert!(best <= d + 1e-12);
        }
    }
}

#[test]
fn normal_cdf_accuracy() {
    // 30-digit reference values
    let cases = [
        (-8.0, 6.2209605742717841235e-16),
        (-3.0, 0.0013498980316300945267),
        (-1.0, 0.15865525393145705141),
        (0.5, 0.69146246127401310364),
        (2.0, 0.9772498680518207928),
        (5.0, 0.99999971334842812081),
    ];
    for (x, want) in cases {
        assert!((renyi_hyp::normal_cdf(x) - want).abs() <= 1e-12 * want.max(1e-4), "Φ({x})");
    }
}
