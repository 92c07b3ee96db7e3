use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use ecrel::avoidance::{avoidance_loss_upper, error_polynomial};
use ecrel::combinatorics::{avg_tight_clusters, pi_n};
use ecrel::distributions::{compute_g, g_by_quadrature, Distribution, GMethod};
use ecrel::exact::{exact_loss, LossQuery};
use ecrel::patterns::{count_minimal_clusters, enumerate_patterns, find_clusters, is_error_vector, FailurePattern, GapVector};
use ecrel::volume::{mc_volume, ConstraintVector, GapConstraint};
use ecrel::CodeParams;

fn code_strategy(max_n: usize) -> impl Strategy<Value = CodeParams> {
    (2..=max_n).prop_flat_map(|n| (Just(n), 1..n)).prop_map(|(n, k)| CodeParams::new(n, k).unwrap())
}

fn rho(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn run_label_distribution_sums_to_one() {
    for n in 1..=8 {
        for r in 1..=8 {
            let mut total = BigRational::zero();
            for l in 0..=n {
                let p = pi_n(n, r, l).unwrap();
                assert_eq!(p.is_zero(), l > r || l > n || l == 0, "n={n} r={r} l={l}");
                total += p;
            }
            assert!(total.is_one(), "n={n} r={r}: {total}");
        }
    }
}

#[test]
fn minimal_cluster_counts_average_to_enumeration() {
    let cases: [(usize, usize, &[u64]); 4] = [(2, 1, &[2, 3]), (3, 1, &[2, 1, 2]), (4, 2, &[2, 1, 1, 1]), (4, 3, &[1, 2, 2, 1])];
    for (n, k, m) in cases {
        let code = CodeParams::new(n, k).unwrap();
        let patterns = enumerate_patterns(m).unwrap();
        let total = patterns.total();
        let sum: usize = patterns.map(|f| count_minimal_clusters(&f, code)).sum();
        let avg = BigRational::new(BigInt::from(sum), total);
        assert_eq!(avg, avg_tight_clusters(code, m, n - k).unwrap(), "({n},{k}) m={m:?}");
    }
}

#[test]
fn distinct_failure_loss_is_error_polynomial() {
    for n in 2..=5 {
        for k in 1..n {
            let code = CodeParams::new(n, k).unwrap();
            let e = error_polynomial(code).unwrap();
            for r in [n as i64, 7, 23] {
                let r = rho(r, 1);
                let q = LossQuery::with_rho(code, vec![1; n], r.clone()).unwrap();
                let scaled = exact_loss(&q).unwrap() * num_traits::pow(r.clone(), n);
                assert_eq!(scaled, e.poly.eval(&r), "({n},{k}) rho={r}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clusters_have_expected_shape(
        code in code_strategy(5),
        raw in prop::collection::vec(0usize..5, 2..12),
    ) {
        let n = code.n();
        let labels: Vec<usize> = raw.into_iter().map(|l| l % n + 1).collect();
        let f = FailurePattern::new(n, labels.clone()).unwrap();
        let clusters = find_clusters(&f, code);
        for c in clusters.tight() {
            let mut seen: Vec<usize> = labels[c.start - 1..c.end].to_vec();
            seen.sort_unstable();
            seen.dedup();
            prop_assert_eq!(seen.len(), code.loss_threshold());
        }
        for c in clusters.minimal() {
            prop_assert!(c.tight);
            prop_assert_eq!(c.length(), n - code.k());
        }
    }

    #[test]
    fn setting_a_bit_keeps_error_vectors(
        code in code_strategy(4),
        raw in prop::collection::vec(0usize..4, 3..10),
        bits in any::<u64>(),
        flip in any::<prop::sample::Index>(),
    ) {
        let n = code.n();
        let labels: Vec<usize> = raw.into_iter().map(|l| l % n + 1).collect();
        let s = labels.len();
        let f = FailurePattern::new(n, labels).unwrap();
        let clusters = find_clusters(&f, code);
        let b = GapVector::from_index(s - 1, bits);
        let mut raised = b.clone();
        raised.0[flip.index(s - 1)] = true;
        if is_error_vector(&b, &clusters).unwrap() {
            prop_assert!(is_error_vector(&raised, &clusters).unwrap());
        }
    }

    #[test]
    fn loss_bound_is_monotone(
        m in prop::collection::vec(1u64..3, 3),
        bump in 0usize..3,
        r in 10i64..40,
    ) {
        let code = CodeParams::new(3, 2).unwrap();
        let base = avoidance_loss_upper(code, &m, &rho(r, 1)).unwrap();
        let mut more = m.clone();
        more[bump] += 1;
        prop_assert!(avoidance_loss_upper(code, &more, &rho(r, 1)).unwrap() >= base);
        // larger rho means a smaller tau
        prop_assert!(avoidance_loss_upper(code, &m, &rho(r + 1, 1)).unwrap() <= base);
    }

    #[test]
    fn quadrature_reproduces_analytic_g(
        shape in 0.4f64..3.0,
        mean_fail in 0.5f64..20.0,
        mean_rep in 0.01f64..2.0,
        kind in 0usize..3,
    ) {
        let (fail, rep) = match kind {
            0 => (Distribution::exponential(1.0 / mean_fail).unwrap(), Distribution::exponential(1.0 / mean_rep).unwrap()),
            1 => (Distribution::weibull_with_mean(shape, mean_fail).unwrap(), Distribution::weibull_with_mean(shape, mean_rep).unwrap()),
            _ => (Distribution::weibull_with_mean(shape, mean_fail).unwrap(), Distribution::constant(mean_rep).unwrap()),
        };
        let analytic = compute_g(&fail, &rep, 1e-10).unwrap();
        prop_assert_eq!(analytic.method, GMethod::Analytic);
        if rep.is_continuous() {
            let quad = g_by_quadrature(&fail, &rep, 1e-10).unwrap();
            prop_assert!((quad.g - analytic.g).abs() < 1e-8, "{} vs {}", quad.g, analytic.g);
        }
    }

    #[test]
    fn g_is_invariant_under_common_rescaling(
        kf in 0.5f64..3.0,
        kr in 0.5f64..3.0,
        c in 0.1f64..10.0,
    ) {
        let fail = Distribution::weibull_with_mean(kf, 5.0).unwrap();
        let rep = Distribution::weibull_with_mean(kr, 0.3).unwrap();
        let g = compute_g(&fail, &rep, 1e-10).unwrap().g;
        let scaled = compute_g(&fail.rescaled(c), &rep.rescaled(c), 1e-10).unwrap().g;
        prop_assert!((g - scaled).abs() < 1e-8, "{g} vs {scaled}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn volume_depends_only_on_constraint_counts(
        raw in prop::collection::vec(0u8..3, 1..5),
        seed in any::<u64>(),
    ) {
        let to_constraint = |x: &u8| match x {
            0 => GapConstraint::Long,
            1 => GapConstraint::Short,
            _ => GapConstraint::Free,
        };
        let b = ConstraintVector(raw.iter().map(to_constraint).collect());
        let mut reversed = raw.clone();
        reversed.reverse();
        reversed.rotate_left(1);
        let b2 = ConstraintVector(reversed.iter().map(to_constraint).collect());
        let s = raw.len() as f64 + 1.0;
        let x = mc_volume(&b, 1.5 * s, 200_000, seed).unwrap();
        let y = mc_volume(&b2, 1.5 * s, 200_000, seed.wrapping_add(1)).unwrap();
        let combined = (x.std_error.powi(2) + y.std_error.powi(2)).sqrt();
        prop_assert!((x.value - y.value).abs() <= 3.0 * combined.max(1e-9), "{b}: {} vs {b2}: {}", x.value, y.value);
    }
}
