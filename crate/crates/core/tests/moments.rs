use nervecov::moments::{
    distribution_from_moments, exact_identity_residual, inverse_vandermonde, inverse_vandermonde_exact,
    inverse_vandermonde_general, IntegerRange, MomentVector,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

#[test]
fn exact_identity_for_all_small_spans() {
    for lo in -12..=12 {
        for n in 0..=12 {
            let r = IntegerRange::new(lo, lo + n).unwrap();
            assert_eq!(exact_identity_residual(r, &inverse_vandermonde_exact(r)), 0.0);
        }
    }
}

#[test]
fn float_identity_near_zero() {
    // the rounded inverse is well conditioned when the nodes straddle zero
    for n in 0..=12i64 {
        for lo in (-n - 1).max(-8)..=(-n / 2).min(0) {
            let r = IntegerRange::new(lo, lo + n).unwrap();
            let res = inverse_vandermonde(r).unwrap().identity_residual();
            assert!(res < 1e-10, "lo={lo} n={n}: {res}");
        }
    }
}

#[test]
fn exact_inverse_is_exact() {
    let r = IntegerRange::new(-2, 6).unwrap();
    let v = inverse_vandermonde_exact(r);
    let nodes: Vec<i64> = r.nodes().collect();
    for (i, &x) in nodes.iter().enumerate() {
        for j in 0..nodes.len() {
            let mut s = num_rational::BigRational::zero();
            let mut pw = num_rational::BigRational::one();
            for row in &v {
                s += &pw * &row[j];
                pw *= num_rational::BigRational::from_integer(x.into());
            }
            let want = if i == j { num_rational::BigRational::one() } else { num_rational::BigRational::zero() };
            assert_eq!(s, want);
        }
    }
}

#[test]
fn integer_specialization_matches_general_formula() {
    for (lo, hi) in [(0, 4), (-3, 2), (-1, 7)] {
        let r = IntegerRange::new(lo, hi).unwrap();
        let x: Vec<f64> = r.nodes().map(|v| v as f64).collect();
        let general = inverse_vandermonde_general(&x).unwrap();
        let special = inverse_vandermonde(r).unwrap();
        for (k, row) in general.iter().enumerate() {
            for (i, g) in row.iter().enumerate() {
                assert!((g - special.get(k, i)).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn general_formula_rejects_repeated_nodes() {
    assert!(inverse_vandermonde_general(&[1.0, 1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn float_roundtrip_on_chi_like_ranges(lo in -3i64..=1, weights in prop::collection::vec(0.0f64..1.0, 1..=8)) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 1e-3);
        let q: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let r = IntegerRange::new(lo, lo + q.len() as i64 - 1).unwrap();
        let mu = MomentVector::from_distribution(r, &q).unwrap().mu().to_vec();
        let d = distribution_from_moments(&MomentVector::new(r, mu).unwrap()).unwrap();
        for (a, b) in d.probabilities.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn roundtrip_synthetic(lo in -5i64..5, weights in prop::collection::vec(0.0f64..1.0, 1..=11)) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 1e-3);
        let q: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let r = IntegerRange::new(lo, lo + q.len() as i64 - 1).unwrap();
        let m = MomentVector::from_distribution(r, &q).unwrap();
        let d = distribution_from_moments(&m).unwrap();
        for (a, b) in d.probabilities.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
    }
}
