use nervecov::coverage::{azuma_bound, chi_distribution, coverage_probability_closed, DistributionVector, PIPELINE_TOL};
use nervecov::metric_graph::MetricGraph;
use nervecov::moments::IntegerRange;
use nervecov::stevens::{gap_moments, stevens_coverage, stevens_gap_dist, stevens_gap_vector, three_arc_p_vector, ArcModel};
use proptest::prelude::*;

const GRID: [f64; 6] = [0.10, 0.20, 0.30, 0.35, 0.40, 0.45];

fn chi3(alpha: f64) -> nervecov::coverage::ChiDistribution {
    let p = three_arc_p_vector(alpha).unwrap();
    chi_distribution(&p, IntegerRange::new(0, 3).unwrap(), PIPELINE_TOL).unwrap()
}

#[test]
fn gap_law_sums_to_one() {
    for n in 2..=6 {
        for alpha in [0.1, 0.2, 0.35, 0.45] {
            let m = ArcModel::new(n, alpha).unwrap();
            let v = stevens_gap_vector(&m);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12, "n={n} alpha={alpha}");
            assert_eq!(stevens_coverage(&m), stevens_gap_dist(&m, 0));
        }
    }
}

#[test]
fn closed_form_moments_match_gap_law() {
    for alpha in GRID {
        let v = stevens_gap_vector(&ArcModel::new(3, alpha).unwrap());
        for k in 1..=3 {
            let direct: f64 = v.iter().enumerate().map(|(j, p)| (j as f64).powi(k as i32) * p).sum();
            assert!((direct - gap_moments(alpha, k).unwrap()).abs() < 1e-12, "alpha={alpha} k={k}");
        }
    }
}

#[test]
fn three_arc_pipeline_reproduces_coverage() {
    let circle = MetricGraph::circle(1.0).unwrap();
    for alpha in GRID {
        let p = three_arc_p_vector(alpha).unwrap();
        let rep = coverage_probability_closed(&p, &circle, PIPELINE_TOL).unwrap();
        let expected = if alpha > 1.0 / 3.0 { (3.0 * alpha - 1.0).powi(2) } else { 0.0 };
        assert!((rep.probability - expected).abs() < 1e-10, "alpha={alpha}");
    }
}

#[test]
fn three_arc_pipeline_reproduces_moments_and_gap_law() {
    for alpha in GRID {
        let d = chi3(alpha);
        for k in 1..=3 {
            assert!((d.moments[k] - gap_moments(alpha, k as u32).unwrap()).abs() < 1e-10);
        }
        let m = ArcModel::new(3, alpha).unwrap();
        for j in 0..=3 {
            assert!((d.prob(j) - stevens_gap_dist(&m, j as usize)).abs() < 1e-10);
            assert!((d.prob_direct(j) - stevens_gap_dist(&m, j as usize)).abs() < 1e-10);
        }
    }
}

#[test]
fn three_arc_vector_is_a_law() {
    for alpha in GRID {
        let p = three_arc_p_vector(alpha).unwrap();
        p.validate(1e-12).unwrap();
        let atomic = p.to_atomic(1e-12).unwrap();
        atomic.validate(1e-12).unwrap();
        let back = atomic.to_cumulative();
        for (a, b) in back.values().iter().zip(p.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn azuma_dominates_three_arc_coverage() {
    let circle = MetricGraph::circle(1.0).unwrap();
    for alpha in GRID {
        let d = chi3(alpha);
        let b = azuma_bound(d.mean(), 3, &circle).unwrap();
        assert!(b >= stevens_coverage(&ArcModel::new(3, alpha).unwrap()));
    }
    let b = azuma_bound(gap_moments(0.2, 1).unwrap(), 3, &circle).unwrap();
    assert!((b - (-1.92f64 * 1.92 / 24.0).exp()).abs() < 1e-10);
}

proptest! {
    #[test]
    fn gap_law_is_a_probability_vector(n in 2usize..8, alpha in 0.05f64..0.95) {
        let m = ArcModel::new(n, alpha).unwrap();
        let v = stevens_gap_vector(&m);
        prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(v.iter().all(|p| *p > -1e-9));
    }

    #[test]
    fn atomic_roundtrip_is_identity(alpha in 0.01f64..0.49) {
        let p = three_arc_p_vector(alpha).unwrap();
        let a = p.to_atomic(1e-12).unwrap();
        let sum: f64 = a.values().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        let q = DistributionVector::new(p.family().clone(), a.form(), a.values().to_vec()).unwrap().to_cumulative();
        for (x, y) in q.values().iter().zip(p.values()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}
