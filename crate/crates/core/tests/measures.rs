use cayley_core::groups::{builtin, cyclic};
use cayley_core::measures::{
    average_fixed_fraction, euler_phi_identity_partial, golden_grid, kns_measure, level_measure, level_moments,
    weak_convergence_report,
};
use cayley_core::tree::DEFAULT_LEVEL_CAP;
use cayley_core::walks::{kesten_moments, walk_distribution, WreathElement};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

#[test]
fn kns_moments_equal_walk_moments_for_abelian_groups() {
    for name in ["Z2", "Z3", "Z4", "Z2xZ2"] {
        let g = builtin(name).unwrap();
        let measure = kns_measure(g.order(), 40).unwrap();
        let walk = kesten_moments(&g, 10).unwrap();
        for (m, p) in walk.iter().enumerate() {
            let est = measure.moment(m as u32);
            let exact = p.to_f64().unwrap();
            assert!(est.contains(exact), "{name} m={m}: {} vs {exact} (±{})", est.value, est.error);
        }
    }
    let two = kesten_moments(&cyclic(2).unwrap(), 2).unwrap();
    assert_eq!(two[2], BigRational::new(1.into(), 4.into()));
    assert!((kns_measure(2, 40).unwrap().moment(2).value - 0.25).abs() < 1e-6);
}

#[test]
fn level_moments_decrease_towards_the_walk() {
    for name in ["Z2", "Z3", "S3"] {
        let g = builtin(name).unwrap();
        let k_max = if g.order() == 2 { 6 } else { 3 };
        let walk = kesten_moments(&g, 6).unwrap();
        let per_level: Vec<_> = (0..=k_max).map(|k| level_moments(&g, k, 6, DEFAULT_LEVEL_CAP).unwrap()).collect();
        for m in 0..=6 {
            for k in 0..k_max {
                assert!(per_level[k + 1][m] <= per_level[k][m], "{name} m={m} k={k}");
            }
            assert!(per_level[k_max][m] >= walk[m], "{name} m={m}");
        }
    }
}

#[test]
fn trace_moments_are_fixed_point_averages() {
    let g = cyclic(2).unwrap();
    for k in 0..=4 {
        let mom = level_moments(&g, k, 4, DEFAULT_LEVEL_CAP).unwrap();
        for m in 0..=4 {
            assert_eq!(mom[m], average_fixed_fraction(&g, k, m).unwrap(), "k={k} m={m}");
        }
    }
}

#[test]
fn euler_phi_series_approaches_one() {
    for n in 2..=5 {
        let s = euler_phi_identity_partial(n, 60).unwrap();
        assert!((s.value.to_f64().unwrap() - 1.0).abs() < 1e-8, "n={n}");
        assert!(s.value < BigRational::one());
    }
}

#[test]
fn level_measures_converge_on_golden_grid() {
    let grid = golden_grid(12);
    let report = weak_convergence_report(2, 8, 40, &grid).unwrap();
    for row in report.rows.iter().filter(|r| r.level == 8) {
        assert!(row.error < 0.02, "x={} error {}", row.x, row.error);
    }
    let m = level_measure(2, 8).unwrap();
    assert_eq!(m.cdf_z(1.0).lower, BigRational::one());
}

#[test]
fn walk_laws_are_symmetric_probability_vectors() {
    let g = builtin("S3").unwrap();
    for m in 0..=4 {
        let d = walk_distribution(&g, m).unwrap();
        let total = d.values().fold(BigRational::zero(), |a, b| a + b);
        assert!(total.is_one());
        for (e, w) in &d {
            assert_eq!(d.get(&e.inverse(&g)), Some(w));
        }
        if m % 2 == 1 {
            assert!(!d.contains_key(&WreathElement::identity()));
        }
    }
}

proptest! {
    #[test]
    fn kns_cdf_is_monotone(n in 2usize..=5, xs in proptest::collection::vec(0.0f64..1.0, 2..20)) {
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        let m = kns_measure(n, 24).unwrap();
        for w in xs.windows(2) {
            let (a, b) = (m.cdf_z(w[0]), m.cdf_z(w[1]));
            prop_assert!(a.lower <= b.lower && a.upper <= b.upper);
        }
    }

    #[test]
    fn level_weights_sum_to_one(n in 2usize..=5, k in 0usize..=6) {
        let m = level_measure(n, k).unwrap();
        prop_assert_eq!(m.stored_mass(), BigRational::from_integer(BigInt::one()));
    }
}
