use std::time::{Duration, Instant};

use cayley_core::groups::{builtin, cyclic};
use cayley_core::spectra::{
    adjacency_matrix, closed_form_spectrum, compare_spectra, multiplicity, numeric_spectrum,
    phi_by_determinant, recursion_step, AtomLabel,
};
use cayley_core::tree::DEFAULT_LEVEL_CAP;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn determinant_recursion_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for n in [2usize, 3] {
        let g = cyclic(n).unwrap();
        for k in 0..=3 {
            for _ in 0..20 {
                let lambda: f64 = rng.gen_range(-3.0..3.0);
                let mu: f64 = rng.gen_range(-3.0..3.0);
                let (l2, m2) = recursion_step(n, lambda, mu).unwrap();
                let lhs = phi_by_determinant(&g, k + 1, lambda, mu).unwrap();
                let exp = ((n - 1) * n.pow(k as u32)) as i32;
                let rhs = (mu - lambda).powi(exp) * phi_by_determinant(&g, k, l2, m2).unwrap();
                let scale = lhs.abs().max(rhs.abs()).max(1e-300);
                assert!(
                    (lhs - rhs).abs() / scale < 1e-7,
                    "n={n} k={k} λ={lambda} μ={mu}: {lhs} vs {rhs}"
                );
            }
        }
    }
}

#[test]
fn recursion_preserves_the_linear_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=5usize {
        let c = (n - 1) as f64;
        for _ in 0..50 {
            let (mut l, mut m) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let start = l + c * m;
            for _ in 0..4 {
                let Some(next) = recursion_step(n, l, m) else { break };
                (l, m) = next;
                assert!((l + c * m - start).abs() < 1e-8 * (1.0 + l.abs() + m.abs()));
            }
        }
    }
}

#[test]
fn numeric_spectra_match_closed_form() {
    let started = Instant::now();
    for (name, k_max) in [("Z2", 6), ("Z3", 6), ("S3", 4)] {
        let g = builtin(name).unwrap();
        for k in 0..=k_max {
            let a = adjacency_matrix(&g, k, DEFAULT_LEVEL_CAP).unwrap();
            let numeric = numeric_spectrum(&a, 1e-8).unwrap();
            let exact = closed_form_spectrum(g.order(), k).unwrap();
            let cmp = compare_spectra(&numeric, &exact, 1e-8);
            assert!(cmp.matched, "{name} level {k}: {:?}", cmp.mismatch);
        }
    }
    assert!(started.elapsed() < Duration::from_secs(60), "took {:?}", started.elapsed());
}

/// `n^k (n−1)² ((1 − n^{−q(⌊k/q⌋+1)}) / (1 − n^{−q}) − 1) + (n−1)[q | k+1]`.
fn geometric_form(n: usize, k: usize, q: usize) -> BigRational {
    let n_r = BigRational::from_integer(BigInt::from(n));
    let r = n_r.clone().pow(-(q as i32));
    let top = BigRational::one() - r.clone().pow((k / q + 1) as i32);
    let ratio = top / (BigRational::one() - r) - BigRational::one();
    let c = BigRational::from_integer(BigInt::from((n - 1) * (n - 1)));
    let tail = if (k + 1).is_multiple_of(q) { n - 1 } else { 0 };
    n_r.pow(k as i32) * c * ratio + BigRational::from_integer(BigInt::from(tail))
}

#[test]
fn geometric_and_sum_forms_agree() {
    for n in 2..=6 {
        for k in 1..=10 {
            for q in 2..=k {
                let sum = BigRational::from_integer(BigInt::from(multiplicity(n, k, q).unwrap()));
                assert_eq!(sum, geometric_form(n, k, q), "n={n} k={k} q={q}");
            }
        }
    }
}

#[test]
fn perron_root_is_simple_and_on_top() {
    for name in ["Z2", "Z3", "Z4", "S3"] {
        let g = builtin(name).unwrap();
        for k in 0..=3 {
            let exact = closed_form_spectrum(g.order(), k).unwrap();
            assert_eq!(exact.multiplicity_of(AtomLabel::One), Some(1));
            let numeric = numeric_spectrum(&adjacency_matrix(&g, k, DEFAULT_LEVEL_CAP).unwrap(), 1e-8).unwrap();
            let (top, mult) = *numeric.last().unwrap();
            assert!((top - 1.0).abs() < 1e-10);
            assert_eq!(mult, 1);
        }
    }
}

proptest! {
    #[test]
    fn closed_form_totals_and_symmetry(n in 2usize..=6, k in 0usize..=8) {
        let s = closed_form_spectrum(n, k).unwrap();
        prop_assert_eq!(s.total_multiplicity(), (n as u128).pow(k as u32));
        for a in &s.atoms {
            if let AtomLabel::Frac { p, q } = a.label {
                prop_assert_eq!(s.multiplicity_of(AtomLabel::Frac { p: q - p, q }), Some(a.multiplicity));
            }
        }
    }
}
