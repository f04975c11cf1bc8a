use cayley_core::groups::builtin;
use cayley_core::tree::{freeness_report, AutomatonGroup, Depth, FixedSetKind, Letter, DEFAULT_LEVEL_CAP};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest `i + 1` such that letter `i` of some sampled input changes.
fn moved_prefix(group: &AutomatonGroup, word: &[Letter], inputs: impl Iterator<Item = Vec<usize>>) -> usize {
    inputs
        .map(|w| {
            let out = group.act_sequential(word, &w);
            (0..w.len()).rev().find(|&i| out[i] != w[i]).map_or(0, |i| i + 1)
        })
        .max()
        .unwrap_or(0)
}

#[test]
fn conjugates_of_base_elements_have_depth_one_more_than_the_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["Z2", "Z3", "S3"] {
        let g = builtin(name).unwrap();
        let group = AutomatonGroup::cayley(&g);
        for a in (0..g.order()).filter(|&a| a != g.identity()) {
            for n in 0..=5 {
                let word = group.conjugate_by_x_power(n, &group.embedded_word(a).unwrap()).unwrap();
                let e = group.element(word.clone()).unwrap();
                assert_eq!(e.depth(12), Depth::Exactly(n + 1), "{name} a={a} n={n}");
                let len = n + 3;
                let samples = (0..3000).map(|_| (0..len).map(|_| rng.gen_range(0..g.order())).collect());
                assert_eq!(moved_prefix(&group, &word, samples), n + 1, "{name} a={a} n={n}");
            }
        }
    }
}

#[test]
fn x_fixes_two_words_on_every_level() {
    let g = builtin("Z2").unwrap();
    let group = AutomatonGroup::cayley(&g);
    let x = group.element(group.x_word().unwrap()).unwrap();
    for k in 1..=10 {
        assert_eq!(x.fix_count(k), BigUint::from(2u32), "level {k}");
        assert_eq!(x.fix_count_enumerated(k, DEFAULT_LEVEL_CAP).unwrap(), 2);
    }
}

#[test]
fn small_ball_over_z2_is_free_with_geometric_decay() {
    let g = builtin("Z2").unwrap();
    let group = AutomatonGroup::cayley(&g);
    let report = freeness_report(&group, &group.symmetric_generators(), 4, 10).unwrap();
    // (a b⁻¹)² and its cyclic conjugates: a lamp of order two
    assert_eq!(report.identity_words, 4);
    let lamp = [Letter::pos(0), Letter::neg(1), Letter::pos(0), Letter::neg(1)];
    let input: Vec<usize> = (0..12).map(|i| i % 2).collect();
    assert_eq!(group.act_sequential(&lamp, &input), input);
    assert!(report.free_on_ball());
    for v in &report.elements {
        let FixedSetKind::MeasureZero { period, checked_levels, .. } = &v.kind else {
            panic!("{} has a fixed cylinder", v.word_string);
        };
        assert!(!checked_levels.is_empty());
        // `(n^p − 1)^j / n^{pj}` with `n = 2`
        for &k in checked_levels {
            let j = (k / period) as u32;
            let bound = (BigUint::from(2u32).pow(*period as u32) - 1u32).pow(j);
            let e = group.element(v.word.clone()).unwrap();
            assert!(e.fix_count(k) <= bound, "{} at level {k}", v.word_string);
        }
    }
}

proptest! {
    #[test]
    fn level_action_is_a_homomorphism(
        a in proptest::collection::vec((0usize..3, any::<bool>()), 0..5),
        b in proptest::collection::vec((0usize..3, any::<bool>()), 0..5),
    ) {
        let g = builtin("Z3").unwrap();
        let group = AutomatonGroup::cayley(&g);
        let letters = |v: &[(usize, bool)]| -> Vec<Letter> {
            v.iter().map(|&(s, inv)| if inv { Letter::neg(s) } else { Letter::pos(s) }).collect()
        };
        let (wa, wb) = (letters(&a), letters(&b));
        let mut wab = wa.clone();
        wab.extend_from_slice(&wb);
        let level = 4;
        let pa = group.element(wa).unwrap().level_permutation(level, DEFAULT_LEVEL_CAP).unwrap().perm;
        let pb = group.element(wb).unwrap().level_permutation(level, DEFAULT_LEVEL_CAP).unwrap().perm;
        let pab = group.element(wab).unwrap().level_permutation(level, DEFAULT_LEVEL_CAP).unwrap().perm;
        prop_assert_eq!(pab, pa.compose(&pb));
    }
}
