//! The word sequence `w_n`, the last-entry formula for `xⁿ g x⁻ⁿ`, and the
//! depth witnesses showing that `G(C(G))` has torsion elements with
//! conjugates of unbounded depth.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::tree::{AutomatonGroup, Letter};

/// A word in the variables `t_0, t_1, …`, stored as variable indices.
pub type VarWord = Vec<usize>;

/// `w_{−1} = ε`, `w_0 = t_0`,
/// `w_{n+1} = w_n(t_0, t_0t_1, …, t_0⋯t_n) · t_0⋯t_{n+1}`.
pub fn w_sequence(n: i64) -> VarWord {
    if n < 0 {
        return Vec::new();
    }
    let mut w = vec![0];
    for m in 0..n as usize {
        let mut next: VarWord = w.iter().flat_map(|&i| 0..=i).collect();
        next.extend(0..=m + 1);
        w = next;
    }
    w
}

/// `|w_n|_{t_i}` by scanning the word.
pub fn letter_count(n: usize, i: usize) -> Result<usize> {
    if i > n {
        return Err(Error::IndexOutOfRange { index: i, len: n + 1 });
    }
    Ok(w_sequence(n as i64).iter().filter(|&&t| t == i).count())
}

/// `w(m_0, …, m_n)` as a product in `G`, read left to right.
pub fn substitute(w: &[usize], values: &[usize], g: &FiniteGroup) -> Result<usize> {
    w.iter().try_fold(g.identity(), |acc, &t| {
        let v = *values.get(t).ok_or(Error::MissingVariable { var: t })?;
        g.check_index(v)?;
        Ok(g.mul(acc, v))
    })
}

fn inverse_word(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inv()).collect()
}

/// The word of `xⁿ g x⁻ⁿ` with `g` embedded as `x · C(G)_g`.
pub fn conjugate_word(group: &AutomatonGroup, n: usize, g: usize) -> Result<Vec<Letter>> {
    group.conjugate_by_x_power(n, &group.embedded_word(g)?)
}

/// Both sides of the last-entry formula for `xⁿ g x⁻ⁿ` on `(g_0, …, g_n)`:
/// the tree action and `(g^{(−1)ⁿ})^{w_{n−1}(g_0, …, g_{n−1})} g_n`.
pub fn last_entry_sides(g: &FiniteGroup, elem: usize, tuple: &[usize]) -> Result<(usize, usize)> {
    let n = tuple.len().checked_sub(1).ok_or_else(|| Error::InvalidArgument("empty tuple".into()))?;
    let group = AutomatonGroup::cayley(g);
    let image = group.act_sequential(&conjugate_word(&group, n, elem)?, tuple);
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let w = substitute(&w_sequence(n as i64 - 1), &tuple[..n], g)?;
    let formula = g.mul(g.conj(g.pow(elem, sign), w), tuple[n]);
    Ok((image[n], formula))
}

pub fn last_entry_check(g: &FiniteGroup, elem: usize, tuple: &[usize]) -> Result<bool> {
    let (a, b) = last_entry_sides(g, elem, tuple)?;
    Ok(a == b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// A non-central element of odd order.
    OddOrder { n: u32 },
    /// A 2-subgroup of nilpotency class above 2.
    TwoGroup { n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessOutcome {
    /// The two last letters differ, so `γ_n` has the stated depth.
    Differs,
    /// Same last letter at this `n`; the argument only covers infinitely
    /// many `n`, not every one.
    NoDifferenceAtThisN,
    /// No 2-subgroup of class above 2 exists. Groups whose 2-part has
    /// class 2, such as `D4` and `Q8`, are not covered by either argument.
    ClassTwoOpenCase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaReport {
    pub theorem: Theorem,
    /// Elements used, as `(role, label)`.
    pub elements: Vec<(String, String)>,
    /// The word `γ_n` acts on, and the words compared.
    pub witness_words: Vec<Vec<usize>>,
    pub last_letters: Vec<usize>,
    pub outcome: WitnessOutcome,
    /// The depth certified when the outcome is `Differs`.
    pub depth: Option<usize>,
    /// Length of `γ_n` as a word in the generators.
    pub gamma_length: usize,
}

fn smallest_prime_factor(m: usize) -> usize {
    (2..=m).find(|p| m.is_multiple_of(*p)).unwrap_or(m)
}

fn is_power_of_two(m: usize) -> bool {
    m.is_power_of_two()
}

/// The elements `(g, h, p)` used for the odd-order argument.
pub fn odd_order_elements(g: &FiniteGroup) -> Option<(usize, usize, usize)> {
    let a = (0..g.order()).find(|&a| g.element_order(a) % 2 == 1 && !g.is_central(a))?;
    let h = (0..g.order()).filter(|&h| !g.commute(a, h)).min_by_key(|&h| (g.element_order(h), h))?;
    Some((a, h, smallest_prime_factor(g.element_order(h))))
}

/// `(g, f, h)` in a 2-subgroup with `h⁻¹ f h f⁻¹` not commuting with `g`.
pub fn two_group_triple(g: &FiniteGroup) -> Option<(usize, usize, usize)> {
    let twos: Vec<usize> =
        (0..g.order()).filter(|&a| is_power_of_two(g.element_order(a))).collect();
    for &a in &twos {
        for &f in &twos {
            for &h in &twos {
                let c = g.mul(g.mul(g.inv(h), f), g.mul(h, g.inv(f)));
                if g.commute(c, a) {
                    continue;
                }
                if is_power_of_two(g.generated_subgroup(&[a, f, h]).len()) {
                    return Some((a, f, h));
                }
            }
        }
    }
    None
}

/// Evaluates the depth witness of the selected argument on its witness
/// words only, never building a full level permutation.
pub fn gamma_depth_witness(g: &FiniteGroup, theorem: Theorem) -> Result<GammaReport> {
    if g.is_abelian() {
        return Err(Error::HypothesisNotSatisfied(format!("{} is abelian", group_name(g))));
    }
    let group = AutomatonGroup::cayley(g);
    match theorem {
        Theorem::OddOrder { n } => {
            let (a, h, p) = odd_order_elements(g).ok_or_else(|| {
                Error::HypothesisNotSatisfied("no non-central element of odd order".into())
            })?;
            let len = p.checked_pow(n).ok_or(Error::Overflow)?;
            let v = g.mul(a, g.inv(h));
            // γ_n = (x^a h x^{−a})⁻¹ v (x^a h x^{−a}) with a = pⁿ
            let conj = conjugate_word(&group, len, h)?;
            let gamma = [inverse_word(&conj), group.embedded_word(v)?, conj].concat();
            let word = vec![g.identity(); len + 1];
            let image = group.act_sequential(&gamma, &word);
            let differs = image[len] != word[len];
            Ok(GammaReport {
                theorem,
                elements: vec![
                    ("g".into(), g.label(a).into()),
                    ("h".into(), g.label(h).into()),
                    ("v".into(), g.label(v).into()),
                    ("p".into(), format!("{p}")),
                ],
                last_letters: vec![word[len], image[len]],
                witness_words: vec![word],
                outcome: if differs { WitnessOutcome::Differs } else { WitnessOutcome::NoDifferenceAtThisN },
                depth: differs.then_some(len + 1),
                gamma_length: gamma.len(),
            })
        }
        Theorem::TwoGroup { n } => {
            if n < 3 {
                return Err(Error::InvalidArgument("the two-group witness needs n ≥ 3".into()));
            }
            let Some((a, f, h)) = two_group_triple(g) else {
                return Ok(GammaReport {
                    theorem,
                    elements: Vec::new(),
                    witness_words: Vec::new(),
                    last_letters: Vec::new(),
                    outcome: WitnessOutcome::ClassTwoOpenCase,
                    depth: None,
                    gamma_length: 0,
                });
            };
            let e = g.identity();
            let mut plain = vec![e; n + 1];
            plain[n - 2] = f;
            let mut moved = plain.clone();
            moved[0] = h;
            let conj = conjugate_word(&group, n, a)?;
            let l1 = group.act_sequential(&conj, &plain)[n];
            let l2 = group.act_sequential(&conj, &moved)[n];
            let gamma_len = 2 * conj.len() + group.embedded_word(h)?.len();
            let differs = l1 != l2;
            Ok(GammaReport {
                theorem,
                elements: vec![
                    ("g".into(), g.label(a).into()),
                    ("f".into(), g.label(f).into()),
                    ("h".into(), g.label(h).into()),
                ],
                witness_words: vec![plain, moved],
                last_letters: vec![l1, l2],
                outcome: if differs { WitnessOutcome::Differs } else { WitnessOutcome::NoDifferenceAtThisN },
                depth: differs.then_some(n + 1),
                gamma_length: gamma_len,
            })
        }
    }
}

/// `γ_n` for the two-group argument: `xⁿ g x⁻ⁿ · h · xⁿ g⁻¹ x⁻ⁿ`.
pub fn two_group_gamma(group: &AutomatonGroup, n: usize, a: usize, h: usize) -> Result<Vec<Letter>> {
    let g = group
        .finite_group()
        .ok_or_else(|| Error::InvalidArgument("not a Cayley machine group".into()))?;
    Ok([conjugate_word(group, n, a)?, group.embedded_word(h)?, conjugate_word(group, n, g.inv(a))?]
        .concat())
}

fn group_name(g: &FiniteGroup) -> String {
    format!("group of order {}", g.order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{builtin, cyclic, dihedral, quaternion, symmetric3};
    use crate::machines::words_of_length;
    use crate::tree::Depth;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn first_words() {
        assert!(w_sequence(-1).is_empty());
        assert_eq!(w_sequence(0), vec![0]);
        assert_eq!(w_sequence(1), vec![0, 0, 1]);
        assert_eq!(w_sequence(2), vec![0, 0, 0, 1, 0, 1, 2]);
        assert_eq!(w_sequence(3), vec![0, 0, 0, 0, 1, 0, 0, 1, 0, 1, 2, 0, 1, 2, 3]);
    }

    #[test]
    fn letter_counts() {
        assert_eq!(letter_count(0, 0).unwrap(), 1);
        assert_eq!(letter_count(3, 1).unwrap(), 4);
        assert_eq!(letter_count(5, 0).unwrap(), 32);
        assert!(letter_count(2, 3).is_err());
        for n in 0..=10i64 {
            assert_eq!(w_sequence(n).len(), (1 << (n + 1)) - 1);
        }
    }

    #[test]
    fn substitution() {
        let g = symmetric3();
        assert_eq!(substitute(&w_sequence(0), &[4], &g).unwrap(), 4);
        assert_eq!(substitute(&w_sequence(1), &[0, 0], &g).unwrap(), 0);
        assert_eq!(substitute(&w_sequence(1), &[1], &g), Err(Error::MissingVariable { var: 1 }));
        let vals = [1, 3, 5];
        let w = w_sequence(2);
        // right-to-left fold is an independent reading of the same product
        let rtl = w.iter().rev().fold(g.identity(), |acc, &t| g.mul(vals[t], acc));
        assert_eq!(substitute(&w, &vals, &g).unwrap(), rtl);
    }

    #[test]
    fn last_entry_base_case() {
        let g = symmetric3();
        for a in 0..6 {
            for g0 in 0..6 {
                let (lhs, rhs) = last_entry_sides(&g, a, &[g0]).unwrap();
                assert_eq!(lhs, g.mul(a, g0));
                assert_eq!(rhs, lhs);
            }
        }
    }

    #[test]
    fn last_entry_exhaustive_z2() {
        let g = cyclic(2).unwrap();
        for n in 0..=3 {
            for a in 0..2 {
                for t in words_of_length(2, n + 1) {
                    assert!(last_entry_check(&g, a, &t).unwrap());
                }
            }
        }
    }

    #[test]
    fn last_entry_random_s3() {
        let g = symmetric3();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..50 {
            let n = rng.gen_range(0..=2);
            let a = rng.gen_range(0..6);
            let t: Vec<usize> = (0..=n).map(|_| rng.gen_range(0..6)).collect();
            assert!(last_entry_check(&g, a, &t).unwrap());
        }
    }

    #[test]
    fn abelian_formula_degenerates() {
        let g = cyclic(3).unwrap();
        for t in words_of_length(3, 3) {
            for a in 0..3 {
                let (lhs, _) = last_entry_sides(&g, a, &t).unwrap();
                assert_eq!(lhs, g.mul(g.pow(a, 1), t[2]));
            }
        }
    }

    #[test]
    fn odd_order_witness_in_s3() {
        let g = symmetric3();
        let r = gamma_depth_witness(&g, Theorem::OddOrder { n: 1 }).unwrap();
        assert_eq!(r.outcome, WitnessOutcome::Differs);
        assert_eq!(r.depth, Some(3));
        assert_eq!(r.elements[3].1, "2");
        // the product machine agrees on the exact depth
        let group = AutomatonGroup::cayley(&g);
        let (a, h, _) = odd_order_elements(&g).unwrap();
        let conj = conjugate_word(&group, 2, h).unwrap();
        let v = g.mul(a, g.inv(h));
        let gamma = [inverse_word(&conj), group.embedded_word(v).unwrap(), conj].concat();
        assert_eq!(group.element(gamma).unwrap().depth(6), Depth::Exactly(3));
    }

    #[test]
    fn odd_order_witness_deeper() {
        let g = symmetric3();
        for n in 2..=4 {
            let r = gamma_depth_witness(&g, Theorem::OddOrder { n }).unwrap();
            assert_eq!(r.depth, Some((1 << n) + 1));
        }
    }

    #[test]
    fn hypotheses() {
        assert!(matches!(
            gamma_depth_witness(&cyclic(2).unwrap(), Theorem::OddOrder { n: 1 }),
            Err(Error::HypothesisNotSatisfied(_))
        ));
        assert!(matches!(
            gamma_depth_witness(&quaternion(), Theorem::OddOrder { n: 1 }),
            Err(Error::HypothesisNotSatisfied(_))
        ));
        for g in [dihedral(4).unwrap(), quaternion()] {
            let r = gamma_depth_witness(&g, Theorem::TwoGroup { n: 4 }).unwrap();
            assert_eq!(r.outcome, WitnessOutcome::ClassTwoOpenCase);
        }
    }

    #[test]
    fn two_group_witness_in_d8() {
        let g = builtin("D8").unwrap();
        let (a, _, h) = two_group_triple(&g).unwrap();
        let group = AutomatonGroup::cayley(&g);
        for n in 3..=7 {
            let r = gamma_depth_witness(&g, Theorem::TwoGroup { n }).unwrap();
            if g.pow(h, 1 << (n - 1)) == g.identity() {
                assert_eq!(r.outcome, WitnessOutcome::Differs, "n={n}");
                assert_eq!(r.depth, Some(n + 1));
                // γ_n moves the image of the plain word at position n
                let gamma = two_group_gamma(&group, n, a, h).unwrap();
                let conj = conjugate_word(&group, n, a).unwrap();
                let base = group.act_sequential(&conj, &r.witness_words[0]);
                assert_ne!(group.act_sequential(&gamma, &base)[n], base[n]);
            }
        }
    }
}
