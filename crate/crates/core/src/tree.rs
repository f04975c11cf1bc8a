//! Elements of automata groups acting on the rooted tree `A*`.
//!
//! An element is a word in the states of a base machine and their formal
//! inverses, read as a composition of tree maps: the word `s₁ s₂ … s_m`
//! applies `s_m` first. Level-`k` words are encoded as integers in base
//! `|A|` with the first letter most significant, so restricting to level
//! `k-1` is integer division by `|A|`.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, Permutation};
use crate::machines::{
    diagonal_reachable_identity, identity_mask, invert, minimize, product_from,
    reset_inverse_machine, MachineState, MealyMachine,
};

/// Default cap on `|A|^k` for explicit level permutations.
pub const DEFAULT_LEVEL_CAP: u64 = 1 << 20;

/// `alphabet^level` as a `usize`, if within `cap`.
pub fn level_size(alphabet: usize, level: usize, cap: u64) -> Result<usize> {
    let too_large = Error::LevelTooLarge { alphabet, level, cap };
    let size = (alphabet as u64).checked_pow(level as u32).ok_or(too_large.clone())?;
    if size > cap {
        return Err(too_large);
    }
    Ok(size as usize)
}

/// Encodes a word (first letter most significant).
pub fn encode_word(alphabet: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &a| acc * alphabet + a)
}

pub fn decode_word(alphabet: usize, level: usize, mut index: usize) -> Vec<usize> {
    let mut w = vec![0; level];
    for slot in w.iter_mut().rev() {
        *slot = index % alphabet;
        index /= alphabet;
    }
    w
}

/// A generator of the automata group or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub state: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(state: usize) -> Self {
        Letter { state, inverse: false }
    }

    pub fn neg(state: usize) -> Self {
        Letter { state, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter { state: self.state, inverse: !self.inverse }
    }

    pub fn exponent(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

struct Generators {
    base: MealyMachine,
    inverse: MealyMachine,
    group: Option<FiniteGroup>,
}

/// The automata group generated by the states of a base machine.
#[derive(Clone)]
pub struct AutomatonGroup {
    inner: Arc<Generators>,
}

impl fmt::Debug for AutomatonGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AutomatonGroup")
            .field("states", &self.inner.base.state_count())
            .field("alphabet", &self.inner.base.alphabet())
            .finish()
    }
}

impl AutomatonGroup {
    pub fn new(base: MealyMachine) -> Self {
        let inverse = invert(&base);
        AutomatonGroup { inner: Arc::new(Generators { base, inverse, group: None }) }
    }

    /// The group of the Cayley machine of `g`, generated by the states
    /// `ḡ_i` of the reset machine (which compute the inverses of the Cayley
    /// machine states).
    pub fn cayley(g: &FiniteGroup) -> Self {
        let base = reset_inverse_machine(g);
        let inverse = invert(&base);
        AutomatonGroup { inner: Arc::new(Generators { base, inverse, group: Some(g.clone()) }) }
    }

    pub fn base(&self) -> &MealyMachine {
        &self.inner.base
    }

    pub fn alphabet(&self) -> usize {
        self.inner.base.alphabet()
    }

    pub fn finite_group(&self) -> Option<&FiniteGroup> {
        self.inner.group.as_ref()
    }

    fn letter_machine(&self, l: Letter) -> &MealyMachine {
        if l.inverse {
            &self.inner.inverse
        } else {
            &self.inner.base
        }
    }

    /// The symmetric generating set `{s₁,…,s_m, s₁⁻¹,…,s_m⁻¹}`.
    pub fn symmetric_generators(&self) -> Vec<Letter> {
        let m = self.inner.base.state_count();
        (0..m).map(Letter::pos).chain((0..m).map(Letter::neg)).collect()
    }

    pub fn element(&self, word: Vec<Letter>) -> Result<TreeElement> {
        TreeElement::new(self.clone(), word)
    }

    pub fn identity_element(&self) -> TreeElement {
        self.element(Vec::new()).expect("empty word is valid")
    }

    fn cayley_group(&self) -> Result<&FiniteGroup> {
        self.finite_group()
            .ok_or_else(|| Error::InvalidArgument("not the group of a Cayley machine".into()))
    }

    /// `x = ā` for the identity `a` of `G`.
    pub fn x_word(&self) -> Result<Vec<Letter>> {
        let g = self.cayley_group()?;
        Ok(vec![Letter::pos(g.identity())])
    }

    /// The copy of `g ∈ G`: `x · ḡ⁻¹`, which maps `(g₀, g₁, …)` to `(g·g₀, g₁, …)`.
    pub fn embedded_word(&self, g: usize) -> Result<Vec<Letter>> {
        let grp = self.cayley_group()?;
        grp.check_index(g)?;
        Ok(vec![Letter::pos(grp.identity()), Letter::neg(g)])
    }

    /// `x^k · w · x^{-k}`.
    pub fn conjugate_by_x_power(&self, k: usize, w: &[Letter]) -> Result<Vec<Letter>> {
        let e = self.cayley_group()?.identity();
        let mut word = vec![Letter::pos(e); k];
        word.extend_from_slice(w);
        word.extend(core::iter::repeat_n(Letter::neg(e), k));
        Ok(word)
    }

    /// Applies the word factor by factor (rightmost first), without building
    /// a product machine.
    pub fn act_sequential(&self, word: &[Letter], input: &[usize]) -> Vec<usize> {
        word.iter()
            .rev()
            .fold(input.to_vec(), |w, &l| self.letter_machine(l).act(l.state, &w))
    }

    /// Level-`k` permutations of every base state via the wreath recursion
    /// `π_{k+1}(q)(a·n^k + u) = λ_q(a)·n^k + π_k(q·a)(u)`.
    pub fn level_generator_perms(&self, level: usize, cap: u64) -> Result<Vec<Permutation>> {
        let m = &self.inner.base;
        let n = m.alphabet();
        level_size(n, level, cap)?;
        let mut perms: Vec<Vec<usize>> = vec![vec![0]; m.state_count()];
        let mut block = 1usize;
        for _ in 0..level {
            perms = (0..m.state_count())
                .map(|q| {
                    let mut img = Vec::with_capacity(n * block);
                    for a in 0..n {
                        let section = &perms[m.next(q, a)];
                        let top = m.output(q, a) * block;
                        img.extend(section.iter().map(|&u| top + u));
                    }
                    img
                })
                .collect();
            block *= n;
        }
        Ok(perms.into_iter().map(Permutation::from_images_unchecked).collect())
    }

    /// Level permutation of a word given the generator permutations.
    pub fn word_permutation(&self, word: &[Letter], gens: &[Permutation]) -> Permutation {
        let size = gens.first().map_or(1, Permutation::len);
        word.iter().fold(Permutation::identity(size), |acc, l| {
            let p = &gens[l.state];
            if l.inverse {
                acc.compose(&p.inverse())
            } else {
                acc.compose(p)
            }
        })
    }
}

/// A permutation of the `|A|^k` vertices on level `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelAction {
    pub level: usize,
    pub perm: Permutation,
}

/// Result of a bounded depth search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Exactly(usize),
    /// No depth up to and including the carried bound.
    Exceeds(usize),
}

/// An element of an automata group with its minimized product machine.
#[derive(Clone)]
pub struct TreeElement {
    group: AutomatonGroup,
    word: Vec<Letter>,
    machine: MealyMachine,
    start: usize,
}

impl fmt::Debug for TreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreeElement")
            .field("word", &self.word_string())
            .field("product_states", &self.machine.state_count())
            .finish()
    }
}

impl TreeElement {
    pub fn new(group: AutomatonGroup, word: Vec<Letter>) -> Result<Self> {
        let states = group.base().state_count();
        if let Some(bad) = word.iter().find(|l| l.state >= states) {
            return Err(Error::IndexOutOfRange { index: bad.state, len: states });
        }
        let mut acc = MealyMachine::identity(group.alphabet());
        let mut start = 0;
        for &l in &word {
            let step = product_from(&acc, start, group.letter_machine(l), l.state)?;
            let (min, class) = minimize(&step);
            acc = min;
            start = class[0];
        }
        Ok(TreeElement { group, word, machine: acc, start })
    }

    pub fn group(&self) -> &AutomatonGroup {
        &self.group
    }

    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    pub fn alphabet(&self) -> usize {
        self.group.alphabet()
    }

    /// The minimized product machine and the state computing this element.
    pub fn product_state(&self) -> MachineState<'_> {
        self.machine.state(self.start)
    }

    pub fn product_machine(&self) -> &MealyMachine {
        &self.machine
    }

    /// Word rendered with state labels, e.g. `0 1^-1`; `1` for the empty word.
    pub fn word_string(&self) -> String {
        render_word(&self.group, &self.word)
    }

    pub fn inverse(&self) -> Result<TreeElement> {
        let w = self.word.iter().rev().map(|l| l.inv()).collect();
        TreeElement::new(self.group.clone(), w)
    }

    /// `self ∘ other`.
    pub fn mul(&self, other: &TreeElement) -> Result<TreeElement> {
        let mut w = self.word.clone();
        w.extend_from_slice(&other.word);
        TreeElement::new(self.group.clone(), w)
    }

    pub fn act(&self, input: &[usize]) -> Vec<usize> {
        self.machine.act(self.start, input)
    }

    pub fn is_identity(&self) -> bool {
        identity_mask(&self.machine)[self.start]
    }

    /// Level permutation computed by running the product machine on every word.
    pub fn level_permutation(&self, level: usize, cap: u64) -> Result<LevelAction> {
        let n = self.alphabet();
        let size = level_size(n, level, cap)?;
        let images =
            (0..size).map(|i| encode_word(n, &self.act(&decode_word(n, level, i)))).collect();
        Ok(LevelAction { level, perm: Permutation::from_images_unchecked(images) })
    }

    /// Level permutation computed from the wreath recursion on generators.
    pub fn level_permutation_recursive(&self, level: usize, cap: u64) -> Result<LevelAction> {
        let gens = self.group.level_generator_perms(level, cap)?;
        Ok(LevelAction { level, perm: self.group.word_permutation(&self.word, &gens) })
    }

    /// Least `d ≤ k_max` such that every residual after `d` letters is the identity.
    pub fn depth(&self, k_max: usize) -> Depth {
        let ident = identity_mask(&self.machine);
        let mut current = vec![false; self.machine.state_count()];
        current[self.start] = true;
        for d in 0..=k_max {
            if current.iter().zip(&ident).all(|(&c, &i)| !c || i) {
                return Depth::Exactly(d);
            }
            let mut next = vec![false; current.len()];
            for q in (0..current.len()).filter(|&q| current[q]) {
                for a in 0..self.alphabet() {
                    next[self.machine.next(q, a)] = true;
                }
            }
            current = next;
        }
        Depth::Exceeds(k_max)
    }

    /// `|Fix_k|`, counted by a transfer matrix over diagonal transitions.
    pub fn fix_count(&self, level: usize) -> BigUint {
        let m = &self.machine;
        let mut v = vec![BigUint::zero(); m.state_count()];
        v[self.start] = BigUint::one();
        for _ in 0..level {
            let mut next = vec![BigUint::zero(); v.len()];
            for (q, count) in v.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for a in 0..m.alphabet() {
                    if m.output(q, a) == a {
                        next[m.next(q, a)] += count;
                    }
                }
            }
            v = next;
        }
        v.into_iter().sum()
    }

    /// `|Fix_k|` by enumerating all level-`k` words.
    pub fn fix_count_enumerated(&self, level: usize, cap: u64) -> Result<u64> {
        let n = self.alphabet();
        let size = level_size(n, level, cap)?;
        Ok((0..size).filter(|&i| {
            let w = decode_word(n, level, i);
            self.act(&w) == w
        }).count() as u64)
    }

    /// `|Fix_k| / n^k`.
    pub fn fixed_point_character(&self, level: usize) -> BigRational {
        let denom = BigUint::from(self.alphabet()).pow(level as u32);
        BigRational::new(self.fix_count(level).into(), denom.into())
    }

    /// `|Fix_k| / n^k` for `k = 0..=k_max`.
    pub fn fix_measure_profile(&self, k_max: usize) -> Vec<BigRational> {
        (0..=k_max).map(|k| self.fixed_point_character(k)).collect()
    }

    /// Shortest fixed word whose residual is trivial (interior of `Fix`).
    pub fn interior_witness(&self) -> Option<Vec<usize>> {
        diagonal_reachable_identity(self.product_state())
    }

    /// Smallest `p` such that every non-identity residual reachable along
    /// fixed words moves some word of length `p`. `None` if the fixed set has
    /// interior.
    pub fn decay_period(&self) -> Option<usize> {
        let m = &self.machine;
        let ident = identity_mask(m);
        let reach = diagonal_closure(m, self.start);
        if reach.iter().any(|&q| ident[q]) {
            return None;
        }
        reach.iter().map(|&q| moving_level(m, q)).max()
    }
}

fn render_word(group: &AutomatonGroup, word: &[Letter]) -> String {
    use core::fmt::Write;
    if word.is_empty() {
        return String::from("1");
    }
    let mut s = String::new();
    for (i, l) in word.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        match group.base().labels() {
            Some(labels) => s.push_str(&labels[l.state]),
            None => {
                let _ = write!(s, "q{}", l.state);
            }
        }
        if l.inverse {
            s.push_str("^-1");
        }
    }
    s
}

/// States reachable from `q` along transitions on fixed letters.
fn diagonal_closure(m: &MealyMachine, q: usize) -> Vec<usize> {
    let mut seen = vec![false; m.state_count()];
    let mut stack = vec![q];
    seen[q] = true;
    let mut out = Vec::new();
    while let Some(s) = stack.pop() {
        out.push(s);
        for a in (0..m.alphabet()).filter(|&a| m.output(s, a) == a) {
            let r = m.next(s, a);
            if !seen[r] {
                seen[r] = true;
                stack.push(r);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Length of the shortest word moved by the non-identity state `q`.
fn moving_level(m: &MealyMachine, q: usize) -> usize {
    let mut dist = vec![usize::MAX; m.state_count()];
    let mut queue = VecDeque::from([q]);
    dist[q] = 0;
    while let Some(s) = queue.pop_front() {
        if !m.is_locally_trivial(s) {
            return dist[s] + 1;
        }
        for a in 0..m.alphabet() {
            let r = m.next(s, a);
            if dist[r] == usize::MAX {
                dist[r] = dist[s] + 1;
                queue.push_back(r);
            }
        }
    }
    unreachable!("moving_level called on an identity state")
}

/// Classification of one element in a freeness report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedSetKind {
    /// `Fix` is nowhere dense; `|Fix_{pk}| ≤ (n^p − 1)^k` was checked for
    /// every `k` with `pk ≤ k_max`.
    MeasureZero { period: usize, checked_levels: Vec<usize>, bound_holds: bool },
    /// `Fix` contains the cylinder of `witness`.
    Interior { witness: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct ElementVerdict {
    pub word: Vec<Letter>,
    pub word_string: String,
    pub kind: FixedSetKind,
    /// `|Fix_k|/n^k` for `k = 0..=k_max`.
    pub profile: Vec<BigRational>,
}

#[derive(Debug, Clone)]
pub struct FreenessReport {
    pub word_len_max: usize,
    pub k_max: usize,
    pub words_tested: usize,
    /// Freely reduced words that nevertheless represent the identity.
    pub identity_words: usize,
    pub elements: Vec<ElementVerdict>,
}

impl FreenessReport {
    /// Free on the tested ball: every non-identity element has a nowhere
    /// dense fixed set and the decay bound held wherever checked.
    pub fn free_on_ball(&self) -> bool {
        self.elements.iter().all(|e| {
            matches!(e.kind, FixedSetKind::MeasureZero { bound_holds: true, .. })
        })
    }
}

/// Freely reduced words of length `1..=max_len` over `generators`.
pub fn reduced_words(generators: &[Letter], max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &g in generators {
                if w.last().is_some_and(|&l| l == g.inv()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Classifies every non-identity element of the ball of radius
/// `word_len_max` (in freely reduced words over `generators`).
pub fn freeness_report(
    group: &AutomatonGroup,
    generators: &[Letter],
    word_len_max: usize,
    k_max: usize,
) -> Result<FreenessReport> {
    let n = group.alphabet() as u32;
    let words = reduced_words(generators, word_len_max);
    let mut report = FreenessReport {
        word_len_max,
        k_max,
        words_tested: words.len(),
        identity_words: 0,
        elements: Vec::new(),
    };
    for w in words {
        let e = group.element(w)?;
        if e.is_identity() {
            report.identity_words += 1;
            continue;
        }
        let kind = match e.interior_witness() {
            Some(witness) => FixedSetKind::Interior { witness },
            None => {
                let period = e.decay_period().expect("no interior implies a decay period");
                let per_block = BigUint::from(n).pow(period as u32) - 1u32;
                let checked_levels: Vec<usize> =
                    (0..).map(|k| k * period).take_while(|&l| l <= k_max).collect();
                let bound_holds = checked_levels
                    .iter()
                    .enumerate()
                    .all(|(k, &l)| e.fix_count(l) <= per_block.pow(k as u32));
                FixedSetKind::MeasureZero { period, checked_levels, bound_holds }
            }
        };
        report.elements.push(ElementVerdict {
            word_string: e.word_string(),
            profile: e.fix_measure_profile(k_max),
            word: e.word,
            kind,
        });
    }
    Ok(report)
}
