//! Invertible Mealy automata over the alphabet `0..n`.
//!
//! A state `q` computes the length-preserving map
//! `q∘(a u) = (q∘a) ((q·a)∘u)`; words are slices of letter indices.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyMachine {
    alphabet: usize,
    /// `transition[q * alphabet + a]`
    transition: Vec<usize>,
    /// `output[q * alphabet + a]`
    output: Vec<usize>,
    labels: Option<Vec<String>>,
}

/// A machine together with a designated start state.
#[derive(Debug, Clone, Copy)]
pub struct MachineState<'a> {
    pub machine: &'a MealyMachine,
    pub state: usize,
}

impl MealyMachine {
    /// Builds a machine from per-state rows, rejecting non-total or
    /// non-invertible tables.
    pub fn new(alphabet: usize, transition: Vec<Vec<usize>>, output: Vec<Vec<usize>>) -> Result<Self> {
        if transition.len() != output.len() {
            return Err(Error::InvalidArgument("transition/output state counts differ".into()));
        }
        let states = transition.len();
        if states == 0 {
            return Err(Error::InvalidArgument("machine needs at least one state".into()));
        }
        let mut t = Vec::with_capacity(states * alphabet);
        let mut o = Vec::with_capacity(states * alphabet);
        for (q, (trow, orow)) in transition.iter().zip(&output).enumerate() {
            if trow.len() != alphabet || orow.len() != alphabet {
                return Err(Error::InvalidArgument(alloc::format!(
                    "state {q} rows must have {alphabet} entries"
                )));
            }
            for (&next, &out) in trow.iter().zip(orow) {
                if next >= states {
                    return Err(Error::IndexOutOfRange { index: next, len: states });
                }
                if out >= alphabet {
                    return Err(Error::IndexOutOfRange { index: out, len: alphabet });
                }
            }
            t.extend_from_slice(trow);
            o.extend_from_slice(orow);
        }
        let m = MealyMachine { alphabet, transition: t, output: o, labels: None };
        m.check_invertible()?;
        Ok(m)
    }

    fn from_raw(alphabet: usize, transition: Vec<usize>, output: Vec<usize>) -> Self {
        let m = MealyMachine { alphabet, transition, output, labels: None };
        debug_assert!(m.check_invertible().is_ok());
        m
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.state_count());
        self.labels = Some(labels);
        self
    }

    /// The one-state machine computing the identity on `alphabet`.
    pub fn identity(alphabet: usize) -> Self {
        Self::from_raw(alphabet, vec![0; alphabet], (0..alphabet).collect())
    }

    fn check_invertible(&self) -> Result<()> {
        for q in 0..self.state_count() {
            let mut seen = vec![false; self.alphabet];
            for a in 0..self.alphabet {
                let b = self.output(q, a);
                if seen[b] {
                    return Err(Error::NotInvertible { state: q });
                }
                seen[b] = true;
            }
        }
        Ok(())
    }

    #[inline]
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    #[inline]
    pub fn state_count(&self) -> usize {
        self.transition.len() / self.alphabet.max(1)
    }

    #[inline]
    pub fn next(&self, q: usize, a: usize) -> usize {
        self.transition[q * self.alphabet + a]
    }

    #[inline]
    pub fn output(&self, q: usize, a: usize) -> usize {
        self.output[q * self.alphabet + a]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn transition_rows(&self) -> Vec<Vec<usize>> {
        self.transition.chunks(self.alphabet).map(<[usize]>::to_vec).collect()
    }

    pub fn output_rows(&self) -> Vec<Vec<usize>> {
        self.output.chunks(self.alphabet).map(<[usize]>::to_vec).collect()
    }

    pub fn state(&self, q: usize) -> MachineState<'_> {
        assert!(q < self.state_count(), "state {q} out of range");
        MachineState { machine: self, state: q }
    }

    /// Whether `q` outputs every letter unchanged (level-1 triviality).
    pub fn is_locally_trivial(&self, q: usize) -> bool {
        (0..self.alphabet).all(|a| self.output(q, a) == a)
    }

    /// Image of `word` under state `q`.
    pub fn act(&self, q: usize, word: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(word.len());
        let mut s = q;
        for &a in word {
            out.push(self.output(s, a));
            s = self.next(s, a);
        }
        out
    }

    /// State reached from `q` after reading `word`.
    pub fn run(&self, q: usize, word: &[usize]) -> usize {
        word.iter().fold(q, |s, &a| self.next(s, a))
    }
}

impl MachineState<'_> {
    pub fn act(&self, word: &[usize]) -> Vec<usize> {
        self.machine.act(self.state, word)
    }
}

/// The Cayley machine: in state `s` on input `g` go to `s·g` and output `s·g`.
pub fn cayley_machine(g: &FiniteGroup) -> MealyMachine {
    let n = g.order();
    let mut t = Vec::with_capacity(n * n);
    for s in 0..n {
        for a in 0..n {
            t.push(g.mul(s, a));
        }
    }
    MealyMachine::from_raw(n, t.clone(), t).with_labels(g.labels().to_vec())
}

/// The reset machine computing inverses of Cayley machine states: in state
/// `s` on input `g` go to `g` and output `s⁻¹·g`.
pub fn reset_inverse_machine(g: &FiniteGroup) -> MealyMachine {
    let n = g.order();
    let mut t = Vec::with_capacity(n * n);
    let mut o = Vec::with_capacity(n * n);
    for s in 0..n {
        for a in 0..n {
            t.push(a);
            o.push(g.mul(g.inv(s), a));
        }
    }
    MealyMachine::from_raw(n, t, o).with_labels(g.labels().to_vec())
}

/// Whether every input letter sends all states to one common state.
pub fn is_reset(m: &MealyMachine) -> bool {
    (0..m.alphabet()).all(|a| (0..m.state_count()).all(|q| m.next(q, a) == m.next(0, a)))
}

/// The machine whose state `q` computes the inverse tree map of `m`'s state `q`.
pub fn invert(m: &MealyMachine) -> MealyMachine {
    let n = m.alphabet();
    let mut t = vec![0; m.transition.len()];
    let mut o = vec![0; m.output.len()];
    for q in 0..m.state_count() {
        for a in 0..n {
            let b = m.output(q, a);
            // reading b, the inverse outputs a and follows the original edge
            o[q * n + b] = a;
            t[q * n + b] = m.next(q, a);
        }
    }
    let mut inv = MealyMachine::from_raw(n, t, o);
    inv.labels = m.labels.clone();
    inv
}

/// Full product: state `q1 * |Q2| + q2` computes `M1_{q1} ∘ M2_{q2}`
/// (apply `M2` first).
pub fn product(m1: &MealyMachine, m2: &MealyMachine) -> Result<MealyMachine> {
    if m1.alphabet() != m2.alphabet() {
        return Err(Error::AlphabetMismatch { left: m1.alphabet(), right: m2.alphabet() });
    }
    let n = m1.alphabet();
    let (s1, s2) = (m1.state_count(), m2.state_count());
    let mut t = Vec::with_capacity(s1 * s2 * n);
    let mut o = Vec::with_capacity(s1 * s2 * n);
    for q1 in 0..s1 {
        for q2 in 0..s2 {
            for a in 0..n {
                let b = m2.output(q2, a);
                o.push(m1.output(q1, b));
                t.push(m1.next(q1, b) * s2 + m2.next(q2, a));
            }
        }
    }
    Ok(MealyMachine::from_raw(n, t, o))
}

/// Product restricted to pairs reachable from `(q1, q2)`; the start pair is
/// state 0 of the result.
pub fn product_from(
    m1: &MealyMachine,
    q1: usize,
    m2: &MealyMachine,
    q2: usize,
) -> Result<MealyMachine> {
    if m1.alphabet() != m2.alphabet() {
        return Err(Error::AlphabetMismatch { left: m1.alphabet(), right: m2.alphabet() });
    }
    let n = m1.alphabet();
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut pairs = vec![(q1, q2)];
    index.insert((q1, q2), 0);
    let mut t = Vec::new();
    let mut o = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p1, p2) = pairs[i];
        for a in 0..n {
            let b = m2.output(p2, a);
            o.push(m1.output(p1, b));
            let succ = (m1.next(p1, b), m2.next(p2, a));
            let id = *index.entry(succ).or_insert_with(|| {
                pairs.push(succ);
                pairs.len() - 1
            });
            t.push(id);
        }
        i += 1;
    }
    Ok(MealyMachine::from_raw(n, t, o))
}

/// Moore-style partition refinement: merges states with identical actions.
/// Returns the minimized machine and the class of every original state.
pub fn minimize(m: &MealyMachine) -> (MealyMachine, Vec<usize>) {
    let n = m.alphabet();
    let states = m.state_count();
    // initial partition by level-1 output map
    let mut class = relabel(
        (0..states).map(|q| (0..n).map(|a| m.output(q, a)).collect::<Vec<_>>()).collect(),
    );
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..states)
            .map(|q| (class[q], (0..n).map(|a| class[m.next(q, a)]).collect()))
            .collect();
        let refined = relabel(sigs);
        let stable = count_classes(&refined) == count_classes(&class);
        class = refined;
        if stable {
            break;
        }
    }
    let k = count_classes(&class);
    let mut rep = vec![usize::MAX; k];
    for q in 0..states {
        if rep[class[q]] == usize::MAX {
            rep[class[q]] = q;
        }
    }
    let mut t = Vec::with_capacity(k * n);
    let mut o = Vec::with_capacity(k * n);
    for &q in &rep {
        for a in 0..n {
            t.push(class[m.next(q, a)]);
            o.push(m.output(q, a));
        }
    }
    (MealyMachine::from_raw(n, t, o), class)
}

/// Assigns class ids in order of first appearance.
fn relabel<K: Ord>(keys: Vec<K>) -> Vec<usize> {
    let mut ids: BTreeMap<K, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(keys.len());
    for key in keys {
        let next = ids.len();
        out.push(*ids.entry(key).or_insert(next));
    }
    out
}

fn count_classes(class: &[usize]) -> usize {
    class.iter().copied().max().map_or(0, |m| m + 1)
}

/// Marks the states computing the identity on all words: the greatest set of
/// locally trivial states closed under transitions.
pub fn identity_mask(m: &MealyMachine) -> Vec<bool> {
    let mut ident: Vec<bool> = (0..m.state_count()).map(|q| m.is_locally_trivial(q)).collect();
    loop {
        let mut changed = false;
        for q in 0..m.state_count() {
            if ident[q] && (0..m.alphabet()).any(|a| !ident[m.next(q, a)]) {
                ident[q] = false;
                changed = true;
            }
        }
        if !changed {
            return ident;
        }
    }
}

/// The states of `m` computing the identity map, in increasing order.
pub fn identity_states(m: &MealyMachine) -> Vec<usize> {
    identity_mask(m).iter().enumerate().filter_map(|(q, &id)| id.then_some(q)).collect()
}

/// Shortest word `u` fixed by `s` whose residual state `s·u` is the identity,
/// if any. Such a `u` means `s` fixes the whole cylinder `u A^ω`.
pub fn diagonal_reachable_identity(s: MachineState<'_>) -> Option<Vec<usize>> {
    let m = s.machine;
    let ident = identity_mask(m);
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; m.state_count()];
    let mut seen = vec![false; m.state_count()];
    let mut queue = VecDeque::from([s.state]);
    seen[s.state] = true;
    while let Some(q) = queue.pop_front() {
        if ident[q] {
            let mut word = Vec::new();
            let mut cur = q;
            while let Some((prev, a)) = parent[cur] {
                word.push(a);
                cur = prev;
            }
            word.reverse();
            return Some(word);
        }
        for a in 0..m.alphabet() {
            if m.output(q, a) == a {
                let r = m.next(q, a);
                if !seen[r] {
                    seen[r] = true;
                    parent[r] = Some((q, a));
                    queue.push_back(r);
                }
            }
        }
    }
    None
}

/// Whether two initial machines compute the same map on all words.
pub fn action_equivalent(a: MachineState<'_>, b: MachineState<'_>) -> Result<bool> {
    let (m1, m2) = (a.machine, b.machine);
    if m1.alphabet() != m2.alphabet() {
        return Err(Error::AlphabetMismatch { left: m1.alphabet(), right: m2.alphabet() });
    }
    let mut seen = alloc::collections::BTreeSet::new();
    let mut stack = vec![(a.state, b.state)];
    seen.insert((a.state, b.state));
    while let Some((p, q)) = stack.pop() {
        for x in 0..m1.alphabet() {
            if m1.output(p, x) != m2.output(q, x) {
                return Ok(false);
            }
            let succ = (m1.next(p, x), m2.next(q, x));
            if seen.insert(succ) {
                stack.push(succ);
            }
        }
    }
    Ok(true)
}

/// All words of length `len` over `0..alphabet`, first letter most significant.
pub fn words_of_length(alphabet: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = alphabet.checked_pow(len as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut idx| {
        let mut w = vec![0; len];
        for slot in w.iter_mut().rev() {
            *slot = idx % alphabet;
            idx /= alphabet;
        }
        w
    })
}
