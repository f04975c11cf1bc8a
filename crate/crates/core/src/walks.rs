//! Exact simple random walks on the lamplighter group `G ≀ ℤ`.
//!
//! Elements are pairs `(f, m)` of a finitely supported lamp configuration
//! `f: ℤ → G` and a shift `m`, multiplied by
//! `(f₁, m₁)(f₂, m₂) = (f₁ · shiftᵐ¹ f₂, m₁ + m₂)` with
//! `(shiftᵐ f)(i) = f(i − m)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;

/// Largest number of words per half walk.
pub const WORD_BUDGET: u128 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WreathElement {
    pub shift: i64,
    /// Non-identity lamps only, keyed by position.
    lamps: BTreeMap<i64, usize>,
}

impl WreathElement {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn shift_by(m: i64) -> Self {
        WreathElement { shift: m, lamps: BTreeMap::new() }
    }

    /// The configuration with lamp `g` at `pos` and the given shift.
    pub fn lamp(g: &FiniteGroup, pos: i64, value: usize, shift: i64) -> Self {
        let mut lamps = BTreeMap::new();
        if value != g.identity() {
            lamps.insert(pos, value);
        }
        WreathElement { shift, lamps }
    }

    pub fn lamps(&self) -> &BTreeMap<i64, usize> {
        &self.lamps
    }

    pub fn lamp_at(&self, g: &FiniteGroup, pos: i64) -> usize {
        self.lamps.get(&pos).copied().unwrap_or(g.identity())
    }

    pub fn is_identity(&self) -> bool {
        self.shift == 0 && self.lamps.is_empty()
    }

    pub fn inverse(&self, g: &FiniteGroup) -> Self {
        // (f, m)⁻¹ = (shift^{−m} f⁻¹, −m)
        let lamps = self.lamps.iter().map(|(&i, &v)| (i - self.shift, g.inv(v))).collect();
        WreathElement { shift: -self.shift, lamps }
    }
}

pub fn wreath_multiply(g: &FiniteGroup, a: &WreathElement, b: &WreathElement) -> WreathElement {
    let mut lamps = a.lamps.clone();
    for (&i, &v) in &b.lamps {
        let pos = i + a.shift;
        let cur = lamps.get(&pos).copied().unwrap_or(g.identity());
        let prod = g.mul(cur, v);
        if prod == g.identity() {
            lamps.remove(&pos);
        } else {
            lamps.insert(pos, prod);
        }
    }
    WreathElement { shift: a.shift + b.shift, lamps }
}

/// The symmetric generating set `{t g_i} ∪ {g_i t⁻¹}`, each with
/// probability `1/(2n)`.
pub fn step_distribution(g: &FiniteGroup) -> Vec<(WreathElement, BigRational)> {
    let p = BigRational::new(BigInt::from(1), BigInt::from(2 * g.order()));
    let forward = (0..g.order()).map(|a| WreathElement::lamp(g, 1, a, 1));
    let backward = (0..g.order()).map(|a| WreathElement::lamp(g, 0, a, -1));
    forward.chain(backward).map(|e| (e, p.clone())).collect()
}

fn generators(g: &FiniteGroup) -> Vec<WreathElement> {
    step_distribution(g).into_iter().map(|(e, _)| e).collect()
}

/// Number of words of each length `0..=len` reaching each element.
pub fn word_counts(g: &FiniteGroup, len: usize) -> Result<Vec<BTreeMap<WreathElement, u128>>> {
    let s = 2 * g.order() as u128;
    if s.checked_pow(len as u32).is_none_or(|w| w > WORD_BUDGET) {
        return Err(Error::BudgetExceeded(format!("(2·{})^{len} walk words", g.order())));
    }
    let gens = generators(g);
    let mut layers = Vec::with_capacity(len + 1);
    let mut current = BTreeMap::from([(WreathElement::identity(), 1u128)]);
    for _ in 0..len {
        let mut next: BTreeMap<WreathElement, u128> = BTreeMap::new();
        for (e, &c) in &current {
            for s in &gens {
                *next.entry(wreath_multiply(g, e, s)).or_default() += c;
            }
        }
        layers.push(current);
        current = next;
    }
    layers.push(current);
    Ok(layers)
}

/// The exact law of the walk after `m` steps.
pub fn walk_distribution(g: &FiniteGroup, m: usize) -> Result<BTreeMap<WreathElement, BigRational>> {
    let counts = word_counts(g, m)?.pop().expect("layer m exists");
    let denom = BigInt::from(2 * g.order()).pow(m as u32);
    Ok(counts.into_iter().map(|(e, c)| (e, BigRational::new(c.into(), denom.clone()))).collect())
}

/// `p_m(1)` for `m = 0..=m_max`, splitting each walk at its midpoint:
/// `N_m(1) = Σ_x N_a(x) N_b(x⁻¹)` with `a + b = m`.
pub fn kesten_moments(g: &FiniteGroup, m_max: usize) -> Result<Vec<BigRational>> {
    let layers = word_counts(g, m_max.div_ceil(2))?;
    let s = BigInt::from(2 * g.order());
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let (a, b) = (m.div_ceil(2), m / 2);
        let mut returns = BigInt::from(0);
        for (x, &ca) in &layers[a] {
            if let Some(&cb) = layers[b].get(&x.inverse(g)) {
                returns += BigInt::from(ca) * BigInt::from(cb);
            }
        }
        out.push(BigRational::new(returns, s.pow(m as u32)));
    }
    Ok(out)
}

pub fn return_probability(g: &FiniteGroup, m: usize) -> Result<BigRational> {
    Ok(kesten_moments(g, m)?.pop().expect("m + 1 entries"))
}

/// Fraction of `samples` sampled walks of length `m` that return; `pick`
/// must yield generator indices in `0..2n`.
pub fn monte_carlo_return(g: &FiniteGroup, m: usize, samples: usize, mut pick: impl FnMut() -> usize) -> f64 {
    let gens = generators(g);
    let hits = (0..samples)
        .filter(|_| {
            let mut e = WreathElement::identity();
            for _ in 0..m {
                e = wreath_multiply(g, &e, &gens[pick() % gens.len()]);
            }
            e.is_identity()
        })
        .count();
    hits as f64 / samples.max(1) as f64
}
