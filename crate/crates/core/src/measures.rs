//! Atomic spectral measures: the KNS measure of the Schreier graphs, the
//! finite-level eigenvalue frequency measures, their distribution functions
//! and moments.
//!
//! Atoms are stored once with an exact label. The same object is read in
//! two coordinates: `λ = cos z` on `[−1, 1]` and `z/π` on `[0, 1]`.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::spectra::{adjacency_matrix, closed_form_spectrum, AtomLabel};
use crate::tree::{AutomatonGroup, Letter};

fn ratio(p: impl Into<BigInt>, q: impl Into<BigInt>) -> BigRational {
    BigRational::new(p.into(), q.into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureAtom {
    pub label: AtomLabel,
    /// `cos(pπ/q)`; derived from `label`.
    pub position: f64,
    pub weight: BigRational,
}

/// A finite atomic measure, possibly a truncation of an infinite one with a
/// bound on the omitted mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    /// Sorted by increasing `z = arccos λ`, i.e. decreasing position.
    atoms: Vec<MeasureAtom>,
    q_max: Option<usize>,
    tail: BigRational,
}

/// A closed interval `[lower, upper]` of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl Enclosure {
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }
}

/// A float estimate with an absolute error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn contains(&self, x: f64) -> bool {
        (self.value - x).abs() <= self.error
    }
}

fn z_cmp(a: AtomLabel, b: AtomLabel) -> Ordering {
    let (p1, q1) = a.z_fraction();
    let (p2, q2) = b.z_fraction();
    (p1 as u128 * q2 as u128).cmp(&(p2 as u128 * q1 as u128))
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(AtomLabel, BigRational)>, q_max: Option<usize>, tail: BigRational) -> Self {
        let mut atoms: Vec<MeasureAtom> = atoms
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(label, weight)| MeasureAtom { label, position: label.value(), weight })
            .collect();
        atoms.sort_by(|a, b| z_cmp(a.label, b.label));
        DiscreteMeasure { atoms, q_max, tail }
    }

    pub fn atoms(&self) -> &[MeasureAtom] {
        &self.atoms
    }

    pub fn q_max(&self) -> Option<usize> {
        self.q_max
    }

    /// Upper bound on the mass of omitted atoms.
    pub fn tail(&self) -> &BigRational {
        &self.tail
    }

    pub fn stored_mass(&self) -> BigRational {
        self.atoms.iter().map(|a| &a.weight).sum()
    }

    pub fn weight_of(&self, label: AtomLabel) -> BigRational {
        self.atoms.iter().find(|a| a.label == label).map_or_else(BigRational::zero, |a| a.weight.clone())
    }

    /// `σ([0, x])` in the `z/π` coordinate.
    pub fn cdf_z(&self, x: f64) -> Enclosure {
        let x = BigRational::from_float(x).unwrap_or_else(|| {
            if x > 0.0 { BigRational::from_integer(2.into()) } else { ratio(-1, 1) }
        });
        let lower: BigRational = self
            .atoms
            .iter()
            .filter(|a| {
                let (p, q) = a.label.z_fraction();
                ratio(p, q) <= x
            })
            .map(|a| &a.weight)
            .sum();
        Enclosure { upper: &lower + &self.tail, lower }
    }

    /// `μ([−1, x])` in the eigenvalue coordinate.
    pub fn cdf_lambda(&self, x: f64) -> Enclosure {
        let lower: BigRational =
            self.atoms.iter().filter(|a| a.position <= x).map(|a| &a.weight).sum();
        Enclosure { upper: &lower + &self.tail, lower }
    }

    /// `∫ λʲ dμ`. Atoms at `±c` with equal weight are summed as a pair, so
    /// odd moments of symmetric measures come out as exactly `0`.
    pub fn moment(&self, j: u32) -> Estimate {
        let mut value = 0.0;
        let mut terms = 0usize;
        for a in &self.atoms {
            let w = a.weight.to_f64().unwrap_or(f64::NAN);
            match a.label {
                AtomLabel::Frac { p, q } if 2 * p < q => {
                    let partner = self.weight_of(AtomLabel::Frac { p: q - p, q });
                    if partner == a.weight {
                        let c = a.position;
                        value += w * (libm::pow(c, j as f64) + libm::pow(-c, j as f64));
                    } else {
                        value += w * libm::pow(a.position, j as f64);
                    }
                }
                AtomLabel::Frac { p, q } if 2 * p > q => {
                    if self.weight_of(AtomLabel::Frac { p: q - p, q }) != a.weight {
                        value += w * libm::pow(a.position, j as f64);
                    }
                }
                _ => value += w * libm::pow(a.position, j as f64),
            }
            terms += 1;
        }
        let slack = 4.0 * f64::EPSILON * (terms as f64 + 1.0) * (j as f64 + 1.0);
        Estimate { value, error: self.tail.to_f64().unwrap_or(f64::INFINITY) + slack }
    }
}

/// Euler's totient.
pub fn totient(q: u64) -> u64 {
    let mut n = q;
    let mut out = q;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// `φ_x(q) = #{1 ≤ p ≤ xq : gcd(p, q) = 1}`.
pub fn phi_x(q: u64, x: &BigRational) -> u64 {
    (1..=q).filter(|&p| p.gcd(&q) == 1 && ratio(p, 1) <= x * ratio(q, 1)).count() as u64
}

/// `(n−1)² / (n^q − 1)`.
pub fn kns_weight(n: usize, q: usize) -> BigRational {
    let n = BigInt::from(n);
    ratio((&n - 1u32) * (&n - 1u32), n.pow(q as u32) - 1u32)
}

/// Bound on `Σ_{q ≥ m} (n−1)² q / (n^q − 1)`, from `n^q − 1 ≥ n^q (1 − n^{−m})`
/// and the closed form of `Σ q n^{−q}`: `n(nm − m + 1) / (n^m − 1)`.
pub fn kns_tail_bound(n: usize, m: usize) -> BigRational {
    let nb = BigInt::from(n);
    let mb = BigInt::from(m);
    ratio(&nb * (&nb * &mb - &mb + 1u32), nb.pow(m as u32) - 1u32)
}

/// The KNS measure truncated at `q ≤ q_max`.
pub fn kns_measure(n: usize, q_max: usize) -> Result<DiscreteMeasure> {
    if n < 2 {
        return Err(Error::InvalidArgument("KNS measure needs n ≥ 2".into()));
    }
    if q_max < 2 {
        return Err(Error::InvalidArgument("q_max must be at least 2".into()));
    }
    let mut atoms = Vec::new();
    for q in 2..=q_max {
        let w = kns_weight(n, q);
        for p in (1..q).filter(|p| p.gcd(&q) == 1) {
            atoms.push((AtomLabel::Frac { p: p as u64, q: q as u64 }, w.clone()));
        }
    }
    Ok(DiscreteMeasure::new(atoms, Some(q_max), kns_tail_bound(n, q_max + 1)))
}

/// The eigenvalue frequency measure of `M_k` for a group of order `n`.
pub fn level_measure(n: usize, k: usize) -> Result<DiscreteMeasure> {
    let spec = closed_form_spectrum(n, k)?;
    let total = BigInt::from(spec.total_multiplicity());
    let atoms = spec.atoms.iter().map(|a| (a.label, ratio(a.multiplicity, total.clone()))).collect();
    Ok(DiscreteMeasure::new(atoms, None, BigRational::zero()))
}

/// `tr(M_k^j) / n^k` for `j = 0..=j_max`, exactly.
pub fn level_moments(g: &FiniteGroup, k: usize, j_max: usize, cap: u64) -> Result<Vec<BigRational>> {
    let a = adjacency_matrix(g, k, cap)?;
    let dim = BigInt::from(a.dim());
    let deg = BigInt::from(2 * g.order());
    Ok(a.trace_powers(j_max)
        .into_iter()
        .enumerate()
        .map(|(j, t)| ratio(t, &dim * deg.pow(j as u32)))
        .collect())
}

/// `(1/|S|^m) Σ_{w ∈ S^m} |Fix_k(w)| / n^k`, counting fixed points with the
/// automaton transfer matrix of each word.
pub fn average_fixed_fraction(g: &FiniteGroup, k: usize, m: usize) -> Result<BigRational> {
    let group = AutomatonGroup::cayley(g);
    let gens = group.symmetric_generators();
    let words = (gens.len() as u128)
        .checked_pow(m as u32)
        .filter(|&c| c <= 1 << 22)
        .ok_or_else(|| Error::BudgetExceeded(alloc::format!("|S|^{m} words")))?;
    let mut total = BigUint::zero();
    let mut word: Vec<Letter> = vec![gens[0]; m];
    for idx in 0..words {
        let mut r = idx;
        for slot in word.iter_mut() {
            *slot = gens[(r % gens.len() as u128) as usize];
            r /= gens.len() as u128;
        }
        total += group.element(word.clone())?.fix_count(k);
    }
    let denom = BigUint::from(g.order()).pow(k as u32) * BigUint::from(words);
    Ok(BigRational::new(total.into(), denom.into()))
}

/// `(n−1)² Σ_{q=2}^{Q} φ(q) / (n^q − 1)` with a bound on the remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSum {
    pub value: BigRational,
    pub tail: BigRational,
}

pub fn euler_phi_identity_partial(n: usize, q_max: usize) -> Result<PartialSum> {
    if n < 2 {
        return Err(Error::InvalidArgument("needs n ≥ 2".into()));
    }
    let value = (2..=q_max)
        .map(|q| kns_weight(n, q) * BigRational::from_integer(totient(q as u64).into()))
        .fold(BigRational::zero(), |a, b| a + b);
    Ok(PartialSum { value, tail: kns_tail_bound(n, q_max + 1) })
}

/// `(n−1)² Σ_{q=2}^{q_max} φ_x(q) / (n^q − 1)`, the limit distribution
/// function in the `z/π` coordinate summed through `q_max`.
pub fn limit_cdf_partial(n: usize, q_max: usize, x: &BigRational) -> BigRational {
    (2..=q_max)
        .map(|q| kns_weight(n, q) * BigRational::from_integer(phi_x(q as u64, x).into()))
        .fold(BigRational::zero(), |a, b| a + b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub x: f64,
    pub level_cdf: BigRational,
    pub limit: Enclosure,
    /// Largest distance from `level_cdf` to the limit enclosure.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub n: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Grid points where the error grew from one level to the next.
    pub non_monotone: Vec<(f64, usize)>,
}

/// Fractional parts of `i·(√5 − 1)/2`, a grid avoiding rationals of small
/// denominator.
pub fn golden_grid(points: usize) -> Vec<f64> {
    let g = (libm::sqrt(5.0) - 1.0) / 2.0;
    (1..=points).map(|i| (i as f64 * g).fract()).collect()
}

/// `|F_{σ_k}(x) − F_σ(x)|` in the `z/π` coordinate for `k ≤ k_max`.
pub fn weak_convergence_report(n: usize, k_max: usize, q_max: usize, grid: &[f64]) -> Result<ConvergenceReport> {
    let limit = kns_measure(n, q_max)?;
    let mut rows = Vec::new();
    let mut non_monotone = Vec::new();
    let mut prev: Vec<f64> = vec![f64::INFINITY; grid.len()];
    for k in 0..=k_max {
        let level = level_measure(n, k)?;
        for (i, &x) in grid.iter().enumerate() {
            let fk = level.cdf_z(x).lower;
            let lim = limit.cdf_z(x);
            let e1 = (&fk - &lim.lower).to_f64().unwrap_or(f64::NAN).abs();
            let e2 = (&fk - &lim.upper).to_f64().unwrap_or(f64::NAN).abs();
            let error = e1.max(e2);
            if error > prev[i] {
                non_monotone.push((x, k));
            }
            prev[i] = error;
            rows.push(ConvergenceRow { level: k, x, level_cdf: fk, limit: lim, error });
        }
    }
    Ok(ConvergenceReport { n, rows, non_monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{builtin, cyclic};
    use crate::tree::DEFAULT_LEVEL_CAP;
    use num_traits::One;

    fn frac(p: u64, q: u64) -> AtomLabel {
        AtomLabel::Frac { p, q }
    }

    #[test]
    fn kns_weights() {
        let m = kns_measure(2, 5).unwrap();
        assert_eq!(m.weight_of(frac(1, 2)), ratio(1, 3));
        assert_eq!(m.weight_of(frac(1, 3)), ratio(1, 7));
        assert_eq!(m.weight_of(frac(2, 3)), ratio(1, 7));
        assert_eq!(kns_measure(3, 4).unwrap().weight_of(frac(1, 2)), ratio(1, 2));
        let single = kns_measure(2, 2).unwrap();
        assert_eq!(single.atoms().len(), 1);
        assert!(kns_measure(1, 5).is_err());
        assert!(kns_measure(2, 1).is_err());
    }

    #[test]
    fn tail_bound_values() {
        assert_eq!(kns_tail_bound(2, 21), ratio(44, 2097151));
        assert!(kns_tail_bound(2, 21) < ratio(1, 10000));
        assert!(kns_tail_bound(3, 16) < ratio(1, 100000));
    }

    #[test]
    fn tail_bound_dominates_remainder() {
        for n in [2usize, 3, 5] {
            for m in [3usize, 6, 10] {
                let rem: BigRational = (m..m + 60)
                    .map(|q| kns_weight(n, q) * BigRational::from_integer(totient(q as u64).into()))
                    .sum();
                assert!(rem <= kns_tail_bound(n, m));
            }
        }
    }

    #[test]
    fn level_measure_examples() {
        let m1 = level_measure(2, 1).unwrap();
        assert_eq!(m1.weight_of(AtomLabel::One), ratio(1, 2));
        assert_eq!(m1.weight_of(frac(1, 2)), ratio(1, 2));
        let m2 = level_measure(2, 2).unwrap();
        for l in [AtomLabel::One, frac(1, 2), frac(1, 3), frac(2, 3)] {
            assert_eq!(m2.weight_of(l), ratio(1, 4));
        }
        for n in 2..=5 {
            assert_eq!(level_measure(n, 0).unwrap().weight_of(AtomLabel::One), ratio(1, 1));
            for k in 0..=6 {
                assert!(level_measure(n, k).unwrap().stored_mass().is_one());
            }
        }
    }

    #[test]
    fn cdf_examples() {
        let m = kns_measure(2, 30).unwrap();
        assert!(m.cdf_z(0.0).lower.is_zero());
        assert!(m.cdf_z(1.0).contains(&ratio(1, 1)));
        assert!(m.cdf_z(0.5).contains(&ratio(2, 3)));
        // the jump at 1/3 is the q = 3 weight
        let below = m.cdf_z(1.0 / 3.0 - 1e-9).lower;
        let at = m.cdf_z(1.0 / 3.0).lower;
        // 1/3 is not a float; step just above instead
        let above = m.cdf_z(1.0 / 3.0 + 1e-12).lower;
        assert_eq!(&above - &below, ratio(1, 7));
        assert_eq!(at, below);
    }

    #[test]
    fn cdf_agrees_with_phi_x_sum() {
        let m = kns_measure(3, 12).unwrap();
        for x in golden_grid(15) {
            let exact = BigRational::from_float(x).unwrap();
            assert_eq!(m.cdf_z(x).lower, limit_cdf_partial(3, 12, &exact));
        }
    }

    #[test]
    fn phi_family() {
        for q in 2..30u64 {
            assert_eq!(phi_x(q, &ratio(1, 1)), totient(q));
            assert_eq!(phi_x(q, &BigRational::zero()), 0);
        }
        assert_eq!(phi_x(5, &ratio(1, 2)), 2);
        assert_eq!(totient(1), 1);
        assert_eq!(totient(12), 4);
        assert_eq!(totient(97), 96);
    }

    #[test]
    fn moments_of_kns() {
        let m = kns_measure(2, 40).unwrap();
        let m0 = m.moment(0);
        assert!(m0.contains(1.0));
        for j in [1, 3, 5, 7] {
            assert_eq!(m.moment(j).value, 0.0);
        }
        let m2 = m.moment(2);
        assert!((m2.value - 0.25).abs() < 1e-6);
        assert!(m2.contains(0.25));
    }

    #[test]
    fn euler_phi_partials() {
        assert_eq!(euler_phi_identity_partial(2, 2).unwrap().value, ratio(1, 3));
        let s = euler_phi_identity_partial(2, 20).unwrap();
        let one = ratio(1, 1);
        assert!(s.value < one && &one - &s.value < ratio(1, 10000));
        assert!(&s.value + &s.tail >= one);
        let s3 = euler_phi_identity_partial(3, 15).unwrap();
        assert!(&one - &s3.value < ratio(1, 100000));
        let mut prev = BigRational::zero();
        for q in 2..25 {
            let v = euler_phi_identity_partial(4, q).unwrap().value;
            assert!(v > prev && v < one);
            prev = v;
        }
    }

    #[test]
    fn level_moment_examples() {
        let z2 = cyclic(2).unwrap();
        let mom = level_moments(&z2, 1, 2, DEFAULT_LEVEL_CAP).unwrap();
        assert!(mom[0].is_one());
        assert_eq!(mom[1], ratio(1, 2));
        assert_eq!(average_fixed_fraction(&z2, 1, 1).unwrap(), ratio(1, 2));
    }

    #[test]
    fn level_moments_are_fixed_point_averages() {
        for name in ["Z2", "Z3"] {
            let g = builtin(name).unwrap();
            for k in 0..=2 {
                let mom = level_moments(&g, k, 3, DEFAULT_LEVEL_CAP).unwrap();
                for m in 0..=3 {
                    assert_eq!(mom[m], average_fixed_fraction(&g, k, m).unwrap(), "{name} k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn weak_convergence_shrinks() {
        let grid = golden_grid(8);
        let r = weak_convergence_report(2, 8, 40, &grid).unwrap();
        let last: Vec<&ConvergenceRow> = r.rows.iter().filter(|row| row.level == 8).collect();
        assert!(last.iter().all(|row| row.error < 0.02), "{last:?}");
        let one = weak_convergence_report(2, 6, 30, &[1.0]).unwrap();
        assert!(one.rows.iter().all(|row| row.level_cdf.is_one()));
    }
}
