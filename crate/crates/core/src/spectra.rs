//! Schreier-graph matrices, the determinant recursion `Φ_k(λ, μ)` and the
//! closed-form spectrum of the Markov operators `M_k = A_k / 2n`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::eigen;
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, Permutation};
use crate::tree::{level_size, AutomatonGroup};

/// A sparse symmetric integer matrix indexed by the `n^k` vertices of level `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMatrix {
    level: usize,
    rows: Vec<BTreeMap<usize, i64>>,
}

impl LevelMatrix {
    pub fn zero(level: usize, dim: usize) -> Self {
        LevelMatrix { level, rows: vec![BTreeMap::new(); dim] }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn add(&mut self, i: usize, j: usize, w: i64) {
        let e = self.rows[i].entry(j).or_insert(0);
        *e += w;
        if *e == 0 {
            self.rows[i].remove(&j);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.rows[i].get(&j).copied().unwrap_or(0)
    }

    /// Non-zero entries of row `i` in column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.rows[i].iter().map(|(&j, &w)| (j, w))
    }

    pub fn row_sum(&self, i: usize) -> i64 {
        self.rows[i].values().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim()).all(|i| self.row(i).all(|(j, w)| self.get(j, i) == w))
    }

    pub fn scaled(&self, c: i64) -> LevelMatrix {
        let mut m = LevelMatrix::zero(self.level, self.dim());
        for i in 0..self.dim() {
            for (j, w) in self.row(i) {
                m.add(i, j, c * w);
            }
        }
        m
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for (j, w) in self.row(i) {
                out[i * d + j] = w as f64;
            }
        }
        out
    }

    /// Exact `tr(Aʲ)` via repeated sparse-dense products.
    pub fn trace_powers(&self, j_max: usize) -> Vec<BigInt> {
        let d = self.dim();
        let mut traces = vec![BigInt::from(d)];
        if j_max == 0 {
            return traces;
        }
        // column-by-column: e_c ↦ A^j e_c, accumulating the diagonal entry
        let mut sums = vec![BigInt::zero(); j_max];
        for c in 0..d {
            let mut v: Vec<BigInt> = vec![BigInt::zero(); d];
            v[c] = BigInt::one();
            for s in sums.iter_mut() {
                let mut next = vec![BigInt::zero(); d];
                for (i, out) in next.iter_mut().enumerate() {
                    for (j, w) in self.row(i) {
                        if !v[j].is_zero() {
                            *out += &v[j] * w;
                        }
                    }
                }
                v = next;
                *s += &v[c];
            }
        }
        traces.extend(sums);
        traces
    }
}

/// Adds `P + Pᵀ` for the permutation matrix `P[σ(j)][j] = 1`.
fn add_symmetrized(m: &mut LevelMatrix, p: &Permutation) {
    for j in 0..p.len() {
        let i = p.apply(j);
        m.add(i, j, 1);
        m.add(j, i, 1);
    }
}

/// `A_k = Σ (P_i + P_iᵀ)` over level permutations of the generators.
pub fn adjacency_from_perms(level: usize, perms: &[Permutation]) -> LevelMatrix {
    let dim = perms.first().map_or(1, Permutation::len);
    let mut m = LevelMatrix::zero(level, dim);
    for p in perms {
        add_symmetrized(&mut m, p);
    }
    m
}

/// The adjacency matrix of the level-`k` Schreier graph of `G(C(G))`.
pub fn adjacency_matrix(g: &FiniteGroup, level: usize, cap: u64) -> Result<LevelMatrix> {
    let perms = AutomatonGroup::cayley(g).level_generator_perms(level, cap)?;
    Ok(adjacency_from_perms(level, &perms))
}

/// `S_0 = n − 1` and `S_k = T ⊗ I_{n^{k−1}}` with `T` the all-ones matrix
/// minus the identity, so `S_k` has the dimension `n^k` of `A_k`.
pub fn garbage_matrix(n: usize, level: usize, cap: u64) -> Result<LevelMatrix> {
    let dim = level_size(n, level, cap)?;
    let mut m = LevelMatrix::zero(level, dim);
    if level == 0 {
        m.add(0, 0, n as i64 - 1);
        return Ok(m);
    }
    let block = dim / n;
    for a in 0..n {
        for b in (0..n).filter(|&b| b != a) {
            for u in 0..block {
                m.add(a * block + u, b * block + u, 1);
            }
        }
    }
    Ok(m)
}

/// `Σ_{i≠j} P_i P_jᵀ`; `P_i P_jᵀ` is the matrix of `σ_i ∘ σ_j⁻¹`.
pub fn sum_nonidentity(level: usize, perms: &[Permutation]) -> LevelMatrix {
    let dim = perms.first().map_or(1, Permutation::len);
    let mut m = LevelMatrix::zero(level, dim);
    let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
    for (i, pi) in perms.iter().enumerate() {
        for (_, qj) in inverses.iter().enumerate().filter(|&(j, _)| j != i) {
            let s = pi.compose(qj);
            for c in 0..dim {
                m.add(s.apply(c), c, 1);
            }
        }
    }
    m
}

/// Checks `Σ_{i≠j} ḡ_i ḡ_jᵀ = n·S_k` on level `k`.
pub fn verify_sum_nonidentity(g: &FiniteGroup, level: usize, cap: u64) -> Result<bool> {
    let perms = AutomatonGroup::cayley(g).level_generator_perms(level, cap)?;
    let lhs = sum_nonidentity(level, &perms);
    let rhs = garbage_matrix(g.order(), level, cap)?.scaled(g.order() as i64);
    Ok(lhs == rhs)
}

/// `Φ_k(λ, μ) = det(A_k − λI − μS_k)` evaluated densely.
pub fn phi_by_determinant(g: &FiniteGroup, level: usize, lambda: f64, mu: f64) -> Result<f64> {
    let a = adjacency_matrix(g, level, eigen::DENSE_CAP as u64)?;
    let s = garbage_matrix(g.order(), level, eigen::DENSE_CAP as u64)?;
    let d = a.dim();
    let mut m = a.to_dense();
    for (x, y) in m.iter_mut().zip(s.to_dense()) {
        *x -= mu * y;
    }
    for i in 0..d {
        m[i * d + i] -= lambda;
    }
    Ok(eigen::determinant(m, d))
}

/// `F_1, …, F_k` from `F_1 = μ − λ`, `F_{i+1} = −(λ + (n−1)μ) − n²/F_i`.
pub fn f_sequence(n: usize, k: usize, lambda: f64, mu: f64) -> Result<Vec<f64>> {
    let nf = n as f64;
    let shift = -(lambda + (nf - 1.0) * mu);
    let mut out = Vec::with_capacity(k);
    let mut f = mu - lambda;
    for step in 1..=k {
        out.push(f);
        if step < k {
            if f == 0.0 {
                return Err(Error::PoleInRecursion { step });
            }
            f = shift - nf * nf / f;
        }
    }
    Ok(out)
}

/// `Φ_k(λ, μ) = (2n − λ − (n−1)μ) Π F_i^{(n−1)n^{k−i}}`.
pub fn phi_eval(n: usize, k: usize, lambda: f64, mu: f64) -> Result<f64> {
    let nf = n as f64;
    let lead = 2.0 * nf - lambda - (nf - 1.0) * mu;
    let fs = f_sequence(n, k, lambda, mu)?;
    Ok(fs.iter().enumerate().fold(lead, |acc, (idx, &f)| {
        let i = idx + 1;
        acc * libm::pow(f, (nf - 1.0) * libm::pow(nf, (k - i) as f64))
    }))
}

/// Pole-free form `(2n − λ − (n−1)μ) P_k^{n−1} Π_{i<k} P_i^{(n−1)² n^{k−1−i}}`.
pub fn phi_poly_eval(n: usize, k: usize, lambda: f64, mu: f64) -> f64 {
    let nf = n as f64;
    let lead = 2.0 * nf - lambda - (nf - 1.0) * mu;
    let ps = p_values(n, k, lambda, mu);
    let mut acc = lead;
    for i in 1..=k {
        let e = if i == k {
            nf - 1.0
        } else {
            (nf - 1.0) * (nf - 1.0) * libm::pow(nf, (k - 1 - i) as f64)
        };
        acc *= libm::pow(ps[i - 1], e);
    }
    acc
}

/// Numeric `P_1, …, P_k` by the three-term recursion.
fn p_values(n: usize, k: usize, lambda: f64, mu: f64) -> Vec<f64> {
    let nf = n as f64;
    let shift = -(lambda + (nf - 1.0) * mu);
    let (mut p, mut q) = (mu - lambda, 1.0);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(p);
        (p, q) = (shift * p - nf * nf * q, p);
    }
    out
}

/// The map `(λ, μ) ↦ (λ′, μ′)` driving the recursion; `None` at `μ = λ`.
pub fn recursion_step(n: usize, lambda: f64, mu: f64) -> Option<(f64, f64)> {
    let nf = n as f64;
    let d = mu - lambda;
    if d == 0.0 {
        return None;
    }
    let l = (-lambda * lambda + (nf - 1.0) * mu * mu + (2.0 - nf) * lambda * mu + nf * (nf - 1.0))
        / d;
    Some((l, -nf / d))
}

/// A polynomial in `λ, μ` with integer coefficients, keyed by `(deg_λ, deg_μ)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, dl: u32, dm: u32) -> Self {
        let mut p = Self::zero();
        p.add_term((dl, dm), c.into());
        p
    }

    pub fn lambda() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn mu() -> Self {
        Self::monomial(1, 0, 1)
    }

    fn add_term(&mut self, key: (u32, u32), c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, dl: u32, dm: u32) -> BigInt {
        self.terms.get(&(dl, dm)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &BigInt)> {
        self.terms.iter().map(|(&k, v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            out.add_term(k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero();
        for (&k, v) in &self.terms {
            out.add_term(k, v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), x) in &self.terms {
            for (&(c, d), y) in &other.terms {
                out.add_term((a + c, b + d), x * y);
            }
        }
        out
    }

    /// `μ = 0` specialization as coefficients of `1, λ, λ², …`.
    pub fn at_mu_zero(&self) -> Vec<BigInt> {
        let deg = self.terms.keys().filter(|k| k.1 == 0).map(|k| k.0).max();
        let mut out = vec![BigInt::zero(); deg.map_or(0, |d| d as usize + 1)];
        for (&(a, b), c) in &self.terms {
            if b == 0 {
                out[a as usize] = c.clone();
            }
        }
        out
    }

    pub fn eval(&self, lambda: f64, mu: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| {
                c.to_f64().unwrap_or(f64::NAN) * libm::pow(lambda, a as f64) * libm::pow(mu, b as f64)
            })
            .sum()
    }

    pub fn eval_exact(&self, lambda: &num_rational::BigRational, mu: &num_rational::BigRational) -> num_rational::BigRational {
        use num_traits::Pow;
        self.terms
            .iter()
            .map(|(&(a, b), c)| {
                num_rational::BigRational::from_integer(c.clone()) * Pow::pow(lambda, a) * Pow::pow(mu, b)
            })
            .fold(num_rational::BigRational::zero(), |acc, t| acc + t)
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            let mag = c.abs();
            let bare = a == 0 && b == 0;
            if !mag.is_one() || bare {
                write!(f, "{mag}")?;
            }
            for (var, d) in [("λ", a), ("μ", b)] {
                match d {
                    0 => {}
                    1 => write!(f, "{var}")?,
                    _ => write!(f, "{var}^{d}")?,
                }
            }
        }
        Ok(())
    }
}

/// `(P_k, Q_k)` from `P_1 = μ − λ`, `Q_1 = 1`,
/// `P_{k+1} = −(λ + (n−1)μ) P_k − n² Q_k`, `Q_{k+1} = P_k`.
pub fn pq_polynomials(n: usize, k: usize) -> Result<(BivariatePolynomial, BivariatePolynomial)> {
    if k == 0 {
        return Err(Error::InvalidArgument("P_k and Q_k start at k = 1".into()));
    }
    let n = BigInt::from(n);
    let shift = BivariatePolynomial::lambda()
        .add(&BivariatePolynomial::mu().scale(&(&n - 1)))
        .scale(&BigInt::from(-1));
    let mut p = BivariatePolynomial::mu().add(&BivariatePolynomial::lambda().scale(&BigInt::from(-1)));
    let mut q = BivariatePolynomial::constant(1);
    let n2 = -(&n * &n);
    for _ in 1..k {
        let next = shift.mul(&p).add(&q.scale(&n2));
        q = p;
        p = next;
    }
    Ok((p, q))
}

/// Label of an eigenvalue of `M_k`: the Perron root `1` or `cos(pπ/q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomLabel {
    One,
    Frac { p: u64, q: u64 },
}

impl AtomLabel {
    /// `cos(pπ/q)`, computed so that `p ↔ q − p` give exact negatives.
    pub fn value(self) -> f64 {
        match self {
            AtomLabel::One => 1.0,
            AtomLabel::Frac { p, q } => {
                if 2 * p == q {
                    0.0
                } else if 2 * p > q {
                    -libm::cos((q - p) as f64 * PI / q as f64)
                } else {
                    libm::cos(p as f64 * PI / q as f64)
                }
            }
        }
    }

    /// The position `z/π ∈ [0, 1]` under `λ = cos z`; `1` sits at `0`.
    pub fn z_fraction(self) -> (u64, u64) {
        match self {
            AtomLabel::One => (0, 1),
            AtomLabel::Frac { p, q } => (p, q),
        }
    }
}

impl fmt::Display for AtomLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomLabel::One => write!(f, "1"),
            AtomLabel::Frac { p, q } => write!(f, "cos({p}π/{q})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumAtom {
    pub label: AtomLabel,
    pub multiplicity: u128,
}

/// The spectrum of `M_k` for a group of order `n`, as exact labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumAtomList {
    pub n: usize,
    pub level: usize,
    /// Sorted by decreasing eigenvalue.
    pub atoms: Vec<SpectrumAtom>,
}

impl SpectrumAtomList {
    pub fn total_multiplicity(&self) -> u128 {
        self.atoms.iter().map(|a| a.multiplicity).sum()
    }

    pub fn multiplicity_of(&self, label: AtomLabel) -> Option<u128> {
        self.atoms.iter().find(|a| a.label == label).map(|a| a.multiplicity)
    }
}

/// `(n−1)² Σ_{i=1}^{⌊k/q⌋} n^{k−qi} + (n−1)[q | k+1]`.
pub fn multiplicity(n: usize, k: usize, q: usize) -> Result<u128> {
    let n = n as u128;
    let mut sum: u128 = 0;
    for i in 1..=k / q {
        let e = u32::try_from(k - q * i).map_err(|_| Error::Overflow)?;
        sum = sum.checked_add(n.checked_pow(e).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
    }
    let head = (n - 1).checked_mul(n - 1).and_then(|c| c.checked_mul(sum)).ok_or(Error::Overflow)?;
    let tail = if (k + 1).is_multiple_of(q) { n - 1 } else { 0 };
    head.checked_add(tail).ok_or(Error::Overflow)
}

/// Eigenvalues of `M_k` with multiplicities from the closed form.
pub fn closed_form_spectrum(n: usize, k: usize) -> Result<SpectrumAtomList> {
    if n < 1 {
        return Err(Error::InvalidOrder);
    }
    let mut atoms = vec![SpectrumAtom { label: AtomLabel::One, multiplicity: 1 }];
    if n > 1 {
        for q in 2..=k + 1 {
            let m = multiplicity(n, k, q)?;
            for p in (1..q).filter(|p| p.gcd(&q) == 1) {
                atoms.push(SpectrumAtom {
                    label: AtomLabel::Frac { p: p as u64, q: q as u64 },
                    multiplicity: m,
                });
            }
        }
    }
    atoms.sort_by(|a, b| b.label.value().total_cmp(&a.label.value()));
    Ok(SpectrumAtomList { n, level: k, atoms })
}

/// Eigenvalues of `A / d` (with `d` the common row sum), clustered within
/// `tol`, as `(value, multiplicity)` pairs in increasing order.
pub fn numeric_spectrum(a: &LevelMatrix, tol: f64) -> Result<Vec<(f64, usize)>> {
    let d = a.row_sum(0);
    if d == 0 || (0..a.dim()).any(|i| a.row_sum(i) != d) {
        return Err(Error::InvalidArgument("matrix is not regular".into()));
    }
    if !a.is_symmetric() {
        return Err(Error::InvalidArgument("matrix is not symmetric".into()));
    }
    let dense: Vec<f64> = a.to_dense().into_iter().map(|x| x / d as f64).collect();
    let eig = eigen::symmetric_eigenvalues(dense, a.dim())?;
    Ok(eigen::cluster(&eig, tol))
}

/// Outcome of matching numeric clusters to closed-form atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison {
    pub matched: bool,
    /// Largest `|numeric − cos(pπ/q)|` over matched pairs.
    pub max_deviation: f64,
    pub mismatch: Option<alloc::string::String>,
}

/// Requires a bijection between clusters and atoms respecting multiplicity.
pub fn compare_spectra(numeric: &[(f64, usize)], exact: &SpectrumAtomList, tol: f64) -> SpectrumComparison {
    use alloc::format;
    let mut atoms: Vec<(f64, u128, AtomLabel)> =
        exact.atoms.iter().map(|a| (a.label.value(), a.multiplicity, a.label)).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut max_dev: f64 = 0.0;
    if atoms.len() != numeric.len() {
        return SpectrumComparison {
            matched: false,
            max_deviation: f64::NAN,
            mismatch: Some(format!("{} clusters vs {} atoms", numeric.len(), atoms.len())),
        };
    }
    for (&(x, m), &(v, mult, label)) in numeric.iter().zip(&atoms) {
        let dev = (x - v).abs();
        max_dev = max_dev.max(dev);
        if dev > tol || m as u128 != mult {
            return SpectrumComparison {
                matched: false,
                max_deviation: max_dev,
                mismatch: Some(format!("{label}: numeric {x} x{m}, expected {v} x{mult}")),
            };
        }
    }
    SpectrumComparison { matched: true, max_deviation: max_dev, mismatch: None }
}
