//! Finite groups given extensionally by a multiplication table.
//!
//! Elements are indices `0..order`; the identity is always index 0 after
//! construction. Products follow `table[i][j] = g_i * g_j`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A bijection of `0..len`, stored by images.
///
/// Composition is functional: `a.compose(&b)` applies `b` first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation { images: (0..len).collect() }
    }

    /// Validates that `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let len = images.len();
        let mut seen = vec![false; len];
        for &i in &images {
            if i >= len {
                return Err(Error::IndexOutOfRange { index: i, len });
            }
            if seen[i] {
                return Err(Error::InvalidArgument(format!("image {i} repeated")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different degree");
        Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn fixed_point_count(&self) -> usize {
        self.images.iter().enumerate().filter(|&(i, &j)| i == j).count()
    }
}

/// A validated finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    /// Row-major `order * order` table.
    table: Vec<usize>,
    inverses: Vec<usize>,
    abelian: bool,
}

impl FiniteGroup {
    /// Validates `table` and reorders the elements so that the identity comes
    /// first (other elements keep their relative order).
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidOrder);
        }
        if labels.len() != n {
            return Err(Error::MalformedTable(format!(
                "{} labels for a {n}x{n} table",
                labels.len()
            )));
        }
        for (r, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedTable(format!("row {r} has length {}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::IndexOutOfRange { index: bad, len: n });
            }
        }
        for i in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for j in 0..n {
                if core::mem::replace(&mut row_seen[table[i][j]], true)
                    || core::mem::replace(&mut col_seen[table[j][i]], true)
                {
                    return Err(Error::NotLatinSquare { row_or_col: i });
                }
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|j| table[e][j] == j && table[j][e] == j))
            .ok_or(Error::NoIdentity)?;
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(Error::NotAssociative { a, b, c });
                    }
                }
            }
        }

        // old index -> new index, identity first
        let order: Vec<usize> =
            core::iter::once(e).chain((0..n).filter(|&i| i != e)).collect();
        let mut new_of = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_of[old] = new;
        }
        let mut flat = vec![0; n * n];
        for (i, &oi) in order.iter().enumerate() {
            for (j, &oj) in order.iter().enumerate() {
                flat[i * n + j] = new_of[table[oi][oj]];
            }
        }
        let labels = order.iter().map(|&o| labels[o].clone()).collect();
        Ok(Self::from_flat(labels, flat))
    }

    fn from_flat(labels: Vec<String>, table: Vec<usize>) -> Self {
        let n = labels.len();
        let inverses =
            (0..n).map(|a| (0..n).find(|&b| table[a * n + b] == 0).unwrap()).collect();
        let abelian = (0..n).all(|a| (0..n).all(|b| table[a * n + b] == table[b * n + a]));
        FiniteGroup { labels, table, inverses, abelian }
    }

    /// Builds the group generated by a closed set of permutations, multiplied
    /// by composition (`g * h = g ∘ h`).
    pub fn from_permutations(labels: Vec<String>, perms: &[Permutation]) -> Result<Self> {
        let table = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| {
                        let gh = g.compose(h);
                        perms.iter().position(|p| *p == gh).ok_or_else(|| {
                            Error::MalformedTable("permutation set is not closed".into())
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_table(labels, table)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order()).map(|r| r.to_vec()).collect()
    }

    pub fn check_index(&self, a: usize) -> Result<()> {
        if a < self.order() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: a, len: self.order() })
        }
    }

    /// `a^e` for a signed exponent.
    pub fn pow(&self, a: usize, e: i64) -> usize {
        let base = if e < 0 { self.inv(a) } else { a };
        let mut acc = self.identity();
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    /// Right conjugation `b⁻¹ a b`.
    pub fn conj(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(b), a), b)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity() {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn is_central(&self, a: usize) -> bool {
        (0..self.order()).all(|b| self.commute(a, b))
    }

    /// The subgroup generated by `gens`, as a sorted list of indices.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order()];
        inside[self.identity()] = true;
        let mut elems = vec![self.identity()];
        let mut i = 0;
        while i < elems.len() {
            let a = elems[i];
            for &g in gens {
                let ag = self.mul(a, g);
                if !inside[ag] {
                    inside[ag] = true;
                    elems.push(ag);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        elems
    }

    /// Left regular representation: `i ↦ index of g·g_i`.
    pub fn regular_perm(&self, g: usize) -> Result<Permutation> {
        self.check_index(g)?;
        Ok(Permutation::from_images_unchecked((0..self.order()).map(|i| self.mul(g, i)).collect()))
    }
}

/// ℤ/nℤ with labels `0..n` written in decimal.
pub fn cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidOrder);
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    let table = (0..n).flat_map(|i| (0..n).map(move |j| (i + j) % n)).collect();
    Ok(FiniteGroup::from_flat(labels, table))
}

/// `G × H` with labels `(g,h)`; index `i * |H| + j`.
pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
    let (n, m) = (g.order(), h.order());
    let labels = (0..n)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| format!("({},{})", g.label(i), h.label(j)))
        .collect();
    let mut table = vec![0; n * n * m * m];
    for a in 0..n * m {
        for b in 0..n * m {
            let (ai, aj) = (a / m, a % m);
            let (bi, bj) = (b / m, b % m);
            table[a * n * m + b] = g.mul(ai, bi) * m + h.mul(aj, bj);
        }
    }
    FiniteGroup::from_flat(labels, table)
}

/// The symmetric group on `{0, 1, 2}`, elements in lexicographic order of
/// their image lists (identity first). Labels are the image lists, e.g. `102`.
pub fn symmetric3() -> FiniteGroup {
    let images: [[usize; 3]; 6] =
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let perms: Vec<Permutation> =
        images.iter().map(|im| Permutation::from_images_unchecked(im.to_vec())).collect();
    let labels = images.iter().map(|im| format!("{}{}{}", im[0], im[1], im[2])).collect();
    FiniteGroup::from_permutations(labels, &perms).expect("S3 is a group")
}

/// The dihedral group of order `2m`: elements `r^i s^j`, index `j * m + i`.
pub fn dihedral(m: usize) -> Result<FiniteGroup> {
    if m == 0 {
        return Err(Error::InvalidOrder);
    }
    let n = 2 * m;
    let labels = (0..n)
        .map(|a| {
            let (i, j) = (a % m, a / m);
            match (i, j) {
                (0, 0) => "e".to_string(),
                (i, 0) => format!("r{i}"),
                (0, _) => "s".to_string(),
                (i, _) => format!("r{i}s"),
            }
        })
        .collect();
    let mut table = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let (i1, j1) = (a % m, a / m);
            let (i2, j2) = (b % m, b / m);
            // r^i1 s^j1 r^i2 s^j2 = r^(i1 ± i2) s^(j1+j2)
            let i = if j1 == 0 { (i1 + i2) % m } else { (i1 + m - i2) % m };
            table[a * n + b] = ((j1 + j2) % 2) * m + i;
        }
    }
    Ok(FiniteGroup::from_flat(labels, table))
}

/// The quaternion group `{1, i, j, k, -1, -i, -j, -k}`.
pub fn quaternion() -> FiniteGroup {
    // unit index 0..4 = 1, i, j, k; (sign, unit) product of units
    const UNIT: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let names = ["1", "i", "j", "k"];
    let labels = (0..8)
        .map(|a| if a < 4 { names[a].to_string() } else { format!("-{}", names[a - 4]) })
        .collect();
    let mut table = vec![0; 64];
    for a in 0..8 {
        for b in 0..8 {
            let (sa, ua) = (a >= 4, a % 4);
            let (sb, ub) = (b >= 4, b % 4);
            let (s, u) = UNIT[ua][ub];
            let neg = sa ^ sb ^ s;
            table[a * 8 + b] = u + if neg { 4 } else { 0 };
        }
    }
    FiniteGroup::from_flat(labels, table)
}

/// Parses a built-in group name: `Z<n>`, products such as `Z2xZ2`, `S3`,
/// `D<m>` (order `2m`) and `Q8`.
pub fn builtin(name: &str) -> Result<FiniteGroup> {
    let unknown = || Error::InvalidArgument(format!("unknown built-in group `{name}`"));
    let mut factors = name.split(['x', '×']).map(str::trim);
    let first = factors.next().ok_or_else(unknown)?;
    let mut group = builtin_factor(first).ok_or_else(unknown)?;
    for f in factors {
        group = direct_product(&group, &builtin_factor(f).ok_or_else(unknown)?);
    }
    Ok(group)
}

fn builtin_factor(name: &str) -> Option<FiniteGroup> {
    match name {
        "S3" => Some(symmetric3()),
        "Q8" => Some(quaternion()),
        _ => {
            let kind = name.get(..1)?;
            let num: usize = name.get(1..)?.parse().ok()?;
            match kind {
                "Z" | "C" => cyclic(num).ok(),
                "D" => dihedral(num).ok(),
                _ => None,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_builtins() -> Vec<FiniteGroup> {
        ["Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z6", "S3", "D4", "Q8"]
            .iter()
            .map(|n| builtin(n).unwrap())
            .collect()
    }

    #[test]
    fn cyclic_tables() {
        assert!(matches!(cyclic(0), Err(Error::InvalidOrder)));
        assert_eq!(cyclic(1).unwrap().order(), 1);
        assert_eq!(cyclic(2).unwrap().table_rows(), vec![vec![0, 1], vec![1, 0]]);
        let z3 = cyclic(3).unwrap();
        assert_eq!(z3.table_rows(), vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
        assert!(z3.is_abelian());
    }

    #[test]
    fn s3_from_table_is_nonabelian() {
        let s3 = symmetric3();
        let rebuilt = FiniteGroup::from_table(s3.labels().to_vec(), s3.table_rows()).unwrap();
        assert_eq!(rebuilt.order(), 6);
        assert!(!rebuilt.is_abelian());
    }

    #[test]
    fn rejects_non_latin_table() {
        let r = FiniteGroup::from_table(
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![1, 1]],
        );
        assert!(matches!(r, Err(Error::NotLatinSquare { .. })));
    }

    #[test]
    fn rejects_non_associative_latin_square() {
        // a latin square with identity 0 that is not a group (order 5 loop)
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let labels = (0..5).map(|i| i.to_string()).collect();
        assert!(matches!(FiniteGroup::from_table(labels, t), Err(Error::NotAssociative { .. })));
    }

    #[test]
    fn rejects_missing_identity() {
        // latin square without an identity: 2(i + j) mod 3
        let t = (0..3).map(|i| (0..3).map(|j| (2 * i + 2 * j) % 3).collect()).collect();
        let labels = (0..3).map(|i| i.to_string()).collect();
        assert_eq!(FiniteGroup::from_table(labels, t), Err(Error::NoIdentity));
    }

    #[test]
    fn identity_is_moved_first() {
        // Z/2 with the identity listed second
        let g = FiniteGroup::from_table(
            vec!["b".into(), "a".into()],
            vec![vec![1, 0], vec![0, 1]],
        )
        .unwrap();
        assert_eq!(g.labels(), &["a".to_string(), "b".to_string()]);
        assert_eq!(g.table_rows(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn klein_group_is_abelian() {
        let v4 = builtin("Z2xZ2").unwrap();
        assert_eq!(v4.order(), 4);
        assert!(v4.is_abelian());
        assert!((1..4).all(|a| v4.element_order(a) == 2));
    }

    #[test]
    fn small_nonabelian_builtins() {
        let d4 = builtin("D4").unwrap();
        let q8 = builtin("Q8").unwrap();
        assert_eq!((d4.order(), q8.order()), (8, 8));
        assert!(!d4.is_abelian() && !q8.is_abelian());
        assert_eq!((0..8).filter(|&a| q8.element_order(a) == 4).count(), 6);
        assert_eq!((0..8).filter(|&a| d4.element_order(a) == 2).count(), 5);
        assert!(builtin("Z7x").is_err() && builtin("W3").is_err());
    }

    #[test]
    fn regular_perm_examples() {
        let z2 = cyclic(2).unwrap();
        assert!(z2.regular_perm(0).unwrap().is_identity());
        assert_eq!(z2.regular_perm(1).unwrap().images(), &[1, 0]);
        let z3 = cyclic(3).unwrap();
        assert_eq!(z3.regular_perm(1).unwrap().images(), &[1, 2, 0]);
        assert!(z3.regular_perm(3).is_err());
    }

    #[test]
    fn regular_perm_is_a_faithful_homomorphism() {
        for g in all_builtins() {
            for a in 0..g.order() {
                let pa = g.regular_perm(a).unwrap();
                assert_eq!(pa.is_identity(), a == g.identity());
                for b in 0..g.order() {
                    let pb = g.regular_perm(b).unwrap();
                    assert_eq!(pa.compose(&pb), g.regular_perm(g.mul(a, b)).unwrap());
                }
            }
        }
    }
}
