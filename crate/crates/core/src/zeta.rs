//! Ihara zeta log-series of finite regular multigraphs and of the limit
//! Schreier graph.
//!
//! For a `k`-regular multigraph with adjacency `A`, Ihara's determinant
//! formula gives
//! `ln ζ(t) = −e·ln(1 − t²) − ln det(1 − tA + (k−1)t²)`.
//! Writing `1 − tλ + (k−1)t² = (1 − αt)(1 − βt)` and `s_r = αʳ + βʳ`,
//! the coefficient of `tʳ` is `(2e·[r even] + tr s_r(A)) / r`, which only
//! needs the exact traces `tr Aⁱ`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, Permutation};
use crate::measures::{DiscreteMeasure, Estimate};
use crate::spectra::LevelMatrix;
use crate::tree::AutomatonGroup;

/// An undirected multigraph in which every vertex has the same degree,
/// loops counting twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularMultigraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    degree: usize,
}

impl RegularMultigraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut deg = vec![0usize; vertices];
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(Error::IndexOutOfRange { index: u.max(v), len: vertices });
            }
            deg[u] += 1;
            deg[v] += 1;
        }
        let degree = deg.first().copied().unwrap_or(0);
        if deg.iter().any(|&d| d != degree) {
            return Err(Error::InvalidArgument("multigraph is not regular".into()));
        }
        Ok(RegularMultigraph { vertices, edges, degree })
    }

    /// One edge `{v, σ(v)}` per permutation and vertex.
    pub fn from_perms(perms: &[Permutation]) -> Self {
        let vertices = perms.first().map_or(1, Permutation::len);
        let edges = perms.iter().flat_map(|p| (0..vertices).map(move |v| (v, p.apply(v)))).collect();
        RegularMultigraph { vertices, edges, degree: 2 * perms.len() }
    }

    /// The level-`k` Schreier graph `X_k` of `G(C(G))`.
    pub fn schreier(g: &FiniteGroup, level: usize, cap: u64) -> Result<Self> {
        let perms = AutomatonGroup::cayley(g).level_generator_perms(level, cap)?;
        Ok(Self::from_perms(&perms))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn adjacency(&self) -> LevelMatrix {
        let mut m = LevelMatrix::zero(0, self.vertices);
        for &(u, v) in &self.edges {
            m.add(u, v, 1);
            m.add(v, u, 1);
        }
        m
    }

    /// Directed edges as `(tail, head)`; arc `2i` runs along edge `i` and
    /// arc `2i + 1` is its reverse.
    fn arcs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect()
    }
}

/// The constant `e` in the factor `(1 − t²)^{−e}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentConvention {
    /// `e = |E| − |V| = ½(k − 2)|V|`.
    VertexBased,
    /// `e = ½(k − 2)|E|`.
    EdgeBased,
}

impl ExponentConvention {
    pub fn exponent(self, x: &RegularMultigraph) -> BigInt {
        let k = BigInt::from(x.degree());
        match self {
            ExponentConvention::VertexBased => {
                BigInt::from(x.edge_count()) - BigInt::from(x.vertex_count())
            }
            ExponentConvention::EdgeBased => (k - 2u32) * BigInt::from(x.edge_count()) / 2u32,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExponentConvention::VertexBased => "|E|-|V|",
            ExponentConvention::EdgeBased => "(k-2)|E|/2",
        }
    }
}

/// `ln ζ(t) = Σ_{r ≥ 1} a_r tʳ` truncated at order `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogZetaSeries {
    /// `a_1, …, a_R`.
    pub coefficients: Vec<BigRational>,
    pub convention: ExponentConvention,
}

impl LogZetaSeries {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// `r · a_r`, the closed path counts when the convention is right.
    pub fn path_counts(&self) -> Vec<BigRational> {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, a)| a * BigRational::from_integer(BigInt::from(i + 1)))
            .collect()
    }
}

/// Integer coefficients of `s_r(λ)` for `r = 0..=r_max`, from `s_0 = 2`,
/// `s_1 = λ`, `s_r = λ s_{r−1} − q s_{r−2}`.
pub fn s_polynomials(q: i64, r_max: usize) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = vec![vec![BigInt::from(2)], vec![BigInt::zero(), BigInt::from(1)]];
    for r in 2..=r_max {
        let mut next = vec![BigInt::zero(); r + 1];
        for (i, c) in out[r - 1].iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in out[r - 2].iter().enumerate() {
            next[i] -= c * q;
        }
        out.push(next);
    }
    out.truncate(r_max + 1);
    out
}

/// The log-series by the determinant formula with exact traces.
pub fn finite_zeta_log(x: &RegularMultigraph, r_max: usize, convention: ExponentConvention) -> LogZetaSeries {
    let q = x.degree() as i64 - 1;
    let traces = x.adjacency().trace_powers(r_max);
    let s = s_polynomials(q, r_max);
    let e2 = convention.exponent(x) * 2u32;
    let coefficients = (1..=r_max)
        .map(|r| {
            let tr: BigInt = s[r].iter().zip(&traces).map(|(c, t)| c * t).sum();
            let c = if r % 2 == 0 { tr + &e2 } else { tr };
            BigRational::new(c, BigInt::from(r))
        })
        .collect();
    LogZetaSeries { coefficients, convention }
}

/// `tr Bʳ` for the non-backtracking arc operator `B`, i.e. the number of
/// cyclically reduced closed paths of length `r`.
pub fn path_count_oracle(x: &RegularMultigraph, r: usize) -> BigInt {
    if r == 0 {
        return BigInt::zero();
    }
    let arcs = x.arcs();
    let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); x.vertex_count()];
    for (i, &(u, _)) in arcs.iter().enumerate() {
        out_of[u].push(i);
    }
    let successors: Vec<Vec<usize>> = arcs
        .iter()
        .enumerate()
        .map(|(i, &(_, v))| out_of[v].iter().copied().filter(|&j| j != (i ^ 1)).collect())
        .collect();
    let mut total = BigInt::zero();
    for start in 0..arcs.len() {
        let mut v: Vec<u64> = vec![0; arcs.len()];
        v[start] = 1;
        for _ in 0..r {
            let mut next = vec![0u64; arcs.len()];
            for (i, &c) in v.iter().enumerate().filter(|(_, &c)| c != 0) {
                for &j in &successors[i] {
                    next[j] += c;
                }
            }
            v = next;
        }
        total += v[start];
    }
    total
}

/// The convention under which the determinant series reproduces the path
/// counts of every supplied graph for `r ≤ r_max`.
pub fn select_convention(graphs: &[RegularMultigraph], r_max: usize) -> Option<ExponentConvention> {
    [ExponentConvention::VertexBased, ExponentConvention::EdgeBased].into_iter().find(|&c| {
        graphs.iter().all(|x| {
            let series = finite_zeta_log(x, r_max, c);
            series
                .path_counts()
                .iter()
                .enumerate()
                .all(|(i, v)| *v == BigRational::from_integer(path_count_oracle(x, i + 1)))
        })
    })
}

/// `ln ζ_X(t) = −((k−2)/2) ln(1 − t²) − ∫ ln(1 − tkλ + (k−1)t²) dμ`
/// for `k = 2n`, each coefficient with an error bar from the measure's
/// tail: `|s_r(kλ)| ≤ 1 + (k−1)ʳ` on `[−1, 1]`.
pub fn limit_zeta_log(m: &DiscreteMeasure, n: usize, r_max: usize) -> Vec<Estimate> {
    let k = 2.0 * n as f64;
    let q = k - 1.0;
    let tail = m.tail().to_f64().unwrap_or(f64::INFINITY);
    let mut sums = vec![0.0; r_max + 1];
    for atom in m.atoms() {
        let w = atom.weight.to_f64().unwrap_or(f64::NAN);
        let l = k * atom.position;
        let (mut prev, mut cur) = (2.0, l);
        for s in sums.iter_mut().skip(1) {
            *s += w * cur;
            (prev, cur) = (cur, l * cur - q * prev);
        }
    }
    (1..=r_max)
        .map(|r| {
            let rf = r as f64;
            let log_term = if r % 2 == 0 { (k - 2.0) / rf } else { 0.0 };
            let err = tail * (1.0 + libm::pow(q, rf)) / rf;
            let slack = 16.0 * f64::EPSILON * libm::pow(q + 1.0, rf) * m.atoms().len().max(1) as f64;
            Estimate { value: log_term + sums[r] / rf, error: err + slack }
        })
        .collect()
}

/// Finite coefficients divided by a normalizing count.
pub fn normalized(series: &LogZetaSeries, by: usize) -> Vec<BigRational> {
    let d = BigRational::from_integer(BigInt::from(by));
    series.coefficients.iter().map(|a| a / &d).collect()
}

/// Human-readable note on the exponent verdict for output metadata.
pub fn convention_note(c: Option<ExponentConvention>) -> String {
    match c {
        Some(c) => format!("exponent {} reproduces the non-backtracking path counts", c.name()),
        None => String::from("no exponent convention reproduces the path counts"),
    }
}
