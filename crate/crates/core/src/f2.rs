//! Linear algebra over GF(2) for transition matrices.
//!
//! Matrices are square with at most [`MAX_DIM`] rows, each row packed into a
//! `u64` (bit `j` holds column `j + 1`). Polynomials are packed the same way,
//! bit `j` holding the coefficient of `x^j`.

use std::fmt;
use std::ops::{Add, Mul};

use thiserror::Error;

use crate::conv::{conv_step, DiscreteMap, IndexInterval};
use crate::perm::CyclicPermutation;

pub const MAX_DIM: usize = 63;

/// Largest dimension accepted by [`char_poly_cofactor`] (its table has `2^dim` entries).
pub const MAX_COFACTOR_DIM: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("dimension {0} exceeds the supported maximum")]
    TooLarge(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("index {index} out of range 1..={dim}")]
    BadIndex { index: usize, dim: usize },
    #[error("principal minor on {0:?} has no all-ones diagonal")]
    NoDiagonal(Vec<usize>),
}

/// A polynomial over GF(2) of degree below 64.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct F2Poly(pub u64);

impl F2Poly {
    pub const ZERO: F2Poly = F2Poly(0);
    pub const ONE: F2Poly = F2Poly(1);
    pub const X: F2Poly = F2Poly(2);

    /// `1 + x + ... + x^d`.
    pub fn all_ones(d: usize) -> Self {
        assert!(d < 64);
        F2Poly(if d == 63 { u64::MAX } else { (1u64 << (d + 1)) - 1 })
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn coeff(&self, j: usize) -> bool {
        j < 64 && (self.0 >> j) & 1 == 1
    }

    pub fn div_rem(self, divisor: F2Poly) -> (F2Poly, F2Poly) {
        let d = divisor.degree().expect("division by zero polynomial");
        let mut q = 0u64;
        let mut r = self.0;
        while let Some(rd) = F2Poly(r).degree() {
            if rd < d {
                break;
            }
            q |= 1 << (rd - d);
            r ^= divisor.0 << (rd - d);
        }
        (F2Poly(q), F2Poly(r))
    }

    pub fn gcd(self, other: F2Poly) -> F2Poly {
        let (mut a, mut b) = (self, other);
        while !b.is_zero() {
            let r = a.div_rem(b).1;
            a = b;
            b = r;
        }
        a
    }

    pub fn lcm(self, other: F2Poly) -> F2Poly {
        if self.is_zero() || other.is_zero() {
            return F2Poly::ZERO;
        }
        let g = self.gcd(other);
        self * other.div_rem(g).0
    }
}

impl Add for F2Poly {
    type Output = F2Poly;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, other: F2Poly) -> F2Poly {
        F2Poly(self.0 ^ other.0)
    }
}

impl Mul for F2Poly {
    type Output = F2Poly;

    /// Carry-less product. Panics if the result would not fit in 64 bits.
    fn mul(self, other: F2Poly) -> F2Poly {
        match (self.degree(), other.degree()) {
            (Some(a), Some(b)) => assert!(a + b < 64, "F2Poly product overflows degree 63"),
            _ => return F2Poly::ZERO,
        }
        let mut acc = 0u64;
        let mut b = other.0;
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= self.0 << shift;
            }
            b >>= 1;
            shift += 1;
        }
        F2Poly(acc)
    }
}

impl fmt::Display for F2Poly {
    /// Low degree first: `1+x+x^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for j in 0..64 {
            if !self.coeff(j) {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match j {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                _ => write!(f, "x^{j}")?,
            }
        }
        Ok(())
    }
}

/// A column vector in `GF(2)^dim`; component `j` (1-based) is bit `j - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct F2Vector {
    pub dim: usize,
    pub bits: u64,
}

impl F2Vector {
    pub fn zero(dim: usize) -> Self {
        Self { dim, bits: 0 }
    }

    pub fn unit(dim: usize, j: usize) -> Self {
        assert!(j >= 1 && j <= dim);
        Self { dim, bits: 1 << (j - 1) }
    }

    /// Sum of `e_j` for `lo <= j <= hi`.
    pub fn indicator(dim: usize, lo: usize, hi: usize) -> Self {
        assert!(lo >= 1 && lo <= hi && hi <= dim);
        let width = hi - lo + 1;
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        Self { dim, bits: mask << (lo - 1) }
    }

    pub fn get(&self, j: usize) -> bool {
        (self.bits >> (j - 1)) & 1 == 1
    }

    pub fn support(&self) -> Vec<usize> {
        (1..=self.dim).filter(|&j| self.get(j)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    dim: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(dim: usize) -> Result<Self, F2Error> {
        if dim > MAX_DIM {
            return Err(F2Error::TooLarge(dim));
        }
        Ok(Self {
            dim,
            rows: vec![0; dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self, F2Error> {
        let mut m = Self::zeros(dim)?;
        for (i, r) in m.rows.iter_mut().enumerate() {
            *r = 1 << i;
        }
        Ok(m)
    }

    /// Builds a matrix from rows of `0`/`1` characters, first character = column 1.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, F2Error> {
        let dim = rows.len();
        let mut m = Self::zeros(dim)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(F2Error::DimensionMismatch(row.len(), dim));
            }
            for (j, c) in row.bytes().enumerate() {
                if c == b'1' {
                    m.rows[i] |= 1 << j;
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i - 1] >> (j - 1)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i - 1] |= 1 << (j - 1);
        } else {
            self.rows[i - 1] &= !(1 << (j - 1));
        }
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, F2Error> {
        if self.dim != other.dim {
            return Err(F2Error::DimensionMismatch(self.dim, other.dim));
        }
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u64;
                let mut bits = r;
                while bits != 0 {
                    let j = bits.trailing_zeros() as usize;
                    acc ^= other.rows[j];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Ok(BitMatrix { dim: self.dim, rows })
    }

    /// `self^l`; `pow(0)` is the identity.
    pub fn pow(&self, l: u64) -> BitMatrix {
        let mut result = BitMatrix::identity(self.dim).expect("dim already checked");
        let mut base = self.clone();
        let mut e = l;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same dim");
            }
            base = base.mul(&base).expect("same dim");
            e >>= 1;
        }
        result
    }

    pub fn mul_vec(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(self.dim, v.dim, "dimension mismatch in mul_vec");
        let bits = self
            .rows
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &r)| acc | (((r & v.bits).count_ones() as u64 & 1) << i));
        F2Vector { dim: self.dim, bits }
    }

    /// Principal submatrix on the given 1-based indices, relabelled `1..=k`.
    pub fn principal_submatrix(&self, indices: &[usize]) -> BitMatrix {
        let mut sub = BitMatrix::zeros(indices.len()).expect("smaller than self");
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                if self.get(i, j) {
                    sub.rows[a] |= 1 << b;
                }
            }
        }
        sub
    }

    /// Determinant over GF(2) by elimination.
    pub fn det(&self) -> bool {
        let mut rows = self.rows.clone();
        for c in 0..self.dim {
            let Some(p) = (c..self.dim).find(|&r| (rows[r] >> c) & 1 == 1) else {
                return false;
            };
            rows.swap(c, p);
            let pivot = rows[c];
            for r in rows.iter_mut().skip(c + 1) {
                if (*r >> c) & 1 == 1 {
                    *r ^= pivot;
                }
            }
        }
        true
    }

    fn flip_column(&mut self, target: usize, source: usize) {
        // column `target` += column `source` (0-based)
        for r in &mut self.rows {
            if (*r >> source) & 1 == 1 {
                *r ^= 1 << target;
            }
        }
    }

    fn swap_columns(&mut self, a: usize, b: usize) {
        for r in &mut self.rows {
            let (x, y) = ((*r >> a) & 1, (*r >> b) & 1);
            if x != y {
                *r ^= (1 << a) | (1 << b);
            }
        }
    }
}

impl fmt::Display for BitMatrix {
    /// One row per line as `0`/`1` characters.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dim {
            for j in 1..=self.dim {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The transition matrix: `T_{ij} = 1` iff `conv f(A_j) ⊇ A_i`.
///
/// Columns index the source vertex. The identity permutation gives the
/// identity matrix.
pub fn adjacency_matrix<M: DiscreteMap + ?Sized>(f: &M) -> Result<BitMatrix, F2Error> {
    let n = f.size();
    let dim = n.saturating_sub(1);
    let mut m = BitMatrix::zeros(dim)?;
    for j in 1..n {
        if let Some((lo, hi)) = conv_step(f, &IndexInterval::new(j, j + 1)).bounds() {
            for i in lo..hi {
                m.rows[i - 1] |= 1 << (j - 1);
            }
        }
    }
    Ok(m)
}

/// `det(xI - m)` over GF(2), by similarity reduction to upper Hessenberg
/// form followed by the usual Hessenberg recurrence.
pub fn char_poly(m: &BitMatrix) -> F2Poly {
    let d = m.dim;
    let mut h = m.clone();
    for c in 0..d.saturating_sub(2) {
        let Some(p) = (c + 1..d).find(|&r| (h.rows[r] >> c) & 1 == 1) else {
            continue;
        };
        if p != c + 1 {
            h.rows.swap(p, c + 1);
            h.swap_columns(p, c + 1);
        }
        for i in c + 2..d {
            if (h.rows[i] >> c) & 1 == 1 {
                h.rows[i] ^= h.rows[c + 1];
                h.flip_column(c + 1, i);
            }
        }
    }
    let entry = |i: usize, j: usize| (h.rows[i] >> j) & 1 == 1;
    // polys[k] = characteristic polynomial of the leading k×k block
    let mut polys = vec![F2Poly::ONE];
    for k in 0..d {
        let mut p = F2Poly(if entry(k, k) { 0b11 } else { 0b10 }) * polys[k];
        let mut sub = true;
        for mm in (0..k).rev() {
            sub &= entry(mm + 1, mm);
            if !sub {
                break;
            }
            if entry(mm, k) {
                p = p + polys[mm];
            }
        }
        polys.push(p);
    }
    polys[d]
}

/// `det(xI + m)` by expansion over column subsets, memoized by the set of
/// columns already used. Independent of [`char_poly`]; limited to
/// [`MAX_COFACTOR_DIM`].
pub fn char_poly_cofactor(m: &BitMatrix) -> Result<F2Poly, F2Error> {
    let d = m.dim;
    if d > MAX_COFACTOR_DIM {
        return Err(F2Error::TooLarge(d));
    }
    let full = (1usize << d) - 1;
    let mut table = vec![F2Poly::ZERO; 1 << d];
    table[0] = F2Poly::ONE;
    for mask in 0..full {
        let acc = table[mask];
        if acc.is_zero() {
            continue;
        }
        let r = mask.count_ones() as usize;
        for c in 0..d {
            if mask >> c & 1 == 1 {
                continue;
            }
            let bit = (m.rows[r] >> c) & 1;
            let entry = if r == c { F2Poly(0b10 | bit) } else { F2Poly(bit) };
            if !entry.is_zero() {
                let next = mask | 1 << c;
                table[next] = table[next] + acc * entry;
            }
        }
    }
    Ok(table[full])
}

/// Incremental row echelon basis that remembers, for each stored vector,
/// which input combination produced it.
struct TrackedBasis {
    by_pivot: Vec<Option<(u64, u64)>>,
}

impl TrackedBasis {
    fn new(dim: usize) -> Self {
        Self {
            by_pivot: vec![None; dim],
        }
    }

    /// Inserts `v` tagged with `tag`; on dependence returns the combination
    /// of tags that sums to zero.
    fn insert(&mut self, mut v: u64, mut tag: u64) -> Option<u64> {
        while v != 0 {
            let p = 63 - v.leading_zeros() as usize;
            match self.by_pivot[p] {
                Some((bv, bt)) => {
                    v ^= bv;
                    tag ^= bt;
                }
                None => {
                    self.by_pivot[p] = Some((v, tag));
                    return None;
                }
            }
        }
        Some(tag)
    }
}

/// The annihilator of `v`: the monic least-degree `g` with `g(m) v = 0`.
fn vector_annihilator(m: &BitMatrix, v: F2Vector) -> F2Poly {
    let mut basis = TrackedBasis::new(m.dim);
    let mut cur = v;
    for k in 0..=m.dim {
        if let Some(rel) = basis.insert(cur.bits, 1 << k) {
            return F2Poly(rel);
        }
        cur = m.mul_vec(&cur);
    }
    unreachable!("more than dim vectors are always dependent")
}

/// Minimal polynomial, as the lcm of the annihilators of the unit vectors.
pub fn min_poly(m: &BitMatrix) -> F2Poly {
    (1..=m.dim).fold(F2Poly::ONE, |acc, j| {
        acc.lcm(vector_annihilator(m, F2Vector::unit(m.dim, j)))
    })
}

/// Rank of a family of vectors of a common dimension.
pub fn rank(vectors: &[F2Vector]) -> usize {
    let dim = vectors.first().map_or(0, |v| v.dim);
    let mut basis = TrackedBasis::new(dim);
    vectors
        .iter()
        .filter(|v| basis.insert(v.bits, 0).is_none())
        .count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrylovCheck {
    pub independent: bool,
    pub alpha: F2Vector,
    pub vectors: Vec<F2Vector>,
}

/// Tests whether `α, Tα, ..., T^{n-2}α` are independent, where `α` is the
/// indicator of the positions between the first two points of the cycle.
pub fn krylov_independent(f: &CyclicPermutation) -> Result<KrylovCheck, F2Error> {
    let t = adjacency_matrix(f)?;
    let dim = t.dim;
    assert!(dim >= 1, "Krylov check needs degree >= 2");
    let (a, b) = (f.cycle_order()[0], f.cycle_order()[1]);
    let alpha = F2Vector::indicator(dim, a.min(b), a.max(b) - 1);
    let mut vectors = Vec::with_capacity(dim);
    let mut cur = alpha;
    for _ in 0..dim {
        vectors.push(cur);
        cur = t.mul_vec(&cur);
    }
    Ok(KrylovCheck {
        independent: rank(&vectors) == dim,
        alpha,
        vectors,
    })
}

/// Parity of the sum of all `i × i` principal minors, i.e. the coefficient
/// of `x^{dim-i}` in the characteristic polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorCoefficient {
    pub bit: bool,
    /// First index set (lexicographically) whose minor is odd, if the sum is odd.
    pub witness: Option<Vec<usize>>,
}

/// Visits every `k`-subset of `1..=n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (1..=k).collect();
    loop {
        visit(&idx);
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - (k - 1 - p)) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

pub fn charpoly_coeff_via_minors(m: &BitMatrix, i: usize) -> Result<MinorCoefficient, F2Error> {
    if i == 0 || i > m.dim {
        return Err(F2Error::BadIndex { index: i, dim: m.dim });
    }
    let mut bit = false;
    let mut witness = None;
    for_each_subset(m.dim, i, |s| {
        if m.principal_submatrix(s).det() {
            bit = !bit;
            if witness.is_none() {
                witness = Some(s.to_vec());
            }
        }
    });
    Ok(MinorCoefficient {
        bit,
        witness: bit.then_some(witness).flatten(),
    })
}

/// Finds an all-ones diagonal of the principal minor on `index_set` and
/// splits it into directed cycles of the graph whose adjacency matrix is `m`
/// (edge `v -> w` iff `m[w][v] = 1`).
///
/// Rows are matched in ascending order, each to the smallest free column
/// that completes a diagonal. Every cycle starts at its smallest vertex.
pub fn cycles_from_minor(m: &BitMatrix, index_set: &[usize]) -> Result<Vec<Vec<usize>>, F2Error> {
    let mut set = index_set.to_vec();
    set.sort_unstable();
    set.dedup();
    for &v in &set {
        if v == 0 || v > m.dim {
            return Err(F2Error::BadIndex { index: v, dim: m.dim });
        }
    }
    let k = set.len();
    // col_of_row[a] = position (in `set`) of the column matched to row set[a]
    let mut col_of_row = vec![usize::MAX; k];
    let mut used = vec![false; k];
    fn search(
        m: &BitMatrix,
        set: &[usize],
        row: usize,
        col_of_row: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if row == set.len() {
            return true;
        }
        for c in 0..set.len() {
            if !used[c] && m.get(set[row], set[c]) {
                used[c] = true;
                col_of_row[row] = c;
                if search(m, set, row + 1, col_of_row, used) {
                    return true;
                }
                used[c] = false;
            }
        }
        false
    }
    if !search(m, &set, 0, &mut col_of_row, &mut used) {
        return Err(F2Error::NoDiagonal(set));
    }
    // m[row][col] = 1 is the edge col -> row
    let mut next = vec![0usize; k];
    for (row, &col) in col_of_row.iter().enumerate() {
        next[col] = row;
    }
    let mut seen = vec![false; k];
    let mut cycles = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            cycle.push(set[v]);
            v = next[v];
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}
