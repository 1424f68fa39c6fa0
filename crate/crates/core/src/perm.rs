//! Permutations of `{1..n}`, with a dedicated type for full `n`-cycles.
//!
//! Everything visible from outside is 1-based: `images[i - 1]` holds `f(i)`
//! and cycle notation lists points starting from `1`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("empty permutation")]
    Empty,
    #[error("entry {value} out of range 1..={n}")]
    OutOfRange { value: usize, n: usize },
    #[error("entry {value} appears more than once")]
    Duplicate { value: usize },
    #[error("permutation is not cyclic (orbit of 1 has length {orbit} < {n})")]
    NotCyclic { orbit: usize, n: usize },
    #[error("rotation step {m} is not coprime to {n} (or out of range 1..{n})")]
    BadRotation { n: usize, m: usize },
    #[error("Stefan cycles need an odd degree >= 3, got {0}")]
    BadStefanDegree(usize),
    #[error("cannot parse permutation {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// A bijection of `{1..n}`, stored as its image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Validates an image table (`images[i - 1] = f(i)`).
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        if n == 0 {
            return Err(PermError::Empty);
        }
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n {
                return Err(PermError::OutOfRange { value: v, n });
            }
            if seen[v - 1] {
                return Err(PermError::Duplicate { value: v });
            }
            seen[v - 1] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity of degree 0");
        Self {
            images: (1..=n).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// `f(i)` for `1 <= i <= n`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Length of the orbit of `1`.
    fn orbit_of_one(&self) -> usize {
        let mut len = 1;
        let mut x = self.apply(1);
        while x != 1 {
            x = self.apply(x);
            len += 1;
        }
        len
    }

    /// True iff the permutation is a single `n`-cycle.
    pub fn is_cyclic(&self) -> bool {
        self.orbit_of_one() == self.degree()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in compose");
        Permutation {
            images: other.images.iter().map(|&x| self.apply(x)).collect(),
        }
    }

    /// The `l`-fold iterate; `power(0)` is the identity.
    pub fn power(&self, l: usize) -> Permutation {
        let mut result = Permutation::identity(self.degree());
        let mut base = self.clone();
        let mut e = l;
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        result
    }

    /// Upgrades to a [`CyclicPermutation`] if this is an `n`-cycle.
    pub fn to_cyclic(&self) -> Result<CyclicPermutation, PermError> {
        let orbit = self.orbit_of_one();
        if orbit != self.degree() {
            return Err(PermError::NotCyclic {
                orbit,
                n: self.degree(),
            });
        }
        let mut order = Vec::with_capacity(orbit);
        let mut x = 1;
        for _ in 0..orbit {
            order.push(x);
            x = self.apply(x);
        }
        Ok(CyclicPermutation {
            perm: self.clone(),
            cycle_order: order,
        })
    }
}

impl fmt::Display for Permutation {
    /// Image-table form, e.g. `img:3,2,1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("img:")?;
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// An `n`-cycle `(i_1 i_2 ... i_n)` with `i_1 = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicPermutation {
    perm: Permutation,
    cycle_order: Vec<usize>,
}

impl CyclicPermutation {
    /// Builds the cycle `seq[0] -> seq[1] -> ... -> seq[n-1] -> seq[0]`.
    pub fn from_cycle_notation(seq: &[usize]) -> Result<Self, PermError> {
        let n = seq.len();
        if n == 0 {
            return Err(PermError::Empty);
        }
        let mut images = vec![0usize; n];
        for (k, &x) in seq.iter().enumerate() {
            if x == 0 || x > n {
                return Err(PermError::OutOfRange { value: x, n });
            }
            if images[x - 1] != 0 {
                return Err(PermError::Duplicate { value: x });
            }
            images[x - 1] = seq[(k + 1) % n];
        }
        // Entries are distinct and in range, so the table is a single n-cycle.
        let start = seq.iter().position(|&x| x == 1).expect("1 present");
        let cycle_order = seq[start..].iter().chain(&seq[..start]).copied().collect();
        Ok(Self {
            perm: Permutation { images },
            cycle_order,
        })
    }

    pub fn degree(&self) -> usize {
        self.perm.degree()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm.apply(i)
    }

    pub fn as_permutation(&self) -> &Permutation {
        &self.perm
    }

    /// The canonical cycle `[1, f(1), f²(1), ...]`.
    pub fn cycle_order(&self) -> &[usize] {
        &self.cycle_order
    }

    pub fn power(&self, l: usize) -> Permutation {
        self.perm.power(l)
    }
}

impl AsRef<Permutation> for CyclicPermutation {
    fn as_ref(&self) -> &Permutation {
        &self.perm
    }
}

impl fmt::Display for CyclicPermutation {
    /// Cycle notation without parentheses, e.g. `1 3 6 2 4 5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.cycle_order.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    /// Accepts `"(1 3 6 2 4 5)"`, `"1 3 6 2 4 5"` (a single cycle) or
    /// `"img:3,2,1"` (an image table).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = |reason: &str| PermError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        if let Some(rest) = t.strip_prefix("img:") {
            let images = rest
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| parse_err(&e.to_string()))?;
            return Permutation::from_images(images);
        }
        let inner = match (t.strip_prefix('('), t.ends_with(')')) {
            (Some(r), true) => &r[..r.len() - 1],
            (None, false) => t,
            _ => return Err(parse_err("unbalanced parentheses")),
        };
        let seq = inner
            .split_whitespace()
            .map(|p| p.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| parse_err(&e.to_string()))?;
        Ok(CyclicPermutation::from_cycle_notation(&seq)?.perm)
    }
}

impl FromStr for CyclicPermutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<Permutation>()?.to_cyclic()
    }
}

/// The rotation `i -> i + m (mod n)` on `{1..n}`; requires `gcd(m, n) = 1`.
pub fn rotation(n: usize, m: usize) -> Result<CyclicPermutation, PermError> {
    if n < 2 || m == 0 || m >= n || m.gcd(&n) != 1 {
        return Err(PermError::BadRotation { n, m });
    }
    let images = (1..=n).map(|i| (i + m - 1) % n + 1).collect();
    Permutation { images }.to_cyclic()
}

/// The Stefan cycle of odd degree `2h + 1`:
/// `1 -> h+1 -> h+2 -> h -> h+3 -> h-1 -> ... -> 2h -> 2 -> 2h+1 -> 1`.
pub fn stefan(degree: usize) -> Result<CyclicPermutation, PermError> {
    if degree < 3 || degree.is_multiple_of(2) {
        return Err(PermError::BadStefanDegree(degree));
    }
    let h = degree / 2;
    let mut seq = vec![1, h + 1];
    for j in 1..h {
        seq.push(h + 1 + j);
        seq.push(h + 1 - j);
    }
    seq.push(degree);
    CyclicPermutation::from_cycle_notation(&seq)
}

/// Lazy stream of the `(n-1)!` cyclic permutations of `S_n`, in
/// lexicographic order of their cycle notation.
///
/// A fixed prefix of the cycle (after the leading `1`) may be given, which
/// yields exactly the cycles starting with `1, prefix...`. Concatenating the
/// streams for all prefixes of a given length, in lexicographic order,
/// reproduces the full stream.
#[derive(Debug, Clone)]
pub struct CyclicEnumerator {
    prefix: Vec<usize>,
    tail: Vec<usize>,
    done: bool,
}

impl CyclicEnumerator {
    pub fn new(n: usize) -> Self {
        Self::with_prefix(n, &[]).expect("empty prefix is always valid")
    }

    /// Cycles `(1 prefix... rest...)`. The prefix must hold distinct values
    /// in `2..=n`.
    pub fn with_prefix(n: usize, prefix: &[usize]) -> Result<Self, PermError> {
        if n == 0 {
            return Err(PermError::Empty);
        }
        let mut used = vec![false; n + 1];
        used[1] = true;
        for &p in prefix {
            if p < 2 || p > n {
                return Err(PermError::OutOfRange { value: p, n });
            }
            if used[p] {
                return Err(PermError::Duplicate { value: p });
            }
            used[p] = true;
        }
        let tail = (2..=n).filter(|&v| !used[v]).collect();
        Ok(Self {
            prefix: prefix.to_vec(),
            tail,
            done: false,
        })
    }
}

/// Rearranges `v` into its lexicographic successor; false if `v` was last.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl Iterator for CyclicEnumerator {
    type Item = CyclicPermutation;

    fn next(&mut self) -> Option<CyclicPermutation> {
        if self.done {
            return None;
        }
        let mut seq = Vec::with_capacity(1 + self.prefix.len() + self.tail.len());
        seq.push(1);
        seq.extend_from_slice(&self.prefix);
        seq.extend_from_slice(&self.tail);
        self.done = !next_permutation(&mut self.tail);
        Some(CyclicPermutation::from_cycle_notation(&seq).expect("enumerator yields valid cycles"))
    }
}

pub fn enumerate_cyclic(n: usize) -> CyclicEnumerator {
    CyclicEnumerator::new(n)
}
