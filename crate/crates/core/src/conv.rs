//! Discrete convex-hull dynamics on `{1..n}`.
//!
//! For a map `f` (a permutation or a set-valued map) and a set `A`,
//! `conv f(A)` is the contiguous integer span of `f(A)`. Iterating `conv ∘ f`
//! from `A_i = {i, i+1}` gives the characteristic number `m_i`, and the
//! one-step containments give the Markov graph on the vertices `A_1..A_{n-1}`.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::perm::{CyclicPermutation, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvError {
    #[error("index {index} out of range 1..={n}")]
    OutOfRange { index: usize, n: usize },
    #[error("(conv f)^m(A_{index}) never contains A_{index} for m <= {cap}")]
    NoReturn { index: usize, cap: usize },
}

/// A contiguous set `{lo, lo+1, ..., hi}` of indices, or the empty set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexInterval(Option<(usize, usize)>);

impl IndexInterval {
    pub const EMPTY: IndexInterval = IndexInterval(None);

    pub fn new(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "IndexInterval::new({lo}, {hi})");
        Self(Some((lo, hi)))
    }

    pub fn point(i: usize) -> Self {
        Self(Some((i, i)))
    }

    /// The hull of two points, in either order.
    pub fn span(a: usize, b: usize) -> Self {
        Self(Some((a.min(b), a.max(b))))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn bounds(&self) -> Option<(usize, usize)> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.map_or(0, |(lo, hi)| hi - lo + 1)
    }

    pub fn contains(&self, i: usize) -> bool {
        matches!(self.0, Some((lo, hi)) if lo <= i && i <= hi)
    }

    pub fn contains_interval(&self, other: &IndexInterval) -> bool {
        match (self.0, other.0) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some((lo, hi)), Some((a, b))) => lo <= a && b <= hi,
        }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &IndexInterval) -> IndexInterval {
        match (self.0, other.0) {
            (None, x) | (x, None) => IndexInterval(x),
            (Some((a, b)), Some((c, d))) => IndexInterval(Some((a.min(c), b.max(d)))),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let (lo, hi) = self.0.map_or((1, 0), |b| b);
        lo..=hi
    }
}

impl fmt::Display for IndexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => f.write_str("{}"),
            Some((lo, hi)) if lo == hi => write!(f, "{{{lo}}}"),
            Some((lo, hi)) => write!(f, "{{{lo}..{hi}}}"),
        }
    }
}

/// A map from `{1..n}` to subsets of `{1..n}`, seen only through the hull
/// of each single image.
pub trait DiscreteMap {
    fn size(&self) -> usize;

    /// `conv f({i})`; empty when `f(i)` is empty.
    fn point_hull(&self, i: usize) -> IndexInterval;
}

impl DiscreteMap for Permutation {
    fn size(&self) -> usize {
        self.degree()
    }

    fn point_hull(&self, i: usize) -> IndexInterval {
        IndexInterval::point(self.apply(i))
    }
}

impl DiscreteMap for CyclicPermutation {
    fn size(&self) -> usize {
        self.degree()
    }

    fn point_hull(&self, i: usize) -> IndexInterval {
        IndexInterval::point(self.apply(i))
    }
}

/// `conv f(A)` for an arbitrary finite set `A`.
pub fn conv_image<M, I>(f: &M, set: I) -> Result<IndexInterval, ConvError>
where
    M: DiscreteMap + ?Sized,
    I: IntoIterator<Item = usize>,
{
    let n = f.size();
    let mut acc = IndexInterval::EMPTY;
    for i in set {
        if i == 0 || i > n {
            return Err(ConvError::OutOfRange { index: i, n });
        }
        acc = acc.hull(&f.point_hull(i));
    }
    Ok(acc)
}

/// One step of `conv ∘ f` on an interval already known to be in range.
pub(crate) fn conv_step<M: DiscreteMap + ?Sized>(f: &M, a: &IndexInterval) -> IndexInterval {
    a.iter()
        .fold(IndexInterval::EMPTY, |acc, i| acc.hull(&f.point_hull(i)))
}

/// Least `m <= cap` with `(conv f)^m(A) ⊇ A`, starting from `A` itself.
pub(crate) fn return_time<M: DiscreteMap + ?Sized>(
    f: &M,
    start: IndexInterval,
    cap: usize,
) -> Option<usize> {
    let mut cur = start;
    for m in 1..=cap {
        cur = conv_step(f, &cur);
        if cur.contains_interval(&start) {
            return Some(m);
        }
    }
    None
}

/// The characteristic number `m_i = min { m : (conv f)^m(A_i) ⊇ A_i }`.
///
/// Works for any discrete map; the search is capped at `m <= n`, which is
/// never reached for cyclic permutations.
pub fn characteristic_number<M: DiscreteMap + ?Sized>(f: &M, i: usize) -> Result<usize, ConvError> {
    let n = f.size();
    if i == 0 || i + 1 > n {
        return Err(ConvError::OutOfRange { index: i, n });
    }
    return_time(f, IndexInterval::new(i, i + 1), n).ok_or(ConvError::NoReturn { index: i, cap: n })
}

/// All of `m_1..m_{n-1}`, in position order.
pub fn characteristic_numbers<M: DiscreteMap + ?Sized>(f: &M) -> Result<Vec<usize>, ConvError> {
    (1..f.size()).map(|i| characteristic_number(f, i)).collect()
}

/// Characteristic numbers per position plus their sorted rearrangement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharSequence {
    pub raw: Vec<usize>,
    pub sorted: Vec<usize>,
}

impl CharSequence {
    pub fn from_raw(raw: Vec<usize>) -> Self {
        let mut sorted = raw.clone();
        sorted.sort_unstable();
        Self { raw, sorted }
    }

    /// First 1-based `i` with `sorted[i] > i`.
    pub fn first_violation(&self) -> Option<usize> {
        self.sorted
            .iter()
            .enumerate()
            .find(|(k, &m)| m > k + 1)
            .map(|(k, _)| k + 1)
    }

    pub fn check(&self) -> LemmaCheck {
        match self.first_violation() {
            None => LemmaCheck::Pass,
            Some(index) => LemmaCheck::Violation {
                index,
                sorted: self.sorted.clone(),
            },
        }
    }
}

pub fn characteristic_sequence(f: &CyclicPermutation) -> Result<CharSequence, ConvError> {
    characteristic_numbers(f).map(CharSequence::from_raw)
}

/// Outcome of testing `m'_i <= i` for every `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaCheck {
    Pass,
    Violation { index: usize, sorted: Vec<usize> },
}

impl LemmaCheck {
    pub fn passed(&self) -> bool {
        matches!(self, LemmaCheck::Pass)
    }
}

pub fn check_lemma(f: &CyclicPermutation) -> Result<LemmaCheck, ConvError> {
    Ok(characteristic_sequence(f)?.check())
}

/// The digraph on `A_1..A_{n-1}` with `A_i -> A_j` iff `conv f(A_i) ⊇ A_j`.
///
/// Vertices are numbered `1..=n-1`; successor lists are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovGraph {
    successors: Vec<Vec<usize>>,
}

impl MarkovGraph {
    /// Builds a graph from explicit 1-based successor lists.
    pub fn from_successors(mut successors: Vec<Vec<usize>>) -> Self {
        let v = successors.len();
        for s in &mut successors {
            s.sort_unstable();
            s.dedup();
            assert!(s.iter().all(|&t| t >= 1 && t <= v), "edge target out of range");
        }
        Self { successors }
    }

    pub fn vertex_count(&self) -> usize {
        self.successors.len()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.successors[v - 1]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors(from).binary_search(&to).is_ok()
    }

    /// All edges, sorted by source then target.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(k, s)| s.iter().map(move |&t| (k + 1, t)))
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// Length of the shortest directed cycle through `v`, by BFS from `v`.
    pub fn min_cycle_length(&self, v: usize) -> Option<usize> {
        let count = self.vertex_count();
        assert!(v >= 1 && v <= count, "vertex {v} out of range");
        let mut dist = vec![usize::MAX; count + 1];
        let mut queue = VecDeque::new();
        for &w in self.successors(v) {
            if w == v {
                return Some(1);
            }
            if dist[w] == usize::MAX {
                dist[w] = 1;
                queue.push_back(w);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in self.successors(u) {
                if w == v {
                    return Some(dist[u] + 1);
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Graphviz rendering with vertices `A1..A{n-1}`, one edge per line.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph markov {\n");
        for v in 1..=self.vertex_count() {
            let _ = writeln!(out, "  A{v};");
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  A{a} -> A{b};");
        }
        out.push_str("}\n");
        out
    }
}

pub fn markov_graph<M: DiscreteMap + ?Sized>(f: &M) -> MarkovGraph {
    let n = f.size();
    let successors = (1..n)
        .map(|i| {
            let img = conv_step(f, &IndexInterval::new(i, i + 1));
            match img.bounds() {
                Some((lo, hi)) if hi > lo => (lo..hi).collect(),
                _ => Vec::new(),
            }
        })
        .collect();
    MarkovGraph { successors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::rotation;

    fn example() -> CyclicPermutation {
        CyclicPermutation::from_cycle_notation(&[1, 3, 6, 2, 4, 5]).unwrap()
    }

    #[test]
    fn conv_images_of_worked_example() {
        let f = example();
        assert_eq!(conv_image(&f, [2, 3]).unwrap(), IndexInterval::new(4, 6));
        assert_eq!(conv_image(&f, [4, 5, 6]).unwrap(), IndexInterval::new(1, 5));
        assert_eq!(conv_image(&f, []).unwrap(), IndexInterval::EMPTY);
        assert_eq!(
            conv_image(&f, [7]),
            Err(ConvError::OutOfRange { index: 7, n: 6 })
        );
    }

    #[test]
    fn characteristic_numbers_of_worked_example() {
        let f = example();
        assert_eq!(characteristic_number(&f, 2).unwrap(), 2);
        assert_eq!(characteristic_number(&f, 4).unwrap(), 1);
        assert_eq!(characteristic_number(&f, 1).unwrap(), 3);
        let seq = characteristic_sequence(&f).unwrap();
        assert_eq!(seq.raw, vec![3, 2, 3, 1, 3]);
        assert_eq!(seq.sorted, vec![1, 2, 3, 3, 3]);
        assert!(check_lemma(&f).unwrap().passed());
        assert!(characteristic_number(&f, 6).is_err());
    }

    #[test]
    fn small_closed_forms() {
        assert_eq!(
            characteristic_sequence(&rotation(4, 1).unwrap()).unwrap().sorted,
            vec![1, 2, 3]
        );
        assert_eq!(
            characteristic_sequence(&crate::perm::stefan(5).unwrap()).unwrap().sorted,
            vec![1, 2, 2, 4]
        );
    }

    #[test]
    fn non_cyclic_counterexample_violates_bound() {
        let p = Permutation::from_images(vec![3, 2, 1]).unwrap();
        let seq = CharSequence::from_raw(characteristic_numbers(&p).unwrap());
        assert_eq!(seq.raw, vec![2, 2]);
        assert_eq!(
            seq.check(),
            LemmaCheck::Violation {
                index: 1,
                sorted: vec![2, 2]
            }
        );
    }

    #[test]
    fn no_return_is_an_error() {
        // Constant-like behaviour: the identity never leaves A_i, but a map
        // sending everything to one point never returns.
        struct Collapse(usize);
        impl DiscreteMap for Collapse {
            fn size(&self) -> usize {
                self.0
            }
            fn point_hull(&self, _: usize) -> IndexInterval {
                IndexInterval::point(1)
            }
        }
        assert_eq!(
            characteristic_number(&Collapse(3), 2),
            Err(ConvError::NoReturn { index: 2, cap: 3 })
        );
    }

    #[test]
    fn markov_graph_of_worked_example() {
        let g = markov_graph(&example());
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.successors(4), &[1, 2, 3, 4]);
        assert_eq!(g.edge_count(), 9);
        assert_eq!(g.min_cycle_length(4), Some(1));
        assert_eq!(g.min_cycle_length(2), Some(2));
    }

    #[test]
    fn markov_graph_small_cases() {
        let g = markov_graph(&rotation(3, 1).unwrap());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 2), (2, 1), (2, 2)]);
        let g = markov_graph(&CyclicPermutation::from_cycle_notation(&[1, 2]).unwrap());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 1)]);
        let acyclic = MarkovGraph::from_successors(vec![vec![2], vec![]]);
        assert_eq!(acyclic.min_cycle_length(1), None);
    }

    #[test]
    fn dot_output_is_sorted() {
        let g = markov_graph(&rotation(3, 1).unwrap());
        assert_eq!(
            g.to_dot(),
            "digraph markov {\n  A1;\n  A2;\n  A1 -> A2;\n  A2 -> A1;\n  A2 -> A2;\n}\n"
        );
    }

    #[test]
    fn interval_ops() {
        let a = IndexInterval::new(2, 4);
        assert!(a.contains_interval(&IndexInterval::EMPTY));
        assert!(!IndexInterval::EMPTY.contains_interval(&a));
        assert_eq!(a.hull(&IndexInterval::point(7)), IndexInterval::new(2, 7));
        assert_eq!(IndexInterval::EMPTY.iter().count(), 0);
        assert_eq!(a.to_string(), "{2..4}");
    }
}
