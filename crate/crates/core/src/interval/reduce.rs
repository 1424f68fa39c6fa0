use std::collections::{BTreeMap, BTreeSet};

use super::{IntervalError, SetValuedMap};
use crate::perm::{CyclicPermutation, Permutation};

/// Consecutive blocks `{1..i_1}, {i_1+1..i_2}, ..., {i_{k-1}+1..n}` given
/// by their cut indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    cuts: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, cuts: Vec<usize>) -> Result<Self, IntervalError> {
        if n == 0 {
            return Err(IntervalError::BadPartition("empty ground set".into()));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(IntervalError::BadPartition(format!("cuts {cuts:?} must strictly increase")));
        }
        if cuts.iter().any(|&c| c == 0 || c >= n) {
            return Err(IntervalError::BadPartition(format!("cuts {cuts:?} must lie in 1..{n}")));
        }
        Ok(Self { n, cuts })
    }

    /// The single block `{1..n}`.
    pub fn whole(n: usize) -> Self {
        Self { n, cuts: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    /// Number of blocks.
    pub fn k(&self) -> usize {
        self.cuts.len() + 1
    }

    pub fn is_cut(&self, i: usize) -> bool {
        self.cuts.binary_search(&i).is_ok()
    }

    /// 1-based block containing `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.cuts.partition_point(|&c| c < i) + 1
    }
}

/// A cyclic permutation extracted from a covering set-valued map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub perm: CyclicPermutation,
    /// `index_map[new - 1]` is the original cell of reduced index `new`.
    pub index_map: Vec<usize>,
    pub partition: Partition,
    /// Rounds of disjointify + eliminate until nothing changed.
    pub rounds: usize,
}

fn covers(alive: &BTreeSet<usize>, images: &BTreeMap<usize, BTreeSet<usize>>) -> bool {
    let union: BTreeSet<usize> = images.values().flatten().copied().collect();
    &union == alive
}

/// Shrinks a covering set-valued map to a cyclic permutation:
///
/// 1. each target is kept only in its smallest-index preimage;
/// 2. indices with empty image are deleted (from the domain and from every image);
///
/// repeated until nothing changes. What survives is a permutation; the
/// orbit of its smallest index is kept and relabelled in order.
pub fn reduce_to_cyclic(svm: &SetValuedMap) -> Result<Reduction, IntervalError> {
    let mut alive: BTreeSet<usize> = (1..=svm.n()).collect();
    let mut images: BTreeMap<usize, BTreeSet<usize>> =
        alive.iter().map(|&i| (i, svm.image(i).clone())).collect();
    if !covers(&alive, &images) {
        return Err(IntervalError::DiscreteCovering {
            uncovered: svm.uncovered(),
        });
    }
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for (&i, img) in &images {
            for &t in img {
                owner.entry(t).or_insert(i);
            }
        }
        for (&i, img) in images.iter_mut() {
            let before = img.len();
            img.retain(|t| owner[t] == i);
            changed |= img.len() != before;
        }
        if !covers(&alive, &images) {
            return Err(IntervalError::Reduction(format!("disjointify lost coverage in round {rounds}")));
        }
        let empty: Vec<usize> = images.iter().filter(|(_, s)| s.is_empty()).map(|(&i, _)| i).collect();
        for i in &empty {
            alive.remove(i);
            images.remove(i);
        }
        for img in images.values_mut() {
            for i in &empty {
                img.remove(i);
            }
        }
        changed |= !empty.is_empty();
        if !covers(&alive, &images) {
            return Err(IntervalError::Reduction(format!("elimination lost coverage in round {rounds}")));
        }
        if !changed {
            break;
        }
    }
    let Some(&start) = alive.first() else {
        return Err(IntervalError::Reduction("nothing survives the reduction".into()));
    };
    if let Some((i, img)) = images.iter().find(|(_, s)| s.len() != 1) {
        return Err(IntervalError::Reduction(format!("index {i} keeps {} targets", img.len())));
    }
    let next = |i: usize| *images[&i].first().unwrap();
    let mut orbit = BTreeSet::from([start]);
    let mut x = next(start);
    while x != start {
        if !orbit.insert(x) {
            return Err(IntervalError::Reduction("survivor is not a bijection".into()));
        }
        x = next(x);
    }
    let index_map: Vec<usize> = orbit.iter().copied().collect();
    let rank = |orig: usize| index_map.binary_search(&orig).unwrap() + 1;
    let table: Vec<usize> = index_map.iter().map(|&o| rank(next(o))).collect();
    let perm = Permutation::from_images(table)
        .and_then(|p| p.to_cyclic())
        .map_err(|e| IntervalError::Reduction(e.to_string()))?;
    let cuts = (1..index_map.len())
        .filter(|&a| svm.part_of()[index_map[a - 1] - 1] != svm.part_of()[index_map[a] - 1])
        .collect();
    let partition = Partition::new(index_map.len(), cuts)?;
    Ok(Reduction {
        perm,
        index_map,
        partition,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn svm(images: &[&[usize]]) -> SetValuedMap {
        SetValuedMap::from_images(images.iter().map(|s| s.iter().copied().collect()).collect()).unwrap()
    }

    #[test]
    fn partition_basics() {
        let p = Partition::new(6, vec![3]).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.block_of(3), 1);
        assert_eq!(p.block_of(4), 2);
        assert!(p.is_cut(3));
        assert!(Partition::new(3, vec![3]).is_err());
        assert!(Partition::new(5, vec![2, 2]).is_err());
        assert_eq!(Partition::whole(4).k(), 1);
    }

    #[test]
    fn disjointify_gives_transposition() {
        let r = reduce_to_cyclic(&svm(&[&[2], &[1, 2]])).unwrap();
        assert_eq!(r.perm.cycle_order(), &[1, 2]);
        assert_eq!(r.index_map, vec![1, 2]);
    }

    #[test]
    fn eliminate_collapses_to_a_point() {
        let r = reduce_to_cyclic(&svm(&[&[1, 2], &[1, 2]])).unwrap();
        assert_eq!(r.perm.degree(), 1);
        assert_eq!(r.index_map, vec![1]);
    }

    #[test]
    fn cyclic_input_is_unchanged() {
        let r = reduce_to_cyclic(&svm(&[&[3], &[4], &[6], &[5], &[1], &[2]])).unwrap();
        assert_eq!(r.perm.cycle_order(), &[1, 3, 6, 2, 4, 5]);
        assert_eq!(r.index_map, (1..=6).collect::<Vec<_>>());
        assert_eq!(r.rounds, 1);
    }

    #[test]
    fn smallest_orbit_is_chosen() {
        // (1 2)(3 4 5): keep the orbit of 1
        let r = reduce_to_cyclic(&svm(&[&[2], &[1], &[4], &[5], &[3]])).unwrap();
        assert_eq!(r.index_map, vec![1, 2]);
        // 1 is eliminated, leaving (2 3)
        let r = reduce_to_cyclic(&svm(&[&[], &[1, 3], &[2]])).unwrap();
        assert_eq!(r.index_map, vec![2, 3]);
        assert_eq!(r.perm.cycle_order(), &[1, 2]);
    }

    #[test]
    fn non_covering_input_is_rejected() {
        assert!(matches!(
            reduce_to_cyclic(&svm(&[&[1], &[1]])),
            Err(IntervalError::DiscreteCovering { uncovered }) if uncovered == vec![2]
        ));
    }
}
