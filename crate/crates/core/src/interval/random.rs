use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CoveringSystem, PiecewiseLinearMap, Rational};

const DENOM: i64 = 12;

fn rat(num: i64) -> Rational {
    Rational::new(num.into(), DENOM.into())
}

/// A seeded random covering system with `k` intervals, drawn with ChaCha8.
///
/// Endpoints lie on the lattice `(1/12)Z` inside `[0, 4k]` and the map is a
/// self-map of `[a_1, b_k]` with at most `3k` breakpoints. Each interval is
/// assigned a run of target intervals and mapped onto a larger range whose
/// ends may reach into neighbouring intervals; the runs are redrawn until
/// together they hit every interval. About half the intervals get an
/// interior breakpoint attaining an extreme, so the endpoints do not and
/// minimalization has work to do.
pub fn random_covering_system(k: usize, seed: u64) -> CoveringSystem {
    assert!(k >= 1, "need at least one interval");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = 4 * DENOM;
    // endpoints in lattice units: interval j sits inside [unit*j, unit*(j+1))
    let ends: Vec<(i64, i64)> = (0..k as i64)
        .map(|j| {
            let a = unit * j + rng.random_range(0..DENOM);
            let b = unit * j + rng.random_range(2 * DENOM..unit - DENOM);
            (a, b)
        })
        .collect();
    let (lo_dom, hi_dom) = (ends[0].0, ends[k - 1].1);

    let mut runs: Vec<(usize, usize)> = Vec::with_capacity(k);
    for _ in 0..32 {
        runs = (0..k)
            .map(|_| {
                let p = rng.random_range(0..k);
                let q = rng.random_range(p..k.min(p + 2));
                (p, q)
            })
            .collect();
        if (0..k).all(|t| runs.iter().any(|&(p, q)| p <= t && t <= q)) {
            break;
        }
        runs.clear();
    }
    if runs.is_empty() {
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(&mut rng);
        runs = order.into_iter().map(|t| (t, t)).collect();
    }

    let mut points: Vec<(i64, i64)> = Vec::new();
    for (j, &(a, b)) in ends.iter().enumerate() {
        let (p, q) = runs[j];
        let lo = (ends[p].0 - rng.random_range(0..unit)).max(lo_dom);
        let hi = (ends[q].1 + rng.random_range(0..unit)).min(hi_dom);
        let (first, last) = if rng.random_bool(0.5) { (lo, hi) } else { (hi, lo) };
        if b - a >= 2 && rng.random_bool(0.5) {
            // interior breakpoint attains `last`; b sits strictly between
            let m = rng.random_range(a + 1..b);
            let mid = if (hi - lo) >= 2 { rng.random_range(lo + 1..hi) } else { lo };
            points.extend([(a, first), (m, last), (b, mid)]);
        } else {
            points.extend([(a, first), (b, last)]);
        }
    }
    let (bps, vals): (Vec<Rational>, Vec<Rational>) = points.into_iter().map(|(x, y)| (rat(x), rat(y))).unzip();
    let map = PiecewiseLinearMap::new(bps, vals).expect("breakpoints increase");
    let intervals = ends.into_iter().map(|(a, b)| (rat(a), rat(b))).collect();
    let sys = CoveringSystem::new(intervals, map).expect("intervals are disjoint and inside the domain");
    debug_assert!(sys.is_covering());
    sys
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_systems_are_covering_and_reproducible() {
        for k in 1..=4 {
            for seed in 0..50 {
                let s = random_covering_system(k, seed);
                assert_eq!(s.k(), k);
                assert!(s.is_covering(), "k={k} seed={seed}");
                assert!(s.map().breakpoints().len() <= 12);
                let (lo, hi) = s.map().domain();
                assert_eq!((lo, hi), (&s.intervals()[0].0, &s.intervals()[k - 1].1));
                assert!(s.map().values().iter().all(|v| lo <= v && v <= hi));
                assert_eq!(s, random_covering_system(k, seed));
            }
        }
    }

    #[test]
    fn some_systems_need_minimalization() {
        let shrunk = (0..40)
            .map(|seed| random_covering_system(3, seed))
            .filter(|s| s.minimalize() != *s)
            .count();
        assert!(shrunk > 0);
    }
}
