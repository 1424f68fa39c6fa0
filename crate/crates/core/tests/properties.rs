use std::collections::BTreeSet;

use covperm::conv::{characteristic_number, conv_image, markov_graph};
use covperm::f2::{char_poly, char_poly_cofactor, charpoly_coeff_via_minors, BitMatrix};
use covperm::interval::{
    discretize, find_periodic_point, random_covering_system, reduce_to_cyclic, Rational, SetValuedMap,
    DEFAULT_PIECE_CAP,
};
use covperm::lab::random_cycles;
use covperm::perm::{CyclicPermutation, Permutation};
use proptest::prelude::*;

fn cycle(max_n: usize) -> impl Strategy<Value = CyclicPermutation> {
    (2..=max_n, any::<u64>()).prop_map(|(n, seed)| random_cycles(n, 1, seed).pop().unwrap())
}

fn bit_matrix(max_dim: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_dim).prop_flat_map(|d| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), d), d).prop_map(|rows| {
            let text: Vec<String> = rows
                .iter()
                .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect())
                .collect();
            BitMatrix::from_rows(&text).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn cycle_notation_round_trips(seq in (1usize..=12).prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())) {
        let f = CyclicPermutation::from_cycle_notation(&seq).unwrap();
        prop_assert_eq!(f.cycle_order()[0], 1);
        let n = seq.len();
        for (a, &x) in seq.iter().enumerate() {
            prop_assert_eq!(f.apply(x), seq[(a + 1) % n]);
        }
        let text = f.to_string();
        prop_assert_eq!(text.parse::<CyclicPermutation>().unwrap(), f.clone());
        let p: &Permutation = f.as_ref();
        prop_assert_eq!(p.to_string().parse::<Permutation>().unwrap().to_cyclic().unwrap(), f);
    }

    #[test]
    fn conv_image_is_monotone(f in cycle(12), a in any::<u64>(), b in any::<u64>()) {
        let n = f.degree();
        let small: BTreeSet<usize> = (1..=n).filter(|i| (a & b) >> i & 1 == 1).collect();
        let big: BTreeSet<usize> = (1..=n).filter(|i| a >> i & 1 == 1).collect();
        let lo = conv_image(&f, small.iter().copied()).unwrap();
        let hi = conv_image(&f, big.iter().copied()).unwrap();
        prop_assert!(hi.contains_interval(&lo));
        for &i in &big {
            prop_assert!(hi.contains(f.apply(i)));
        }
    }

    #[test]
    fn characteristic_number_is_shortest_cycle(f in (9usize..=12, any::<u64>()).prop_map(|(n, s)| random_cycles(n, 1, s).pop().unwrap())) {
        let g = markov_graph(&f);
        for i in 1..f.degree() {
            prop_assert_eq!(g.min_cycle_length(i), Some(characteristic_number(&f, i).unwrap()));
        }
    }

    #[test]
    fn minors_match_charpoly_coefficients(m in bit_matrix(9)) {
        let p = char_poly(&m);
        prop_assert_eq!(char_poly_cofactor(&m).unwrap(), p);
        let d = m.dim();
        for i in 1..=d {
            let c = charpoly_coeff_via_minors(&m, i).unwrap();
            prop_assert_eq!(c.bit, p.coeff(d - i));
            prop_assert_eq!(c.witness.is_some(), c.bit);
            if let Some(w) = c.witness {
                prop_assert_eq!(w.len(), i);
                prop_assert!(m.principal_submatrix(&w).det());
            }
        }
    }

    #[test]
    fn minimalize_keeps_images(k in 1usize..=4, seed in any::<u64>()) {
        let s = random_covering_system(k, seed);
        let m = s.minimalize();
        prop_assert_eq!(m.images(), s.images());
        prop_assert!(m.is_covering());
        prop_assert_eq!(m.minimalize(), m.clone());
        for ((a, b), (c, d)) in s.intervals().iter().zip(m.intervals()) {
            prop_assert!(a <= c && d <= b);
        }
    }

    #[test]
    fn reduction_follows_the_set_valued_map(images in (1usize..=8).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::btree_set(1..=n, 0..=n), n)
    })) {
        let svm = SetValuedMap::from_images(images).unwrap();
        match reduce_to_cyclic(&svm) {
            Ok(r) => {
                prop_assert!(svm.is_covering());
                prop_assert!(r.index_map.windows(2).all(|w| w[0] < w[1]));
                prop_assert_eq!(r.index_map.len(), r.perm.degree());
                for (a, &orig) in r.index_map.iter().enumerate() {
                    let target = r.index_map[r.perm.apply(a + 1) - 1];
                    prop_assert!(svm.image(orig).contains(&target));
                }
            }
            Err(_) => prop_assert!(!svm.is_covering()),
        }
    }

    #[test]
    fn discretized_systems_cover_and_reduce(k in 1usize..=4, seed in any::<u64>()) {
        let s = random_covering_system(k, seed).minimalize();
        let delta = s.min_length() / Rational::from_integer(1000.into());
        let d = discretize(&s, &delta, 4096).unwrap();
        prop_assert!(d.svm.is_covering());
        for w in d.closure.sets.windows(2) {
            prop_assert!(w[0].is_subset(&w[1]));
        }
        prop_assert!(d.closure.sets.iter().flatten().all(|x| s.contains(x)));
        let r = reduce_to_cyclic(&d.svm).unwrap();
        prop_assert!(r.partition.k() <= k);
    }

    #[test]
    fn periodic_points_are_exact(k in 1usize..=4, seed in any::<u64>()) {
        let s = random_covering_system(k, seed);
        let p = find_periodic_point(&s, k, None, DEFAULT_PIECE_CAP).unwrap();
        prop_assert!(p.period <= k);
        prop_assert!(p.verify(&s));
        prop_assert_eq!(s.map().iterate(&p.x0, p.minimal_period).unwrap(), p.x0);
    }
}
