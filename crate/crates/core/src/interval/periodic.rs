use super::{CoveringSystem, IntervalError, Rational, Segment};

pub const DEFAULT_PIECE_CAP: usize = 1_000_000;

/// An exact solution of `f^period(x0) = x0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicPoint {
    pub x0: Rational,
    pub period: usize,
    pub minimal_period: usize,
}

impl PeriodicPoint {
    /// Re-evaluates the orbit exactly: `x0` lies in some `I_j`,
    /// `f^period(x0) = x0`, and no smaller positive iterate fixes it
    /// except at `minimal_period`.
    pub fn verify(&self, sys: &CoveringSystem) -> bool {
        if !sys.contains(&self.x0) || self.minimal_period == 0 || self.minimal_period > self.period {
            return false;
        }
        let f = sys.map();
        match f.iterate(&self.x0, self.period) {
            Ok(y) if y == self.x0 => {}
            _ => return false,
        }
        (1..=self.minimal_period).all(|l| {
            let fixed = f.iterate(&self.x0, l).is_ok_and(|y| y == self.x0);
            fixed == (l == self.minimal_period)
        })
    }
}

/// Where to look first: an interval and a period, e.g. from a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodHint {
    pub lo: Rational,
    pub hi: Rational,
    pub period: usize,
}

fn minimal_period(sys: &CoveringSystem, x0: &Rational, period: usize) -> usize {
    let f = sys.map();
    let mut y = x0.clone();
    for l in 1..=period {
        y = f.evaluate(&y).expect("orbit stays in the domain");
        if &y == x0 {
            return l;
        }
    }
    period
}

/// Pieces of `f^l` on the given starting pieces of `f`, for `l = 1, 2, ...`.
struct IterateSegments<'a> {
    sys: &'a CoveringSystem,
    current: Vec<Segment>,
    l: usize,
    cap: usize,
}

impl<'a> IterateSegments<'a> {
    fn new(sys: &'a CoveringSystem, domain: &[(Rational, Rational)], cap: usize) -> Result<Self, IntervalError> {
        let mut current = Vec::new();
        for (a, b) in domain {
            current.extend(sys.map().segments_on(a, b)?);
        }
        Ok(Self { sys, current, l: 1, cap })
    }

    fn advance(&mut self) -> Result<(), IntervalError> {
        let f = self.sys.map();
        let mut next = Vec::with_capacity(self.current.len());
        for s in &self.current {
            next.extend(f.compose_segment(s));
            if next.len() > self.cap {
                return Err(IntervalError::PieceExplosion { l: self.l + 1, cap: self.cap });
            }
        }
        self.current = next;
        self.l += 1;
        Ok(())
    }

    fn first_fixed_point(&self) -> Option<Rational> {
        self.current.iter().find_map(Segment::fixed_point)
    }
}

/// Finds `x0 ∈ ∪ I_j` and `l <= k` with `f^l(x0) = x0` by composing `f^l`
/// exactly on the intervals and solving each affine piece.
///
/// Iterates may pass through the gaps between intervals; pieces whose orbit
/// leaves the domain of the map are dropped. With a hint, `f^period` is first
/// solved on the hinted interval. Otherwise the leftmost solution for the
/// smallest `l` is returned.
pub fn find_periodic_point(
    sys: &CoveringSystem,
    k: usize,
    hint: Option<&PeriodHint>,
    piece_cap: usize,
) -> Result<PeriodicPoint, IntervalError> {
    let make = |x0: Rational, period: usize| {
        let minimal_period = minimal_period(sys, &x0, period);
        PeriodicPoint { x0, period, minimal_period }
    };
    if let Some(h) = hint.filter(|h| h.period >= 1 && h.period <= k && h.lo <= h.hi) {
        let mut it = IterateSegments::new(sys, &[(h.lo.clone(), h.hi.clone())], piece_cap)?;
        while it.l < h.period {
            it.advance()?;
        }
        if let Some(x0) = it.first_fixed_point().filter(|x| sys.contains(x)) {
            return Ok(make(x0, h.period));
        }
    }
    let mut it = IterateSegments::new(sys, sys.intervals(), piece_cap)?;
    loop {
        if let Some(x0) = it.first_fixed_point() {
            return Ok(make(x0, it.l));
        }
        if it.l >= k {
            return Err(IntervalError::NoPeriodicPoint { k });
        }
        it.advance()?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::q;
    use crate::interval::system::tests::{identity, swapped, system, three_cycle};

    #[test]
    fn three_cycle_fixed_point() {
        let s = three_cycle();
        let p = find_periodic_point(&s, 1, None, DEFAULT_PIECE_CAP).unwrap();
        assert_eq!(p, PeriodicPoint { x0: q("7/3"), period: 1, minimal_period: 1 });
        assert!(p.verify(&s));
    }

    #[test]
    fn identity_takes_left_endpoint() {
        let s = identity();
        let p = find_periodic_point(&s, 1, None, DEFAULT_PIECE_CAP).unwrap();
        assert_eq!(p.x0, q("0"));
        assert_eq!(p.period, 1);
    }

    #[test]
    fn swapped_intervals_have_period_two() {
        let s = swapped();
        assert!(matches!(
            find_periodic_point(&s, 1, None, DEFAULT_PIECE_CAP),
            Err(IntervalError::NoPeriodicPoint { k: 1 })
        ));
        let p = find_periodic_point(&s, 2, None, DEFAULT_PIECE_CAP).unwrap();
        assert_eq!(p.period, 2);
        assert_eq!(p.minimal_period, 2);
        assert_eq!(s.map().iterate(&p.x0, 2).unwrap(), p.x0);
        assert!(p.verify(&s));
    }

    #[test]
    fn hint_is_tried_first() {
        // fixed points at 0 and at 1 on the identity; the hint points at [1/2, 1]
        let s = identity();
        let hint = PeriodHint { lo: q("1/2"), hi: q("1"), period: 1 };
        let p = find_periodic_point(&s, 1, Some(&hint), DEFAULT_PIECE_CAP).unwrap();
        assert_eq!(p.x0, q("1/2"));
    }

    #[test]
    fn piece_cap_is_enforced() {
        let tent = system(&[("0", "1")], &["0", "1/2", "1"], &["0", "1", "0"]);
        // f^3 on [1/3, 2/5] already needs two pieces
        let hint = PeriodHint { lo: q("1/3"), hi: q("2/5"), period: 3 };
        assert!(matches!(
            find_periodic_point(&tent, 3, Some(&hint), 1),
            Err(IntervalError::PieceExplosion { .. })
        ));
    }

    #[test]
    fn verification_rejects_wrong_points() {
        let s = three_cycle();
        let bad = PeriodicPoint { x0: q("2"), period: 1, minimal_period: 1 };
        assert!(!bad.verify(&s));
        let wrong_min = PeriodicPoint { x0: q("7/3"), period: 2, minimal_period: 2 };
        assert!(!wrong_min.verify(&s));
        let outside = PeriodicPoint { x0: q("9"), period: 1, minimal_period: 1 };
        assert!(!outside.verify(&s));
    }
}
