use num_traits::Zero;

use super::{IntervalError, Rational};

/// A continuous map, linear between consecutive breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinearMap {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

/// An affine piece `x0 -> y0`, `x1 -> y1` with `x0 <= x1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub x0: Rational,
    pub x1: Rational,
    pub y0: Rational,
    pub y1: Rational,
}

impl Segment {
    pub fn at(&self, x: &Rational) -> Rational {
        if self.x0 == self.x1 {
            return self.y0.clone();
        }
        &self.y0 + (&self.y1 - &self.y0) * (x - &self.x0) / (&self.x1 - &self.x0)
    }

    /// Leftmost solution of `y = x` on the piece. A piece lying on the
    /// diagonal yields its left endpoint.
    pub fn fixed_point(&self) -> Option<Rational> {
        let h0 = &self.y0 - &self.x0;
        let h1 = &self.y1 - &self.x1;
        if h0.is_zero() {
            return Some(self.x0.clone());
        }
        if h1.is_zero() {
            return Some(self.x1.clone());
        }
        if (h0 > Rational::zero()) == (h1 > Rational::zero()) {
            return None;
        }
        Some(&self.x0 + &h0 * (&self.x1 - &self.x0) / (&h0 - &h1))
    }
}

impl PiecewiseLinearMap {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self, IntervalError> {
        if breakpoints.len() != values.len() {
            return Err(IntervalError::BadMap(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.len() < 2 {
            return Err(IntervalError::BadMap("need at least two breakpoints".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(IntervalError::BadMap("breakpoints must strictly increase".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (&self.breakpoints[0], self.breakpoints.last().unwrap())
    }

    pub fn in_domain(&self, x: &Rational) -> bool {
        let (lo, hi) = self.domain();
        lo <= x && x <= hi
    }

    fn out_of_domain(&self, x: &Rational) -> IntervalError {
        let (lo, hi) = self.domain();
        IntervalError::OutOfDomain {
            x: x.to_string(),
            lo: lo.to_string(),
            hi: hi.to_string(),
        }
    }

    /// Index `t` of a piece `[x_t, x_{t+1}]` containing `x`.
    fn piece_of(&self, x: &Rational) -> usize {
        let below = self.breakpoints.partition_point(|b| b <= x);
        below.clamp(1, self.breakpoints.len() - 1) - 1
    }

    pub fn evaluate(&self, x: &Rational) -> Result<Rational, IntervalError> {
        if !self.in_domain(x) {
            return Err(self.out_of_domain(x));
        }
        let t = self.piece_of(x);
        Ok(self.piece(t).at(x))
    }

    /// `f^l(x)`, failing if the orbit leaves the domain.
    pub fn iterate(&self, x: &Rational, l: usize) -> Result<Rational, IntervalError> {
        let mut y = x.clone();
        for _ in 0..l {
            y = self.evaluate(&y)?;
        }
        Ok(y)
    }

    fn piece(&self, t: usize) -> Segment {
        Segment {
            x0: self.breakpoints[t].clone(),
            x1: self.breakpoints[t + 1].clone(),
            y0: self.values[t].clone(),
            y1: self.values[t + 1].clone(),
        }
    }

    /// The affine pieces of `f` restricted to `[a, b]`, left to right.
    pub fn segments_on(&self, a: &Rational, b: &Rational) -> Result<Vec<Segment>, IntervalError> {
        if !self.in_domain(a) {
            return Err(self.out_of_domain(a));
        }
        if !self.in_domain(b) {
            return Err(self.out_of_domain(b));
        }
        let mut cuts = vec![a.clone()];
        cuts.extend(self.breakpoints.iter().filter(|x| a < *x && *x < b).cloned());
        if b > a {
            cuts.push(b.clone());
        }
        if cuts.len() == 1 {
            let y = self.evaluate(a)?;
            return Ok(vec![Segment {
                x0: a.clone(),
                x1: a.clone(),
                y0: y.clone(),
                y1: y,
            }]);
        }
        cuts.windows(2)
            .map(|w| {
                Ok(Segment {
                    x0: w[0].clone(),
                    x1: w[1].clone(),
                    y0: self.evaluate(&w[0])?,
                    y1: self.evaluate(&w[1])?,
                })
            })
            .collect()
    }

    /// Exact `[min f, max f]` over `[a, b]`.
    pub fn image_of_interval(&self, a: &Rational, b: &Rational) -> Result<(Rational, Rational), IntervalError> {
        let segs = self.segments_on(a, b)?;
        let mut lo = segs[0].y0.clone();
        let mut hi = lo.clone();
        for s in &segs {
            for y in [&s.y0, &s.y1] {
                if *y < lo {
                    lo = y.clone();
                }
                if *y > hi {
                    hi = y.clone();
                }
            }
        }
        Ok((lo, hi))
    }

    /// Pieces of `f ∘ g` for a piece of `g`, splitting where `g` crosses a
    /// breakpoint of `f` and dropping the parts where `g` leaves the domain.
    pub fn compose_segment(&self, g: &Segment) -> Vec<Segment> {
        let (dlo, dhi) = self.domain();
        if g.y0 == g.y1 {
            if !self.in_domain(&g.y0) {
                return Vec::new();
            }
            let y = self.evaluate(&g.y0).expect("checked");
            return vec![Segment {
                x0: g.x0.clone(),
                x1: g.x1.clone(),
                y0: y.clone(),
                y1: y,
            }];
        }
        let (ylo, yhi) = if g.y0 < g.y1 { (&g.y0, &g.y1) } else { (&g.y1, &g.y0) };
        let lo = if ylo > dlo { ylo } else { dlo };
        let hi = if yhi < dhi { yhi } else { dhi };
        if lo > hi {
            return Vec::new();
        }
        let mut ys = vec![lo.clone()];
        ys.extend(self.breakpoints.iter().filter(|b| lo < *b && *b < hi).cloned());
        if hi > lo {
            ys.push(hi.clone());
        }
        // x where g reaches level y
        let x_at = |y: &Rational| &g.x0 + (y - &g.y0) * (&g.x1 - &g.x0) / (&g.y1 - &g.y0);
        let points: Vec<(Rational, Rational)> = ys
            .iter()
            .map(|y| (x_at(y), self.evaluate(y).expect("inside domain")))
            .collect();
        let mut out: Vec<Segment> = if points.len() == 1 {
            let (x, y) = points.into_iter().next().unwrap();
            vec![Segment {
                x0: x.clone(),
                x1: x,
                y0: y.clone(),
                y1: y,
            }]
        } else {
            points
                .windows(2)
                .map(|w| {
                    let ((xa, ya), (xb, yb)) = (&w[0], &w[1]);
                    if xa <= xb {
                        Segment { x0: xa.clone(), x1: xb.clone(), y0: ya.clone(), y1: yb.clone() }
                    } else {
                        Segment { x0: xb.clone(), x1: xa.clone(), y0: yb.clone(), y1: ya.clone() }
                    }
                })
                .collect()
        };
        if g.y0 > g.y1 {
            out.reverse();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::q;

    fn three_cycle() -> PiecewiseLinearMap {
        PiecewiseLinearMap::new(vec![q("1"), q("2"), q("3")], vec![q("2"), q("3"), q("1")]).unwrap()
    }

    #[test]
    fn evaluation() {
        let f = three_cycle();
        assert_eq!(f.evaluate(&q("5/2")).unwrap(), q("2"));
        assert_eq!(f.evaluate(&q("2")).unwrap(), q("3"));
        assert_eq!(f.evaluate(&q("3")).unwrap(), q("1"));
        assert!(matches!(f.evaluate(&q("0")), Err(IntervalError::OutOfDomain { .. })));
        assert_eq!(f.iterate(&q("1"), 3).unwrap(), q("1"));
    }

    #[test]
    fn construction_errors() {
        assert!(PiecewiseLinearMap::new(vec![q("1")], vec![q("1")]).is_err());
        assert!(PiecewiseLinearMap::new(vec![q("1"), q("1")], vec![q("1"), q("2")]).is_err());
        assert!(PiecewiseLinearMap::new(vec![q("1"), q("2")], vec![q("1")]).is_err());
    }

    #[test]
    fn interval_images() {
        let f = three_cycle();
        assert_eq!(f.image_of_interval(&q("1"), &q("3")).unwrap(), (q("1"), q("3")));
        assert_eq!(f.image_of_interval(&q("1"), &q("2")).unwrap(), (q("2"), q("3")));
        let c = PiecewiseLinearMap::new(vec![q("0"), q("5")], vec![q("2"), q("2")]).unwrap();
        assert_eq!(c.image_of_interval(&q("1"), &q("4")).unwrap(), (q("2"), q("2")));
        assert_eq!(f.image_of_interval(&q("2"), &q("2")).unwrap(), (q("3"), q("3")));
    }

    #[test]
    fn segment_fixed_points() {
        let s = Segment { x0: q("2"), x1: q("3"), y0: q("3"), y1: q("1") };
        assert_eq!(s.fixed_point(), Some(q("7/3")));
        let diag = Segment { x0: q("0"), x1: q("1"), y0: q("0"), y1: q("1") };
        assert_eq!(diag.fixed_point(), Some(q("0")));
        let above = Segment { x0: q("1"), x1: q("2"), y0: q("2"), y1: q("3") };
        assert_eq!(above.fixed_point(), None);
    }

    #[test]
    fn composition_splits_at_breakpoints() {
        let f = three_cycle();
        // g = f on [2,3] runs 3 -> 1 and crosses the breakpoint 2 of f.
        let g = Segment { x0: q("2"), x1: q("3"), y0: q("3"), y1: q("1") };
        let parts = f.compose_segment(&g);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].x0, q("2"));
        assert_eq!(parts[0].x1, q("5/2"));
        assert_eq!(parts[1].x1, q("3"));
        for p in &parts {
            for x in [&p.x0, &p.x1] {
                assert_eq!(p.at(x), f.iterate(x, 2).unwrap());
            }
        }
        // a piece whose values leave the domain is clipped
        let out = Segment { x0: q("1"), x1: q("2"), y0: q("0"), y1: q("2") };
        let parts = f.compose_segment(&out);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].x0, q("3/2"));
    }
}
