use serde::{Deserialize, Serialize};

use super::{fmt_all, parse_all, parse_rational, IntervalError, PiecewiseLinearMap, Rational};

/// Disjoint closed intervals `[a_1,b_1] < ... < [a_k,b_k]` and a
/// piecewise-linear map defined on all of them.
///
/// Construction checks the structure only; the covering property
/// `f(∪ I_j) ⊇ ∪ I_j` is tested by [`CoveringSystem::is_covering`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringSystem {
    intervals: Vec<(Rational, Rational)>,
    map: PiecewiseLinearMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct MapJson {
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct SystemJson {
    pub intervals: Vec<[String; 2]>,
    pub map: MapJson,
}

impl CoveringSystem {
    pub fn new(intervals: Vec<(Rational, Rational)>, map: PiecewiseLinearMap) -> Result<Self, IntervalError> {
        if intervals.is_empty() {
            return Err(IntervalError::BadIntervals("no intervals".into()));
        }
        for (a, b) in &intervals {
            if a >= b {
                return Err(IntervalError::BadIntervals(format!("[{a}, {b}] is not a proper interval")));
            }
            if !map.in_domain(a) || !map.in_domain(b) {
                return Err(IntervalError::BadIntervals(format!(
                    "[{a}, {b}] is not inside the map domain"
                )));
            }
        }
        for w in intervals.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(IntervalError::BadIntervals(format!(
                    "[{}, {}] and [{}, {}] are not sorted and disjoint",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(Self { intervals, map })
    }

    pub fn k(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn map(&self) -> &PiecewiseLinearMap {
        &self.map
    }

    /// 1-based index of the interval containing `x`.
    pub fn block_of(&self, x: &Rational) -> Option<usize> {
        self.intervals
            .iter()
            .position(|(a, b)| a <= x && x <= b)
            .map(|j| j + 1)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.block_of(x).is_some()
    }

    /// Exact image `f(I_j)` of every interval.
    pub fn images(&self) -> Vec<(Rational, Rational)> {
        self.intervals
            .iter()
            .map(|(a, b)| self.map.image_of_interval(a, b).expect("validated at construction"))
            .collect()
    }

    /// True iff the union of the images contains every interval.
    pub fn is_covering(&self) -> bool {
        let mut images = self.images();
        images.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::new();
        for (lo, hi) in images {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        self.intervals
            .iter()
            .all(|(a, b)| merged.iter().any(|(lo, hi)| lo <= a && b <= hi))
    }

    /// Shrinks each interval so that its endpoints attain the minimum and
    /// maximum of `f` over it. Images, and therefore covering, are unchanged.
    ///
    /// An interval whose endpoints already attain both extremes is kept.
    /// Otherwise the closest (argmin, argmax) pair among endpoints and
    /// interior breakpoints is used, leftmost on ties.
    pub fn minimalize(&self) -> CoveringSystem {
        let intervals = self
            .intervals
            .iter()
            .map(|(a, b)| {
                let mut pts = vec![a.clone()];
                pts.extend(self.map.breakpoints().iter().filter(|x| a < *x && *x < b).cloned());
                pts.push(b.clone());
                let vals: Vec<Rational> = pts.iter().map(|x| self.map.evaluate(x).unwrap()).collect();
                let lo = vals.iter().min().unwrap();
                let hi = vals.iter().max().unwrap();
                let (fa, fb) = (&vals[0], vals.last().unwrap());
                if (fa == lo && fb == hi) || (fa == hi && fb == lo) {
                    return (a.clone(), b.clone());
                }
                let argmin: Vec<&Rational> = pts.iter().zip(&vals).filter(|(_, v)| *v == lo).map(|p| p.0).collect();
                let argmax: Vec<&Rational> = pts.iter().zip(&vals).filter(|(_, v)| *v == hi).map(|p| p.0).collect();
                let mut best: Option<(Rational, Rational)> = None;
                for p in &argmin {
                    for r in &argmax {
                        let (l, u) = if p < r { (*p, *r) } else { (*r, *p) };
                        let better = match &best {
                            None => true,
                            Some((bl, bu)) => {
                                let (w, bw) = (u - l, bu - bl);
                                w < bw || (w == bw && l < bl)
                            }
                        };
                        if better {
                            best = Some((l.clone(), u.clone()));
                        }
                    }
                }
                best.unwrap()
            })
            .collect();
        CoveringSystem {
            intervals,
            map: self.map.clone(),
        }
    }

    /// Smallest interval length.
    pub fn min_length(&self) -> Rational {
        self.intervals.iter().map(|(a, b)| b - a).min().unwrap()
    }

    pub(crate) fn to_wire(&self) -> SystemJson {
        SystemJson {
            intervals: self
                .intervals
                .iter()
                .map(|(a, b)| [a.to_string(), b.to_string()])
                .collect(),
            map: MapJson {
                breakpoints: fmt_all(self.map.breakpoints()),
                values: fmt_all(self.map.values()),
            },
        }
    }

    pub(crate) fn from_wire(w: SystemJson) -> Result<Self, IntervalError> {
        let intervals = w
            .intervals
            .iter()
            .map(|[a, b]| Ok((parse_rational(a)?, parse_rational(b)?)))
            .collect::<Result<Vec<_>, IntervalError>>()?;
        let map = PiecewiseLinearMap::new(parse_all(&w.map.breakpoints)?, parse_all(&w.map.values)?)?;
        CoveringSystem::new(intervals, map)
    }

    /// `{"intervals": [["a","b"],...], "map": {"breakpoints": [...], "values": [...]}}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, IntervalError> {
        let w: SystemJson = serde_json::from_str(s).map_err(|e| IntervalError::Json(e.to_string()))?;
        Self::from_wire(w)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::interval::q;

    pub(crate) fn system(intervals: &[(&str, &str)], bps: &[&str], vals: &[&str]) -> CoveringSystem {
        let map = PiecewiseLinearMap::new(bps.iter().map(|s| q(s)).collect(), vals.iter().map(|s| q(s)).collect()).unwrap();
        CoveringSystem::new(intervals.iter().map(|(a, b)| (q(a), q(b))).collect(), map).unwrap()
    }

    pub(crate) fn three_cycle() -> CoveringSystem {
        system(&[("1", "3")], &["1", "2", "3"], &["2", "3", "1"])
    }

    pub(crate) fn identity() -> CoveringSystem {
        system(&[("0", "1")], &["0", "1"], &["0", "1"])
    }

    pub(crate) fn swapped() -> CoveringSystem {
        system(&[("0", "1"), ("2", "3")], &["0", "1", "2", "3"], &["2", "3", "0", "1"])
    }

    #[test]
    fn covering_checks() {
        assert!(identity().is_covering());
        assert!(!system(&[("0", "1")], &["0", "1"], &["0", "1/2"]).is_covering());
        assert!(three_cycle().is_covering());
        assert!(swapped().is_covering());
        // each image covers only part, but together they cover
        let split = system(&[("0", "1"), ("2", "3")], &["0", "1", "2", "3"], &["0", "2", "2", "3"]);
        assert!(split.is_covering());
    }

    #[test]
    fn structural_validation() {
        let map = PiecewiseLinearMap::new(vec![q("0"), q("3")], vec![q("0"), q("3")]).unwrap();
        assert!(CoveringSystem::new(vec![], map.clone()).is_err());
        assert!(CoveringSystem::new(vec![(q("1"), q("1"))], map.clone()).is_err());
        assert!(CoveringSystem::new(vec![(q("0"), q("2")), (q("2"), q("3"))], map.clone()).is_err());
        assert!(CoveringSystem::new(vec![(q("0"), q("4"))], map).is_err());
    }

    #[test]
    fn minimalization() {
        // f(1) = 2 is not extreme; the extremes sit at 2 and 3
        let s = three_cycle();
        assert_eq!(s.minimalize().intervals(), &[(q("2"), q("3"))]);
        assert_eq!(s.minimalize().images(), s.images());
        let id = identity();
        assert_eq!(id.minimalize(), id);
        // interior maximum at 1, interior minimum at 2
        let s = system(&[("0", "3")], &["0", "1", "2", "3"], &["1", "3", "0", "2"]);
        let m = s.minimalize();
        assert_eq!(m.intervals(), &[(q("1"), q("2"))]);
        assert_eq!(m.images(), s.images());
        assert!(m.is_covering() == s.is_covering());
        assert_eq!(m.minimalize(), m);
        // constant interval stays put
        let c = system(&[("0", "1")], &["0", "1"], &["1/2", "1/2"]);
        assert_eq!(c.minimalize(), c);
    }

    #[test]
    fn json_round_trip() {
        let s = system(&[("1/3", "1"), ("2", "7/2")], &["0", "1", "2", "4"], &["7/2", "-1/5", "3", "0"]);
        let text = s.to_json();
        assert!(text.contains("\"1/3\""));
        assert_eq!(CoveringSystem::from_json(&text).unwrap(), s);
        assert!(matches!(CoveringSystem::from_json("{"), Err(IntervalError::Json(_))));
        assert!(matches!(
            CoveringSystem::from_json(r#"{"intervals":[["0","x"]],"map":{"breakpoints":["0","1"],"values":["0","1"]}}"#),
            Err(IntervalError::Parse(_))
        ));
    }
}
