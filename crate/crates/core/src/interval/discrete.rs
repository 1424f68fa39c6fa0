use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{fmt_all, parse_all, CoveringSystem, IntervalError, Rational};
use crate::conv::{DiscreteMap, IndexInterval};

/// A map from grid cells `1..=n` to sets of grid cells.
///
/// Cells are the gaps between consecutive grid points inside one interval
/// `I_j`; `part_of[c - 1]` is that `j`. Abstract maps built with
/// [`SetValuedMap::from_images`] carry no grid and put every cell in `I_1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetValuedMap {
    images: Vec<BTreeSet<usize>>,
    grid: Vec<Rational>,
    cells: Vec<(Rational, Rational)>,
    part_of: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub(crate) struct SetValuedMapJson {
    pub n: usize,
    pub images: Vec<Vec<usize>>,
    pub grid: Vec<String>,
    pub part_of: Vec<usize>,
}

impl SetValuedMap {
    /// An abstract map (no geometry). Image entries must lie in `1..=n`.
    pub fn from_images(images: Vec<BTreeSet<usize>>) -> Result<Self, IntervalError> {
        let n = images.len();
        Self::check_images(&images, n)?;
        Ok(Self {
            images,
            grid: Vec::new(),
            cells: Vec::new(),
            part_of: vec![1; n],
        })
    }

    fn check_images(images: &[BTreeSet<usize>], n: usize) -> Result<(), IntervalError> {
        if let Some(bad) = images.iter().flatten().find(|&&t| t == 0 || t > n) {
            return Err(IntervalError::BadMap(format!("image index {bad} out of range 1..={n}")));
        }
        Ok(())
    }

    /// Rebuilds the cells from a sorted grid and the per-cell block labels:
    /// block `j` with `c` cells consumes `c + 1` consecutive grid points.
    fn cells_from_grid(grid: &[Rational], part_of: &[usize]) -> Result<Vec<(Rational, Rational)>, IntervalError> {
        let bad = |m: &str| IntervalError::BadMap(format!("grid/part_of mismatch: {m}"));
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("grid must strictly increase"));
        }
        if part_of.windows(2).any(|w| w[0] > w[1]) {
            return Err(bad("part_of must be non-decreasing"));
        }
        let mut cells = Vec::with_capacity(part_of.len());
        let mut pos = 0usize;
        let mut k = 0usize;
        while k < part_of.len() {
            let block = part_of[k];
            let count = part_of[k..].iter().take_while(|&&b| b == block).count();
            if pos + count >= grid.len() {
                return Err(bad("not enough grid points"));
            }
            for c in 0..count {
                cells.push((grid[pos + c].clone(), grid[pos + c + 1].clone()));
            }
            pos += count + 1;
            k += count;
        }
        if pos != grid.len() {
            return Err(bad("unused grid points"));
        }
        Ok(cells)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, i: usize) -> &BTreeSet<usize> {
        &self.images[i - 1]
    }

    pub fn images(&self) -> &[BTreeSet<usize>] {
        &self.images
    }

    pub fn grid(&self) -> &[Rational] {
        &self.grid
    }

    /// The real subinterval behind cell `i`, when the map has geometry.
    pub fn cell(&self, i: usize) -> Option<&(Rational, Rational)> {
        self.cells.get(i - 1)
    }

    pub fn part_of(&self) -> &[usize] {
        &self.part_of
    }

    /// Cells not hit by any image, ascending.
    pub fn uncovered(&self) -> Vec<usize> {
        let mut hit = vec![false; self.n() + 1];
        for &t in self.images.iter().flatten() {
            hit[t] = true;
        }
        (1..=self.n()).filter(|&i| !hit[i]).collect()
    }

    pub fn is_covering(&self) -> bool {
        self.uncovered().is_empty()
    }

    pub(crate) fn to_wire(&self) -> SetValuedMapJson {
        SetValuedMapJson {
            n: self.n(),
            images: self.images.iter().map(|s| s.iter().copied().collect()).collect(),
            grid: fmt_all(&self.grid),
            part_of: self.part_of.clone(),
        }
    }

    pub(crate) fn from_wire(w: SetValuedMapJson) -> Result<Self, IntervalError> {
        if w.images.len() != w.n || w.part_of.len() != w.n {
            return Err(IntervalError::BadMap("n disagrees with images/part_of".into()));
        }
        let images: Vec<BTreeSet<usize>> = w.images.into_iter().map(|v| v.into_iter().collect()).collect();
        Self::check_images(&images, w.n)?;
        let grid = parse_all(&w.grid)?;
        let cells = if grid.is_empty() {
            Vec::new()
        } else {
            Self::cells_from_grid(&grid, &w.part_of)?
        };
        Ok(Self {
            images,
            grid,
            cells,
            part_of: w.part_of,
        })
    }

    /// `{"n": n, "images": [[...],...], "grid": ["p/q",...], "part_of": [...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, IntervalError> {
        let w: SetValuedMapJson = serde_json::from_str(s).map_err(|e| IntervalError::Json(e.to_string()))?;
        Self::from_wire(w)
    }
}

impl DiscreteMap for SetValuedMap {
    fn size(&self) -> usize {
        self.n()
    }

    fn point_hull(&self, i: usize) -> IndexInterval {
        let img = &self.images[i - 1];
        match (img.first(), img.last()) {
            (Some(&lo), Some(&hi)) => IndexInterval::new(lo, hi),
            _ => IndexInterval::EMPTY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `M_N = M_{N-1}`.
    Stabilized,
    /// Every point of `M_N − M_{N-1}` is within `δ` of `M_{N-1}`.
    DeltaClose,
}

/// The sets `M_0 ⊆ M_1 ⊆ ... ⊆ M_N` of endpoint images kept inside `∪ I_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClosure {
    pub sets: Vec<BTreeSet<Rational>>,
    pub stop: StopReason,
}

impl OrbitClosure {
    /// `N`, the index of the last set.
    pub fn steps(&self) -> usize {
        self.sets.len() - 1
    }
}

fn distance_to_set(x: &Rational, set: &BTreeSet<Rational>) -> Option<Rational> {
    let below = set.range(..=x.clone()).next_back().map(|b| x - b);
    let above = set.range(x.clone()..).next().map(|a| a - x);
    match (below, above) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Appends `M_{i+1}` and returns the points it added.
fn closure_step(sys: &CoveringSystem, sets: &mut Vec<BTreeSet<Rational>>, fresh: &BTreeSet<Rational>) -> BTreeSet<Rational> {
    let last = sets.last().unwrap();
    let added: BTreeSet<Rational> = fresh
        .iter()
        .map(|x| sys.map().evaluate(x).expect("grid points lie in the intervals"))
        .filter(|y| sys.contains(y) && !last.contains(y))
        .collect();
    let mut next = last.clone();
    next.extend(added.iter().cloned());
    sets.push(next);
    added
}

/// Iterates `M_{i+1} = M_i ∪ (f(M_i) ∩ ∪ I_j)` from the interval endpoints
/// until the sets stabilize, the new points all lie within `delta` of the
/// previous set, or `n_max` steps have run (an error).
pub fn orbit_closure(sys: &CoveringSystem, delta: &Rational, n_max: usize) -> Result<OrbitClosure, IntervalError> {
    let m0: BTreeSet<Rational> = sys
        .intervals()
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect();
    let mut fresh = m0.clone();
    let mut sets = vec![m0];
    for _ in 0..n_max {
        let added = closure_step(sys, &mut sets, &fresh);
        if added.is_empty() {
            return Ok(OrbitClosure { sets, stop: StopReason::Stabilized });
        }
        let prev = &sets[sets.len() - 2];
        if added
            .iter()
            .all(|x| distance_to_set(x, prev).is_some_and(|d| &d < delta))
        {
            return Ok(OrbitClosure { sets, stop: StopReason::DeltaClose });
        }
        fresh = added;
    }
    Err(IntervalError::ClosureExhausted {
        n_max,
        partial: Box::new(sets),
    })
}

/// A discretized system: the grid level used and the resulting map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discretization {
    pub closure: OrbitClosure,
    /// Index of the closure set used as grid (`N - 1` unless refined).
    pub grid_level: usize,
    pub svm: SetValuedMap,
}

/// Nearest point of a sorted grid, the smaller one on ties.
fn snap(grid: &[Rational], y: &Rational) -> usize {
    let p = grid.partition_point(|g| g < y);
    if p == 0 {
        return 0;
    }
    if p == grid.len() {
        return grid.len() - 1;
    }
    if &grid[p] - y < y - &grid[p - 1] {
        p
    } else {
        p - 1
    }
}

fn build_map(sys: &CoveringSystem, grid_set: &BTreeSet<Rational>) -> SetValuedMap {
    let grid: Vec<Rational> = grid_set.iter().cloned().collect();
    // cells as (grid position of left end, block)
    let mut starts = Vec::new();
    let mut part_of = Vec::new();
    for (pos, w) in grid.windows(2).enumerate() {
        if let Some(block) = sys.block_of(&w[0]).filter(|&b| sys.block_of(&w[1]) == Some(b)) {
            starts.push(pos);
            part_of.push(block);
        }
    }
    let images = starts
        .iter()
        .map(|&pos| {
            let (u, v) = (&grid[pos], &grid[pos + 1]);
            let su = snap(&grid, &sys.map().evaluate(u).unwrap());
            let sv = snap(&grid, &sys.map().evaluate(v).unwrap());
            let (lo, hi) = (su.min(sv), su.max(sv));
            // cells [grid[p], grid[p+1]] with lo <= p and p + 1 <= hi
            let first = starts.partition_point(|&p| p < lo);
            let last = starts.partition_point(|&p| p < hi);
            (first..last).map(|c| c + 1).collect()
        })
        .collect();
    let cells = starts.iter().map(|&p| (grid[p].clone(), grid[p + 1].clone())).collect();
    SetValuedMap {
        images,
        grid,
        cells,
        part_of,
    }
}

/// Turns a (minimalized) covering system into a set-valued map on grid
/// cells. Endpoint images are snapped to the nearest grid point; if the
/// result misses a cell, the grid is refined by further closure steps.
pub fn discretize(sys: &CoveringSystem, delta: &Rational, n_max: usize) -> Result<Discretization, IntervalError> {
    let mut closure = orbit_closure(sys, delta, n_max)?;
    let mut level = closure.steps().saturating_sub(1);
    loop {
        let svm = build_map(sys, &closure.sets[level]);
        let uncovered = svm.uncovered();
        if uncovered.is_empty() {
            return Ok(Discretization {
                closure,
                grid_level: level,
                svm,
            });
        }
        if level + 1 >= closure.sets.len() {
            if closure.stop == StopReason::Stabilized || level + 1 > n_max {
                return Err(IntervalError::DiscreteCovering { uncovered });
            }
            let prev_len = closure.sets.len();
            let fresh: BTreeSet<Rational> = closure.sets[prev_len - 1]
                .difference(&closure.sets[prev_len - 2])
                .cloned()
                .collect();
            let added = closure_step(sys, &mut closure.sets, &fresh);
            if added.is_empty() {
                closure.stop = StopReason::Stabilized;
            }
        }
        level += 1;
    }
}
