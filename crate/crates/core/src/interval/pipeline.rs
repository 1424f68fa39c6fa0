use std::fmt;

use serde_json::{json, Value};

use super::{
    discretize, find_periodic_point, find_witness, reduce_to_cyclic, CoveringSystem, Discretization, IntervalError,
    PeriodHint, PeriodicPoint, Rational, Reduction, Witness, DEFAULT_PIECE_CAP,
};

pub const DEFAULT_N_MAX: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    /// Snapping granularity; `None` means 1/1000 of the shortest
    /// minimalized interval.
    pub delta: Option<Rational>,
    pub n_max: usize,
    pub piece_cap: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            delta: None,
            n_max: DEFAULT_N_MAX,
            piece_cap: DEFAULT_PIECE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineError {
    pub stage: &'static str,
    pub source: IntervalError,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage: {}", self.stage, self.source)
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Every intermediate result of one pipeline run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineReport {
    pub system: CoveringSystem,
    pub minimal: CoveringSystem,
    pub delta: Rational,
    pub discretization: Discretization,
    pub reduction: Reduction,
    pub witness: Witness,
    pub hint: PeriodHint,
    /// Whether the exact finder succeeded inside the hinted span.
    pub hint_used: bool,
    pub point: PeriodicPoint,
}

impl PipelineReport {
    pub fn to_json_value(&self) -> Value {
        let d = &self.discretization;
        let closure: Vec<Vec<String>> = d
            .closure
            .sets
            .iter()
            .map(|s| s.iter().map(Rational::to_string).collect())
            .collect();
        let w = &self.witness;
        json!({
            "system": self.system.to_wire(),
            "minimalized": self.minimal.to_wire(),
            "delta": self.delta.to_string(),
            "closure": {
                "steps": d.closure.steps(),
                "stop": d.closure.stop,
                "sets": closure,
            },
            "grid_level": d.grid_level,
            "set_valued_map": d.svm.to_wire(),
            "reduction": {
                "permutation": self.reduction.perm.to_string(),
                "index_map": self.reduction.index_map,
                "cuts": self.reduction.partition.cuts(),
                "rounds": self.reduction.rounds,
            },
            "witness": {
                "r": w.r,
                "s": w.s,
                "l": w.l,
                "block": w.block,
                "chain": w.chain.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            },
            "hint": {
                "lo": self.hint.lo.to_string(),
                "hi": self.hint.hi.to_string(),
                "period": self.hint.period,
                "used": self.hint_used,
            },
            "periodic_point": {
                "x0": self.point.x0.to_string(),
                "period": self.point.period,
                "minimal_period": self.point.minimal_period,
            },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("serializes")
    }
}

/// Runs validate, minimalize, discretize, reduce, witness, exact search and
/// exact verification. The periodic point is checked against the original
/// map; the discrete stages only supply the starting hint.
pub fn run_pipeline(sys: &CoveringSystem, config: &PipelineConfig) -> Result<PipelineReport, PipelineError> {
    let at = |stage: &'static str| move |source: IntervalError| PipelineError { stage, source };
    if !sys.is_covering() {
        return Err(at("validate")(IntervalError::NotCovering));
    }
    let minimal = sys.minimalize();
    let delta = config
        .delta
        .clone()
        .unwrap_or_else(|| minimal.min_length() / Rational::from_integer(1000.into()));
    if delta <= Rational::from_integer(0.into()) {
        return Err(at("discretize")(IntervalError::BadIntervals(format!("delta {delta} must be positive"))));
    }
    let discretization = discretize(&minimal, &delta, config.n_max).map_err(at("discretize"))?;
    let reduction = reduce_to_cyclic(&discretization.svm).map_err(at("reduce"))?;
    let witness = find_witness(&reduction.perm, &reduction.partition).map_err(at("witness"))?;
    let svm = &discretization.svm;
    let cell = |reduced: usize| {
        svm.cell(reduction.index_map[reduced - 1])
            .expect("discretized maps carry cells")
            .clone()
    };
    let hint = PeriodHint {
        lo: cell(witness.r).0,
        hi: cell(witness.s).1,
        period: witness.l,
    };
    let k = sys.k();
    let point = find_periodic_point(sys, k, Some(&hint), config.piece_cap).map_err(at("periodic"))?;
    let hint_used = point.period == hint.period && hint.lo <= point.x0 && point.x0 <= hint.hi;
    if point.period > k || !point.verify(sys) {
        return Err(at("verify")(IntervalError::Unverified {
            x0: point.x0.to_string(),
        }));
    }
    Ok(PipelineReport {
        system: sys.clone(),
        minimal,
        delta,
        discretization,
        reduction,
        witness,
        hint,
        hint_used,
        point,
    })
}
