//! Exhaustive and randomized verification sweeps over cyclic permutations.
//!
//! A sweep runs a selection of [`Property`] checks on every cyclic
//! permutation of a given degree (or on a seeded random sample), keeping
//! only the failures and a histogram of sorted characteristic sequences.
//!
//! Random samples are drawn with ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`, shuffling `2..=n` behind the fixed leading
//! `1`; reports are reproducible for a given seed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::conv::{characteristic_sequence, markov_graph, CharSequence, LemmaCheck};
use crate::f2::{
    adjacency_matrix, char_poly, charpoly_coeff_via_minors, cycles_from_minor, krylov_independent,
    min_poly, BitMatrix, F2Poly,
};
use crate::perm::{CyclicEnumerator, CyclicPermutation};

pub const DEFAULT_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("degree {n} exceeds the exhaustive cap {cap}; use random sampling or raise the cap")]
    CapExceeded { n: usize, cap: usize },
    #[error("sweeps need degree >= 2 (got {0})")]
    DegreeTooSmall(usize),
    #[error("degree {0} is too large for GF(2) transition matrices")]
    DegreeTooLarge(usize),
    #[error("sample count must be positive")]
    NoSamples,
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// A checkable claim about a single cyclic permutation `f ∈ S_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// Sorted characteristic sequence satisfies `m'_i <= i`.
    Lemma,
    /// `char_poly(T_f) = 1 + x + ... + x^{n-1}` and the minimal polynomial equals it.
    Charpoly,
    /// `T_f^l = T_{f^l}` for `1 <= l <= n`, `T_f^n = I`, and `T_f^l != I` for
    /// `1 <= l < n` when `n >= 3`.
    Order,
    /// Each characteristic number equals the shortest-cycle length in the Markov graph.
    PropGr,
    /// The interval vector spans a full-rank Krylov family.
    Krylov,
    /// Odd principal minors yield cycles bounding the characteristic numbers.
    MinorPath,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Lemma,
        Property::Charpoly,
        Property::Order,
        Property::PropGr,
        Property::Krylov,
        Property::MinorPath,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Property::Lemma => "lemma",
            Property::Charpoly => "charpoly",
            Property::Order => "order",
            Property::PropGr => "prop_gr",
            Property::Krylov => "krylov",
            Property::MinorPath => "minor_path",
        }
    }

    /// Parses a comma-separated list; `all` selects every property.
    pub fn parse_list(s: &str) -> Result<BTreeSet<Property>, SweepError> {
        let mut out = BTreeSet::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Property::ALL);
            } else {
                out.insert(part.parse()?);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SweepError::UnknownProperty(s.to_string()))
    }
}

fn check_order(f: &CyclicPermutation, t: &BitMatrix) -> Result<(), String> {
    let n = f.degree();
    let identity = BitMatrix::identity(t.dim()).expect("dim fits");
    let mut power = identity.clone();
    for l in 1..=n {
        power = power.mul(t).expect("same dim");
        let expected = adjacency_matrix(&f.power(l)).expect("dim fits");
        if power != expected {
            return Err(format!("T^{l} differs from the matrix of f^{l}"));
        }
        let is_identity = power == identity;
        if l == n && !is_identity {
            return Err(format!("T^{n} is not the identity"));
        }
        if l < n && n >= 3 && is_identity {
            return Err(format!("T^{l} is already the identity"));
        }
    }
    Ok(())
}

fn check_minor_path(seq: &CharSequence, t: &BitMatrix) -> Result<(), String> {
    for i in 1..=t.dim() {
        let coeff = charpoly_coeff_via_minors(t, i).map_err(|e| e.to_string())?;
        let Some(witness) = coeff.witness else {
            return Err(format!("coefficient of x^{} is zero", t.dim() - i));
        };
        let cycles = cycles_from_minor(t, &witness).map_err(|e| e.to_string())?;
        let mut covered: Vec<usize> = cycles.iter().flatten().copied().collect();
        covered.sort_unstable();
        covered.dedup();
        if covered.len() < i {
            return Err(format!("minor cycles for i={i} cover only {} vertices", covered.len()));
        }
        if let Some(c) = cycles.iter().find(|c| c.len() > i) {
            return Err(format!("minor cycle {c:?} longer than {i}"));
        }
        if let Some(&v) = covered.iter().find(|&&v| seq.raw[v - 1] > i) {
            return Err(format!("vertex A_{v} on a cycle of length <= {i} has m = {}", seq.raw[v - 1]));
        }
    }
    if !seq.check().passed() {
        return Err("minor path holds but the sequence bound fails".into());
    }
    Ok(())
}

/// Runs the selected checks on one cyclic permutation of degree `>= 2`,
/// returning the characteristic sequence and one entry per failed property.
pub fn check_permutation(
    f: &CyclicPermutation,
    props: &BTreeSet<Property>,
) -> (CharSequence, Vec<(Property, String)>) {
    let seq = characteristic_sequence(f).expect("cyclic permutations always return");
    let mut failures = Vec::new();
    let needs_matrix = props.iter().any(|p| {
        matches!(
            p,
            Property::Charpoly | Property::Order | Property::Krylov | Property::MinorPath
        )
    });
    let t = needs_matrix.then(|| adjacency_matrix(f).expect("degree checked by caller"));
    for &prop in props {
        let outcome = match prop {
            Property::Lemma => match seq.check() {
                LemmaCheck::Pass => Ok(()),
                LemmaCheck::Violation { index, sorted } => {
                    Err(format!("m'_{index} > {index} in {sorted:?}"))
                }
            },
            Property::Charpoly => {
                let t = t.as_ref().unwrap();
                let cp = char_poly(t);
                let mp = min_poly(t);
                if cp != F2Poly::all_ones(t.dim()) {
                    Err(format!("char poly {cp}"))
                } else if mp != cp {
                    Err(format!("min poly {mp} != char poly {cp}"))
                } else {
                    Ok(())
                }
            }
            Property::Order => check_order(f, t.as_ref().unwrap()),
            Property::PropGr => {
                let g = markov_graph(f);
                (1..f.degree())
                    .find(|&i| g.min_cycle_length(i) != Some(seq.raw[i - 1]))
                    .map_or(Ok(()), |i| {
                        Err(format!(
                            "m_{i} = {} but shortest cycle through A_{i} is {:?}",
                            seq.raw[i - 1],
                            g.min_cycle_length(i)
                        ))
                    })
            }
            Property::Krylov => {
                let k = krylov_independent(f).expect("degree checked by caller");
                if k.independent {
                    Ok(())
                } else {
                    Err(format!("Krylov family of {:?} is dependent", k.alpha.support()))
                }
            }
            Property::MinorPath => check_minor_path(&seq, t.as_ref().unwrap()),
        };
        if let Err(detail) = outcome {
            failures.push((prop, detail));
        }
    }
    (seq, failures)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    /// Position in a random sample; absent for exhaustive sweeps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<u64>,
    pub cycle: Vec<usize>,
    pub property: Property,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepMode {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

/// Mergeable partial result of a sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub total: u64,
    pub failures: Vec<Failure>,
    pub histogram: BTreeMap<Vec<usize>, u64>,
}

impl Tally {
    fn record(&mut self, sample: Option<u64>, f: &CyclicPermutation, props: &BTreeSet<Property>) {
        let (seq, failures) = check_permutation(f, props);
        self.total += 1;
        *self.histogram.entry(seq.sorted).or_insert(0) += 1;
        self.failures.extend(failures.into_iter().map(|(property, detail)| Failure {
            sample,
            cycle: f.cycle_order().to_vec(),
            property,
            detail,
        }));
    }

    /// Commutative merge; failure order is restored by [`Tally::normalize`].
    pub fn merge(mut self, other: Tally) -> Tally {
        self.total += other.total;
        self.failures.extend(other.failures);
        for (k, v) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += v;
        }
        self
    }

    fn normalize(&mut self) {
        self.failures
            .sort_by(|a, b| (a.sample, &a.cycle, a.property).cmp(&(b.sample, &b.cycle, b.property)));
    }
}

fn serialize_elapsed<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

fn serialize_histogram<S: Serializer>(h: &BTreeMap<Vec<usize>, u64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(h.iter().map(|(k, v)| (histogram_key(k), v)))
}

/// `[1, 2, 3]` becomes `"1,2,3"`.
pub fn histogram_key(seq: &[usize]) -> String {
    seq.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub n: usize,
    pub mode: SweepMode,
    pub properties: Vec<Property>,
    pub total: u64,
    pub failures: Vec<Failure>,
    #[serde(serialize_with = "serialize_histogram")]
    pub histogram: BTreeMap<Vec<usize>, u64>,
    #[serde(rename = "elapsed_ms", serialize_with = "serialize_elapsed")]
    pub elapsed: Duration,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mode = match &self.mode {
            SweepMode::Exhaustive => "exhaustive".to_string(),
            SweepMode::Random { samples, seed } => format!("random ({samples} samples, seed {seed})"),
        };
        let props: Vec<_> = self.properties.iter().map(Property::name).collect();
        let _ = writeln!(out, "degree      {}", self.n);
        let _ = writeln!(out, "mode        {mode}");
        let _ = writeln!(out, "properties  {}", props.join(","));
        let _ = writeln!(out, "checked     {}", self.total);
        let _ = writeln!(out, "failures    {}", self.failures.len());
        let _ = writeln!(out, "elapsed     {} ms", self.elapsed.as_millis());
        if !self.histogram.is_empty() {
            let keys: Vec<_> = self.histogram.keys().map(|k| histogram_key(k)).collect();
            let width = keys.iter().map(String::len).max().unwrap_or(0).max("sequence".len());
            let _ = writeln!(out, "\n{:<width$}  count", "sequence");
            for (k, v) in keys.iter().zip(self.histogram.values()) {
                let _ = writeln!(out, "{k:<width$}  {v}");
            }
        }
        for fail in &self.failures {
            let cycle: Vec<_> = fail.cycle.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "FAIL {} ({}): {}", fail.property, cycle.join(" "), fail.detail);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    /// Largest degree an exhaustive sweep accepts.
    pub cap: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            jobs: None,
        }
    }
}

fn run_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T, SweepError> {
    match jobs {
        None => Ok(work()),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map(|pool| pool.install(work))
            .map_err(|e| SweepError::ThreadPool(e.to_string())),
    }
}

fn check_degree(n: usize) -> Result<(), SweepError> {
    if n < 2 {
        return Err(SweepError::DegreeTooSmall(n));
    }
    if n - 1 > crate::f2::MAX_DIM {
        return Err(SweepError::DegreeTooLarge(n));
    }
    Ok(())
}

/// Prefixes used to split the enumeration of `S_n` into independent chunks.
fn chunk_prefixes(n: usize) -> Vec<Vec<usize>> {
    if n < 4 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for a in 2..=n {
        for b in 2..=n {
            if a != b {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

/// Checks every cyclic permutation of `S_n`.
pub fn verify_all(
    n: usize,
    props: &BTreeSet<Property>,
    config: SweepConfig,
) -> Result<SweepReport, SweepError> {
    check_degree(n)?;
    if n > config.cap {
        return Err(SweepError::CapExceeded { n, cap: config.cap });
    }
    let start = Instant::now();
    let prefixes = chunk_prefixes(n);
    let mut tally = run_pool(config.jobs, || {
        prefixes
            .par_iter()
            .map(|prefix| {
                let mut t = Tally::default();
                for f in CyclicEnumerator::with_prefix(n, prefix).expect("valid prefix") {
                    t.record(None, &f, props);
                }
                t
            })
            .reduce(Tally::default, Tally::merge)
    })?;
    tally.normalize();
    Ok(SweepReport {
        n,
        mode: SweepMode::Exhaustive,
        properties: props.iter().copied().collect(),
        total: tally.total,
        failures: tally.failures,
        histogram: tally.histogram,
        elapsed: start.elapsed(),
    })
}

/// Draws `samples` uniform cyclic permutations of `S_n` from a seeded ChaCha8 stream.
pub fn random_cycles(n: usize, samples: u64, seed: u64) -> Vec<CyclicPermutation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let mut seq: Vec<usize> = (1..=n).collect();
            seq[1..].shuffle(&mut rng);
            CyclicPermutation::from_cycle_notation(&seq).expect("shuffle keeps a permutation")
        })
        .collect()
}

/// Checks a seeded random sample of cyclic permutations of `S_n`.
pub fn verify_random(
    n: usize,
    samples: u64,
    seed: u64,
    props: &BTreeSet<Property>,
    jobs: Option<usize>,
) -> Result<SweepReport, SweepError> {
    check_degree(n)?;
    if samples == 0 {
        return Err(SweepError::NoSamples);
    }
    let start = Instant::now();
    let cycles = random_cycles(n, samples, seed);
    let mut tally = run_pool(jobs, || {
        cycles
            .par_iter()
            .enumerate()
            .fold(Tally::default, |mut t, (k, f)| {
                t.record(Some(k as u64), f, props);
                t
            })
            .reduce(Tally::default, Tally::merge)
    })?;
    tally.normalize();
    Ok(SweepReport {
        n,
        mode: SweepMode::Random { samples, seed },
        properties: props.iter().copied().collect(),
        total: tally.total,
        failures: tally.failures,
        histogram: tally.histogram,
        elapsed: start.elapsed(),
    })
}

/// Counts each sorted characteristic sequence over all cyclic `f ∈ S_n`.
pub fn sequence_histogram(n: usize, config: SweepConfig) -> Result<BTreeMap<Vec<usize>, u64>, SweepError> {
    verify_all(n, &BTreeSet::new(), config).map(|r| r.histogram)
}
