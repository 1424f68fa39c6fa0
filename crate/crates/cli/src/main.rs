//! `covperm`: characteristic sequences, Markov graphs, GF(2) transition
//! matrices, exhaustive sweeps and the covering-system pipeline.
//!
//! Exit codes: 0 success, 1 a checked property or stage failed, 2 bad usage
//! or input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use covperm::conv::{characteristic_numbers, markov_graph, CharSequence};
use covperm::f2::{adjacency_matrix, char_poly, min_poly};
use covperm::interval::{
    parse_rational, random_covering_system, run_pipeline, CoveringSystem, IntervalError, PipelineConfig,
    StopReason, DEFAULT_N_MAX, DEFAULT_PIECE_CAP,
};
use covperm::lab::{
    histogram_key, sequence_histogram, verify_all, verify_random, Property, SweepConfig, SweepError, DEFAULT_CAP,
};
use covperm::perm::{rotation, stefan, Permutation};

#[derive(Parser)]
#[command(name = "covperm", version, about = "Cyclic permutations and covering systems of interval maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the characteristic numbers of a cyclic permutation, raw and sorted.
    Charseq {
        /// `"1 3 6 2 4 5"`, `"(1 3 6 2 4 5)"` or `"img:3,4,6,5,1,2"`.
        perm: String,
    },
    /// Emit the Markov graph as DOT.
    Graph {
        perm: String,
        /// Write to this file instead of stdout.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Print the GF(2) transition matrix or its polynomials.
    Matrix {
        perm: String,
        /// Print `T^l` instead of `T`.
        #[arg(long, value_name = "L")]
        power: Option<u64>,
        #[arg(long)]
        charpoly: bool,
        #[arg(long)]
        minpoly: bool,
    },
    /// Check properties over all cyclic permutations of a degree, or a random sample.
    Verify(VerifyArgs),
    /// Run a covering system from JSON down to an exact periodic point.
    Pipeline {
        system: PathBuf,
        /// Snapping granularity as `p/q` (default: 1/1000 of the shortest minimalized interval).
        #[arg(long)]
        delta: Option<String>,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        nmax: usize,
        /// Write the full stage-by-stage report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Emit a rotation, a Stefan cycle or a random covering system.
    Generate(GenerateArgs),
    /// Count sorted characteristic sequences over all cyclic permutations of a degree.
    Histogram {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Write the histogram as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    /// Comma-separated subset of lemma,charpoly,order,prop_gr,krylov,minor_path, or `all`.
    #[arg(long, default_value = "all")]
    props: String,
    /// Check this many seeded random cycles instead of all of them.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    jobs: Option<usize>,
    /// Largest degree for an exhaustive sweep.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GenerateArgs {
    /// Rotation `i -> i + m (mod n)` as a cycle.
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    rotation: Option<Vec<usize>>,
    /// Stefan cycle of odd degree.
    #[arg(long, value_name = "DEGREE")]
    stefan: Option<usize>,
    /// Random covering system with K intervals from SEED, as JSON.
    #[arg(long, num_args = 2, value_names = ["K", "SEED"])]
    random_system: Option<Vec<u64>>,
}

enum Failure {
    /// A property or pipeline stage failed (exit 1).
    Check(String),
    /// Bad flags or input (exit 2).
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn parse_perm(s: &str) -> Result<Permutation, Failure> {
    s.parse().map_err(usage)
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::Check(format!("cannot write {}: {e}", path.display())))
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_charseq(perm: &str) -> Outcome {
    let p = parse_perm(perm)?;
    if !p.is_cyclic() {
        let raw = characteristic_numbers(&p).map_err(usage)?;
        return Err(usage(format!(
            "{p} is not cyclic; the sorted bound only holds for single n-cycles (raw numbers here: {})",
            join(&raw)
        )));
    }
    let seq = CharSequence::from_raw(characteristic_numbers(&p).map_err(usage)?);
    println!("raw: {}", join(&seq.raw));
    println!("sorted: {}", join(&seq.sorted));
    Ok(())
}

fn cmd_graph(perm: &str, dot: Option<&Path>) -> Outcome {
    let p = parse_perm(perm)?;
    let text = markov_graph(&p).to_dot();
    match dot {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_matrix(perm: &str, power: Option<u64>, charpoly: bool, minpoly: bool) -> Outcome {
    let p = parse_perm(perm)?;
    let t = adjacency_matrix(&p).map_err(usage)?;
    if charpoly || minpoly {
        if charpoly {
            println!("{}", char_poly(&t));
        }
        if minpoly {
            println!("{}", min_poly(&t));
        }
        return Ok(());
    }
    let m = power.map_or_else(|| t.clone(), |l| t.pow(l));
    print!("{m}");
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let props = Property::parse_list(&args.props).map_err(usage)?;
    let report = match args.samples {
        Some(samples) => verify_random(args.n, samples, args.seed, &props, args.jobs),
        None => verify_all(
            args.n,
            &props,
            SweepConfig {
                cap: args.cap,
                jobs: args.jobs,
            },
        ),
    }
    .map_err(|e| match e {
        SweepError::ThreadPool(_) => Failure::Check(e.to_string()),
        other => usage(other),
    })?;
    print!("{}", report.to_text());
    if let Some(path) = &args.json {
        write_file(path, &report.to_json())?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} failure(s) recorded", report.failures.len())))
    }
}

fn cmd_pipeline(system: &Path, delta: Option<&str>, nmax: usize, report_path: Option<&Path>) -> Outcome {
    let text = fs::read_to_string(system).map_err(|e| usage(format!("cannot read {}: {e}", system.display())))?;
    let sys = CoveringSystem::from_json(&text).map_err(usage)?;
    let delta = delta.map(parse_rational).transpose().map_err(usage)?;
    let config = PipelineConfig {
        delta,
        n_max: nmax,
        piece_cap: DEFAULT_PIECE_CAP,
    };
    let r = run_pipeline(&sys, &config).map_err(|e| match e.source {
        IntervalError::NotCovering => Failure::Check(e.source.to_string()),
        _ => Failure::Check(e.to_string()),
    })?;
    let fmt_intervals = |s: &CoveringSystem| {
        s.intervals()
            .iter()
            .map(|(a, b)| format!("[{a}, {b}]"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let d = &r.discretization;
    println!("intervals:    {}", fmt_intervals(&r.system));
    println!("minimalized:  {}", fmt_intervals(&r.minimal));
    println!("delta:        {}", r.delta);
    println!(
        "closure:      {} steps ({}), grid level {} with {} cells",
        d.closure.steps(),
        match d.closure.stop {
            StopReason::Stabilized => "stabilized",
            StopReason::DeltaClose => "delta-close",
        },
        d.grid_level,
        d.svm.n()
    );
    println!(
        "reduction:    ({}) on cells {} after {} round(s)",
        r.reduction.perm,
        join(&r.reduction.index_map),
        r.reduction.rounds
    );
    println!("witness:      r = {}, s = {}, l = {}", r.witness.r, r.witness.s, r.witness.l);
    println!("hint:         [{}, {}] period {}", r.hint.lo, r.hint.hi, r.hint.period);
    println!("x0 = {}, period {}", r.point.x0, r.point.minimal_period);
    if let Some(path) = report_path {
        write_file(path, &r.to_json())?;
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Outcome {
    if let Some(v) = &args.rotation {
        println!("{}", rotation(v[0], v[1]).map_err(usage)?);
    } else if let Some(degree) = args.stefan {
        println!("{}", stefan(degree).map_err(usage)?);
    } else if let Some(v) = &args.random_system {
        let k = v[0] as usize;
        if k == 0 {
            return Err(usage("a covering system needs at least one interval"));
        }
        println!("{}", random_covering_system(k, v[1]).to_json());
    }
    Ok(())
}

fn cmd_histogram(n: usize, jobs: Option<usize>, cap: usize, json: Option<&Path>) -> Outcome {
    let h = sequence_histogram(n, SweepConfig { cap, jobs }).map_err(usage)?;
    let keys: Vec<String> = h.keys().map(|k| histogram_key(k)).collect();
    let width = keys.iter().map(String::len).max().unwrap_or(0).max("sequence".len());
    println!("{:<width$}  count", "sequence");
    for (k, v) in keys.iter().zip(h.values()) {
        println!("{k:<width$}  {v}");
    }
    if let Some(path) = json {
        let map: serde_json::Map<String, serde_json::Value> =
            keys.into_iter().zip(h.values()).map(|(k, &v)| (k, v.into())).collect();
        write_file(path, &serde_json::to_string_pretty(&map).expect("serializes"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Charseq { perm } => cmd_charseq(perm),
        Command::Graph { perm, dot } => cmd_graph(perm, dot.as_deref()),
        Command::Matrix {
            perm,
            power,
            charpoly,
            minpoly,
        } => cmd_matrix(perm, *power, *charpoly, *minpoly),
        Command::Verify(args) => cmd_verify(args),
        Command::Pipeline {
            system,
            delta,
            nmax,
            report,
        } => cmd_pipeline(system, delta.as_deref(), *nmax, report.as_deref()),
        Command::Generate(args) => cmd_generate(args),
        Command::Histogram { n, jobs, cap, json } => cmd_histogram(*n, *jobs, *cap, json.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
