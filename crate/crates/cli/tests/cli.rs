use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use covperm::interval::CoveringSystem;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_covperm")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const THREE_CYCLE: &str = r#"{"intervals":[["1","3"]],"map":{"breakpoints":["1","2","3"],"values":["2","3","1"]}}"#;

#[test]
fn charseq_golden() {
    let out = run(&["charseq", "1 3 6 2 4 5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "raw: 3 2 3 1 3\nsorted: 1 2 3 3 3\n");
    assert_eq!(stdout(&run(&["charseq", "1 2"])), "raw: 1\nsorted: 1\n");
    assert_eq!(stdout(&run(&["charseq", "(1 3 6 2 4 5)"])), "raw: 3 2 3 1 3\nsorted: 1 2 3 3 3\n");
}

#[test]
fn charseq_rejects_non_cycles() {
    let out = run(&["charseq", "img:3,2,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not cyclic"));
    assert_eq!(run(&["charseq", "1 1 2"]).status.code(), Some(2));
}

#[test]
fn graph_golden() {
    let out = run(&["graph", "1 2"]);
    assert_eq!(stdout(&out), "digraph markov {\n  A1;\n  A1 -> A1;\n}\n");
    let rot = stdout(&run(&["graph", "1 2 3"]));
    for edge in ["A1 -> A2;", "A2 -> A1;", "A2 -> A2;"] {
        assert!(rot.contains(edge), "{rot}");
    }
    assert_eq!(rot.matches("->").count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dot");
    let out = run(&["graph", "1 3 6 2 4 5", "--dot", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let dot = fs::read_to_string(&path).unwrap();
    assert_eq!(dot.matches("->").count(), 9);
    assert!(dot.contains("A4 -> A4;"));
    assert_eq!(dot.matches(";\n").count(), 14);
}

#[test]
fn matrix_golden() {
    assert_eq!(stdout(&run(&["matrix", "1 3 6 2 4 5"])), "00011\n00010\n10010\n01010\n01100\n");
    assert_eq!(
        stdout(&run(&["matrix", "1 3 6 2 4 5", "--power", "6"])),
        "10000\n01000\n00100\n00010\n00001\n"
    );
    assert_eq!(stdout(&run(&["matrix", "1 3 6 2 4 5", "--charpoly"])), "1+x+x^2+x^3+x^4+x^5\n");
    assert_eq!(stdout(&run(&["matrix", "1 3 6 2 4 5", "--minpoly"])), "1+x+x^2+x^3+x^4+x^5\n");
}

#[test]
fn verify_exhaustive_and_random() {
    let out = run(&["verify", "--n", "6", "--props", "lemma,charpoly,order"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("checked     120"));
    assert!(text.contains("failures    0"));

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let out = run(&[
        "verify", "--n", "12", "--props", "lemma", "--samples", "10000", "--seed", "42", "--jobs", "2", "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["total"], 10000);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    assert_eq!(v["mode"]["seed"], 42);
}

#[test]
fn verify_guards() {
    let out = run(&["verify", "--n", "20", "--props", "lemma"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cap"));
    assert_eq!(run(&["verify", "--n", "5", "--props", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
}

#[test]
fn pipeline_three_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write(dir.path(), "three.json", THREE_CYCLE);
    let report = dir.path().join("report.json");
    let out = run(&["pipeline", &sys, "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("x0 = 7/3, period 1\n"), "{}", stdout(&out));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["periodic_point"]["x0"], "7/3");
    assert!(stdout(&run(&["pipeline", &sys, "--delta", "1/7", "--nmax", "10"])).contains("delta:        1/7"));
}

#[test]
fn pipeline_swapped_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write(
        dir.path(),
        "swap.json",
        r#"{"intervals":[["0","1"],["2","3"]],"map":{"breakpoints":["0","1","2","3"],"values":["3","2","4/3","0"]}}"#,
    );
    let out = run(&["pipeline", &sys]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("x0 = 0, period 2\n"), "{}", stdout(&out));
}

#[test]
fn pipeline_errors() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write(
        dir.path(),
        "flat.json",
        r#"{"intervals":[["0","1"]],"map":{"breakpoints":["0","1"],"values":["0","1/2"]}}"#,
    );
    let out = run(&["pipeline", &flat]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("covering property violated"));
    let bad = write(dir.path(), "bad.json", "{");
    assert_eq!(run(&["pipeline", &bad]).status.code(), Some(2));
    assert_eq!(run(&["pipeline", "/nonexistent/system.json"]).status.code(), Some(2));
    let three = write(dir.path(), "three.json", THREE_CYCLE);
    assert_eq!(run(&["pipeline", &three, "--delta", "x"]).status.code(), Some(2));
}

#[test]
fn generate_golden() {
    assert_eq!(stdout(&run(&["generate", "--stefan", "7"])), "1 4 5 3 6 2 7\n");
    assert_eq!(stdout(&run(&["generate", "--rotation", "5", "2"])), "1 3 5 2 4\n");
    assert_eq!(run(&["generate", "--stefan", "4"]).status.code(), Some(2));
    assert_eq!(run(&["generate", "--rotation", "6", "2"]).status.code(), Some(2));
    assert_eq!(run(&["generate"]).status.code(), Some(2));

    let out = run(&["generate", "--random-system", "3", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let sys = CoveringSystem::from_json(&stdout(&out)).unwrap();
    assert_eq!(sys.k(), 3);
    assert!(sys.is_covering());
    assert_eq!(stdout(&run(&["generate", "--random-system", "3", "7"])), stdout(&out));
}

#[test]
fn histogram_golden() {
    let out = run(&["histogram", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let counts: u64 = text.lines().skip(1).map(|l| l.split_whitespace().last().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(counts, 6);
    assert!(text.starts_with("sequence  count\n"));
}
