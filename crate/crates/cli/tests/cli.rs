use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fermarkov::report::{self, AnalysisDocument};
use fermarkov::statefile::{FactorFile, StateFile};
use fermarkov::Tolerances;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fermarkov"));
    c.env_remove("FERMARKOV_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn analyze_doc(file: &Path) -> AnalysisDocument {
    let o = run(&["analyze", "--in", s(file)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    report::parse(&o.stdout).unwrap()
}

#[test]
fn selftest_passes_on_fresh_build() {
    let o = run(&["selftest"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("n=5 suite time"));
    assert_eq!(out.lines().filter(|l| l.ends_with("ok")).count(), 6);
}

#[test]
fn corrupted_convention_fails_naming_car() {
    let o = run(&["selftest", "--n-max", "3", "--inject-fault", "car"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("car residual"));
}

#[test]
fn gen_then_analyze_product_state_is_markov() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "p.json");
    assert_eq!(code(&run(&["gen", "--kind", "product_markov", "--n", "4", "--seed", "3", "--out", s(&f)])), 0);
    let doc = analyze_doc(&f);
    assert!(doc.triplet.markov);
    assert!(doc.ssa.saturation.passed());
    assert!(doc.factorization.is_some());
    assert!(doc.verdicts_consistent());
}

#[test]
fn tracial_state_has_zero_gap() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "t.json");
    let d = 8;
    let data: Vec<String> =
        (0..d * d).map(|k| if k / d == k % d { "[0.125,0.0]".into() } else { "[0.0,0.0]".into() }).collect();
    let json = format!(
        r#"{{"version":1,"n_sites":3,"regions":{{"A":[0],"B":[1],"C":[2]}},"matrix":{{"dim":8,"data":[{}]}}}}"#,
        data.join(",")
    );
    std::fs::write(&f, json).unwrap();
    let doc = analyze_doc(&f);
    assert!(doc.ssa.saturation.residual.abs() <= 1e-12);
    assert!(doc.triplet.markov);
    assert_eq!(doc.triplet.dim_c, 16);
}

#[test]
fn sweep_of_random_states_is_ordered_and_nonnegative() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "s.csv");
    let o = run(&["sweep", "--kind", "random", "--n", "3", "--count", "100", "--seed0", "11", "--csv", s(&f)]);
    assert_eq!(code(&o), 0);
    let mut rdr = csv::Reader::from_path(&f).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let gap_col = headers.iter().position(|h| h == "gap").unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 100);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0].parse::<usize>().unwrap(), i);
        assert_eq!(r[1].parse::<u64>().unwrap(), 11 + i as u64);
        assert!(r[gap_col].parse::<f64>().unwrap() >= -1e-9);
    }
}

fn sweep_without_timing(seed_env: Option<&str>) -> Vec<String> {
    let mut c = bin();
    c.args(["sweep", "--kind", "product_markov", "--n", "3", "--count", "6"]);
    if let Some(seed) = seed_env {
        c.env("FERMARKOV_SEED", seed);
    }
    let o = c.output().unwrap();
    assert_eq!(code(&o), 0);
    String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| l.rsplit_once(',').unwrap().0.to_string())
        .collect()
}

#[test]
fn sweep_is_deterministic_and_honours_seed_env() {
    assert_eq!(sweep_without_timing(None), sweep_without_timing(None));
    let shifted = sweep_without_timing(Some("100"));
    assert!(shifted[1].starts_with("0,100,"));
    assert_ne!(shifted, sweep_without_timing(None));
}

#[test]
fn gen_seed_env_matches_explicit_flag() {
    let a = run(&["gen", "--kind", "random", "--n", "3", "--seed", "42"]);
    let b = bin().args(["gen", "--kind", "random", "--n", "3"]).env("FERMARKOV_SEED", "42").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gen", "--kind", "random", "--n", "3"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn factorize_writes_factors_that_multiply_back() {
    let dir = TempDir::new().unwrap();
    let (f, fx, fy) = (path(&dir, "p.json"), path(&dir, "x.json"), path(&dir, "y.json"));
    run(&["gen", "--kind", "product_markov", "--n", "3", "--seed", "9", "--out", s(&f)]);
    assert_eq!(code(&run(&["factorize", "--in", s(&f), "--out-x", s(&fx), "--out-y", s(&fy)])), 0);
    let rho = StateFile::parse(&std::fs::read_to_string(&f).unwrap()).unwrap().matrix.to_matrix::<f64>().unwrap();
    let x = FactorFile::parse(&std::fs::read_to_string(&fx).unwrap()).unwrap().matrix.to_matrix::<f64>().unwrap();
    let y = FactorFile::parse(&std::fs::read_to_string(&fy).unwrap()).unwrap().matrix.to_matrix::<f64>().unwrap();
    assert!((x * y - rho).norm() < 1e-8);
}

#[test]
fn factorize_of_generic_state_is_a_verdict_failure() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "r.json");
    run(&["gen", "--kind", "random", "--n", "3", "--out", s(&f)]);
    let o = run(&["factorize", "--in", s(&f), "--out-x", s(&path(&dir, "x")), "--out-y", s(&path(&dir, "y"))]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("strong subadditivity"));
}

#[test]
fn decompose_recovers_designed_blocks() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "b.json");
    let o = run(&["gen", "--kind", "block_markov", "--n", "4", "--k-fixed", "1", "--n-pairs", "1", "--out", s(&f)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["decompose", "--in", s(&f)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = report::parse(&o.stdout).unwrap();
    let b = doc.blocks.as_ref().unwrap();
    assert_eq!((b.k_fixed, b.n_pairs), (1, 1));
    assert!(b.reassembly.passed());
    assert!(doc.structure_lemmas.as_ref().unwrap().c_span.passed());
    assert!(doc.verdicts_consistent());
}

#[test]
fn decompose_rejects_noneven_state() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "r.json");
    run(&["gen", "--kind", "random", "--n", "3", "--out", s(&f)]);
    assert_eq!(code(&run(&["decompose", "--in", s(&f)])), 1);
}

#[test]
fn text_format_has_one_verdict_per_line() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "p.json");
    run(&["gen", "--kind", "random_even", "--n", "3", "--out", s(&f)]);
    let o = run(&["analyze", "--in", s(&f), "--format", "text"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().all(|l| l.contains(": ")));
    assert!(text.contains("markov: false"));
}

#[test]
fn malformed_input_is_a_parse_error_with_position() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "bad.json");
    std::fs::write(&f, "{\n\"version\": 1,\n  nope }").unwrap();
    let o = run(&["analyze", "--in", s(&f)]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("bad.json") && err.contains("line 3"), "{err}");
}

#[test]
fn invariant_violations_exit_nonzero() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "p.json");
    run(&["gen", "--kind", "random", "--n", "3", "--out", s(&f)]);
    let mut file = StateFile::parse(&std::fs::read_to_string(&f).unwrap()).unwrap();

    let mut overlap = file.clone();
    overlap.regions.c = vec![1];
    std::fs::write(&f, overlap.to_json()).unwrap();
    assert_eq!(code(&run(&["analyze", "--in", s(&f)])), 2);

    file.matrix.data[0][0] += 0.5;
    std::fs::write(&f, file.to_json()).unwrap();
    let o = run(&["analyze", "--in", s(&f)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("p.json"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(code(&run(&["gen", "--kind", "nonsense"])), 2);
    assert_eq!(code(&run(&["gen", "--kind", "random", "--n", "3", "--regions", "A=0:B=1"])), 2);
    assert_eq!(code(&run(&["analyze", "--in", "x", "--format", "yaml"])), 2);
}

#[test]
fn written_state_file_round_trips() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "e.json");
    run(&["gen", "--kind", "perturbed", "--n", "3", "--epsilon", "0.01", "--out", s(&f)]);
    let file = StateFile::parse(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(file.metadata.as_ref().unwrap().generator.as_deref(), Some("perturbed"));
    file.to_state::<f64>(&Tolerances::default()).unwrap();
}
