use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use fermarkov::car::RegionPartition;
use fermarkov::markov::{analyze_triplet, decompose_even_with, factorize_with, validate_structure_lemmas_with};
use fermarkov::report::{emit, AnalysisDocument, BlockSection, FactorizationSection, Format, LemmaSection};
use fermarkov::statefile::{FactorFile, FactorName, Metadata, StateFile};
use fermarkov::states::{GeneratorParams, GeneratorSpec};
use fermarkov::{selftest as suite, Error, State, Tolerances};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::GenSpecArgs;

pub struct CliError {
    pub code: u8,
    pub message: String,
}

type CliResult = Result<ExitCode, CliError>;

fn usage(message: String) -> CliError {
    CliError { code: 2, message }
}

/// Parse-level problems exit 2, everything else is a verdict-level failure.
fn from_core(context: &str, e: Error) -> CliError {
    let code = match e {
        Error::Parse(_) | Error::InvalidRegions(_) | Error::DimensionTooLarge { .. } => 2,
        _ => 1,
    };
    CliError { code, message: format!("{context}: {e}") }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError { code: 1, message: format!("{}: {e}", p.display()) }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError { code: 1, message: format!("stdout: {e}") }),
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct Loaded {
    state: State,
    regions: RegionPartition,
    digest: String,
}

fn load(path: &Path, tol: &Tolerances) -> Result<Loaded, CliError> {
    let ctx = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| usage(format!("{ctx}: {e}")))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| usage(format!("{ctx}: {e}")))?;
    let file = StateFile::parse(text).map_err(|e| from_core(&ctx, e))?;
    let (state, regions) = file.to_state::<f64>(tol).map_err(|e| from_core(&ctx, e))?;
    Ok(Loaded { state, regions, digest: hex::encode(Sha256::digest(&bytes)) })
}

fn parse_format(s: &str) -> Result<Format, CliError> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

pub fn selftest(n_max: usize, fault: Option<&str>) -> CliResult {
    if !(1..=fermarkov::car::MAX_SITES).contains(&n_max) {
        return Err(usage(format!("--n-max must be in 1..={}", fermarkov::car::MAX_SITES)));
    }
    let report = match fault {
        None => suite::run(n_max),
        Some("car") => suite::run_with(n_max, suite::naive_algebra),
        Some(other) => return Err(usage(format!("unknown fault '{other}'"))),
    }
    .map_err(|e| from_core("selftest", e))?;
    for c in &report.checks {
        println!("{:<24} worst {:.3e}  bound {:.0e}  {}", c.name, c.worst, c.bound, if c.pass { "ok" } else { "FAIL" });
    }
    for (n, secs) in &report.timings {
        println!("n={n} suite time {secs:.3}s");
    }
    match report.first_failure() {
        None => Ok(ExitCode::SUCCESS),
        Some(c) => {
            eprintln!("selftest failed: {} residual {:e} exceeds {:e}", c.name, c.worst, c.bound);
            Ok(ExitCode::from(1))
        }
    }
}

fn default_regions(n: usize) -> Result<RegionPartition, CliError> {
    if n < 3 {
        return Err(usage(format!("need at least 3 sites for A|B|C, got {n}")));
    }
    let outer = (n / 3).max(1);
    RegionPartition::contiguous(outer, n - 2 * outer, outer).map_err(|e| from_core("regions", e))
}

fn generator_spec(a: &GenSpecArgs, seed: u64) -> Result<GeneratorSpec, CliError> {
    let regions = match &a.regions {
        Some(s) => RegionPartition::parse(s, a.n).map_err(|e| from_core("--regions", e))?,
        None => default_regions(a.n)?,
    };
    Ok(GeneratorSpec {
        kind: a.kind,
        seed,
        regions,
        params: GeneratorParams {
            floor_fraction: a.floor_fraction,
            parity_mode: a.parity_mode(),
            k_fixed: a.k_fixed,
            n_pairs: a.n_pairs,
            epsilon: a.epsilon,
            preserve_even: !a.break_even,
        },
    })
}

pub fn gen(a: &GenSpecArgs, seed: u64, out: Option<&Path>) -> CliResult {
    let spec = generator_spec(a, seed)?;
    let state = spec.generate::<f64>().map_err(|e| from_core("generate", e))?;
    let meta = Metadata { seed: Some(seed), generator: Some(spec.kind.name().to_string()) };
    let mut json = StateFile::from_state(&state, &spec.regions, Some(meta)).to_json();
    json.push('\n');
    write_output(out, json.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

pub fn analyze(input: &Path, tol: &Tolerances, out: Option<&Path>, format: &str) -> CliResult {
    let format = parse_format(format)?;
    let start = Instant::now();
    let l = load(input, tol)?;
    let t = Instant::now();
    let analysis = analyze_triplet(&l.state, &l.regions, tol).map_err(|e| from_core("analyze", e))?;
    let mut doc = AnalysisDocument::new(l.digest, &l.state, &l.regions, &analysis, tol);
    doc.timings_ms.insert("triplet".into(), ms(t));
    if analysis.ssa.saturated {
        let t = Instant::now();
        // a saturating state that fails to factor is reported, not fatal
        if let Ok(f) = factorize_with(&l.state, &l.regions, &analysis, tol) {
            doc.factorization = Some(FactorizationSection::new(&f, tol));
        }
        doc.timings_ms.insert("factorization".into(), ms(t));
    }
    doc.timings_ms.insert("total".into(), ms(start));
    write_output(out, &emit(&doc, format))?;
    Ok(ExitCode::SUCCESS)
}

pub fn factorize(input: &Path, out_x: &Path, out_y: &Path, tol: &Tolerances) -> CliResult {
    let l = load(input, tol)?;
    let analysis = analyze_triplet(&l.state, &l.regions, tol).map_err(|e| from_core("analyze", e))?;
    let f = factorize_with(&l.state, &l.regions, &analysis, tol).map_err(|e| from_core("factorize", e))?;
    for (name, m, path) in [(FactorName::X, &f.x, out_x), (FactorName::Y, &f.y, out_y)] {
        let mut json = FactorFile::new(name, m, &l.regions).to_json();
        json.push('\n');
        write_output(Some(path), json.as_bytes())?;
    }
    println!("product residual {:e}, y {:?}", f.product_residual, f.y_parity);
    Ok(ExitCode::SUCCESS)
}

pub fn decompose(input: &Path, out: Option<&Path>, format: &str, tol: &Tolerances) -> CliResult {
    let format = parse_format(format)?;
    let start = Instant::now();
    let l = load(input, tol)?;
    let t = Instant::now();
    let analysis = analyze_triplet(&l.state, &l.regions, tol).map_err(|e| from_core("analyze", e))?;
    let mut doc = AnalysisDocument::new(l.digest, &l.state, &l.regions, &analysis, tol);
    doc.timings_ms.insert("triplet".into(), ms(t));
    let t = Instant::now();
    let dec = decompose_even_with(&l.state, &l.regions, &analysis, tol).map_err(|e| from_core("decompose", e))?;
    doc.blocks = Some(BlockSection::new(&dec, tol));
    doc.timings_ms.insert("blocks".into(), ms(t));
    let t = Instant::now();
    let lemmas = validate_structure_lemmas_with(&l.state, &l.regions, &analysis, tol).map_err(|e| from_core("lemmas", e))?;
    doc.structure_lemmas = Some(LemmaSection::new(&lemmas, tol));
    doc.timings_ms.insert("structure_lemmas".into(), ms(t));
    doc.timings_ms.insert("total".into(), ms(start));
    write_output(out, &emit(&doc, format))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SweepRow {
    index: usize,
    seed: u64,
    kind: &'static str,
    n_sites: usize,
    gap: f64,
    saturated: bool,
    markov: bool,
    a_in_c_residual: f64,
    even: bool,
    factorization_residual: Option<f64>,
    error: Option<String>,
    ms: f64,
}

fn sweep_row(spec: &GeneratorSpec, index: usize, tol: &Tolerances) -> SweepRow {
    let t = Instant::now();
    let mut row = SweepRow {
        index,
        seed: spec.seed,
        kind: spec.kind.name(),
        n_sites: spec.regions.n_sites(),
        gap: f64::NAN,
        saturated: false,
        markov: false,
        a_in_c_residual: f64::NAN,
        even: false,
        factorization_residual: None,
        error: None,
        ms: 0.0,
    };
    let outcome = spec.generate::<f64>().and_then(|st| {
        let a = analyze_triplet(&st, &spec.regions, tol)?;
        row.gap = a.ssa.gap;
        row.saturated = a.ssa.saturated;
        row.markov = a.markov;
        row.a_in_c_residual = a.a_in_c_residual;
        row.even = a.even;
        if a.ssa.saturated {
            row.factorization_residual = Some(factorize_with(&st, &spec.regions, &a, tol)?.product_residual);
        }
        Ok(())
    });
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row.ms = ms(t);
    row
}

pub fn sweep(a: &GenSpecArgs, count: usize, seed0: u64, csv_path: Option<&Path>, tol: &Tolerances) -> CliResult {
    let specs = (0..count)
        .map(|i| generator_spec(a, seed0.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    // par_iter + collect keeps index order
    let rows: Vec<SweepRow> = specs.par_iter().enumerate().map(|(i, s)| sweep_row(s, i, tol)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| CliError { code: 1, message: format!("csv: {e}") })?;
    }
    let bytes = w.into_inner().map_err(|e| CliError { code: 1, message: format!("csv: {e}") })?;
    write_output(csv_path, &bytes)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {count} states failed");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
