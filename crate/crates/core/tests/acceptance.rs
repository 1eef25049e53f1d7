//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use fermarkov::car::{Parity, RegionPartition};
use fermarkov::linalg::{c, gaussian_matrix, hermitian_part, hs_norm};
use fermarkov::markov::{
    analyze_triplet, decompose_even, factorize_with, validate_structure_lemmas, ParityClass,
};
use fermarkov::quantum_info::{embedded_restriction, ssa_gap, StateDensity};
use fermarkov::states::{
    make_block_markov, make_product_markov, perturb, random_even_state, random_state, ParityMode,
};
use fermarkov::subalgebra::{commutant, span_equality_residual, SubalgebraBasis};
use fermarkov::sufficiency::{is_sufficient, petz_map, QuantumChannel};
use fermarkov::{selftest, Matrix, State, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn regions(na: usize, nb: usize, nc: usize) -> RegionPartition {
    RegionPartition::contiguous(na, nb, nc).unwrap()
}

fn floor(n: usize) -> f64 {
    0.05 / (1u64 << n) as f64
}

const DESIGNS: [(usize, usize); 4] = [(1, 0), (2, 0), (0, 1), (1, 1)];

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg) }
}

fn c1_exact_algebra() -> Outcome {
    let t = Instant::now();
    let report = selftest::run(5).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let worst = report.checks.iter().map(|c| c.worst).fold(0.0, f64::max);
    if let Some(f) = report.first_failure() {
        return Err(format!("{} residual {:e} > 1e-10", f.name, f.worst));
    }
    ensure(worst <= 1e-10, format!("worst residual {worst:e}"))?;
    ensure(secs < 30.0, format!("took {secs:.1}s"))?;
    Ok(format!("6 identities, n=1..5, worst residual {worst:.2e}, {secs:.2}s"))
}

fn c2_ssa_nonnegative() -> Outcome {
    let t = Instant::now();
    let tol = Tolerances::default();
    let mut min_gap = f64::INFINITY;
    for (n, r, count) in [(3, regions(1, 1, 1), 200u64), (6, regions(2, 2, 2), 50)] {
        for seed in 0..count {
            let st = random_state::<f64>(n, seed, floor(n)).map_err(|e| e.to_string())?;
            let gap = ssa_gap(&st, &r, &tol).map_err(|e| e.to_string())?.gap;
            ensure(gap >= -1e-9, format!("n={n} seed {seed}: gap {gap:e}"))?;
            min_gap = min_gap.min(gap);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 120.0, format!("took {secs:.1}s"))?;
    Ok(format!("250 states, min gap {min_gap:.3e}, {secs:.2}s"))
}

fn c3_saturation_by_construction() -> Outcome {
    let tol = Tolerances::default();
    let mut worst_gap: f64 = f64::NEG_INFINITY;
    let mut worst_fac: f64 = 0.0;
    let mut check = |st: &State, r: &RegionPartition, label: String| -> Result<(), String> {
        let a = analyze_triplet(st, r, &tol).map_err(|e| format!("{label}: {e}"))?;
        ensure(a.ssa.gap <= 1e-8 && a.markov, format!("{label}: gap {:e}, markov {}", a.ssa.gap, a.markov))?;
        let f = factorize_with(st, r, &a, &tol).map_err(|e| format!("{label}: {e}"))?;
        let round_trip = hs_norm(&(&f.x * &f.y - &st.rho));
        ensure(round_trip <= 1e-8, format!("{label}: round trip {round_trip:e}"))?;
        worst_gap = worst_gap.max(a.ssa.gap);
        worst_fac = worst_fac.max(round_trip);
        Ok(())
    };
    for seed in 0..50u64 {
        let r = if seed % 2 == 0 { regions(1, 1, 1) } else { regions(1, 2, 1) };
        let st = make_product_markov::<f64>(&r, seed, ParityMode::EvenEven).map_err(|e| e.to_string())?;
        check(&st, &r, format!("product seed {seed}"))?;
    }
    let r = regions(1, 2, 1);
    for seed in 0..20u64 {
        let (k, p) = DESIGNS[seed as usize % 4];
        let (st, _) = make_block_markov::<f64>(&r, seed, k, p).map_err(|e| e.to_string())?;
        check(&st, &r, format!("block ({k},{p}) seed {seed}"))?;
    }
    Ok(format!("70 states, max gap {worst_gap:.2e}, max ||xy - rho|| {worst_fac:.2e}"))
}

fn c4_sufficiency_equivalence() -> Outcome {
    let tol = Tolerances::default();
    let mut min_generic = f64::INFINITY;
    let mut max_sufficient: f64 = 0.0;
    for i in 0..20u64 {
        let (n, r) = if i % 2 == 0 { (3, regions(1, 1, 1)) } else { (4, regions(1, 2, 1)) };
        let phi = match i % 4 {
            0 | 1 => make_product_markov::<f64>(&r, i, ParityMode::EvenEven),
            2 => make_product_markov::<f64>(&r, i, ParityMode::EvenNoneven),
            _ => make_block_markov::<f64>(&r, i, 1, 1).map(|(s, _)| s),
        }
        .map_err(|e| e.to_string())?;
        let psi = State::new(phi.alg.clone(), embedded_restriction(&phi, &r.bc()), &tol).map_err(|e| e.to_string())?;
        let s = phi.alg.region_algebra(&r.ab());
        let rep = is_sufficient(&phi, &psi, &s, &tol).map_err(|e| e.to_string())?;
        ensure(rep.verdicts_agree() && rep.overall, format!("sufficient pair {i} (n={n}): {rep:?}"))?;
        max_sufficient = max_sufficient.max(rep.entropy_drop).max(rep.cocycle_residual).max(rep.petz_residual);

        let phi = random_state::<f64>(n, 1000 + i, floor(n)).map_err(|e| e.to_string())?;
        let psi = if i % 2 == 0 {
            State::new(phi.alg.clone(), embedded_restriction(&phi, &r.bc()), &tol).map_err(|e| e.to_string())?
        } else {
            random_state::<f64>(n, 2000 + i, floor(n)).map_err(|e| e.to_string())?
        };
        let rep = is_sufficient(&phi, &psi, &s, &tol).map_err(|e| e.to_string())?;
        let smallest = rep.entropy_drop.min(rep.cocycle_residual).min(rep.petz_residual);
        ensure(
            rep.verdicts_agree() && !rep.entropy_verdict && smallest > 1e-4,
            format!("generic pair {i} (n={n}): {rep:?}"),
        )?;
        min_generic = min_generic.min(smallest);
    }
    Ok(format!(
        "40 pairs agree; sufficient max residual {max_sufficient:.2e}, generic min residual {min_generic:.2e}"
    ))
}

fn c5_even_equivalence() -> Outcome {
    let tol = Tolerances::default();
    let (mut saturated, mut strict) = (0, 0);
    for i in 0..100u64 {
        // block designs need two sites in B
        let (n, r) = if i % 3 == 0 && i % 4 != 2 { (3, regions(1, 1, 1)) } else { (4, regions(1, 2, 1)) };
        let st = match i % 4 {
            0 => random_even_state::<f64>(n, i, floor(n)),
            1 => make_product_markov::<f64>(&r, i, ParityMode::EvenEven),
            2 => make_block_markov::<f64>(&r, i, DESIGNS[(i as usize / 4) % 4].0, DESIGNS[(i as usize / 4) % 4].1)
                .map(|(s, _)| s),
            _ => make_product_markov::<f64>(&r, i, ParityMode::EvenEven)
                .and_then(|s| perturb(&s, [1e-4, 1e-3, 1e-2, 0.1][(i as usize / 4) % 4], i + 7, true)),
        }
        .map_err(|e| format!("state {i}: {e}"))?;
        ensure(st.even_residual() <= tol.herm, format!("state {i} not even"))?;
        let a = analyze_triplet(&st, &r, &tol).map_err(|e| format!("state {i}: {e}"))?;
        ensure(a.markov == a.ssa.saturated, format!("state {i}: markov {} but saturated {}", a.markov, a.ssa.saturated))?;
        if a.ssa.saturated { saturated += 1 } else { strict += 1 }
    }
    ensure(saturated > 0 && strict > 0, format!("degenerate mix: {saturated} saturated, {strict} strict"))?;
    Ok(format!("100 even states, {saturated} saturated, {strict} strict, verdicts equal"))
}

/// `span((A_BC)_+ ∪ v_A (A_BC)_-)` against `commutant(A_A)`.
fn check_commutant_of_a(r: &RegionPartition) -> Result<f64, String> {
    let alg = fermarkov::Algebra::new(r.n_sites()).map_err(|e| e.to_string())?;
    let v_a = alg.parity_unitary(&r.a);
    let mut gens = alg.region_algebra_parity(&r.bc(), Parity::Even).elements();
    gens.extend(alg.region_algebra_parity(&r.bc(), Parity::Odd).elements().iter().map(|o| &v_a * o));
    let expected = SubalgebraBasis::from_matrices(alg.dim(), &gens);
    let comm = commutant(&alg.region_algebra(&r.a), 1e-9);
    let want = 1usize << (2 * r.bc().len());
    ensure(comm.len() == want && expected.len() == want, format!("dims {} / {} vs {want}", comm.len(), expected.len()))?;
    Ok(span_equality_residual(&comm, &expected))
}

fn c6_structure_lemmas() -> Outcome {
    let tol = Tolerances::default();
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let (st, r) = if i < 8 {
            let r = [regions(1, 1, 1), regions(1, 2, 1), regions(2, 1, 1), regions(1, 1, 2)][i as usize % 4].clone();
            (make_product_markov::<f64>(&r, i, ParityMode::EvenEven), r)
        } else {
            let r = regions(1, 2, 1);
            let (k, p) = DESIGNS[i as usize % 4];
            (make_block_markov::<f64>(&r, i, k, p).map(|(s, _)| s), r)
        };
        let st = st.map_err(|e| format!("instance {i}: {e}"))?;
        let rep = validate_structure_lemmas(&st, &r, &tol).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(rep.worst() <= 1e-8, format!("instance {i}: {rep:?}"))?;
        worst = worst.max(rep.worst());
    }
    let mut worst_comm: f64 = 0.0;
    for r in [regions(1, 1, 1), regions(1, 2, 1), regions(2, 1, 1), regions(1, 1, 2)] {
        let res = check_commutant_of_a(&r)?;
        ensure(res <= 1e-8, format!("commutant of A_A for {}: {res:e}", r.to_flag()))?;
        worst_comm = worst_comm.max(res);
    }
    Ok(format!("20 instances, worst lemma residual {worst:.2e}; commutant(A_A) residual {worst_comm:.2e}"))
}

fn c7_block_round_trip() -> Outcome {
    let tol = Tolerances::default();
    let r = regions(1, 2, 1);
    let mut worst_reasm: f64 = 0.0;
    let mut worst_q: f64 = 0.0;
    for (k, p) in DESIGNS {
        for seed in 0..3u64 {
            let label = format!("design ({k},{p}) seed {seed}");
            let (st, designed) = make_block_markov::<f64>(&r, seed, k, p).map_err(|e| format!("{label}: {e}"))?;
            let dec = decompose_even(&st, &r, &tol).map_err(|e| format!("{label}: {e}"))?;
            ensure((dec.k_fixed(), dec.n_pairs()) == (k, p), format!("{label}: got ({}, {})", dec.k_fixed(), dec.n_pairs()))?;
            let classes = |b: &fermarkov::Blocks| {
                let mut v: Vec<bool> = b.blocks.iter().map(|x| x.class == ParityClass::ThetaPair).collect();
                v.sort();
                v
            };
            ensure(classes(&dec) == classes(&designed), format!("{label}: parity classes differ"))?;
            let reasm = dec.reassembly_residual.max(hs_norm(&(designed.reassemble() - &st.rho)));
            ensure(reasm <= 1e-8, format!("{label}: reassembly {reasm:e}"))?;
            ensure(dec.structure.q_residual <= 1e-9, format!("{label}: Q residual {:e}", dec.structure.q_residual))?;
            worst_reasm = worst_reasm.max(reasm);
            worst_q = worst_q.max(dec.structure.q_residual);
        }
    }
    Ok(format!("12 designs recovered, reassembly {worst_reasm:.2e}, Q residual {worst_q:.2e}"))
}

fn c8_petz_contract() -> Outcome {
    let tol = Tolerances::default();
    let r = regions(1, 1, 1);
    let alg = std::sync::Arc::new(fermarkov::Algebra::new(3).unwrap());
    let subalgebras: Vec<SubalgebraBasis<f64>> = vec![
        alg.region_algebra(&r.a),
        alg.region_algebra(&r.b),
        alg.region_algebra(&r.c),
        alg.region_algebra(&r.ab()),
        alg.region_algebra(&r.bc()),
        alg.region_algebra(&[0, 2]),
        alg.region_algebra_parity(&r.ab(), Parity::Even),
        alg.region_algebra_parity(&r.all(), Parity::Even),
    ];
    let d = alg.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut unital, mut cp, mut preserve): (f64, f64, f64) = (0.0, f64::INFINITY, 0.0);
    for i in 0..30u64 {
        let s = &subalgebras[i as usize % subalgebras.len()];
        let psi = random_state::<f64>(3, 300 + i, floor(3)).map_err(|e| e.to_string())?;
        let e = petz_map(&psi, s, &tol).map_err(|e| e.to_string())?;
        unital = unital.max(e.unital_residual());
        cp = cp.min(e.choi_min_eig());
        let rho0 = hermitian_part(&s.project(&psi.rho));
        for _ in 0..4 {
            let a: Matrix = gaussian_matrix(d, d, &mut rng);
            let a = &a / c(hs_norm(&a));
            let lhs = (&rho0 * e.apply(&a)).trace();
            let rhs = (&psi.rho * &a).trace();
            preserve = preserve.max((lhs - rhs).norm());
        }
    }
    ensure(unital <= 1e-9, format!("unital residual {unital:e}"))?;
    ensure(cp >= -1e-9, format!("Choi min eigenvalue {cp:e}"))?;
    ensure(preserve <= 1e-9, format!("state preservation residual {preserve:e}"))?;
    let tracial = StateDensity::new(alg.clone(), fermarkov::linalg::identity::<f64>(d) / c(d as f64), &tol).unwrap();
    let mut proj_dist: f64 = 0.0;
    for s in &subalgebras {
        let e = petz_map(&tracial, s, &tol).map_err(|e| e.to_string())?;
        let hs = QuantumChannel::from_fn(d, d, |x| s.project(x));
        proj_dist = proj_dist.max(e.distance(&hs));
    }
    ensure(proj_dist <= 1e-10, format!("tracial Petz vs projection {proj_dist:e}"))?;
    Ok(format!(
        "30 pairs: unital {unital:.2e}, Choi min eig {cp:.2e}, preservation {preserve:.2e}; tracial vs projection {proj_dist:.2e}"
    ))
}

fn c9_performance() -> Outcome {
    let tol = Tolerances::default();
    let mut parts = Vec::new();
    for (n, r, limit) in [(4usize, regions(1, 2, 1), 2.0), (6, regions(2, 2, 2), 60.0)] {
        let inputs = [
            ("random", random_state::<f64>(n, 1, floor(n))),
            ("product", make_product_markov::<f64>(&r, 1, ParityMode::EvenEven)),
        ];
        for (label, st) in inputs {
            let st = st.map_err(|e| e.to_string())?;
            let t = Instant::now();
            analyze_triplet(&st, &r, &tol).map_err(|e| e.to_string())?;
            let secs = t.elapsed().as_secs_f64();
            ensure(secs < limit, format!("n={n} {label}: {secs:.2}s exceeds {limit}s"))?;
            parts.push(format!("n={n} {label} {secs:.2}s"));
        }
    }
    Ok(parts.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exact algebra identities", c1_exact_algebra),
        ("SSA nonnegativity", c2_ssa_nonnegative),
        ("saturation by construction", c3_saturation_by_construction),
        ("sufficiency equivalence", c4_sufficiency_equivalence),
        ("even equivalence", c5_even_equivalence),
        ("structure lemmas", c6_structure_lemmas),
        ("block decomposition round trip", c7_block_round_trip),
        ("Petz map contract", c8_petz_contract),
        ("performance envelope", c9_performance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
