//! Markov triplet decisions, the factorization `rho = x y`, and the block
//! structure of even Markov states.
//!
//! All modular objects use `rho_BC = E_BC(rho)` in the full algebra. The
//! algebras
//!
//! ```text
//! C = { x in A_AB : rho_BC^{it} x rho_BC^{-it} in A_AB for all t }
//! B = { y in A_B  : rho_BC^{it} y rho_BC^{-it} in A_B  for all t }
//! ```
//!
//! are computed as the largest `ad(log rho_BC)`-invariant subalgebras.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::car::{even_part, odd_part, CarAlgebra, Parity, RegionPartition};
use crate::error::{Error, Result};
use crate::linalg::{c, commutator, frobenius, hermitian_part, hs_norm, identity};
use crate::quantum_info::{embedded_restriction, ssa_gap, SsaReport, StateDensity};
use crate::spectral::{eig_hermitian, mat_func_with, MatFunc};
use crate::subalgebra::{
    central_projections_of, center, commutant, lex_cmp, relative_commutant, span_closure, span_equality_residual,
    invariant_subalgebra, SubalgebraBasis,
};
use crate::{CMatrix, Real, Tolerances};

/// Seed for the random central element used to split centers.
const CENTER_SEED: u64 = 0xce27e5;

#[derive(Clone, Debug)]
pub struct TripletAnalysis<T: Real> {
    pub ssa: SsaReport,
    pub c_basis: SubalgebraBasis<T>,
    pub b_basis: SubalgebraBasis<T>,
    pub a_in_c: bool,
    /// Worst membership residual of `a_i`, `i in A`, in `C`.
    pub a_in_c_residual: T,
    pub markov: bool,
    /// Defect of `E_BC(C)` inside `B`, on random elements of `C`.
    pub e_bc_residual: T,
    pub even: bool,
    pub rho_bc: CMatrix<T>,
}

pub fn analyze_triplet<T: Real>(
    state: &StateDensity<T>,
    regions: &RegionPartition,
    tol: &Tolerances,
) -> Result<TripletAnalysis<T>> {
    state.require_faithful(tol.faithful)?;
    let ssa = ssa_gap(state, regions, tol)?;
    let alg = &state.alg;
    let rho_bc = embedded_restriction(state, &regions.bc());
    let h = mat_func_with(&rho_bc, MatFunc::Log, 1e-8, tol.faithful)?;
    let rank_tol = T::of(tol.rank);
    let c_basis = invariant_subalgebra(&h, &alg.region_algebra(&regions.ab()), rank_tol)?;
    let b_basis = invariant_subalgebra(&h, &alg.region_algebra(&regions.b), rank_tol)?;

    let mut a_in_c_residual = T::zero();
    for &i in &regions.a {
        a_in_c_residual = a_in_c_residual.max(c_basis.membership(&alg.annihilator(i), T::of(tol.member)).residual);
    }
    let a_in_c = a_in_c_residual <= T::of(tol.member);

    let mut rng = ChaCha8Rng::seed_from_u64(0xe8c);
    let bc = regions.bc();
    let mut e_bc_residual = T::zero();
    for _ in 0..3 {
        let x = c_basis.random_element(&mut rng);
        let scale = T::one().max(hs_norm(&x));
        e_bc_residual = e_bc_residual.max(b_basis.residual(&alg.cond_expect(&x, &bc)) / scale);
    }

    let markov = ssa.saturated && a_in_c;
    let even = state.even_residual() <= T::of(tol.herm);
    Ok(TripletAnalysis { ssa, c_basis, b_basis, a_in_c, a_in_c_residual, markov, e_bc_residual, even, rho_bc })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YParity {
    Even,
    Noneven,
}

#[derive(Clone, Debug)]
pub struct Factorization<T: Real> {
    pub x: CMatrix<T>,
    pub y: CMatrix<T>,
    /// Membership residual of `x` in `A_AB`.
    pub x_region_residual: T,
    /// Membership residual of `y` in `A_BC`.
    pub y_region_residual: T,
    pub y_parity: YParity,
    /// `||y_-||_HS / ||y||_HS`.
    pub y_odd_fraction: T,
    pub commute_residual: T,
    /// `||x y - rho||_HS`.
    pub product_residual: T,
    pub x_min_eig: T,
    pub y_min_eig: T,
    /// Set when `rho` is even and `x`, `y` were replaced by their even parts.
    pub even_chosen: bool,
}

fn min_eig<T: Real>(m: &CMatrix<T>) -> T {
    nalgebra::SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().fold(T::of(f64::INFINITY), |a, &b| a.min(b))
}

/// Factorizes a saturating state as `rho = x y` with `x in C` and
/// `y = x^{-1} rho in A_BC`.
pub fn factorize<T: Real>(state: &StateDensity<T>, regions: &RegionPartition, tol: &Tolerances) -> Result<Factorization<T>> {
    let analysis = analyze_triplet(state, regions, tol)?;
    factorize_with(state, regions, &analysis, tol)
}

pub fn factorize_with<T: Real>(
    state: &StateDensity<T>,
    regions: &RegionPartition,
    analysis: &TripletAnalysis<T>,
    tol: &Tolerances,
) -> Result<Factorization<T>> {
    if !analysis.ssa.saturated {
        return Err(Error::NotSaturated { gap: analysis.ssa.gap });
    }
    let alg = &state.alg;
    let rho = &state.rho;
    let mut x = hermitian_part(&analysis.c_basis.project(rho));
    let spec = eig_hermitian(&x, 1e-8)?;
    if spec.min_eigenvalue() <= T::of(tol.faithful) {
        return Err(Error::FactorizationFailed(format!("x is singular ({:e})", spec.min_eigenvalue().as_f64())));
    }
    let mut y = spec.apply(|l| c(T::one() / l)) * rho;

    let even_chosen = analysis.even;
    if even_chosen {
        x = even_part(&x);
        y = even_part(&y);
    }
    let y_norm = hs_norm(&y);
    let y_odd_fraction = hs_norm(&odd_part(&y)) / y_norm;
    let y_parity = if y_odd_fraction <= T::of(tol.member) { YParity::Even } else { YParity::Noneven };

    let member = T::of(tol.member);
    let f = Factorization {
        x_region_residual: alg.region_algebra(&regions.ab()).membership(&x, member).residual,
        y_region_residual: alg.region_algebra(&regions.bc()).membership(&y, member).residual,
        commute_residual: hs_norm(&commutator(&x, &y)),
        product_residual: hs_norm(&(&x * &y - rho)),
        x_min_eig: min_eig(&x),
        y_min_eig: min_eig(&hermitian_part(&y)),
        y_parity,
        y_odd_fraction,
        even_chosen,
        x,
        y,
    };
    let bound = T::of(tol.equality);
    if f.product_residual > bound
        || f.commute_residual > bound
        || f.y_region_residual > member * T::one().max(y_norm)
        || f.y_min_eig < T::of(-1e-9)
    {
        return Err(Error::FactorizationFailed(format!(
            "product {:e}, commutator {:e}, y outside A_BC by {:e}, min eig(y) {:e}",
            f.product_residual.as_f64(),
            f.commute_residual.as_f64(),
            f.y_region_residual.as_f64(),
            f.y_min_eig.as_f64()
        )));
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityClass {
    ThetaFixed,
    ThetaPair,
}

/// Minimal central projections of `B` and `C` for an even Markov state.
#[derive(Clone, Debug)]
pub struct CentralStructure<T: Real> {
    /// `P_1..P_k` fixed by `Theta`, then swapped pairs `(P_a, P_b)` adjacent.
    pub p_list: Vec<CMatrix<T>>,
    pub k: usize,
    /// `Q_j = P_j` on fixed blocks, `P_A P_a + (1 - P_A) P_b` and its partner
    /// on pairs.
    pub q_list: Vec<CMatrix<T>>,
    /// `Theta(P_i) = P_{pairing[i]}`.
    pub pairing: Vec<usize>,
    pub theta_residual: T,
    /// Worst of `||Q^2 - Q||`, `||Q_i Q_j||` and `||Q_a + Q_b - P_a - P_b||`.
    pub q_residual: T,
}

impl<T: Real> CentralStructure<T> {
    pub fn m(&self) -> usize {
        self.p_list.len()
    }

    pub fn n_pairs(&self) -> usize {
        (self.m() - self.k) / 2
    }
}

/// `P_A = (1 + v_A) / 2`.
pub fn parity_projection<T: Real>(alg: &CarAlgebra<T>, sites: &[usize]) -> CMatrix<T> {
    (identity::<T>(alg.dim()) + alg.parity_unitary(sites)) * c(T::of(0.5))
}

/// The `Q` projections built from an ordered `P` list.
pub fn q_projections<T: Real>(p_list: &[CMatrix<T>], k: usize, p_a: &CMatrix<T>) -> Vec<CMatrix<T>> {
    let d = p_a.nrows();
    let not_pa = identity::<T>(d) - p_a;
    let mut q = p_list[..k].to_vec();
    for pair in p_list[k..].chunks(2) {
        q.push(p_a * &pair[0] + &not_pa * &pair[1]);
        q.push(&not_pa * &pair[0] + p_a * &pair[1]);
    }
    q
}

fn q_defect<T: Real>(p_list: &[CMatrix<T>], q_list: &[CMatrix<T>], k: usize) -> T {
    let mut worst = T::zero();
    for (i, qi) in q_list.iter().enumerate() {
        worst = worst.max(frobenius(&(qi * qi - qi)));
        worst = worst.max(frobenius(&(qi - qi.adjoint())));
        for qj in &q_list[i + 1..] {
            worst = worst.max(frobenius(&(qi * qj)));
        }
    }
    for j in (k..p_list.len()).step_by(2) {
        let lhs = &q_list[j] + &q_list[j + 1];
        worst = worst.max(frobenius(&(lhs - &p_list[j] - &p_list[j + 1])));
    }
    worst
}

fn require_even<T: Real>(state: &StateDensity<T>, tol: &Tolerances) -> Result<()> {
    let r = state.even_residual();
    if r > T::of(tol.herm) {
        return Err(Error::NotEven { residual: r.as_f64() });
    }
    Ok(())
}

pub fn central_structure<T: Real>(
    state: &StateDensity<T>,
    regions: &RegionPartition,
    tol: &Tolerances,
) -> Result<CentralStructure<T>> {
    require_even(state, tol)?;
    let analysis = analyze_triplet(state, regions, tol)?;
    central_structure_with(state, regions, &analysis, tol)
}

pub fn central_structure_with<T: Real>(
    state: &StateDensity<T>,
    regions: &RegionPartition,
    analysis: &TripletAnalysis<T>,
    tol: &Tolerances,
) -> Result<CentralStructure<T>> {
    require_even(state, tol)?;
    if !analysis.markov {
        return Err(Error::NotMarkov);
    }
    let alg = &state.alg;
    let z = center(&analysis.b_basis, T::of(tol.rank));
    let mut rng = ChaCha8Rng::seed_from_u64(CENTER_SEED);
    let ps = central_projections_of(&z, &mut rng, T::of(tol.center_gap), tol.center_retries)?;

    let m = ps.len();
    let mut pairing = vec![usize::MAX; m];
    let mut theta_residual = T::zero();
    for i in 0..m {
        let t = alg.theta(&ps[i]);
        let (j, dist) = (0..m)
            .map(|j| (j, frobenius(&(&t - &ps[j]))))
            .fold((0, T::of(f64::INFINITY)), |best, cur| if cur.1 < best.1 { cur } else { best });
        if dist > T::of(1e-8) {
            return Err(Error::UnmatchedParityAction { residual: dist.as_f64() });
        }
        theta_residual = theta_residual.max(dist);
        pairing[i] = j;
    }
    for i in 0..m {
        if pairing[pairing[i]] != i {
            return Err(Error::UnmatchedParityAction { residual: f64::INFINITY });
        }
    }

    let weight = |p: &CMatrix<T>| (p * &state.rho).trace().re;
    let mut fixed: Vec<usize> = (0..m).filter(|&i| pairing[i] == i).collect();
    fixed.sort_by(|&a, &b| weight(&ps[b]).partial_cmp(&weight(&ps[a])).unwrap_or(std::cmp::Ordering::Equal));
    let mut pairs: Vec<(usize, usize)> = (0..m)
        .filter(|&i| pairing[i] > i)
        .map(|i| {
            let j = pairing[i];
            if lex_cmp(&ps[i], &ps[j]) == std::cmp::Ordering::Greater { (j, i) } else { (i, j) }
        })
        .collect();
    pairs.sort_by(|&(a1, b1), &(a2, b2)| {
        let w1 = weight(&ps[a1]) + weight(&ps[b1]);
        let w2 = weight(&ps[a2]) + weight(&ps[b2]);
        w2.partial_cmp(&w1).unwrap_or(std::cmp::Ordering::Equal)
    });

    let order: Vec<usize> = fixed.iter().copied().chain(pairs.iter().flat_map(|&(a, b)| [a, b])).collect();
    let p_list: Vec<CMatrix<T>> = order.iter().map(|&i| ps[i].clone()).collect();
    let k = fixed.len();
    let new_pairing: Vec<usize> = (0..m)
        .map(|pos| if pos < k { pos } else if (pos - k) % 2 == 0 { pos + 1 } else { pos - 1 })
        .collect();

    let p_a = parity_projection(alg, &regions.a);
    let q_list = q_projections(&p_list, k, &p_a);
    let q_residual = q_defect(&p_list, &q_list, k);
    Ok(CentralStructure { p_list, k, q_list, pairing: new_pairing, theta_residual, q_residual })
}

#[derive(Clone, Debug)]
pub struct Block<T: Real> {
    pub class: ParityClass,
    /// `Q_j` for fixed blocks, `E_l = Q_a + Q_b` for pairs.
    pub projection: CMatrix<T>,
    /// `x_j` or `z_l`.
    pub x: CMatrix<T>,
    /// `y_j` or `w_l`.
    pub y: CMatrix<T>,
    /// Pair blocks: `max(||Q_b x - Theta(z)||, ||Q_b y - Theta(w)||)`.
    pub partner_residual: T,
    /// Membership residual of `x` in `C_j` (or `D_l`).
    pub x_member_residual: T,
    /// Membership residual of `y` in `C~_j` (or `D~_l`).
    pub y_member_residual: T,
}

impl<T: Real> Block<T> {
    /// This block's share of `rho`: `x y`, plus `Theta(x y)` for pairs.
    pub fn contribution(&self) -> CMatrix<T> {
        let xy = &self.x * &self.y;
        match self.class {
            ParityClass::ThetaFixed => xy,
            ParityClass::ThetaPair => {
                let t = crate::car::theta(&xy);
                xy + t
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition<T: Real> {
    pub structure: CentralStructure<T>,
    pub blocks: Vec<Block<T>>,
    pub reassembly_residual: T,
    /// Span-equality residual of `C` against `A_A ∨ B` (computed blocks only).
    pub lemma_c_residual: T,
    /// Membership residual of `y` in `B~ ∨ ((A_C)_+ + v_B (A_C)_-)`.
    pub y_tilde_residual: T,
}

impl<T: Real> BlockDecomposition<T> {
    pub fn reassemble(&self) -> CMatrix<T> {
        let d = self.blocks[0].x.nrows();
        self.blocks.iter().fold(CMatrix::zeros(d, d), |acc, b| acc + b.contribution())
    }

    pub fn k_fixed(&self) -> usize {
        self.blocks.iter().filter(|b| b.class == ParityClass::ThetaFixed).count()
    }

    pub fn n_pairs(&self) -> usize {
        self.blocks.iter().filter(|b| b.class == ParityClass::ThetaPair).count()
    }

    pub fn max_certification_residual(&self) -> T {
        self.blocks
            .iter()
            .fold(self.y_tilde_residual, |acc, b| acc.max(b.x_member_residual).max(b.y_member_residual))
    }
}

/// Bases of `(A_C)_+` and `v (A_C)_-`, as matrices.
fn graded_c_generators<T: Real>(alg: &CarAlgebra<T>, c_sites: &[usize], v: &CMatrix<T>) -> Vec<CMatrix<T>> {
    let mut out = alg.region_algebra_parity(c_sites, Parity::Even).elements();
    out.extend(alg.region_algebra_parity(c_sites, Parity::Odd).elements().iter().map(|o| v * o));
    out
}

fn annihilators_of<T: Real>(alg: &CarAlgebra<T>, sites: &[usize]) -> Vec<CMatrix<T>> {
    sites.iter().map(|&i| alg.annihilator(i)).collect()
}

pub fn decompose_even<T: Real>(
    state: &StateDensity<T>,
    regions: &RegionPartition,
    tol: &Tolerances,
) -> Result<BlockDecomposition<T>> {
    require_even(state, tol)?;
    let analysis = analyze_triplet(state, regions, tol)?;
    decompose_even_with(state, regions, &analysis, tol)
}

pub fn decompose_even_with<T: Real>(
    state: &StateDensity<T>,
    regions: &RegionPartition,
    analysis: &TripletAnalysis<T>,
    tol: &Tolerances,
) -> Result<BlockDecomposition<T>> {
    require_even(state, tol)?;
    if !analysis.markov {
        return Err(Error::NotMarkov);
    }
    let alg = &state.alg;
    let d = alg.dim();
    let rank_tol = T::of(tol.rank);
    let member = T::of(tol.member);
    let structure = central_structure_with(state, regions, &analysis, tol)?;
    let fac = factorize_with(state, regions, &analysis, tol)?;
    let (x, y) = (&fac.x, &fac.y);

    let b_elems = analysis.b_basis.elements();
    let b_tilde = relative_commutant(&analysis.b_basis, &alg.region_algebra(&regions.b), rank_tol).elements();
    let a_gens = annihilators_of(alg, &regions.a);

    let mut c_gens = a_gens.clone();
    c_gens.extend(b_elems.iter().cloned());
    let lemma_c_residual = span_equality_residual(&analysis.c_basis, &span_closure(&c_gens, d, rank_tol));

    let v_b = alg.parity_unitary(&regions.b);
    let mut ct_gens = b_tilde.clone();
    ct_gens.extend(graded_c_generators(alg, &regions.c, &v_b));
    let y_tilde_residual = span_closure(&ct_gens, d, rank_tol).membership(y, member).residual;

    let p_a = parity_projection(alg, &regions.a);
    let not_pa = identity::<T>(d) - &p_a;
    let (p, q, k) = (&structure.p_list, &structure.q_list, structure.k);
    let mut blocks = Vec::new();
    for j in 0..k {
        let xj = &q[j] * x;
        let yj = &q[j] * y;
        let mut cj = a_gens.clone();
        cj.extend(b_elems.iter().map(|b| &p[j] * b));
        let vj = &p[j] * &v_b;
        let mut ctj: Vec<CMatrix<T>> = b_tilde.iter().map(|b| &p[j] * b).collect();
        ctj.extend(graded_c_generators(alg, &regions.c, &vj));
        blocks.push(Block {
            class: ParityClass::ThetaFixed,
            projection: q[j].clone(),
            x_member_residual: span_closure(&cj, d, rank_tol).membership(&xj, member).residual,
            y_member_residual: span_closure(&ctj, d, rank_tol).membership(&yj, member).residual,
            partner_residual: T::zero(),
            x: xj,
            y: yj,
        });
    }
    for j in (k..p.len()).step_by(2) {
        let (pa, pb) = (&p[j], &p[j + 1]);
        let e_l = pa + pb;
        let z = &q[j] * x;
        let w = &q[j] * y;
        let partner_residual = hs_norm(&(&q[j + 1] * x - alg.theta(&z))).max(hs_norm(&(&q[j + 1] * y - alg.theta(&w))));
        let cut = |elems: &[CMatrix<T>]| -> Vec<CMatrix<T>> {
            elems
                .iter()
                .flat_map(|b| [&p_a * pa * b, &not_pa * pb * b])
                .collect()
        };
        let mut dl = a_gens.clone();
        dl.extend(cut(&b_elems));
        let u_l = &e_l * &v_b;
        let mut dtl = cut(&b_tilde);
        dtl.extend(graded_c_generators(alg, &regions.c, &u_l));
        blocks.push(Block {
            class: ParityClass::ThetaPair,
            projection: e_l,
            x_member_residual: span_closure(&dl, d, rank_tol).membership(&z, member).residual,
            y_member_residual: span_closure(&dtl, d, rank_tol).membership(&w, member).residual,
            partner_residual,
            x: z,
            y: w,
        });
    }

    let mut out = BlockDecomposition { structure, blocks, reassembly_residual: T::zero(), lemma_c_residual, y_tilde_residual };
    out.reassembly_residual = hs_norm(&(out.reassemble() - &state.rho));
    let cert = out.max_certification_residual();
    if cert > member {
        return Err(Error::BlockCertificationFailed(format!("membership residual {:e}", cert.as_f64())));
    }
    if out.reassembly_residual > T::of(tol.equality) {
        return Err(Error::BlockCertificationFailed(format!("reassembly residual {:e}", out.reassembly_residual.as_f64())));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureLemmaReport {
    /// `C` against `A_A ∨ B`.
    pub c_residual: f64,
    /// `C'` against `(B' ∩ A_BC)_+ + (B' ∩ A_BC)_- v_A`.
    pub c_prime_residual: f64,
    /// `B' ∩ A_BC` against `B~ ∨ ((A_C)_+ + v_B (A_C)_-)`.
    pub b_residual: f64,
    pub dim_c: usize,
    pub dim_b: usize,
    pub dim_c_prime: usize,
    pub dim_rel_even: usize,
    pub dim_rel_odd: usize,
}

impl StructureLemmaReport {
    pub fn worst(&self) -> f64 {
        self.c_residual.max(self.c_prime_residual).max(self.b_residual)
    }
}

pub fn validate_structure_lemmas<T: Real>(
    state: &StateDensity<T>,
    regions: &RegionPartition,
    tol: &Tolerances,
) -> Result<StructureLemmaReport> {
    require_even(state, tol)?;
    let analysis = analyze_triplet(state, regions, tol)?;
    validate_structure_lemmas_with(state, regions, &analysis, tol)
}

pub fn validate_structure_lemmas_with<T: Real>(
    state: &StateDensity<T>,
    regions: &RegionPartition,
    analysis: &TripletAnalysis<T>,
    tol: &Tolerances,
) -> Result<StructureLemmaReport> {
    require_even(state, tol)?;
    if !analysis.ssa.saturated {
        return Err(Error::NotSaturated { gap: analysis.ssa.gap });
    }
    let alg = &state.alg;
    let d = alg.dim();
    let rank_tol = T::of(tol.rank);

    let mut c_gens = annihilators_of(alg, &regions.a);
    c_gens.extend(analysis.b_basis.elements());
    let c_residual = span_equality_residual(&analysis.c_basis, &span_closure(&c_gens, d, rank_tol));

    let rel = relative_commutant(&analysis.b_basis, &alg.region_algebra(&regions.bc()), rank_tol);
    let v_a = alg.parity_unitary(&regions.a);
    let rel_elems = rel.elements();
    let rel_even = SubalgebraBasis::from_matrices(d, &rel_elems.iter().map(even_part).collect::<Vec<_>>());
    let rel_odd = SubalgebraBasis::from_matrices(d, &rel_elems.iter().map(odd_part).collect::<Vec<_>>());
    let mut graded = rel_even.elements();
    graded.extend(rel_odd.elements().iter().map(|o| o * &v_a));
    let rhs = SubalgebraBasis::from_matrices(d, &graded);
    let c_prime = commutant(&analysis.c_basis, rank_tol);
    let c_prime_residual = span_equality_residual(&c_prime, &rhs);

    let b_tilde = relative_commutant(&analysis.b_basis, &alg.region_algebra(&regions.b), rank_tol);
    let mut b_gens = b_tilde.elements();
    b_gens.extend(graded_c_generators(alg, &regions.c, &alg.parity_unitary(&regions.b)));
    let b_residual = span_equality_residual(&rel, &span_closure(&b_gens, d, rank_tol));

    Ok(StructureLemmaReport {
        c_residual: c_residual.as_f64(),
        c_prime_residual: c_prime_residual.as_f64(),
        b_residual: b_residual.as_f64(),
        dim_c: analysis.c_basis.len(),
        dim_b: analysis.b_basis.len(),
        dim_c_prime: c_prime.len(),
        dim_rel_even: rel_even.len(),
        dim_rel_odd: rel_odd.len(),
    })
}
