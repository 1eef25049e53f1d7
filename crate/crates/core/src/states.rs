//! Seeded state generators.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)`, so a
//! `(kind, seed, parameters)` triple determines the output bit for bit.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::car::{even_part, theta, CarAlgebra, Parity, RegionPartition};
use crate::error::{Error, Result};
use crate::linalg::{c, commutator, frobenius, gaussian_matrix, hermitian_part, identity};
use crate::markov::{
    parity_projection, q_projections, Block, BlockDecomposition, CentralStructure, ParityClass,
};
use crate::quantum_info::StateDensity;
use crate::{CMatrix, Real, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Random,
    RandomEven,
    ProductMarkov,
    BlockMarkov,
    Perturbed,
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random" => Self::Random,
            "random_even" => Self::RandomEven,
            "product_markov" => Self::ProductMarkov,
            "block_markov" => Self::BlockMarkov,
            "perturbed" => Self::Perturbed,
            other => return Err(Error::Parse(format!("unknown generator kind '{other}'"))),
        })
    }
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::RandomEven => "random_even",
            Self::ProductMarkov => "product_markov",
            Self::BlockMarkov => "block_markov",
            Self::Perturbed => "perturbed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityMode {
    EvenEven,
    EvenNoneven,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Lower bound on the spectrum, as a fraction of `2^{-n}`.
    pub floor_fraction: f64,
    pub parity_mode: ParityMode,
    pub k_fixed: usize,
    pub n_pairs: usize,
    pub epsilon: f64,
    /// For `Perturbed`: mix toward an even state so evenness survives.
    pub preserve_even: bool,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            floor_fraction: 0.05,
            parity_mode: ParityMode::EvenEven,
            k_fixed: 1,
            n_pairs: 0,
            epsilon: 1e-3,
            preserve_even: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub seed: u64,
    pub regions: RegionPartition,
    pub params: GeneratorParams,
}

impl GeneratorSpec {
    pub fn generate<T: Real>(&self) -> Result<StateDensity<T>> {
        let n = self.regions.n_sites();
        let floor = self.params.floor_fraction / (1u64 << n) as f64;
        match self.kind {
            GeneratorKind::Random => random_state(n, self.seed, floor),
            GeneratorKind::RandomEven => random_even_state(n, self.seed, floor),
            GeneratorKind::ProductMarkov => make_product_markov(&self.regions, self.seed, self.params.parity_mode),
            GeneratorKind::BlockMarkov => {
                make_block_markov(&self.regions, self.seed, self.params.k_fixed, self.params.n_pairs).map(|(s, _)| s)
            }
            GeneratorKind::Perturbed => {
                let base = make_product_markov(&self.regions, self.seed, self.params.parity_mode)?;
                perturb(&base, self.params.epsilon, self.seed.wrapping_add(1), self.params.preserve_even)
            }
        }
    }
}

fn algebra<T: Real>(n: usize) -> Result<Arc<CarAlgebra<T>>> {
    Ok(Arc::new(CarAlgebra::new(n)?))
}

fn into_state<T: Real>(alg: Arc<CarAlgebra<T>>, rho: CMatrix<T>) -> Result<StateDensity<T>> {
    let rho = hermitian_part(&rho);
    let tr = rho.trace();
    StateDensity::new(alg, rho / tr, &Tolerances::default())
}

fn check_floor(n: usize, floor: f64) -> Result<()> {
    let max = 1.0 / (1u64 << n) as f64;
    if !(floor > 0.0 && floor <= max) {
        return Err(Error::InvalidState(format!("floor {floor} outside (0, 2^-{n}]")));
    }
    Ok(())
}

/// `(1 - d floor) G G^* / Tr(G G^*) + floor I`.
fn wishart<T: Real, R: Rng + ?Sized>(d: usize, floor: f64, rng: &mut R) -> CMatrix<T> {
    let g: CMatrix<T> = gaussian_matrix(d, d, rng);
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    let w = T::of(1.0 - d as f64 * floor);
    gg * c(w / tr) + identity::<T>(d) * c(T::of(floor))
}

pub fn random_state<T: Real>(n: usize, seed: u64, floor: f64) -> Result<StateDensity<T>> {
    check_floor(n, floor)?;
    let alg = algebra::<T>(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = wishart(alg.dim(), floor, &mut rng);
    into_state(alg, rho)
}

pub fn random_even_state<T: Real>(n: usize, seed: u64, floor: f64) -> Result<StateDensity<T>> {
    check_floor(n, floor)?;
    let alg = algebra::<T>(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = even_part(&wishart(alg.dim(), floor, &mut rng));
    into_state(alg, rho)
}

/// Positive definite element of `A(I)`: `E_I(G G^*) / tau + floor`.
fn positive_in<T: Real, R: Rng + ?Sized>(alg: &CarAlgebra<T>, sites: &[usize], floor: f64, rng: &mut R) -> CMatrix<T> {
    let d = alg.dim();
    let g: CMatrix<T> = gaussian_matrix(d, d, rng);
    let p = hermitian_part(&alg.cond_expect(&(&g * g.adjoint()), sites));
    let scale = p.trace().re / T::of_usize(d);
    p * c(T::one() / scale) + identity::<T>(d) * c(T::of(floor))
}

fn even_positive_in<T: Real, R: Rng + ?Sized>(alg: &CarAlgebra<T>, sites: &[usize], floor: f64, rng: &mut R) -> CMatrix<T> {
    even_part(&positive_in(alg, sites, floor, rng))
}

const COMMUTE_TOL: f64 = 1e-10;
const MAX_RETRIES: u64 = 5;

/// `rho = x y / Tr(x y)` with `x` even positive in `A_AB` and `y` positive in
/// `A_C`; `y` is even for `EvenEven` and keeps its odd part for
/// `EvenNoneven`. Even `x` commutes with all of `A_C`.
pub fn make_product_markov<T: Real>(regions: &RegionPartition, seed: u64, mode: ParityMode) -> Result<StateDensity<T>> {
    let alg = algebra::<T>(regions.n_sites())?;
    for attempt in 0..MAX_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9)));
        let x = even_positive_in(&alg, &regions.ab(), 0.2, &mut rng);
        let y = match mode {
            ParityMode::EvenEven => even_positive_in(&alg, &regions.c, 0.2, &mut rng),
            ParityMode::EvenNoneven => positive_in(&alg, &regions.c, 0.2, &mut rng),
        };
        let comm = frobenius(&commutator(&x, &y)) / frobenius(&x).max(T::one()) / frobenius(&y).max(T::one());
        if comm <= T::of(COMMUTE_TOL) {
            return into_state(alg, &x * &y);
        }
    }
    Err(Error::CommutationFailed { retries: MAX_RETRIES as usize })
}

/// Number projections `prod_j (n_j or 1 - n_j)` over `sites`, indexed by
/// occupation pattern (first site most significant).
fn number_projections<T: Real>(alg: &CarAlgebra<T>, sites: &[usize]) -> Vec<CMatrix<T>> {
    let d = alg.dim();
    let id = identity::<T>(d);
    let mut out = vec![id.clone()];
    for &s in sites {
        let n = alg.number(s);
        let hole = &id - &n;
        out = out.iter().flat_map(|p| [p * &hole, p * &n]).collect();
    }
    out
}

/// Designed central projections in `A_B`: `k` fixed ones, then `p` swapped
/// pairs `(P_a, Theta(P_a))`, summing to `I`.
fn designed_projections<T: Real>(alg: &CarAlgebra<T>, b: &[usize], k: usize, p: usize) -> Result<Vec<CMatrix<T>>> {
    if k + p == 0 {
        return Err(Error::RegionTooSmall("at least one block is required".into()));
    }
    let last = *b.last().expect("B is nonempty");
    let rest = &b[..b.len() - 1];
    let too_small = || Error::RegionTooSmall(format!("|B| = {} cannot host {k} fixed blocks and {p} pairs", b.len()));

    let merge = |groups: &mut Vec<CMatrix<T>>, extra: Vec<CMatrix<T>>| {
        let n = groups.len();
        for (i, e) in extra.into_iter().enumerate() {
            if i < n {
                groups[i] += e;
            } else {
                groups[n - 1] += e;
            }
        }
    };

    if p == 0 {
        let atoms = number_projections(alg, b);
        if k > atoms.len() {
            return Err(too_small());
        }
        let mut groups: Vec<CMatrix<T>> = atoms[..k].to_vec();
        merge(&mut groups, atoms[k..].to_vec());
        return Ok(groups);
    }

    let r_list = number_projections(alg, rest);
    let r = r_list.len();
    if p > r || (k > 0 && k > 2 * (r - p)) || (k == 0 && p == 0) {
        return Err(too_small());
    }
    let gamma = alg.annihilator(last) + alg.creator(last);
    let id = identity::<T>(alg.dim());
    let half = c(T::of(0.5));
    let plus = (&id + &gamma) * half;
    let minus = (&id - &gamma) * half;

    let mut pairs: Vec<(CMatrix<T>, CMatrix<T>)> = r_list[..p].iter().map(|rr| (rr * &plus, rr * &minus)).collect();
    let n_last = alg.number(last);
    let hole_last = &id - &n_last;
    let leftovers: Vec<CMatrix<T>> = r_list[p..].iter().flat_map(|rr| [rr * &hole_last, rr * &n_last]).collect();

    let mut fixed: Vec<CMatrix<T>> = Vec::new();
    if k > 0 {
        fixed = leftovers[..k].to_vec();
        merge(&mut fixed, leftovers[k..].to_vec());
    } else {
        // absorb into the last pair, split by the same Majorana sign
        let (a, bb) = pairs.last_mut().expect("p > 0");
        for rr in &r_list[p..] {
            *a += rr * &plus;
            *bb += rr * &minus;
        }
    }
    let mut out = fixed;
    for (a, bb) in pairs {
        out.push(a);
        out.push(bb);
    }
    Ok(out)
}

/// Even Markov state with a designed block structure, and the design.
///
/// Fixed and paired blocks alternate between two factor shapes so that both
/// a nontrivial `B_j` and a nontrivial `B~_j` occur: in the first the `A_B`
/// content sits in `x`, in the second it sits in `y`. Pair blocks carry
/// `c_+ + v_B c_-` for a positive `c in A_C`; this commutes with `A_B` and
/// with `P_a`, and `Theta` flips the sign of its odd part, which separates
/// the two halves of the pair.
pub fn make_block_markov<T: Real>(
    regions: &RegionPartition,
    seed: u64,
    k_fixed: usize,
    n_pairs: usize,
) -> Result<(StateDensity<T>, BlockDecomposition<T>)> {
    let alg = algebra::<T>(regions.n_sites())?;
    let d = alg.dim();
    let ps = designed_projections(&alg, &regions.b, k_fixed, n_pairs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_a = parity_projection(&alg, &regions.a);
    let q = q_projections(&ps, k_fixed, &p_a);
    let floor = 0.2;
    let (ab, bc) = (regions.ab(), regions.bc());
    let v_b = alg.parity_unitary(&regions.b);

    let mut blocks = Vec::new();
    for j in 0..k_fixed {
        let pj = &ps[j];
        let weight = c(T::of(rng.random_range(0.5..1.5)));
        let (x, y) = if j % 2 == 0 {
            let xx = even_positive_in(&alg, &ab, floor, &mut rng);
            let cc = even_positive_in(&alg, &regions.c, floor, &mut rng);
            (pj * xx * pj * weight, pj * cc)
        } else {
            let xx = even_positive_in(&alg, &regions.a, floor, &mut rng);
            let yy = even_positive_in(&alg, &bc, floor, &mut rng);
            (pj * xx * weight, pj * yy * pj)
        };
        blocks.push(Block {
            class: ParityClass::ThetaFixed,
            projection: pj.clone(),
            x,
            y,
            partner_residual: T::zero(),
            x_member_residual: T::zero(),
            y_member_residual: T::zero(),
        });
    }
    for l in 0..n_pairs {
        let j = k_fixed + 2 * l;
        let (pa, pb) = (&ps[j], &ps[j + 1]);
        let qa = &q[j];
        let e_l = pa + pb;
        let weight = c(T::of(rng.random_range(0.5..1.5)));
        let xa = even_positive_in(&alg, &regions.a, floor, &mut rng) * weight;
        let (x, y) = if l % 2 == 0 {
            // B_a = P_a A_B P_a; the C part twisted by v_B so Theta changes it
            let b = positive_in(&alg, &regions.b, floor, &mut rng);
            let cc = positive_in(&alg, &regions.c, floor, &mut rng);
            let (c_even, c_odd) = alg.even_odd_split(&cc);
            let twisted = &c_even + &v_b * &c_odd;
            let x = &xa * (pa * &b * pa + pb * alg.theta(&b) * pb);
            let y = pa * &twisted + pb * alg.theta(&twisted);
            (x, y)
        } else {
            // B_a = C P_a; all structure sits in y
            let yy = positive_in(&alg, &bc, floor, &mut rng);
            (&xa * &e_l, pa * &yy * pa + pb * alg.theta(&yy) * pb)
        };
        blocks.push(Block {
            class: ParityClass::ThetaPair,
            projection: e_l,
            x: qa * x,
            y: qa * y,
            partner_residual: T::zero(),
            x_member_residual: T::zero(),
            y_member_residual: T::zero(),
        });
    }

    let total = blocks.iter().fold(CMatrix::<T>::zeros(d, d), |acc, b| acc + b.contribution());
    let tr = total.trace().re;
    for b in &mut blocks {
        b.x *= c(T::one() / tr);
    }
    let state = into_state(alg, total)?;
    let m = ps.len();
    let pairing = (0..m)
        .map(|pos| if pos < k_fixed { pos } else if (pos - k_fixed) % 2 == 0 { pos + 1 } else { pos - 1 })
        .collect();
    let structure = CentralStructure { p_list: ps, k: k_fixed, q_list: q, pairing, theta_residual: T::zero(), q_residual: T::zero() };
    let mut design = BlockDecomposition {
        structure,
        blocks,
        reassembly_residual: T::zero(),
        lemma_c_residual: T::zero(),
        y_tilde_residual: T::zero(),
    };
    design.reassembly_residual = crate::linalg::hs_norm(&(design.reassemble() - &state.rho));
    Ok((state, design))
}

/// `(1 - eps) rho + eps sigma` with `sigma` a seeded random state (even when
/// `preserve_even`).
pub fn perturb<T: Real>(state: &StateDensity<T>, epsilon: f64, seed: u64, preserve_even: bool) -> Result<StateDensity<T>> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidState(format!("epsilon {epsilon} outside [0, 1]")));
    }
    if epsilon == 0.0 {
        return Ok(state.clone());
    }
    let n = state.n_sites();
    let floor = 0.05 / (1u64 << n) as f64;
    let sigma = if preserve_even { random_even_state::<T>(n, seed, floor)? } else { random_state::<T>(n, seed, floor)? };
    let e = T::of(epsilon);
    let rho = &state.rho * c(T::one() - e) + sigma.rho * c(e);
    into_state(state.alg.clone(), rho)
}

/// Global-parity check used by generator tests: `||rho - Theta(rho)||_F`.
pub fn parity_defect<T: Real>(rho: &CMatrix<T>) -> T {
    frobenius(&(rho - theta(rho)))
}

/// Convenience: the parity of a designed product state's `y`.
pub fn expected_y_parity(mode: ParityMode) -> Parity {
    match mode {
        ParityMode::EvenEven => Parity::Even,
        ParityMode::EvenNoneven => Parity::Odd,
    }
}
