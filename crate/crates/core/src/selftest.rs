//! Exact-algebra identity suite.
//!
//! Every identity below holds exactly in the Jordan-Wigner representation, so
//! the residuals measure floating point error only. Test elements are built
//! from the algebra's own annihilators, which lets a fixture with a broken
//! convention (see [`naive_algebra`]) show up as a failing identity.

use std::time::Instant;

use nalgebra::SymmetricEigen;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::car::{intersection, CarAlgebra, Parity};
use crate::linalg::{c, gaussian_matrix, hermitian_part, identity, max_abs};
use crate::{CMatrix, Complex, Result};

type M = CMatrix<f64>;

/// Residual bound every identity must meet.
pub const BOUND: f64 = 1e-10;

/// Identity names, in reporting order.
pub const IDENTITIES: [&str; 6] =
    ["car", "tau_product", "graded_commutation", "parity_conjugation", "matrix_units", "conditional_expectation"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub worst: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<IdentityCheck>,
    /// `(n, seconds)` per system size.
    pub timings: Vec<(usize, f64)>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn worst(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.worst)
    }
}

/// Runs the suite for `n = 1..=n_max` on the standard representation.
pub fn run(n_max: usize) -> Result<SelftestReport> {
    run_with(n_max, CarAlgebra::new)
}

/// Runs the suite on algebras produced by `make`.
pub fn run_with(n_max: usize, make: impl Fn(usize) -> Result<CarAlgebra<f64>>) -> Result<SelftestReport> {
    let mut worst = [0.0f64; 6];
    let mut timings = Vec::new();
    for n in 1..=n_max {
        let start = Instant::now();
        let alg = make(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f + n as u64);
        let found = [
            car_residual(&alg),
            tau_product_residual(&alg, &mut rng),
            graded_residual(&alg, &mut rng),
            parity_residual(&alg, &mut rng),
            matrix_unit_residual(&alg, &mut rng),
            cond_expect_residual(&alg, &mut rng),
        ];
        for (w, f) in worst.iter_mut().zip(found) {
            // NaN must count as failure
            *w = if f.is_nan() { f64::NAN } else { w.max(f) };
        }
        timings.push((n, start.elapsed().as_secs_f64()));
    }
    let checks = IDENTITIES
        .iter()
        .zip(worst)
        .map(|(name, w)| IdentityCheck { name: name.to_string(), worst: w, bound: BOUND, pass: w <= BOUND })
        .collect();
    Ok(SelftestReport { checks, timings })
}

/// Annihilators `|0><1|` on each site with no sign string. They commute
/// across sites instead of anticommuting.
pub fn naive_algebra(n: usize) -> Result<CarAlgebra<f64>> {
    let d = 1usize << n;
    let mats: Vec<M> = (0..n)
        .map(|j| {
            let bit = n - 1 - j;
            let mut m = M::zeros(d, d);
            for s in 0..d {
                if (s >> bit) & 1 == 1 {
                    m[(s ^ (1 << bit), s)] = c(1.0);
                }
            }
            m
        })
        .collect();
    CarAlgebra::from_annihilators(&mats)
}

fn gauss(rng: &mut ChaCha8Rng) -> Complex<f64> {
    Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

/// Random `(even, odd)` element of `A(sites)` from words in `1, a, a^*, a^* a`.
fn random_graded(alg: &CarAlgebra<f64>, sites: &[usize], rng: &mut ChaCha8Rng) -> (M, M) {
    let d = alg.dim();
    let mut even = M::zeros(d, d);
    let mut odd = M::zeros(d, d);
    for _ in 0..8 {
        let mut word = identity::<f64>(d);
        let mut letters = 0;
        for &i in sites {
            let letter = match rng.random_range(0..4) {
                0 => continue,
                1 => {
                    letters += 1;
                    alg.annihilator(i)
                }
                2 => {
                    letters += 1;
                    alg.creator(i)
                }
                _ => alg.creator(i) * alg.annihilator(i),
            };
            word *= letter;
        }
        let target = if Parity::from_count(letters) == Parity::Even { &mut even } else { &mut odd };
        *target += word * gauss(rng);
    }
    (even, odd)
}

/// Random nonempty subset of `0..n`.
fn random_subset(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// Random disjoint nonempty `(I, J)`; needs `n >= 2`.
fn random_disjoint(n: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut sites: Vec<usize> = (0..n).collect();
    sites.shuffle(rng);
    let cut = rng.random_range(1..n);
    let rest = rng.random_range(cut + 1..=n);
    let mut i = sites[..cut].to_vec();
    let mut j = sites[cut..rest].to_vec();
    i.sort_unstable();
    j.sort_unstable();
    (i, j)
}

fn car_residual(alg: &CarAlgebra<f64>) -> f64 {
    let n = alg.n_sites();
    let d = alg.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let a_i = alg.annihilator(i);
        for j in 0..n {
            let a_j = alg.annihilator(j);
            let a_j_star = alg.creator(j);
            let mut anti = &a_i * &a_j_star + &a_j_star * &a_i;
            if i == j {
                anti -= identity::<f64>(d);
            }
            worst = worst.max(max_abs(&anti));
            worst = worst.max(max_abs(&(&a_i * &a_j + &a_j * &a_i)));
        }
    }
    worst
}

fn tau_product_residual(alg: &CarAlgebra<f64>, rng: &mut ChaCha8Rng) -> f64 {
    let n = alg.n_sites();
    if n < 2 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for _ in 0..6 {
        let (i, j) = random_disjoint(n, rng);
        let (xe, xo) = random_graded(alg, &i, rng);
        let (ye, yo) = random_graded(alg, &j, rng);
        let x = xe + xo;
        let y = ye + yo;
        let lhs = alg.tau(&(&x * &y));
        worst = worst.max((lhs - alg.tau(&x) * alg.tau(&y)).norm());
    }
    worst
}

fn graded_residual(alg: &CarAlgebra<f64>, rng: &mut ChaCha8Rng) -> f64 {
    let n = alg.n_sites();
    if n < 2 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for _ in 0..6 {
        let (i, j) = random_disjoint(n, rng);
        let (xe, xo) = random_graded(alg, &i, rng);
        let (ye, yo) = random_graded(alg, &j, rng);
        for (x, y, sign) in [(&xe, &ye, 1.0), (&xe, &yo, 1.0), (&xo, &ye, 1.0), (&xo, &yo, -1.0)] {
            worst = worst.max(max_abs(&(x * y - (y * x) * c(sign))));
        }
    }
    worst
}

fn parity_residual(alg: &CarAlgebra<f64>, rng: &mut ChaCha8Rng) -> f64 {
    let n = alg.n_sites();
    let d = alg.dim();
    let all: Vec<usize> = (0..n).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..4 {
        let sites = random_subset(n, rng);
        let v = alg.parity_unitary(&sites);
        worst = worst.max(max_abs(&(&v - v.adjoint())));
        worst = worst.max(max_abs(&(&v * &v - identity::<f64>(d))));
        for j in 0..n {
            let a = alg.annihilator(j);
            let sign = if sites.contains(&j) { -1.0 } else { 1.0 };
            worst = worst.max(max_abs(&(&v * &a * &v - a * c(sign))));
        }
        let x: M = gaussian_matrix(d, d, rng);
        worst = worst.max(max_abs(&(alg.parity_automorphism(&x, &sites) - &v * &x * &v)));
    }
    let x: M = gaussian_matrix(d, d, rng);
    let v = alg.parity_unitary(&all);
    worst = worst.max(max_abs(&(alg.theta(&x) - &v * &x * &v)));
    worst
}

fn matrix_unit_residual(alg: &CarAlgebra<f64>, rng: &mut ChaCha8Rng) -> f64 {
    let n = alg.n_sites();
    let d = alg.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let region = random_subset(n, rng);
        let fam = alg.matrix_units(&region);
        let size = 1usize << region.len();
        let mut sum = M::zeros(d, d);
        for k in 0..size {
            sum += fam.dense(fam.index(k, k));
        }
        worst = worst.max(max_abs(&(sum - identity::<f64>(d))));
        for _ in 0..40 {
            let (k, l, p, q) =
                (rng.random_range(0..size), rng.random_range(0..size), rng.random_range(0..size), rng.random_range(0..size));
            let prod = fam.dense(fam.index(k, l)) * fam.dense(fam.index(p, q));
            let expect = if l == p { fam.dense(fam.index(k, q)) } else { M::zeros(d, d) };
            worst = worst.max(max_abs(&(prod - expect)));
            worst = worst.max(max_abs(&(fam.dense(fam.index(k, l)).adjoint() - fam.dense(fam.index(l, k)))));
        }
        // units on one region commute with the even part of the complement
        let rest: Vec<usize> = (0..n).filter(|s| !region.contains(s)).collect();
        if !rest.is_empty() {
            let (ye, _) = random_graded(alg, &rest, rng);
            let e = fam.dense(rng.random_range(0..fam.len()));
            worst = worst.max(max_abs(&(&e * &ye - &ye * &e)));
        }
    }
    worst
}

fn cond_expect_residual(alg: &CarAlgebra<f64>, rng: &mut ChaCha8Rng) -> f64 {
    let n = alg.n_sites();
    let d = alg.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let i = random_subset(n, rng);
        let j = random_subset(n, rng);
        let x: M = gaussian_matrix(d, d, rng);
        let ex = alg.cond_expect(&x, &i);

        let basis = alg.region_algebra(&i);
        worst = worst.max(basis.residual(&ex));
        worst = worst.max(max_abs(&(alg.cond_expect(&ex, &i) - &ex)));
        worst = worst.max((alg.tau(&ex) - alg.tau(&x)).norm());

        let (ae, ao) = random_graded(alg, &i, rng);
        let (be, bo) = random_graded(alg, &i, rng);
        let a = ae + ao;
        let b = be + bo;
        worst = worst.max(max_abs(&(alg.cond_expect(&(&a * &x * &b), &i) - &a * &ex * &b)));

        let ij = intersection(&i, &j);
        worst = worst.max(max_abs(&(alg.cond_expect(&alg.cond_expect(&x, &j), &i) - alg.cond_expect(&x, &ij))));
        worst = worst.max(max_abs(&(alg.theta(&ex) - alg.cond_expect(&alg.theta(&x), &i))));

        let pos = alg.cond_expect(&(&x * x.adjoint()), &i);
        let min = SymmetricEigen::new(hermitian_part(&pos)).eigenvalues.min();
        worst = worst.max((-min).max(0.0));
    }
    worst
}
