//! Densities, entropies and the strong subadditivity gap.
//!
//! Two pictures of a restriction are used. For entropies the restriction of
//! `rho` to `A(I)` is a unit-trace matrix in `M_{2^{|I|}}` ([`restrict_density`]).
//! For modular objects it stays in the full algebra as `E_I(rho)`
//! ([`embedded_restriction`]), which also has unit trace and is the density
//! of `phi ∘ E_I` with respect to `Tr`. The two are related by
//! `E_I(rho) ≅ restrict_density(rho, I) ⊗ I / 2^{n-|I|}`.

use std::sync::Arc;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::car::{CarAlgebra, RegionPartition};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, hermitian_part, hermitian_residual, hs_norm};
use crate::spectral::{eig_hermitian, mat_func_with, MatFunc};
use crate::{CMatrix, Real, Tolerances};

#[derive(Clone, Debug)]
pub struct StateDensity<T: Real> {
    pub alg: Arc<CarAlgebra<T>>,
    pub rho: CMatrix<T>,
    pub min_eig: T,
}

impl<T: Real> StateDensity<T> {
    /// Validates Hermiticity, unit trace and positivity. Faithfulness is not
    /// required here; see [`StateDensity::require_faithful`].
    pub fn new(alg: Arc<CarAlgebra<T>>, rho: CMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let d = alg.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: rho.nrows() });
        }
        let herm = hermitian_residual(&rho);
        if herm > T::of(tol.herm) {
            return Err(Error::NotHermitian { residual: herm.as_f64() });
        }
        let rho = hermitian_part(&rho);
        let tr = rho.trace().re;
        if (tr - T::one()).abs() > T::of(1e-10_f64.max(tol.herm)) {
            return Err(Error::InvalidState(format!("trace is {}", tr.as_f64())));
        }
        let spec = eig_hermitian(&rho, tol.herm)?;
        let min_eig = spec.min_eigenvalue();
        if min_eig < T::of(-1e-12_f64.max(tol.herm)) {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", min_eig.as_f64())));
        }
        Ok(Self { alg, rho, min_eig })
    }

    pub fn n_sites(&self) -> usize {
        self.alg.n_sites()
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn is_faithful(&self, eps: f64) -> bool {
        self.min_eig > T::of(eps)
    }

    pub fn require_faithful(&self, eps: f64) -> Result<()> {
        if self.is_faithful(eps) {
            Ok(())
        } else {
            Err(Error::NotFaithful { min_eig: self.min_eig.as_f64() })
        }
    }

    /// `||rho - Theta(rho)||` (max entry).
    pub fn even_residual(&self) -> T {
        crate::linalg::max_abs(&(&self.rho - self.alg.theta(&self.rho)))
    }

    pub fn log(&self, eps: f64) -> Result<CMatrix<T>> {
        self.require_faithful(eps)?;
        mat_func_with(&self.rho, MatFunc::Log, 1e-8, eps)
    }
}

/// Restriction to `A(I)` as a unit-trace matrix of size `2^{|I|}`, through the
/// matrix-unit isomorphism of `I`.
pub fn restrict_density<T: Real>(state: &StateDensity<T>, sites: &[usize]) -> CMatrix<T> {
    let mu = state.alg.matrix_units(sites);
    let mult = T::of_usize(state.dim() >> mu.region_len());
    let small = mu.to_small(&state.rho, mult);
    hermitian_part(&small)
}

/// `E_I(rho)`: the density of `phi ∘ E_I` in the full algebra.
pub fn embedded_restriction<T: Real>(state: &StateDensity<T>, sites: &[usize]) -> CMatrix<T> {
    hermitian_part(&state.alg.cond_expect(&state.rho, sites))
}

fn xlogx<T: Real>(x: T) -> T {
    if x <= T::zero() { T::zero() } else { x * x.ln() }
}

/// `-Tr rho log rho`, with `0 log 0 = 0`.
pub fn vn_entropy<T: Real>(rho: &CMatrix<T>) -> T {
    let eig = nalgebra::SymmetricEigen::new(hermitian_part(rho));
    -eig.eigenvalues.iter().fold(T::zero(), |acc, &l| acc + xlogx(l))
}

/// `Tr rho (log rho - log sigma)`.
pub fn rel_entropy<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>, eps_faithful: f64) -> Result<T> {
    let sig = eig_hermitian(&hermitian_part(sigma), 1e-8)?;
    if sig.min_eigenvalue() <= T::of(eps_faithful) {
        return Err(Error::SingularReference { min_eig: sig.min_eigenvalue().as_f64() });
    }
    let log_sigma = sig.apply(|l| Complex::new(l.ln(), T::zero()));
    let cross = (hermitian_part(rho) * log_sigma).trace().re;
    Ok(-vn_entropy(rho) - cross)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SsaEntropies {
    pub abc: f64,
    pub ab: f64,
    pub bc: f64,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SsaReport {
    /// `S_AB + S_BC - S_ABC - S_B` in nats.
    pub gap: f64,
    pub entropies: SsaEntropies,
    pub saturated: bool,
    pub tol_equality: f64,
    /// `S(rho, E_BC rho) - S(E_AB rho, E_B rho)`, which must equal the gap.
    pub cross_check: f64,
    pub cross_check_residual: f64,
}

pub fn ssa_gap<T: Real>(state: &StateDensity<T>, regions: &RegionPartition, tol: &Tolerances) -> Result<SsaReport> {
    state.require_faithful(tol.faithful)?;
    let s = |sites: &[usize]| vn_entropy(&restrict_density(state, sites)).as_f64();
    let abc = vn_entropy(&state.rho).as_f64();
    let ab = s(&regions.ab());
    let bc = s(&regions.bc());
    let b = s(&regions.b);
    let gap = ab + bc - abc - b;

    let e_bc = embedded_restriction(state, &regions.bc());
    let e_ab = embedded_restriction(state, &regions.ab());
    let e_b = embedded_restriction(state, &regions.b);
    let cross = rel_entropy(&state.rho, &e_bc, tol.faithful)?.as_f64() - rel_entropy(&e_ab, &e_b, tol.faithful)?.as_f64();

    Ok(SsaReport {
        gap,
        entropies: SsaEntropies { abc, ab, bc, b },
        saturated: gap <= tol.equality,
        tol_equality: tol.equality,
        cross_check: cross,
        cross_check_residual: (cross - gap).abs(),
    })
}

/// `u_t = rho^{it} sigma^{-it}`.
pub fn cocycle<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>, t: T, eps_faithful: f64) -> Result<CMatrix<T>> {
    let r = eig_hermitian(&hermitian_part(rho), 1e-8)?;
    let s = eig_hermitian(&hermitian_part(sigma), 1e-8)?;
    for spec in [&r, &s] {
        if spec.min_eigenvalue() <= T::of(eps_faithful) {
            return Err(Error::NotFaithful { min_eig: spec.min_eigenvalue().as_f64() });
        }
    }
    Ok(r.imaginary_power(t) * s.imaginary_power(-t))
}

/// `||u^* u - I||_F` for a square matrix.
pub fn unitarity_defect<T: Real>(u: &CMatrix<T>) -> T {
    let d = u.nrows();
    frobenius(&(u.adjoint() * u - CMatrix::identity(d, d)))
}

/// Normalized distance between two densities.
pub fn density_distance<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    hs_norm(&(a - b))
}
