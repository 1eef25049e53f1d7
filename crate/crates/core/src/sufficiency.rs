//! Petz maps and sufficiency of a subalgebra for a pair of states.
//!
//! For a faithful density `rho` and a unital *-subalgebra `S` the Petz map is
//!
//! ```text
//! E_rho(a) = rho0^{-1/2} P_S(rho^{1/2} a rho^{1/2}) rho0^{-1/2},   rho0 = P_S(rho),
//! ```
//!
//! where `P_S` is the Hilbert-Schmidt projection onto `S` (the trace
//! preserving conditional expectation). `S` is sufficient for `{phi, psi}`
//! when it loses no relative entropy, when the cocycle `rho_phi^{it}
//! rho_psi^{-it}` stays in `S`, or when the two Petz maps agree; the three
//! tests are run side by side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, commutator, frobenius, hermitian_part, hs_norm, identity, unvectorize, vectorize};
use crate::quantum_info::{cocycle, rel_entropy, StateDensity};
use crate::spectral::{eig_hermitian, SpectralDecomposition};
use crate::subalgebra::{invariant_subalgebra, largest_invariant_subspace, SubalgebraBasis};
use crate::{CMatrix, Real, Tolerances};

/// Linear map `M_{d_in} -> M_{d_out}` stored as a `d_out^2 x d_in^2`
/// superoperator acting on column-major vectorizations.
#[derive(Clone, Debug)]
pub struct QuantumChannel<T: Real> {
    pub dim_in: usize,
    pub dim_out: usize,
    pub superop: CMatrix<T>,
    pub kraus_rank: usize,
}

impl<T: Real> QuantumChannel<T> {
    pub fn from_fn(dim_in: usize, dim_out: usize, f: impl Fn(&CMatrix<T>) -> CMatrix<T>) -> Self {
        let mut superop = CMatrix::zeros(dim_out * dim_out, dim_in * dim_in);
        for j in 0..dim_in {
            for i in 0..dim_in {
                let mut e = CMatrix::zeros(dim_in, dim_in);
                e[(i, j)] = c(T::one());
                superop.set_column(i + j * dim_in, &vectorize(&f(&e)));
            }
        }
        let mut ch = Self { dim_in, dim_out, superop, kraus_rank: 0 };
        ch.kraus_rank = ch.choi_rank(T::of(1e-9));
        ch
    }

    pub fn apply(&self, x: &CMatrix<T>) -> CMatrix<T> {
        let v = &self.superop * vectorize(x);
        unvectorize(v.as_slice(), self.dim_out)
    }

    /// `C[(i,k),(j,l)] = Phi(E_ij)_{kl}`.
    pub fn choi(&self) -> CMatrix<T> {
        let (di, dout) = (self.dim_in, self.dim_out);
        CMatrix::from_fn(di * dout, di * dout, |row, col| {
            let (i, k) = (row / dout, row % dout);
            let (j, l) = (col / dout, col % dout);
            self.superop[(k + l * dout, i + j * di)]
        })
    }

    fn choi_spectrum(&self) -> SpectralDecomposition<T> {
        let ch = hermitian_part(&self.choi());
        eig_hermitian(&ch, f64::INFINITY).expect("hermitian part is Hermitian")
    }

    pub fn choi_min_eig(&self) -> T {
        self.choi_spectrum().min_eigenvalue()
    }

    fn choi_rank(&self, rel: T) -> usize {
        let spec = self.choi_spectrum();
        let cut = rel * spec.max_eigenvalue().abs().max(T::one());
        spec.eigenvalues.iter().filter(|&&l| l > cut).count()
    }

    /// `||Phi(I) - I||_F`.
    pub fn unital_residual(&self) -> T {
        assert_eq!(self.dim_in, self.dim_out);
        let id = identity::<T>(self.dim_in);
        frobenius(&(self.apply(&id) - id))
    }

    /// `||Phi - Psi||_F / d` on superoperators.
    pub fn distance(&self, other: &Self) -> T {
        frobenius(&(&self.superop - &other.superop)) / T::of_usize(self.dim_in)
    }
}

/// `P_S(rho)` and its spectrum; fails when it is not invertible.
fn restricted_density<T: Real>(
    rho: &CMatrix<T>,
    s: &SubalgebraBasis<T>,
    eps: f64,
) -> Result<(CMatrix<T>, SpectralDecomposition<T>)> {
    let rho0 = hermitian_part(&s.project(rho));
    let spec = eig_hermitian(&rho0, 1e-8)?;
    if spec.min_eigenvalue() <= T::of(eps) {
        return Err(Error::SingularRestriction { min_eig: spec.min_eigenvalue().as_f64() });
    }
    Ok((rho0, spec))
}

/// The Petz map of `psi` onto `S`, as a channel on `M_d`.
pub fn petz_map<T: Real>(psi: &StateDensity<T>, s: &SubalgebraBasis<T>, tol: &Tolerances) -> Result<QuantumChannel<T>> {
    psi.require_faithful(tol.faithful)?;
    let (_, spec0) = restricted_density(&psi.rho, s, tol.faithful)?;
    let inv_sqrt0 = spec0.apply(|l| c(T::one() / l.sqrt()));
    let sqrt_rho = eig_hermitian(&psi.rho, tol.herm)?.apply(|l| c(l.max(T::zero()).sqrt()));
    let d = psi.dim();
    Ok(QuantumChannel::from_fn(d, d, |a| {
        let inner = s.project(&(&sqrt_rho * a * &sqrt_rho));
        &inv_sqrt0 * inner * &inv_sqrt0
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SufficiencyReport {
    /// `S(phi, psi) - S(phi0, psi0)`.
    pub entropy_drop: f64,
    pub entropy_verdict: bool,
    /// Cocycle defect: distance of `I` from the largest subspace of `S`
    /// invariant under `X -> log rho_phi X - X log rho_psi`, combined with
    /// sampled membership of `u_t`.
    pub cocycle_residual: f64,
    pub cocycle_verdict: bool,
    /// `||E_phi - E_psi||_F / d`.
    pub petz_residual: f64,
    pub petz_verdict: bool,
    pub tolerance: f64,
    pub overall: bool,
}

impl SufficiencyReport {
    pub fn verdicts_agree(&self) -> bool {
        self.entropy_verdict == self.cocycle_verdict && self.cocycle_verdict == self.petz_verdict
    }
}

fn op_norm<T: Real>(spec: &SpectralDecomposition<T>) -> T {
    spec.max_eigenvalue().abs().max(spec.min_eigenvalue().abs())
}

pub fn is_sufficient<T: Real>(
    phi: &StateDensity<T>,
    psi: &StateDensity<T>,
    s: &SubalgebraBasis<T>,
    tol: &Tolerances,
) -> Result<SufficiencyReport> {
    phi.require_faithful(tol.faithful)?;
    psi.require_faithful(tol.faithful)?;
    let eps = tol.faithful;

    let (phi0, _) = restricted_density(&phi.rho, s, eps)?;
    let (psi0, _) = restricted_density(&psi.rho, s, eps)?;
    let drop = rel_entropy(&phi.rho, &psi.rho, eps)? - rel_entropy(&phi0, &psi0, eps)?;
    let drop = drop.as_f64();

    let spec_phi = eig_hermitian(&phi.rho, tol.herm)?;
    let spec_psi = eig_hermitian(&psi.rho, tol.herm)?;
    let log_phi = spec_phi.apply(|l| c(l.ln()));
    let log_psi = spec_psi.apply(|l| c(l.ln()));
    let scale = op_norm(&eig_hermitian(&log_phi, 1e-6)?) + op_norm(&eig_hermitian(&log_psi, 1e-6)?);
    let derivation = |x: &CMatrix<T>| &log_phi * x - x * &log_psi;
    let invariant = largest_invariant_subspace(&derivation, s, T::of(tol.rank), scale);
    let d = phi.dim();
    let mut cocycle_residual = invariant.residual(&identity(d)).as_f64();
    for t in [0.3, 1.1] {
        let u = cocycle(&phi.rho, &psi.rho, T::of(t), eps)?;
        cocycle_residual = cocycle_residual.max(s.residual(&u).as_f64());
    }

    let petz_residual = petz_map(phi, s, tol)?.distance(&petz_map(psi, s, tol)?).as_f64();

    let tolerance = tol.equality;
    let entropy_verdict = drop <= tolerance;
    let cocycle_verdict = cocycle_residual <= tolerance;
    let petz_verdict = petz_residual <= tolerance;
    Ok(SufficiencyReport {
        entropy_drop: drop,
        entropy_verdict,
        cocycle_residual,
        cocycle_verdict,
        petz_residual,
        petz_verdict,
        tolerance,
        overall: entropy_verdict && cocycle_verdict && petz_verdict,
    })
}

/// `rho_phi = rho_phi0 D`, `rho_psi = rho_psi0 D` with `D` in the commutant
/// of `S`.
#[derive(Clone, Debug)]
pub struct RelativeFactor<T: Real> {
    pub d: CMatrix<T>,
    pub min_eig: T,
    /// `max_s ||[D, s]||_HS` over the basis of `S`.
    pub commutant_residual: T,
    pub phi_residual: T,
    pub psi_residual: T,
}

pub fn factor_through<T: Real>(
    phi: &StateDensity<T>,
    psi: &StateDensity<T>,
    s: &SubalgebraBasis<T>,
    tol: &Tolerances,
) -> Result<RelativeFactor<T>> {
    let log_psi = psi.log(tol.faithful)?;
    let stable = invariant_subalgebra(&log_psi, s, T::of(tol.rank))?;
    if stable.len() != s.len() {
        let defect = s.contains(&stable).max(T::of_usize(s.len() - stable.len()));
        return Err(Error::FlowUnstable { residual: defect.as_f64() });
    }
    if !is_sufficient(phi, psi, s, tol)?.overall {
        return Err(Error::NotSufficient);
    }
    let (phi0, spec0) = restricted_density(&phi.rho, s, tol.faithful)?;
    let (psi0, _) = restricted_density(&psi.rho, s, tol.faithful)?;
    let inv0 = spec0.apply(|l| c(T::one() / l));
    let d = &inv0 * &phi.rho;
    let min_eig = eig_hermitian(&hermitian_part(&d), f64::INFINITY)?.min_eigenvalue();
    let commutant_residual = s.elements().iter().fold(T::zero(), |acc, b| acc.max(hs_norm(&commutator(&d, b))));
    let phi_residual = hs_norm(&(&phi.rho - &phi0 * &d));
    let psi_residual = hs_norm(&(&psi.rho - &psi0 * &d));
    if psi_residual > T::of(tol.equality) || min_eig < T::of(-1e-9) {
        return Err(Error::FactorizationFailed(format!(
            "psi reconstruction {:e}, min eigenvalue {:e}",
            psi_residual.as_f64(),
            min_eig.as_f64()
        )));
    }
    Ok(RelativeFactor { d, min_eig, commutant_residual, phi_residual, psi_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::car::CarAlgebra;
    use crate::linalg::gaussian_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random_state(alg: &Arc<CarAlgebra<f64>>, seed: u64) -> StateDensity<f64> {
        let d = alg.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g: CMatrix<f64> = gaussian_matrix(d, d, &mut rng);
        let mut rho = &g * g.adjoint() + identity::<f64>(d) * c(0.1);
        let tr = rho.trace();
        rho /= tr;
        StateDensity::new(alg.clone(), rho, &Tolerances::default()).unwrap()
    }

    #[test]
    fn petz_of_tracial_state_is_projection() {
        let alg = Arc::new(CarAlgebra::<f64>::new(2).unwrap());
        let tr = StateDensity::new(alg.clone(), identity::<f64>(4) * c(0.25), &Tolerances::default()).unwrap();
        let s = alg.region_algebra(&[0]);
        let ch = petz_map(&tr, &s, &Tolerances::default()).unwrap();
        let proj = QuantumChannel::from_fn(4, 4, |x| s.project(x));
        assert!(ch.distance(&proj) < 1e-12);
        assert!(ch.unital_residual() < 1e-12);
    }

    #[test]
    fn petz_map_is_unital_and_cp() {
        let alg = Arc::new(CarAlgebra::<f64>::new(2).unwrap());
        let psi = random_state(&alg, 3);
        let s = alg.region_algebra(&[1]);
        let ch = petz_map(&psi, &s, &Tolerances::default()).unwrap();
        assert!(ch.unital_residual() < 1e-10);
        assert!(ch.choi_min_eig() > -1e-10);
        assert!(ch.kraus_rank >= 1);
    }

    #[test]
    fn identical_states_are_sufficient() {
        let alg = Arc::new(CarAlgebra::<f64>::new(2).unwrap());
        let phi = random_state(&alg, 5);
        let s = alg.region_algebra(&[0]);
        let rep = is_sufficient(&phi, &phi, &s, &Tolerances::default()).unwrap();
        assert!(rep.overall, "{rep:?}");
    }

    #[test]
    fn generic_pair_is_not_sufficient() {
        let alg = Arc::new(CarAlgebra::<f64>::new(2).unwrap());
        let phi = random_state(&alg, 6);
        let psi = random_state(&alg, 7);
        let s = alg.region_algebra(&[0]);
        let rep = is_sufficient(&phi, &psi, &s, &Tolerances::default()).unwrap();
        assert!(!rep.entropy_verdict && !rep.cocycle_verdict && !rep.petz_verdict, "{rep:?}");
    }

    #[test]
    fn full_algebra_always_sufficient() {
        let alg = Arc::new(CarAlgebra::<f64>::new(2).unwrap());
        let phi = random_state(&alg, 8);
        let psi = random_state(&alg, 9);
        let s = SubalgebraBasis::full(4);
        let rep = is_sufficient(&phi, &psi, &s, &Tolerances::default()).unwrap();
        assert!(rep.overall, "{rep:?}");
    }
}
