//! Hermitian eigendecomposition and functions of Hermitian matrices.

use nalgebra::{Complex, DVector};

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_part, hermitian_residual};
use crate::{CMatrix, Real};

/// `M = U diag(eigenvalues) U^*` with eigenvalues ascending.
///
/// Each eigenvector is normalized so its first non-negligible component is
/// real and positive.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    pub eigenvalues: DVector<T>,
    pub eigenvectors: CMatrix<T>,
}

/// Scalar function applied on the spectrum by [`mat_func`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatFunc<T> {
    Log,
    Exp,
    Pow(T),
    /// `M^{it}`, unitary for positive definite `M`.
    ImaginaryPow(T),
}

pub fn eig_hermitian<T: Real>(m: &CMatrix<T>, tol_herm: f64) -> Result<SpectralDecomposition<T>> {
    let residual = hermitian_residual(m);
    if residual > T::of(tol_herm) {
        return Err(Error::NotHermitian { residual: residual.as_f64() });
    }
    let d = m.nrows();
    let eig = nalgebra::SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));

    let mut eigenvalues = DVector::zeros(d);
    let mut eigenvectors = CMatrix::zeros(d, d);
    let phase_floor = T::of(1e-12);
    for (k, &i) in order.iter().enumerate() {
        eigenvalues[k] = eig.eigenvalues[i];
        let mut col = eig.eigenvectors.column(i).into_owned();
        if let Some(lead) = col.iter().find(|z| z.norm_sqr().sqrt() > phase_floor).copied() {
            let phase = lead.conj() / c(lead.norm_sqr().sqrt());
            col *= phase;
        }
        eigenvectors.set_column(k, &col);
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[self.dim() - 1]
    }

    /// `U diag(f(lambda)) U^*`.
    pub fn apply(&self, f: impl Fn(T) -> Complex<T>) -> CMatrix<T> {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.apply(c)
    }

    /// `M^{it}` built from this decomposition; requires positive spectrum.
    pub fn imaginary_power(&self, t: T) -> CMatrix<T> {
        self.apply(|lambda| {
            let phase = t * lambda.ln();
            Complex::new(phase.cos(), phase.sin())
        })
    }
}

pub fn mat_func<T: Real>(m: &CMatrix<T>, f: MatFunc<T>) -> Result<CMatrix<T>> {
    mat_func_with(m, f, 1e-10, 1e-12)
}

/// [`mat_func`] with explicit Hermiticity and faithfulness thresholds.
pub fn mat_func_with<T: Real>(m: &CMatrix<T>, f: MatFunc<T>, tol_herm: f64, eps_faithful: f64) -> Result<CMatrix<T>> {
    let spec = eig_hermitian(m, tol_herm)?;
    let needs_floor = match f {
        MatFunc::Log | MatFunc::ImaginaryPow(_) => true,
        MatFunc::Pow(s) => s < T::zero(),
        MatFunc::Exp => false,
    };
    let min_eig = spec.min_eigenvalue();
    if needs_floor && min_eig <= T::of(eps_faithful) {
        return Err(Error::SingularMatrix { min_eig: min_eig.as_f64() });
    }
    Ok(match f {
        MatFunc::Log => spec.apply(|l| c(l.ln())),
        MatFunc::Exp => spec.apply(|l| c(l.exp())),
        MatFunc::Pow(s) => spec.apply(|l| {
            if l <= T::zero() {
                // only reachable for s >= 0: clamp round-off negatives
                if s == T::zero() { c(T::one()) } else { c(T::zero()) }
            } else {
                c(l.powf(s))
            }
        }),
        MatFunc::ImaginaryPow(t) => spec.imaginary_power(t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cf, frobenius, gaussian_matrix};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, seed: u64) -> CMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g: CMatrix<f64> = gaussian_matrix(d, d, &mut rng);
        hermitian_part(&g)
    }

    fn random_positive(d: usize, seed: u64) -> CMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g: CMatrix<f64> = gaussian_matrix(d, d, &mut rng);
        &g * g.adjoint() + CMatrix::identity(d, d) * cf(0.5, 0.0)
    }

    #[test]
    fn identity_decomposes_trivially() {
        let s = eig_hermitian(&CMatrix::<f64>::identity(2, 2), 1e-10).unwrap();
        assert_eq!(s.eigenvalues.as_slice(), &[1.0, 1.0]);
        assert!((s.eigenvectors.clone() - CMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let m = CMatrix::<f64>::from_diagonal(&DVector::from_vec(vec![cf(3.0, 0.0), cf(1.0, 0.0)]));
        let s = eig_hermitian(&m, 1e-10).unwrap();
        assert_eq!(s.eigenvalues.as_slice(), &[1.0, 3.0]);
        assert!((s.eigenvectors[(1, 0)].re - 1.0).abs() < 1e-15);
        assert!((s.eigenvectors[(0, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        let m = random_hermitian(8, 11);
        let s = eig_hermitian(&m, 1e-10).unwrap();
        assert!(frobenius(&(s.reconstruct() - &m)) <= 1e-10);
        let u = &s.eigenvectors;
        assert!(frobenius(&(u.adjoint() * u - CMatrix::identity(8, 8))) <= 1e-10);
        for k in 1..8 {
            assert!(s.eigenvalues[k - 1] <= s.eigenvalues[k]);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = cf(1.0, 0.0);
        assert!(matches!(eig_hermitian(&m, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn trivial_matrix_functions() {
        let id = CMatrix::<f64>::identity(3, 3);
        assert!(mat_func(&id, MatFunc::Log).unwrap().norm() < 1e-15);
        let u = mat_func(&id, MatFunc::ImaginaryPow(0.83)).unwrap();
        assert!((u - &id).norm() < 1e-14);
        let m = CMatrix::<f64>::from_diagonal(&DVector::from_vec(vec![cf(4.0, 0.0), cf(9.0, 0.0)]));
        let r = mat_func(&m, MatFunc::Pow(0.5)).unwrap();
        let expect = CMatrix::<f64>::from_diagonal(&DVector::from_vec(vec![cf(2.0, 0.0), cf(3.0, 0.0)]));
        assert!((r - expect).norm() < 1e-14);
    }

    #[test]
    fn log_requires_positive_spectrum() {
        let m = CMatrix::<f64>::from_diagonal(&DVector::from_vec(vec![cf(1.0, 0.0), cf(0.0, 0.0)]));
        assert!(matches!(mat_func(&m, MatFunc::Log), Err(Error::SingularMatrix { .. })));
        assert!(matches!(mat_func(&m, MatFunc::Pow(-0.5)), Err(Error::SingularMatrix { .. })));
        assert!(mat_func(&m, MatFunc::Pow(0.5)).is_ok());
    }

    #[test]
    fn works_in_single_precision() {
        let m = CMatrix::<f32>::from_fn(4, 4, |i, j| {
            let v = 1.0 / (1.0 + i as f32 + j as f32);
            Complex::new(v + if i == j { 1.0 } else { 0.0 }, 0.0)
        });
        let s = eig_hermitian(&m, 1e-5).unwrap();
        assert!(frobenius(&(s.reconstruct() - &m)) < 1e-5);
        let l = mat_func_with(&m, MatFunc::Log, 1e-5, 1e-6).unwrap();
        let back = mat_func_with(&l, MatFunc::Exp, 1e-5, 1e-6).unwrap();
        assert!(frobenius(&(back - m)) < 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn exp_inverts_log(seed in 0u64..10_000, d in 2usize..7) {
            let m = random_positive(d, seed);
            let l = mat_func(&m, MatFunc::Log).unwrap();
            let back = mat_func(&l, MatFunc::Exp).unwrap();
            prop_assert!(frobenius(&(back - &m)) <= 1e-9 * (1.0 + frobenius(&m)));
        }

        #[test]
        fn imaginary_powers_form_unitary_group(seed in 0u64..10_000, s in -3.0f64..3.0, t in -3.0f64..3.0) {
            let m = random_positive(5, seed);
            let us = mat_func(&m, MatFunc::ImaginaryPow(s)).unwrap();
            let ut = mat_func(&m, MatFunc::ImaginaryPow(t)).unwrap();
            let ust = mat_func(&m, MatFunc::ImaginaryPow(s + t)).unwrap();
            let id = CMatrix::<f64>::identity(5, 5);
            prop_assert!(frobenius(&(us.adjoint() * &us - &id)) <= 1e-10);
            prop_assert!(frobenius(&(&us * &ut - ust)) <= 1e-9);
        }
    }
}
