//! Dense helpers shared by the operator-algebra code.
//!
//! Matrices are vectorized column-major, matching nalgebra's storage, so
//! `vec(X)[i + j d] = X[i, j]`. Subspaces of `M_d` are carried as frames:
//! `d^2 x r` matrices with orthonormal columns in the Euclidean inner product.
//! A column `f` corresponds to the element `sqrt(d) * unvec(f)`, which has unit
//! norm for the normalized Hilbert-Schmidt product `tau(x^* y)`.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{CMatrix, Real};

#[inline]
pub fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn cf<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}

pub fn identity<T: Real>(d: usize) -> CMatrix<T> {
    CMatrix::identity(d, d)
}

pub fn vectorize<T: Real>(x: &CMatrix<T>) -> DVector<Complex<T>> {
    DVector::from_column_slice(x.as_slice())
}

pub fn unvectorize<T: Real>(v: &[Complex<T>], d: usize) -> CMatrix<T> {
    CMatrix::from_column_slice(d, d, v)
}

pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a * b - b * a
}

pub fn trace<T: Real>(x: &CMatrix<T>) -> Complex<T> {
    x.trace()
}

/// Normalized trace `tau(x) = Tr(x) / d`.
pub fn tau<T: Real>(x: &CMatrix<T>) -> Complex<T> {
    x.trace() / c(T::of_usize(x.nrows()))
}

/// Frobenius norm `sqrt(Tr x^* x)`.
pub fn frobenius<T: Real>(x: &CMatrix<T>) -> T {
    x.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Normalized Hilbert-Schmidt norm `sqrt(tau(x^* x))`.
pub fn hs_norm<T: Real>(x: &CMatrix<T>) -> T {
    frobenius(x) / T::of_usize(x.nrows()).sqrt()
}

pub fn max_abs<T: Real>(x: &CMatrix<T>) -> T {
    x.iter().fold(T::zero(), |acc, z| acc.max(z.norm_sqr().sqrt()))
}

/// Max entrywise `|M - M^*|`.
pub fn hermitian_residual<T: Real>(m: &CMatrix<T>) -> T {
    let d = m.nrows();
    let mut worst = T::zero();
    for j in 0..d {
        for i in 0..=j {
            let diff = m[(i, j)] - m[(j, i)].conj();
            worst = worst.max(diff.norm_sqr().sqrt());
        }
    }
    worst
}

pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()) * c(T::of(0.5))
}

pub fn is_square_dim(d: usize) -> bool {
    d.is_power_of_two()
}

/// Complex Gaussian matrix with independent standard normal real and
/// imaginary parts.
pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::of(re), T::of(im))
    })
}

/// Orthonormal basis of the kernel of `m`, as columns.
///
/// A right singular vector is kept when its singular value is at most
/// `rel_tol * scale`. Tall inputs are first reduced by a QR factorization so
/// the SVD runs on a square `cols x cols` factor.
pub fn null_space<T: Real>(m: &CMatrix<T>, rel_tol: T, scale: T) -> CMatrix<T> {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    let square = if m.nrows() > cols {
        m.clone().qr().r()
    } else if m.nrows() < cols {
        let mut padded = CMatrix::zeros(cols, cols);
        padded.rows_mut(0, m.nrows()).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let cut = rel_tol * scale;
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cut)
        .collect();
    let mut out = CMatrix::zeros(cols, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        for j in 0..cols {
            out[(j, k)] = v_t[(i, j)].conj();
        }
    }
    out
}

/// Orthonormal basis of the eigenspace of a Hermitian PSD Gram matrix with
/// eigenvalues at most `rel_tol * scale`.
pub fn gram_kernel<T: Real>(gram: &CMatrix<T>, rel_tol: T, scale: T) -> CMatrix<T> {
    let n = gram.nrows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let eig = nalgebra::SymmetricEigen::new(hermitian_part(gram));
    let cut = rel_tol * scale;
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] <= cut).collect();
    let mut out = CMatrix::zeros(n, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &eig.eigenvectors.column(i));
    }
    out
}

/// Extends an orthonormal frame by the directions of `candidates` that are
/// not already in its span.
///
/// A candidate is accepted when its component orthogonal to the current span
/// has norm greater than `rel_tol` times the largest candidate norm. Two passes of
/// Gram-Schmidt are used per vector.
pub fn extend_frame<T: Real>(frame: &CMatrix<T>, candidates: &[DVector<Complex<T>>], rel_tol: T) -> CMatrix<T> {
    let rows = frame.nrows().max(candidates.first().map_or(0, |v| v.len()));
    let mut cols: Vec<DVector<Complex<T>>> = (0..frame.ncols()).map(|j| frame.column(j).into_owned()).collect();
    let mut current = frame.clone();
    let mut pending: Vec<DVector<Complex<T>>> = Vec::new();
    // noise-level candidates must not survive normalization
    let scale = candidates.iter().map(|v| v.norm()).fold(T::zero(), |a, b| a.max(b));
    for cand in candidates {
        let norm0 = cand.norm();
        if norm0 == T::zero() {
            continue;
        }
        let mut v = cand.clone();
        for _ in 0..2 {
            if current.ncols() > 0 {
                let coeffs = current.ad_mul(&v);
                v -= &current * coeffs;
            }
            for p in &pending {
                let coef = p.dotc(&v);
                v -= p * coef;
            }
        }
        let norm = v.norm();
        if norm > rel_tol * scale {
            v /= c(norm);
            pending.push(v);
            if pending.len() >= 64 {
                cols.append(&mut pending);
                current = DMatrix::from_columns(&cols);
            }
        }
    }
    cols.append(&mut pending);
    if cols.is_empty() {
        return CMatrix::zeros(rows, 0);
    }
    DMatrix::from_columns(&cols)
}

/// Euclidean projection of `v` onto the span of an orthonormal frame.
pub fn project_onto<T: Real>(frame: &CMatrix<T>, v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
    if frame.ncols() == 0 {
        return DVector::zeros(v.len());
    }
    frame * frame.ad_mul(v)
}

/// Largest column norm of `(I - F F^*) other`, i.e. how far the columns of
/// `other` stick out of the span of `frame`.
pub fn max_column_defect<T: Real>(frame: &CMatrix<T>, other: &CMatrix<T>) -> T {
    if other.ncols() == 0 {
        return T::zero();
    }
    let residual = if frame.ncols() == 0 { other.clone() } else { other - frame * frame.ad_mul(other) };
    (0..residual.ncols()).fold(T::zero(), |acc, j| acc.max(residual.column(j).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn null_space_of_rank_deficient_tall_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: CMatrix<f64> = gaussian_matrix(10, 2, &mut rng);
        let b: CMatrix<f64> = gaussian_matrix(2, 4, &mut rng);
        let m = a * b;
        let k = null_space(&m, 1e-9, m.norm());
        assert_eq!(k.ncols(), 2);
        assert!((m * k).norm() < 1e-10);
    }

    #[test]
    fn null_space_of_wide_matrix_is_padded() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m: CMatrix<f64> = gaussian_matrix(2, 5, &mut rng);
        let k = null_space(&m, 1e-9, m.norm());
        assert_eq!(k.ncols(), 3);
        assert!((&m * &k).norm() < 1e-10);
        assert!((k.adjoint() * &k - CMatrix::<f64>::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn extend_frame_drops_dependent_candidates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a: CMatrix<f64> = gaussian_matrix(6, 1, &mut rng);
        let b: CMatrix<f64> = gaussian_matrix(6, 1, &mut rng);
        let va = a.column(0).into_owned();
        let vb = b.column(0).into_owned();
        let combo = &va * cf::<f64>(2.0, -1.0) + &vb;
        let frame = extend_frame(&CMatrix::zeros(6, 0), &[va, vb, combo], 1e-9);
        assert_eq!(frame.ncols(), 2);
        assert!((frame.adjoint() * &frame - CMatrix::<f64>::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn hs_norm_of_identity_is_one() {
        assert!((hs_norm(&identity::<f64>(8)) - 1.0).abs() < 1e-15);
    }
}
