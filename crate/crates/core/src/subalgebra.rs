//! Subspaces and *-subalgebras of `M_d`, carried as orthonormal frames.
//!
//! The frame convention is described in [`crate::linalg`]: a `d^2 x r`
//! matrix `F` with orthonormal columns; column `f` stands for the
//! `tau`-normalized element `sqrt(d) * unvec(f)`.

use nalgebra::{Complex, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::car::theta;
use crate::error::{Error, Result};
use crate::linalg::{
    c, commutator, extend_frame, frobenius, gaussian_matrix, hermitian_part, hs_norm, identity, max_column_defect,
    null_space, unvectorize, vectorize,
};
use crate::spectral::{eig_hermitian, SpectralDecomposition};
use crate::{CMatrix, Real};

#[derive(Clone, Debug)]
pub struct SubalgebraBasis<T: Real> {
    pub dim_ambient: usize,
    pub frame: CMatrix<T>,
    pub contains_identity: bool,
    pub parity_stable: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership<T> {
    pub member: bool,
    pub residual: T,
}

impl<T: Real> SubalgebraBasis<T> {
    /// Wraps a frame whose columns are already orthonormal.
    pub fn from_orthonormal_frame(d: usize, frame: CMatrix<T>) -> Self {
        assert_eq!(frame.nrows(), d * d, "frame rows must equal d^2");
        let mut out = Self { dim_ambient: d, frame, contains_identity: false, parity_stable: false };
        out.contains_identity = out.residual(&identity(d)) <= T::of(1e-9);
        out.parity_stable = out.theta_defect() <= T::of(1e-9);
        out
    }

    /// Orthonormal basis of the linear span of `mats` (no closure).
    pub fn from_matrices(d: usize, mats: &[CMatrix<T>]) -> Self {
        let cands: Vec<DVector<Complex<T>>> = mats.iter().map(vectorize).collect();
        let frame = extend_frame(&CMatrix::zeros(d * d, 0), &cands, T::of(1e-9));
        Self::from_orthonormal_frame(d, frame)
    }

    pub fn scalars(d: usize) -> Self {
        Self::from_matrices(d, &[identity(d)])
    }

    pub fn full(d: usize) -> Self {
        Self::from_orthonormal_frame(d, CMatrix::identity(d * d, d * d))
    }

    pub fn len(&self) -> usize {
        self.frame.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.ncols() == 0
    }

    /// The `tau`-normalized basis element `i`.
    pub fn element(&self, i: usize) -> CMatrix<T> {
        let d = self.dim_ambient;
        unvectorize(self.frame.column(i).as_slice(), d) * c(T::of_usize(d).sqrt())
    }

    pub fn elements(&self) -> Vec<CMatrix<T>> {
        (0..self.len()).map(|i| self.element(i)).collect()
    }

    /// Hilbert-Schmidt orthogonal projection onto the subspace.
    pub fn project(&self, x: &CMatrix<T>) -> CMatrix<T> {
        if self.is_empty() {
            return CMatrix::zeros(x.nrows(), x.ncols());
        }
        let v = vectorize(x);
        let p = &self.frame * self.frame.ad_mul(&v);
        unvectorize(p.as_slice(), self.dim_ambient)
    }

    /// `||x - P(x)||_{HS}` in the normalized norm.
    pub fn residual(&self, x: &CMatrix<T>) -> T {
        hs_norm(&(x - self.project(x)))
    }

    /// Membership up to `tol * max(1, ||x||_HS)`.
    pub fn membership(&self, x: &CMatrix<T>, tol: T) -> Membership<T> {
        let residual = self.residual(x);
        Membership { member: residual <= tol * T::one().max(hs_norm(x)), residual }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix<T> {
        if self.is_empty() {
            return CMatrix::zeros(self.dim_ambient, self.dim_ambient);
        }
        let g: CMatrix<T> = gaussian_matrix(self.len(), 1, rng);
        let v = &self.frame * g;
        unvectorize(v.as_slice(), self.dim_ambient) * c(T::of_usize(self.dim_ambient).sqrt() / T::of_usize(self.len()).sqrt())
    }

    /// Random self-adjoint element; lies in the subspace when it is *-closed.
    pub fn random_self_adjoint<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix<T> {
        hermitian_part(&self.random_element(rng))
    }

    /// Largest defect of the other subspace's frame inside this one.
    pub fn contains(&self, other: &Self) -> T {
        max_column_defect(&self.frame, &other.frame)
    }

    fn theta_defect(&self) -> T {
        if self.is_empty() {
            return T::zero();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let x = self.random_element(&mut rng);
        let scale = T::one().max(hs_norm(&x));
        self.residual(&theta(&x)) / scale
    }

    /// Worst closure defect under adjoint and product, sampled on random
    /// elements.
    pub fn algebra_defect<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> T {
        let mut worst = T::zero();
        for _ in 0..samples {
            let x = self.random_element(rng);
            let y = self.random_element(rng);
            let scale = T::one().max(hs_norm(&x) * hs_norm(&y));
            worst = worst.max(self.residual(&x.adjoint()) / T::one().max(hs_norm(&x)));
            worst = worst.max(self.residual(&(&x * &y)) / scale);
        }
        worst
    }
}

/// `max(defect of S1 in S2, defect of S2 in S1)`, or infinity when the
/// dimensions differ.
pub fn span_equality_residual<T: Real>(s1: &SubalgebraBasis<T>, s2: &SubalgebraBasis<T>) -> T {
    if s1.len() != s2.len() {
        return T::of(f64::INFINITY);
    }
    s1.contains(s2).max(s2.contains(s1))
}

/// The unital *-algebra generated by `gens`.
///
/// Words are grown breadth-first: each round multiplies the newest basis
/// vectors on the left by every generator and its adjoint.
pub fn span_closure<T: Real>(gens: &[CMatrix<T>], d: usize, rel_tol: T) -> SubalgebraBasis<T> {
    let mut letters: Vec<CMatrix<T>> = Vec::with_capacity(2 * gens.len());
    for g in gens {
        letters.push(g.clone());
        let adj = g.adjoint();
        if frobenius(&(&adj - g)) > T::zero() {
            letters.push(adj);
        }
    }
    let mut seeds = vec![vectorize(&identity::<T>(d))];
    seeds.extend(letters.iter().map(vectorize));
    let mut frame = extend_frame(&CMatrix::zeros(d * d, 0), &seeds, rel_tol);
    let mut start = 0;
    while start < frame.ncols() && frame.ncols() < d * d {
        let end = frame.ncols();
        let mut cands = Vec::with_capacity((end - start) * letters.len());
        for j in start..end {
            let f = unvectorize(frame.column(j).as_slice(), d);
            for g in &letters {
                cands.push(vectorize(&(g * &f)));
            }
        }
        frame = extend_frame(&frame, &cands, rel_tol);
        start = end;
    }
    SubalgebraBasis::from_orthonormal_frame(d, frame)
}

fn generators_for_commutant<T: Real>(s: &SubalgebraBasis<T>, seed: u64) -> Vec<CMatrix<T>> {
    if s.len() <= 16 {
        return s.elements();
    }
    // two generic elements and their adjoints generate a *-algebra
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..3 {
        let x = s.random_element(&mut rng);
        out.push(x.adjoint());
        out.push(x);
    }
    out
}

/// `{w in W : [w, s] = 0 for all s in S}`.
///
/// When `S` has more than 16 basis elements it is assumed to be a
/// *-algebra and is replaced by a few generic elements, which generate it
/// with probability one.
pub fn relative_commutant<T: Real>(s: &SubalgebraBasis<T>, w: &SubalgebraBasis<T>, rel_tol: T) -> SubalgebraBasis<T> {
    let d = s.dim_ambient;
    let gens = generators_for_commutant(s, 0xc0_33u64);
    let w_elems = w.elements();
    let rw = w.len();
    if rw == 0 {
        return w.clone();
    }
    let mut k = CMatrix::zeros(gens.len() * d * d, rw);
    for (gi, g) in gens.iter().enumerate() {
        for (j, x) in w_elems.iter().enumerate() {
            let comm = commutator(g, x);
            k.view_mut((gi * d * d, j), (d * d, 1)).copy_from_slice(comm.as_slice());
        }
    }
    let scale = (0..rw).fold(T::zero(), |acc, j| acc.max(k.column(j).norm())).max(T::one());
    let kernel = null_space(&k, rel_tol, scale);
    let frame = orthonormalize(&(&w.frame * kernel));
    SubalgebraBasis::from_orthonormal_frame(d, frame)
}

pub fn commutant<T: Real>(s: &SubalgebraBasis<T>, rel_tol: T) -> SubalgebraBasis<T> {
    relative_commutant(s, &SubalgebraBasis::full(s.dim_ambient), rel_tol)
}

/// `Z(S) = S ∩ S'`.
pub fn center<T: Real>(s: &SubalgebraBasis<T>, rel_tol: T) -> SubalgebraBasis<T> {
    relative_commutant(s, s, rel_tol)
}

fn orthonormalize<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let cands: Vec<DVector<Complex<T>>> = (0..m.ncols()).map(|j| m.column(j).into_owned()).collect();
    extend_frame(&CMatrix::zeros(m.nrows(), 0), &cands, T::of(1e-9))
}

/// Minimal projections of the center, from the spectrum of a random central
/// self-adjoint element. Eigenvalues closer than `gap` are merged; the
/// number of groups must equal `dim Z(S)`, otherwise a new element is drawn
/// (at most `retries` times).
pub fn minimal_central_projections<T: Real, R: Rng + ?Sized>(
    s: &SubalgebraBasis<T>,
    rng: &mut R,
    rel_tol: T,
    gap: T,
    retries: usize,
) -> Result<Vec<CMatrix<T>>> {
    let z = center(s, rel_tol);
    central_projections_of(&z, rng, gap, retries)
}

/// [`minimal_central_projections`] for an already computed commutative
/// *-algebra `z`.
pub fn central_projections_of<T: Real, R: Rng + ?Sized>(
    z: &SubalgebraBasis<T>,
    rng: &mut R,
    gap: T,
    retries: usize,
) -> Result<Vec<CMatrix<T>>> {
    let k = z.len();
    let d = z.dim_ambient;
    if k <= 1 {
        return Ok(vec![identity(d)]);
    }
    for _ in 0..retries.max(1) {
        let h = z.random_self_adjoint(rng);
        let norm = frobenius(&h);
        if norm == T::zero() {
            continue;
        }
        let h = h * c(T::one() / norm);
        let Ok(spec) = eig_hermitian(&h, 1e-8) else { continue };
        let groups = group_spectrum(&spec, gap);
        if groups.len() != k {
            continue;
        }
        let mut projections: Vec<CMatrix<T>> = groups
            .iter()
            .map(|g| {
                let cols = spec.eigenvectors.columns(g.0, g.1 - g.0);
                &cols * cols.adjoint()
            })
            .collect();
        sort_projections(&mut projections);
        return Ok(projections);
    }
    Err(Error::DegenerateCenter { retries })
}

fn group_spectrum<T: Real>(spec: &SpectralDecomposition<T>, gap: T) -> Vec<(usize, usize)> {
    let n = spec.dim();
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || spec.eigenvalues[i] - spec.eigenvalues[i - 1] > gap {
            groups.push((start, i));
            start = i;
        }
    }
    groups
}

/// Descending trace, ties broken by row-major `(re, im)` entries.
pub fn sort_projections<T: Real>(ps: &mut [CMatrix<T>]) {
    ps.sort_by(|a, b| {
        let ta = a.trace().re;
        let tb = b.trace().re;
        if (ta - tb).abs() > T::of(1e-6) {
            return tb.partial_cmp(&ta).unwrap_or(std::cmp::Ordering::Equal);
        }
        lex_cmp(a, b)
    });
}

/// Row-major lexicographic comparison of `(re, im)` pairs, rounded to 1e-9
/// so that round-off does not flip the order.
pub fn lex_cmp<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> std::cmp::Ordering {
    let q = |x: T| (x.as_f64() * 1e9).round() as i64;
    for r in 0..a.nrows() {
        for s in 0..a.ncols() {
            let (x, y) = (a[(r, s)], b[(r, s)]);
            let ord = q(x.re).cmp(&q(y.re)).then(q(x.im).cmp(&q(y.im)));
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
    }
    std::cmp::Ordering::Equal
}

/// Largest subspace of `ambient` mapped into itself by the linear map `op`.
///
/// Repeatedly keeps `{w in W : op(w) in W}` until stable; directions whose
/// residual singular value is at most `rel_tol * scale` count as invariant,
/// where `scale` should bound the operator norm of `op`.
pub fn largest_invariant_subspace<T: Real>(
    op: &dyn Fn(&CMatrix<T>) -> CMatrix<T>,
    ambient: &SubalgebraBasis<T>,
    rel_tol: T,
    scale: T,
) -> SubalgebraBasis<T> {
    let d = ambient.dim_ambient;
    let mut frame = ambient.frame.clone();
    let scale = scale.max(T::of(1e-300));
    loop {
        let r = frame.ncols();
        if r == 0 {
            break;
        }
        let mut k = CMatrix::zeros(d * d, r);
        for j in 0..r {
            let x = unvectorize(frame.column(j).as_slice(), d);
            let y = op(&x);
            k.set_column(j, &vectorize(&y));
        }
        let resid = &k - &frame * frame.ad_mul(&k);
        if frobenius(&resid) <= rel_tol * scale {
            break;
        }
        let kernel = null_space(&resid, rel_tol, scale);
        if kernel.ncols() == r {
            break;
        }
        frame = &frame * kernel;
    }
    SubalgebraBasis::from_orthonormal_frame(d, frame)
}

/// `e^{itH} x e^{-itH}` with `H` given by its spectral decomposition.
pub fn flow<T: Real>(spec: &SpectralDecomposition<T>, x: &CMatrix<T>, t: T) -> CMatrix<T> {
    let u = spec.apply(|l| {
        let ph = t * l;
        Complex::new(ph.cos(), ph.sin())
    });
    &u * x * u.adjoint()
}

/// Largest *-subalgebra of `ambient` invariant under `x -> [H, x]`, i.e.
/// under the flow `e^{itH} . e^{-itH}`.
///
/// The result is checked for closure and flow stability on random elements;
/// on failure the computation is repeated once with a tolerance 100 times
/// smaller before giving up with [`Error::NotAnAlgebra`].
pub fn invariant_subalgebra<T: Real>(
    h: &CMatrix<T>,
    ambient: &SubalgebraBasis<T>,
    rel_tol: T,
) -> Result<SubalgebraBasis<T>> {
    let spec = eig_hermitian(h, 1e-8)?;
    let spread = (spec.max_eigenvalue() - spec.min_eigenvalue()).max(T::of(1e-12));
    let op = |x: &CMatrix<T>| commutator(h, x);
    let mut worst = T::zero();
    for attempt in 0..2 {
        let tol = if attempt == 0 { rel_tol } else { rel_tol * T::of(1e-2) };
        let w = largest_invariant_subspace(&op, ambient, tol, spread);
        let check_tol = T::of(1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(0xf10u64 + attempt as u64);
        let defect = w.algebra_defect(&mut rng, 2).max(flow_defect(&w, &spec, &mut rng));
        if defect <= check_tol {
            return Ok(w);
        }
        worst = defect;
    }
    Err(Error::NotAnAlgebra { residual: worst.as_f64() })
}

/// Worst relative defect of `e^{itH} x e^{-itH}` in `w` for random `x in w`
/// and `t` in `{0.1, 0.7, 1.3}`.
pub fn flow_defect<T: Real, R: Rng + ?Sized>(w: &SubalgebraBasis<T>, spec: &SpectralDecomposition<T>, rng: &mut R) -> T {
    if w.is_empty() {
        return T::zero();
    }
    let x = w.random_element(rng);
    let scale = T::one().max(hs_norm(&x));
    [0.1, 0.7, 1.3]
        .iter()
        .map(|&t| w.residual(&flow(spec, &x, T::of(t))) / scale)
        .fold(T::zero(), |a, b| a.max(b))
}
