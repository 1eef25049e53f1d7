//! Finite CAR algebra in the Jordan-Wigner representation.
//!
//! Site `j` of `n` is tensor factor `j`, most significant first, so basis
//! index `r` carries the occupation of site `j` in bit `n - 1 - j`. The
//! annihilators are
//!
//! ```text
//! a_j = Z_0 ... Z_{j-1} sigma^-_j,   Z = diag(1, -1),   sigma^- = |0><1|,
//! ```
//!
//! so `a_j^* a_j = diag(0, 1)` on site `j` and `v_j = a_j^* a_j - a_j a_j^* =
//! diag(-1, 1)`.
//!
//! Every operator built here is a *monomial* matrix: at most one nonzero per
//! row and per column. [`Monomial`] stores them in `O(d)` space, which keeps
//! `n = 10` (d = 1024) within reach.

use std::collections::BTreeSet;

use nalgebra::{Complex, DVector};

use crate::error::{Error, Result};
use crate::linalg::{c, tau};
use crate::subalgebra::SubalgebraBasis;
use crate::{CMatrix, Real};

pub const MAX_SITES: usize = 10;

const EMPTY: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_count(count: usize) -> Self {
        if count % 2 == 0 { Parity::Even } else { Parity::Odd }
    }

    /// Sign in the graded commutation `xy = eps(s, s') yx`.
    pub fn graded_sign(self, other: Parity) -> f64 {
        if self == Parity::Odd && other == Parity::Odd { -1.0 } else { 1.0 }
    }
}

/// Disjoint site sets `A`, `B`, `C` covering `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RegionPartition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
}

impl RegionPartition {
    pub fn new(n: usize, a: Vec<usize>, b: Vec<usize>, c: Vec<usize>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &s in a.iter().chain(&b).chain(&c) {
            if s >= n {
                return Err(Error::InvalidRegions(format!("site {s} out of range for n = {n}")));
            }
            if !seen.insert(s) {
                return Err(Error::InvalidRegions(format!("site {s} appears twice")));
            }
        }
        if seen.len() != n {
            return Err(Error::InvalidRegions(format!("regions cover {} of {n} sites", seen.len())));
        }
        if a.is_empty() || b.is_empty() || c.is_empty() {
            return Err(Error::InvalidRegions("A, B and C must be nonempty".into()));
        }
        let sorted = |mut v: Vec<usize>| {
            v.sort_unstable();
            v
        };
        Ok(Self { a: sorted(a), b: sorted(b), c: sorted(c) })
    }

    /// Contiguous partition `A = [0, na)`, `B = [na, na+nb)`, `C` the rest.
    pub fn contiguous(na: usize, nb: usize, nc: usize) -> Result<Self> {
        Self::new(na + nb + nc, (0..na).collect(), (na..na + nb).collect(), (na + nb..na + nb + nc).collect())
    }

    /// Parses `A=0,1:B=2:C=3`.
    pub fn parse(spec: &str, n: usize) -> Result<Self> {
        let mut parts: [Option<Vec<usize>>; 3] = [None, None, None];
        for chunk in spec.split(':') {
            let (name, list) = chunk
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("region chunk '{chunk}' lacks '='")))?;
            let slot = match name.trim() {
                "A" | "a" => 0,
                "B" | "b" => 1,
                "C" | "c" => 2,
                other => return Err(Error::Parse(format!("unknown region '{other}'"))),
            };
            let sites = list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<usize>().map_err(|e| Error::Parse(format!("site '{s}': {e}"))))
                .collect::<Result<Vec<_>>>()?;
            parts[slot] = Some(sites);
        }
        let [a, b, c] = parts;
        let missing = |x: Option<Vec<usize>>, name: &str| x.ok_or_else(|| Error::Parse(format!("region {name} missing")));
        Self::new(n, missing(a, "A")?, missing(b, "B")?, missing(c, "C")?)
    }

    pub fn n_sites(&self) -> usize {
        self.a.len() + self.b.len() + self.c.len()
    }

    pub fn ab(&self) -> Vec<usize> {
        union(&self.a, &self.b)
    }

    pub fn bc(&self) -> Vec<usize> {
        union(&self.b, &self.c)
    }

    pub fn all(&self) -> Vec<usize> {
        (0..self.n_sites()).collect()
    }

    pub fn to_flag(&self) -> String {
        let list = |v: &[usize]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
        format!("A={}:B={}:C={}", list(&self.a), list(&self.b), list(&self.c))
    }
}

pub fn union(x: &[usize], y: &[usize]) -> Vec<usize> {
    let set: BTreeSet<usize> = x.iter().chain(y).copied().collect();
    set.into_iter().collect()
}

pub fn intersection(x: &[usize], y: &[usize]) -> Vec<usize> {
    let ys: BTreeSet<usize> = y.iter().copied().collect();
    let mut out: Vec<usize> = x.iter().copied().filter(|s| ys.contains(s)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Matrix with at most one nonzero entry per row: row `r` holds `vals[r]` in
/// column `cols[r]` (or nothing when `cols[r]` is empty).
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<T: Real> {
    cols: Vec<usize>,
    vals: Vec<Complex<T>>,
}

impl<T: Real> Monomial<T> {
    pub fn identity(d: usize) -> Self {
        Self { cols: (0..d).collect(), vals: vec![c(T::one()); d] }
    }

    pub fn diagonal(diag: &[T]) -> Self {
        Self { cols: (0..diag.len()).collect(), vals: diag.iter().map(|&x| c(x)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// Converts a dense matrix; `None` if some row holds two nonzeros.
    pub fn from_dense(m: &CMatrix<T>) -> Option<Self> {
        let d = m.nrows();
        let mut cols = vec![EMPTY; d];
        let mut vals = vec![c(T::zero()); d];
        for r in 0..d {
            for s in 0..d {
                let z = m[(r, s)];
                if z.re != T::zero() || z.im != T::zero() {
                    if cols[r] != EMPTY {
                        return None;
                    }
                    cols[r] = s;
                    vals[r] = z;
                }
            }
        }
        Some(Self { cols, vals })
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for r in 0..d {
            if self.cols[r] != EMPTY {
                m[(r, self.cols[r])] = self.vals[r];
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim();
        let mut cols = vec![EMPTY; d];
        let mut vals = vec![c(T::zero()); d];
        for r in 0..d {
            let mid = self.cols[r];
            if mid == EMPTY || other.cols[mid] == EMPTY {
                continue;
            }
            let v = self.vals[r] * other.vals[mid];
            if v.re != T::zero() || v.im != T::zero() {
                cols[r] = other.cols[mid];
                vals[r] = v;
            }
        }
        Self { cols, vals }
    }

    /// Conjugate transpose; assumes at most one nonzero per column as well.
    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut cols = vec![EMPTY; d];
        let mut vals = vec![c(T::zero()); d];
        for r in 0..d {
            let s = self.cols[r];
            if s != EMPTY {
                debug_assert_eq!(cols[s], EMPTY, "monomial has two entries in column {s}");
                cols[s] = r;
                vals[s] = self.vals[r].conj();
            }
        }
        Self { cols, vals }
    }

    /// Diagonal of `M^* M` (as reals).
    pub fn gram_diagonal(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        for r in 0..self.dim() {
            if self.cols[r] != EMPTY {
                out[self.cols[r]] += self.vals[r].norm_sqr();
            }
        }
        out
    }

    /// Diagonal of `M M^*` (as reals).
    pub fn cogram_diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|r| if self.cols[r] == EMPTY { T::zero() } else { self.vals[r].norm_sqr() }).collect()
    }

    /// `Tr(M x)`.
    pub fn trace_with(&self, x: &CMatrix<T>) -> Complex<T> {
        let mut acc = c(T::zero());
        for r in 0..self.dim() {
            if self.cols[r] != EMPTY {
                acc += self.vals[r] * x[(self.cols[r], r)];
            }
        }
        acc
    }

    /// `out += coef * M`.
    pub fn add_scaled_to(&self, coef: Complex<T>, out: &mut CMatrix<T>) {
        for r in 0..self.dim() {
            if self.cols[r] != EMPTY {
                out[(r, self.cols[r])] += coef * self.vals[r];
            }
        }
    }
}

/// Single-site Pauli operator label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn times_z(self) -> Self {
        match self {
            Pauli::I => Pauli::Z,
            Pauli::X => Pauli::Y,
            Pauli::Y => Pauli::X,
            Pauli::Z => Pauli::I,
        }
    }
}

/// Tensor product of Pauli matrices, one per site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    pub ops: Vec<Pauli>,
    /// Parity under the global automorphism `Theta`.
    pub parity: Parity,
}

impl PauliString {
    pub fn to_monomial<T: Real>(&self) -> Monomial<T> {
        let n = self.ops.len();
        let d = 1usize << n;
        let mut cols = vec![0; d];
        let mut vals = vec![c(T::one()); d];
        for r in 0..d {
            let mut col = r;
            let mut v = Complex::new(T::one(), T::zero());
            for (site, op) in self.ops.iter().enumerate() {
                let bit = n - 1 - site;
                let occupied = (r >> bit) & 1 == 1;
                match op {
                    Pauli::I => {}
                    Pauli::X => col ^= 1 << bit,
                    Pauli::Y => {
                        col ^= 1 << bit;
                        v *= if occupied { Complex::new(T::zero(), T::one()) } else { Complex::new(T::zero(), -T::one()) };
                    }
                    Pauli::Z => {
                        if occupied {
                            v = -v;
                        }
                    }
                }
            }
            cols[r] = col;
            vals[r] = v;
        }
        Monomial { cols, vals }
    }
}

/// The `4^{|I|}` Pauli strings spanning `A(I)`, one per Majorana monomial.
///
/// Each site of `I` contributes none, one or both of its Majorana operators
/// `a + a^*` and `i(a - a^*)`; the Jordan-Wigner strings of operators at
/// higher sites add a `Z` on every lower site. Phases are dropped, so the
/// strings are Hermitian unitaries and orthonormal for `tau(x^* y)`.
pub fn region_pauli_strings(n: usize, sites: &[usize]) -> Vec<PauliString> {
    let sites: Vec<usize> = sites.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let m = sites.len();
    let mut out = Vec::with_capacity(1 << (2 * m));
    for code in 0..(1usize << (2 * m)) {
        let mut choice = vec![0u8; n];
        for (k, &s) in sites.iter().enumerate() {
            choice[s] = ((code >> (2 * (m - 1 - k))) & 3) as u8;
        }
        let mut ops = vec![Pauli::I; n];
        let mut above = 0usize;
        let mut total = 0usize;
        for j in (0..n).rev() {
            let (base, count) = match choice[j] {
                0 => (Pauli::I, 0),
                1 => (Pauli::X, 1),
                2 => (Pauli::Y, 1),
                _ => (Pauli::Z, 2),
            };
            ops[j] = if above % 2 == 1 { base.times_z() } else { base };
            above += count;
            total += count;
        }
        out.push(PauliString { ops, parity: Parity::from_count(total) });
    }
    out
}

/// `Theta(x) = v x v` for the global parity `v = prod_i v_i`, computed from
/// the basis-state occupations. `Theta` acts entrywise by the sign
/// `(-1)^{popcount(r) + popcount(s)}`.
pub fn theta<T: Real>(x: &CMatrix<T>) -> CMatrix<T> {
    let d = x.nrows();
    CMatrix::from_fn(d, d, |r, s| {
        if (r.count_ones() + s.count_ones()) % 2 == 0 { x[(r, s)] } else { -x[(r, s)] }
    })
}

pub fn even_part<T: Real>(x: &CMatrix<T>) -> CMatrix<T> {
    (x + theta(x)) * c(T::of(0.5))
}

pub fn odd_part<T: Real>(x: &CMatrix<T>) -> CMatrix<T> {
    (x - theta(x)) * c(T::of(0.5))
}

/// The finite CAR algebra on `n` sites.
#[derive(Clone, Debug)]
pub struct CarAlgebra<T: Real> {
    n_sites: usize,
    dim: usize,
    annihilators: Vec<Monomial<T>>,
}

impl<T: Real> CarAlgebra<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_SITES {
            return Err(Error::DimensionTooLarge { n, max: MAX_SITES });
        }
        if n == 0 {
            return Err(Error::InvalidRegions("at least one site is required".into()));
        }
        let d = 1usize << n;
        let annihilators = (0..n)
            .map(|j| {
                let bit = n - 1 - j;
                let mut cols = vec![EMPTY; d];
                let mut vals = vec![c(T::zero()); d];
                // a_j |s> = sign(s) |s without j> for s with site j occupied
                for s in 0..d {
                    if (s >> bit) & 1 == 1 {
                        let r = s ^ (1 << bit);
                        let string = (s >> (bit + 1)).count_ones();
                        cols[r] = s;
                        vals[r] = if string % 2 == 0 { c(T::one()) } else { c(-T::one()) };
                    }
                }
                Monomial { cols, vals }
            })
            .collect();
        Ok(Self { n_sites: n, dim: d, annihilators })
    }

    /// Wraps externally supplied annihilators without checking the CAR
    /// relations. Used for fault-injection fixtures.
    pub fn from_annihilators(mats: &[CMatrix<T>]) -> Result<Self> {
        let n = mats.len();
        let d = 1usize << n;
        let annihilators = mats
            .iter()
            .map(|m| {
                if m.nrows() != d || m.ncols() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: m.nrows() });
                }
                Monomial::from_dense(m).ok_or_else(|| Error::InvalidState("annihilator is not a monomial matrix".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n_sites: n, dim: d, annihilators })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn annihilator_monomial(&self, i: usize) -> &Monomial<T> {
        &self.annihilators[i]
    }

    pub fn annihilator(&self, i: usize) -> CMatrix<T> {
        self.annihilators[i].to_dense()
    }

    pub fn creator(&self, i: usize) -> CMatrix<T> {
        self.annihilators[i].adjoint().to_dense()
    }

    pub fn number(&self, i: usize) -> CMatrix<T> {
        CMatrix::from_diagonal(&DVector::from_iterator(self.dim, self.annihilators[i].gram_diagonal().into_iter().map(c)))
    }

    /// Diagonal of `v_I = prod_{i in I} (a_i^* a_i - a_i a_i^*)`.
    pub fn parity_diagonal(&self, sites: &[usize]) -> Vec<T> {
        let mut diag = vec![T::one(); self.dim];
        for &i in sites {
            let a = &self.annihilators[i];
            let nn = a.gram_diagonal();
            let hole = a.cogram_diagonal();
            for r in 0..self.dim {
                diag[r] *= nn[r] - hole[r];
            }
        }
        diag
    }

    pub fn parity_unitary(&self, sites: &[usize]) -> CMatrix<T> {
        Monomial::diagonal(&self.parity_diagonal(sites)).to_dense()
    }

    /// `Theta^I(x) = v_I x v_I`.
    pub fn parity_automorphism(&self, x: &CMatrix<T>, sites: &[usize]) -> CMatrix<T> {
        let v = self.parity_diagonal(sites);
        CMatrix::from_fn(self.dim, self.dim, |r, s| x[(r, s)] * c(v[r] * v[s]))
    }

    /// `Theta = Theta^{all sites}`.
    pub fn theta(&self, x: &CMatrix<T>) -> CMatrix<T> {
        self.parity_automorphism(x, &(0..self.n_sites).collect::<Vec<_>>())
    }

    /// `(x_+, x_-)` with `x_± = (x ± Theta(x)) / 2`.
    pub fn even_odd_split(&self, x: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
        let t = self.theta(x);
        let half = c(T::of(0.5));
        ((x + &t) * half, (x - t) * half)
    }

    pub fn matrix_units(&self, region: &[usize]) -> MatrixUnitFamily<T> {
        MatrixUnitFamily::new(self, region)
    }

    /// Trace-preserving conditional expectation `E_I` onto `A(I)`: the
    /// Hilbert-Schmidt projection onto the span of the region's Pauli strings.
    pub fn cond_expect(&self, x: &CMatrix<T>, sites: &[usize]) -> CMatrix<T> {
        let d = self.dim;
        let inv_d = c(T::one() / T::of_usize(d));
        let mut out = CMatrix::zeros(d, d);
        for p in region_pauli_strings(self.n_sites, sites) {
            let mono = p.to_monomial::<T>();
            let coef = mono.trace_with(x) * inv_d;
            mono.add_scaled_to(coef, &mut out);
        }
        out
    }

    pub fn tau(&self, x: &CMatrix<T>) -> Complex<T> {
        tau(x)
    }

    /// Orthonormal basis of `A(I)` made of Pauli strings.
    pub fn region_algebra(&self, sites: &[usize]) -> SubalgebraBasis<T> {
        self.region_algebra_filtered(sites, None)
    }

    /// Basis of the even or odd part `A(I)_±`; a *-algebra only for `Even`.
    pub fn region_algebra_parity(&self, sites: &[usize], parity: Parity) -> SubalgebraBasis<T> {
        self.region_algebra_filtered(sites, Some(parity))
    }

    fn region_algebra_filtered(&self, sites: &[usize], parity: Option<Parity>) -> SubalgebraBasis<T> {
        let strings: Vec<PauliString> = region_pauli_strings(self.n_sites, sites)
            .into_iter()
            .filter(|p| parity.is_none_or(|want| p.parity == want))
            .collect();
        let d = self.dim;
        let scale = c(T::one() / T::of_usize(d).sqrt());
        let mut frame = CMatrix::zeros(d * d, strings.len());
        for (k, p) in strings.iter().enumerate() {
            let mono = p.to_monomial::<T>();
            for r in 0..d {
                frame[(r + mono.cols[r] * d, k)] = mono.vals[r] * scale;
            }
        }
        SubalgebraBasis::from_orthonormal_frame(d, frame)
    }
}

/// Mutually commuting 2x2 matrix units on a region `i_1 < ... < i_m`:
///
/// ```text
/// e11 = a a^*,  e12 = V a,  e21 = V a^*,  e22 = a^* a,
/// ```
///
/// with `V = prod_{k < j} (I - 2 a_{i_k}^* a_{i_k})` over the earlier sites
/// of the region. A multi-index `alpha` is a base-4 number, one digit
/// `2k + l` per site (first site most significant), naming `e_{(k+1)(l+1)}`.
#[derive(Clone, Debug)]
pub struct MatrixUnitFamily<T: Real> {
    pub region: Vec<usize>,
    site_units: Vec<[Monomial<T>; 4]>,
}

impl<T: Real> MatrixUnitFamily<T> {
    fn new(alg: &CarAlgebra<T>, region: &[usize]) -> Self {
        let region: Vec<usize> = region.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let d = alg.dim;
        let mut string = Monomial::identity(d);
        let mut site_units = Vec::with_capacity(region.len());
        for &i in &region {
            let a = alg.annihilators[i].clone();
            let a_star = a.adjoint();
            let e11 = a.mul(&a_star);
            let e22 = a_star.mul(&a);
            let e12 = string.mul(&a);
            let e21 = string.mul(&a_star);
            let local: Vec<T> = a.gram_diagonal().iter().map(|&occ| T::one() - (occ + occ)).collect();
            string = string.mul(&Monomial::diagonal(&local));
            site_units.push([e11, e12, e21, e22]);
        }
        Self { region, site_units }
    }

    pub fn region_len(&self) -> usize {
        self.region.len()
    }

    /// Number of units, `4^{|region|}`.
    pub fn len(&self) -> usize {
        1 << (2 * self.region.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index of the unit mapped to `|k><l|` in `M_{2^m}`.
    pub fn index(&self, k: usize, l: usize) -> usize {
        let m = self.region.len();
        let mut alpha = 0;
        for j in 0..m {
            let bit = m - 1 - j;
            let digit = 2 * ((k >> bit) & 1) + ((l >> bit) & 1);
            alpha = alpha * 4 + digit;
        }
        alpha
    }

    fn digits(&self, alpha: usize) -> Vec<usize> {
        let m = self.region.len();
        (0..m).map(|j| (alpha >> (2 * (m - 1 - j))) & 3).collect()
    }

    pub fn unit(&self, alpha: usize) -> Monomial<T> {
        let digits = self.digits(alpha);
        let d = self.site_units.first().map_or(1, |u| u[0].dim());
        digits
            .iter()
            .zip(&self.site_units)
            .fold(Monomial::identity(d), |acc, (&dg, units)| acc.mul(&units[dg]))
    }

    pub fn dense(&self, alpha: usize) -> CMatrix<T> {
        self.unit(alpha).to_dense()
    }

    /// Off-diagonal site factors are odd, diagonal ones even.
    pub fn parity(&self, alpha: usize) -> Parity {
        Parity::from_count(self.digits(alpha).iter().filter(|&&dg| dg == 1 || dg == 2).count())
    }

    /// `p_alpha = e_alpha e_alpha^*`.
    pub fn p(&self, alpha: usize) -> CMatrix<T> {
        let e = self.unit(alpha);
        e.mul(&e.adjoint()).to_dense()
    }

    /// `q_alpha = e_alpha^* e_alpha`.
    pub fn q(&self, alpha: usize) -> CMatrix<T> {
        let e = self.unit(alpha);
        e.adjoint().mul(&e).to_dense()
    }

    /// Image of `x in A(region)` under the Jordan-Wigner isomorphism onto
    /// `M_{2^m}`, scaled by `scale`: entry `(k, l)` is `scale * Tr(e_{lk} x) /
    /// 2^{n-m}`.
    pub fn to_small(&self, x: &CMatrix<T>, scale: T) -> CMatrix<T> {
        let m = self.region.len();
        let size = 1usize << m;
        let d = x.nrows();
        let mult = T::of_usize(d >> m);
        CMatrix::from_fn(size, size, |k, l| self.unit(self.index(l, k)).trace_with(x) * c(scale / mult))
    }
}
