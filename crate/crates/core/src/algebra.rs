//! Finite-dimensional *-algebras given by structure constants.
//!
//! An algebra with basis `e_0, .., e_{n-1}` is described by
//!
//! * the multiplication tensor, `e_i e_j = Σ_k m[i][j][k] e_k`,
//! * the star matrix `S`, `e_i* = Σ_j S[i][j] e_j`, extended conjugate-linearly,
//! * the coordinates of the unit.
//!
//! [`Gns`] adds the Haar inner product `⟨a, b⟩ = h(a* b)` on top of an
//! algebra and provides the spectral calculus (positivity, square roots)
//! through the left regular representation.

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec, ZERO};

/// Element of a finite-dimensional algebra in basis coordinates.
///
/// Under the identification `a ↦ a·1_h` the same coordinates describe a
/// vector of the GNS space of the Haar state.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub coords: CVec,
}

impl AlgebraElement {
    pub fn new(coords: CVec) -> Self {
        Self { coords }
    }

    pub fn from_slice(xs: &[C64]) -> Self {
        Self::new(CVec::from_column_slice(xs))
    }

    pub fn zero(n: usize) -> Self {
        Self::new(CVec::zeros(n))
    }

    pub fn basis(n: usize, i: usize) -> Self {
        Self::new(linalg::basis_vec(n, i))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(&self.coords * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.coords + &other.coords)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.coords - &other.coords)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        linalg::dist(&self.coords, &other.coords)
    }
}

/// Element of `A ⊗ A`, coordinates indexed `(i, j) ↦ i·n + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorElement {
    pub coords: CVec,
}

impl TensorElement {
    pub fn new(coords: CVec) -> Self {
        Self { coords }
    }

    pub fn product(a: &AlgebraElement, b: &AlgebraElement) -> Self {
        Self::new(linalg::kron_vec(&a.coords, &b.coords))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        linalg::dist(&self.coords, &other.coords)
    }
}

/// Structure constants of a unital *-algebra.
#[derive(Debug, Clone)]
pub struct AlgebraData {
    dim: usize,
    labels: Vec<String>,
    /// Nonzero entries `(i, j, k, m[i][j][k])`.
    mult: Vec<(usize, usize, usize, C64)>,
    star: CMat,
    unit: CVec,
}

impl AlgebraData {
    /// Checks shapes and index ranges only; the algebra axioms are verified
    /// by [`AlgebraData::axiom_residuals`].
    pub fn new(
        labels: Vec<String>,
        mult: Vec<(usize, usize, usize, C64)>,
        star: CMat,
        unit: CVec,
    ) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 {
            return Err(Error::Schema("algebra dimension must be positive".into()));
        }
        if star.shape() != (dim, dim) {
            return Err(Error::Schema(format!(
                "star matrix has shape {:?}, expected ({dim}, {dim})",
                star.shape()
            )));
        }
        if unit.len() != dim {
            return Err(Error::Schema(format!(
                "unit has length {}, expected {dim}",
                unit.len()
            )));
        }
        let mut dense = vec![ZERO; dim * dim * dim];
        for &(i, j, k, v) in &mult {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::Schema(format!(
                    "multiplication entry ({i}, {j}, {k}) out of range for dimension {dim}"
                )));
            }
            dense[(i * dim + j) * dim + k] += v;
        }
        let mult = (0..dim * dim * dim)
            .filter(|&idx| dense[idx] != ZERO)
            .map(|idx| (idx / (dim * dim), (idx / dim) % dim, idx % dim, dense[idx]))
            .collect();
        Ok(Self {
            dim,
            labels,
            mult,
            star,
            unit,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mult_entries(&self) -> &[(usize, usize, usize, C64)] {
        &self.mult
    }

    pub fn star_matrix(&self) -> &CMat {
        &self.star
    }

    pub fn unit_coords(&self) -> &CVec {
        &self.unit
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement::new(self.unit.clone())
    }

    pub fn basis(&self, i: usize) -> AlgebraElement {
        AlgebraElement::basis(self.dim, i)
    }

    fn check_dim(&self, a: &AlgebraElement) -> Result<()> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn mul_coords(&self, a: &CVec, b: &CVec) -> CVec {
        let mut out = CVec::zeros(self.dim);
        for &(i, j, k, v) in &self.mult {
            out[k] += a[i] * b[j] * v;
        }
        out
    }

    pub(crate) fn star_coords(&self, a: &CVec) -> CVec {
        let mut out = CVec::zeros(self.dim);
        for i in 0..self.dim {
            let ai = a[i].conj();
            if ai == ZERO {
                continue;
            }
            for j in 0..self.dim {
                out[j] += ai * self.star[(i, j)];
            }
        }
        out
    }

    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(AlgebraElement::new(self.mul_coords(&a.coords, &b.coords)))
    }

    /// Product of elements known to belong to this algebra.
    pub(crate) fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::new(self.mul_coords(&a.coords, &b.coords))
    }

    pub fn adjoint(&self, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::new(self.star_coords(&a.coords))
    }

    /// Matrix of `x ↦ a x` in the basis.
    pub fn regular_representation(&self, a: &AlgebraElement) -> CMat {
        let n = self.dim;
        let mut l = CMat::zeros(n, n);
        for &(i, j, k, v) in &self.mult {
            l[(k, j)] += a.coords[i] * v;
        }
        l
    }

    /// Matrix of `x ↦ x a` in the basis.
    pub fn right_representation(&self, a: &AlgebraElement) -> CMat {
        let n = self.dim;
        let mut r = CMat::zeros(n, n);
        for &(i, j, k, v) in &self.mult {
            r[(k, i)] += a.coords[j] * v;
        }
        r
    }

    pub(crate) fn tensor_mul_coords(&self, t: &CVec, u: &CVec) -> CVec {
        let n = self.dim;
        let mut out = CVec::zeros(n * n);
        for &(i, i2, k, v1) in &self.mult {
            for &(j, j2, l, v2) in &self.mult {
                let x = t[i * n + j] * u[i2 * n + j2];
                if x != ZERO {
                    out[k * n + l] += x * v1 * v2;
                }
            }
        }
        out
    }

    pub fn tensor_multiply(&self, t: &TensorElement, u: &TensorElement) -> TensorElement {
        TensorElement::new(self.tensor_mul_coords(&t.coords, &u.coords))
    }

    pub fn tensor_adjoint(&self, t: &TensorElement) -> TensorElement {
        let n = self.dim;
        let mut out = CVec::zeros(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = t.coords[i * n + j].conj();
                if x == ZERO {
                    continue;
                }
                for p in 0..n {
                    let sp = self.star[(i, p)];
                    if sp == ZERO {
                        continue;
                    }
                    for q in 0..n {
                        out[p * n + q] += x * sp * self.star[(j, q)];
                    }
                }
            }
        }
        TensorElement::new(out)
    }

    pub fn is_central(&self, a: &AlgebraElement, tol: f64) -> bool {
        self.commutator_residual(a) <= tol
    }

    pub(crate) fn commutator_residual(&self, a: &AlgebraElement) -> f64 {
        (0..self.dim)
            .map(|i| {
                let e = self.basis(i);
                self.mul(a, &e).distance(&self.mul(&e, a))
            })
            .fold(0.0, f64::max)
    }

    pub fn is_projection(&self, a: &AlgebraElement, tol: f64) -> bool {
        self.mul(a, a).distance(a) <= tol && self.adjoint(a).distance(a) <= tol
    }

    pub fn is_commutative(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| self.is_central(&self.basis(i), tol))
    }

    /// Residuals of the unital *-algebra axioms, as `(name, residual)` pairs.
    pub fn axiom_residuals(&self) -> Vec<(&'static str, f64)> {
        let n = self.dim;
        let e: Vec<AlgebraElement> = (0..n).map(|i| self.basis(i)).collect();
        let one = self.one();
        let mut assoc: f64 = 0.0;
        let mut unit: f64 = 0.0;
        let mut invol: f64 = 0.0;
        let mut antimult: f64 = 0.0;
        for i in 0..n {
            unit = unit
                .max(self.mul(&one, &e[i]).distance(&e[i]))
                .max(self.mul(&e[i], &one).distance(&e[i]));
            invol = invol.max(self.adjoint(&self.adjoint(&e[i])).distance(&e[i]));
            for j in 0..n {
                let eij = self.mul(&e[i], &e[j]);
                let lhs = self.adjoint(&eij);
                let rhs = self.mul(&self.adjoint(&e[j]), &self.adjoint(&e[i]));
                antimult = antimult.max(lhs.distance(&rhs));
                for k in 0..n {
                    let l = self.mul(&eij, &e[k]);
                    let r = self.mul(&e[i], &self.mul(&e[j], &e[k]));
                    assoc = assoc.max(l.distance(&r));
                }
            }
        }
        vec![
            ("associativity", assoc),
            ("unit", unit),
            ("star involutive", invol),
            ("star anti-multiplicative", antimult),
        ]
    }
}

/// Haar-state GNS structure: Gram matrix `G_ij = h(e_i* e_j)` and its
/// Cholesky whitening `W` with `G = W^H W`.
#[derive(Debug, Clone)]
pub struct Gns {
    haar: CVec,
    gram: CMat,
    white: CMat,
    white_inv: CMat,
}

impl Gns {
    /// Fails when the Gram matrix is not Hermitian positive-definite, that is
    /// when the functional is not faithful.
    pub fn new(alg: &AlgebraData, haar: &CVec) -> Result<Self> {
        let n = alg.dim();
        let mut gram = CMat::zeros(n, n);
        for i in 0..n {
            let ei_star = alg.star_coords(&linalg::basis_vec(n, i));
            for j in 0..n {
                let prod = alg.mul_coords(&ei_star, &linalg::basis_vec(n, j));
                gram[(i, j)] = prod.dot(haar);
            }
        }
        let herm = linalg::max_abs_mat(&(&gram - gram.adjoint()));
        let min_eig = linalg::min_hermitian_eigenvalue(&gram);
        if herm > 1e-9 || min_eig <= 1e-12 {
            return Err(Error::NotPositive { min_eigenvalue: min_eig });
        }
        let sym = (&gram + gram.adjoint()) * linalg::re(0.5);
        let chol = nalgebra::Cholesky::new(sym).ok_or(Error::NotPositive { min_eigenvalue: min_eig })?;
        let white = chol.l().adjoint();
        let white_inv = white
            .clone()
            .try_inverse()
            .ok_or(Error::NotPositive { min_eigenvalue: min_eig })?;
        Ok(Self {
            haar: haar.clone(),
            gram,
            white,
            white_inv,
        })
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    /// `W`, mapping coordinates to an orthonormal frame of the GNS space.
    pub fn whitening(&self) -> &CMat {
        &self.white
    }

    pub fn whitening_inverse(&self) -> &CMat {
        &self.white_inv
    }

    pub fn haar_values(&self) -> &CVec {
        &self.haar
    }

    /// `⟨a, b⟩ = h(a* b)`, conjugate-linear in `a`.
    pub fn inner(&self, a: &AlgebraElement, b: &AlgebraElement) -> C64 {
        a.coords.dotc(&(&self.gram * &b.coords))
    }

    pub fn norm(&self, a: &AlgebraElement) -> f64 {
        self.inner(a, a).re.max(0.0).sqrt()
    }

    /// `W L_a W^{-1}`: the regular representation in an orthonormal frame.
    fn whitened_rep(&self, alg: &AlgebraData, a: &AlgebraElement) -> CMat {
        &self.white * alg.regular_representation(a) * &self.white_inv
    }

    /// Spectrum of `a` with its self-adjointness defect, or `None` if `a` is
    /// not self-adjoint within `tol`.
    pub fn spectrum(&self, alg: &AlgebraData, a: &AlgebraElement, tol: f64) -> Option<Vec<f64>> {
        let m = self.whitened_rep(alg, a);
        if linalg::max_abs_mat(&(&m - m.adjoint())) > tol {
            return None;
        }
        Some(linalg::hermitian_eig(&m).0)
    }

    pub fn is_positive(&self, alg: &AlgebraData, a: &AlgebraElement, tol: f64) -> bool {
        self.spectrum(alg, a, tol)
            .map(|s| s.first().copied().unwrap_or(0.0) >= -tol)
            .unwrap_or(false)
    }

    /// Positive square root through the regular representation: diagonalise
    /// `L_a`, take the root of the spectrum, and pull back along `L` by
    /// evaluating on the unit.
    pub fn sqrt_positive(&self, alg: &AlgebraData, a: &AlgebraElement, tol: f64) -> Result<AlgebraElement> {
        let m = self.whitened_rep(alg, a);
        if linalg::max_abs_mat(&(&m - m.adjoint())) > tol {
            return Err(Error::NotPositive { min_eigenvalue: f64::NAN });
        }
        let (vals, vecs) = linalg::hermitian_eig(&m);
        if let Some(&lo) = vals.first() {
            if lo < -tol {
                return Err(Error::NotPositive { min_eigenvalue: lo });
            }
        }
        // Eigenvalues within rounding of zero would otherwise contribute
        // their square roots, which are far above rounding.
        let floor = tol * vals.last().copied().unwrap_or(0.0).max(1.0);
        let root_diag = CMat::from_diagonal(&CVec::from_iterator(
            vals.len(),
            vals.iter().map(|&v| linalg::re(if v <= floor { 0.0 } else { v.sqrt() })),
        ));
        let root = &vecs * root_diag * vecs.adjoint();
        let l_root = &self.white_inv * root * &self.white;
        let s = AlgebraElement::new(&l_root * alg.unit_coords());
        let pullback = linalg::max_abs_mat(&(alg.regular_representation(&s) - &l_root));
        let square = alg.mul(&s, &s).distance(a);
        let residual = pullback.max(square);
        if residual > tol * a.coords.norm().max(1.0) {
            return Err(Error::Residual {
                what: "square root pull-back",
                residual,
                tol,
            });
        }
        Ok(s)
    }
}
