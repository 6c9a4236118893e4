//! Small dense complex linear algebra helpers. Matrices are `nalgebra`
//! types; singular value and Hermitian eigen-decompositions go through
//! `faer`.
//!
//! Everything in this crate lives in dimension at most a few hundred, so
//! the helpers favour clarity over speed: decompositions are sorted
//! explicitly.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CVec = DVector<C64>;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Largest modulus among the entries, 0 for an empty slice.
pub fn max_abs(xs: &[C64]) -> f64 {
    xs.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Euclidean distance between two coordinate vectors.
pub fn dist(a: &CVec, b: &CVec) -> f64 {
    (a - b).norm()
}

pub fn basis_vec(n: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[i] = ONE;
    v
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Tensor `x ⊗ y` of two coordinate vectors, indexed `i * dim(y) + j`.
pub fn kron_vec(x: &CVec, y: &CVec) -> CVec {
    let m = y.len();
    CVec::from_fn(x.len() * m, |idx, _| x[idx / m] * y[idx % m])
}

/// Singular values (descending) together with the matching right singular
/// vectors as the columns of a `cols × cols` matrix, plus the left singular
/// vectors as the columns of a `rows × min(rows, cols)` matrix.
pub struct SortedSvd {
    pub values: Vec<f64>,
    pub left: CMat,
    pub right: CMat,
}

fn to_faer(m: &CMat) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn svd(m: &CMat) -> SortedSvd {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return SortedSvd {
            values: vec![0.0; cols.min(rows)],
            left: CMat::zeros(rows, 0),
            right: CMat::identity(cols, cols),
        };
    }
    let k = rows.min(cols);
    let fm = to_faer(m);
    // The thin decomposition has a full right basis only when rows >= cols.
    let (u, s, v) = if rows >= cols {
        let d = fm.thin_svd().expect("SVD converges");
        (d.U().to_owned(), d.S().column_vector().to_owned(), d.V().to_owned())
    } else {
        let d = fm.svd().expect("SVD converges");
        (d.U().to_owned(), d.S().column_vector().to_owned(), d.V().to_owned())
    };
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].re.partial_cmp(&s[a].re).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<f64> = order.iter().map(|&i| s[i].re).collect();
    let mut right_order = order.clone();
    right_order.extend(k..cols);
    let right = CMat::from_fn(cols, cols, |r, j| v[(r, right_order[j])]);
    let left = CMat::from_fn(rows, k, |r, j| u[(r, order[j])]);
    SortedSvd {
        values,
        left,
        right,
    }
}

/// Numerical rank: singular values above `tol * max(1, σ_max)`.
pub fn rank(m: &CMat, tol: f64) -> usize {
    let s = svd(m);
    let scale = s.values.first().copied().unwrap_or(0.0).max(1.0);
    s.values.iter().filter(|&&v| v > tol * scale).count()
}

/// Orthonormal (Euclidean) basis of the kernel, as columns.
pub fn null_space(m: &CMat, tol: f64) -> CMat {
    let cols = m.ncols();
    let s = svd(m);
    let scale = s.values.first().copied().unwrap_or(0.0).max(1.0);
    let r = s.values.iter().filter(|&&v| v > tol * scale).count();
    s.right.columns(r, cols - r).into_owned()
}

/// Orthonormal (Euclidean) basis of the column space, as columns.
pub fn column_space(m: &CMat, tol: f64) -> CMat {
    let s = svd(m);
    let scale = s.values.first().copied().unwrap_or(0.0).max(1.0);
    let r = s
        .values
        .iter()
        .take(s.left.ncols())
        .filter(|&&v| v > tol * scale)
        .count();
    s.left.columns(0, r).into_owned()
}

/// Minimum-norm least-squares solution of `m x = b`.
pub fn lstsq(m: &CMat, b: &CVec) -> CVec {
    let s = svd(m);
    let scale = s.values.first().copied().unwrap_or(0.0).max(1.0);
    let mut x = CVec::zeros(m.ncols());
    for (j, &sv) in s.values.iter().enumerate().take(s.left.ncols()) {
        if sv <= 1e-13 * scale {
            continue;
        }
        let coeff = s.left.column(j).dotc(b) / sv;
        x += s.right.column(j) * coeff;
    }
    x
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let h = (m + m.adjoint()) * re(0.5);
    let dec = to_faer(&h)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("eigen-decomposition converges");
    let s = dec.S().column_vector();
    let u = dec.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.partial_cmp(&s[b].re).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| s[i].re).collect();
    let vecs = CMat::from_fn(n, n, |r, j| u[(r, order[j])]);
    (vals, vecs)
}

/// Minimum-norm least-squares solution of a real system.
pub fn lstsq_real(m: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let cm = m.map(re);
    let cb = b.map(re);
    lstsq(&cm, &cb).map(|z| z.re)
}

pub fn min_hermitian_eigenvalue(m: &CMat) -> f64 {
    hermitian_eig(m).0.first().copied().unwrap_or(0.0)
}

/// Frobenius-type residual of a matrix, as its largest entry modulus.
pub fn max_abs_mat(m: &CMat) -> f64 {
    max_abs(m.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix() {
        let m = CMat::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs_mat(&(&m * &ns)) < 1e-12);
    }

    #[test]
    fn lstsq_matches_exact_solve() {
        let m = CMat::from_row_slice(3, 2, &[ONE, ZERO, ZERO, I, ONE, ONE]);
        let x = CVec::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.25)]);
        let b = &m * &x;
        assert!(dist(&lstsq(&m, &b), &x) < 1e-12);
    }

    #[test]
    fn eigenvalues_sorted() {
        let m = CMat::from_row_slice(2, 2, &[re(2.0), I, -I, re(2.0)]);
        let (vals, _) = hermitian_eig(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
    }
}
