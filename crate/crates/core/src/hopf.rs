//! Finite quantum groups: coproduct, counit, Haar state and element,
//! antipode and the multiplicative unitary, all solved for and checked
//! numerically from structure constants.

use std::fmt;

use serde::Serialize;

use crate::algebra::{AlgebraData, AlgebraElement, Gns, TensorElement};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec, ONE, ZERO};

/// Default numerical tolerance for every predicate in the crate.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Raw Hopf data as read from a model file or built by a model constructor.
#[derive(Debug, Clone)]
pub struct HopfData {
    pub name: String,
    pub algebra: AlgebraData,
    /// `n² × n`; column `i` holds the coordinates of `Δ(e_i)` in `A ⊗ A`.
    pub coproduct: CMat,
    /// Derived from the coproduct when absent.
    pub counit: Option<CVec>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub residual: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Per-axiom residuals of a candidate finite quantum group.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub model: String,
    pub tol: f64,
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.residual)
            .filter(|r| r.is_finite())
            .fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn residual(&mut self, name: &str, residual: f64) -> bool {
        let passed = residual.is_finite() && residual <= self.tol;
        self.checks.push(AxiomCheck {
            name: name.to_string(),
            residual,
            passed,
            detail: None,
        });
        passed
    }

    fn rank(&mut self, name: &str, rank: usize, expected: usize) -> bool {
        let passed = rank == expected;
        self.checks.push(AxiomCheck {
            name: name.to_string(),
            residual: expected.abs_diff(rank) as f64,
            passed,
            detail: Some(format!("rank {rank}, expected {expected}")),
        });
        passed
    }

    fn fail(&mut self, name: &str, detail: String) {
        self.checks.push(AxiomCheck {
            name: name.to_string(),
            residual: f64::INFINITY,
            passed: false,
            detail: Some(detail),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let verdict = if c.passed { "pass" } else { "FAIL" };
            write!(f, "{verdict:4}  {:<32} {:.3e}", c.name, c.residual)?;
            if let Some(d) = &c.detail {
                write!(f, "  ({d})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A validated finite quantum group with its cached Haar data.
///
/// Immutable after construction; every derived quantity is computed once.
#[derive(Debug, Clone)]
pub struct QuantumGroup {
    name: String,
    algebra: AlgebraData,
    coproduct: CMat,
    /// Nonzero entries `(j, k, value)` of each `Δ(e_i)`.
    coproduct_sparse: Vec<Vec<(usize, usize, C64)>>,
    counit: CVec,
    haar: CVec,
    haar_element: CVec,
    antipode: CMat,
    gns: Gns,
    unitary: CMat,
    tol: f64,
    report: ValidationReport,
}

/// Validates raw Hopf data without keeping the result.
pub fn validate(data: &HopfData, tol: f64) -> ValidationReport {
    match QuantumGroup::with_tolerance(data.clone(), tol) {
        Ok(qg) => qg.report,
        Err(Error::Axioms(report)) => *report,
        Err(e) => ValidationReport {
            model: data.name.clone(),
            tol,
            checks: vec![AxiomCheck {
                name: "input".into(),
                residual: f64::INFINITY,
                passed: false,
                detail: Some(e.to_string()),
            }],
        },
    }
}

fn sparse_columns(d: &CMat, n: usize) -> Vec<Vec<(usize, usize, C64)>> {
    (0..n)
        .map(|i| {
            (0..n * n)
                .filter(|&r| d[(r, i)] != ZERO)
                .map(|r| (r / n, r % n, d[(r, i)]))
                .collect()
        })
        .collect()
}

impl QuantumGroup {
    pub fn new(data: HopfData) -> Result<Self> {
        Self::with_tolerance(data, DEFAULT_TOL)
    }

    /// Runs the full axiom suite; any failing axiom makes this an
    /// [`Error::Axioms`] carrying the report.
    pub fn with_tolerance(data: HopfData, tol: f64) -> Result<Self> {
        let HopfData {
            name,
            algebra: alg,
            coproduct: d,
            counit,
        } = data;
        let n = alg.dim();
        if d.shape() != (n * n, n) {
            return Err(Error::Schema(format!(
                "coproduct has shape {:?}, expected ({}, {n})",
                d.shape(),
                n * n
            )));
        }
        if let Some(e) = &counit {
            if e.len() != n {
                return Err(Error::Schema(format!("counit has length {}, expected {n}", e.len())));
            }
        }
        let sparse = sparse_columns(&d, n);
        let mut report = ValidationReport {
            model: name.clone(),
            tol,
            checks: Vec::new(),
        };

        for (axiom, r) in alg.axiom_residuals() {
            report.residual(axiom, r);
        }
        let basis: Vec<AlgebraElement> = (0..n).map(|i| alg.basis(i)).collect();
        let cop = |a: &AlgebraElement| TensorElement::new(&d * &a.coords);

        // Δ is a unital *-homomorphism.
        let one = alg.one();
        let one_one = TensorElement::product(&one, &one);
        report.residual("coproduct unital", cop(&one).distance(&one_one));
        let mut hom: f64 = 0.0;
        let mut star: f64 = 0.0;
        for i in 0..n {
            let di = cop(&basis[i]);
            star = star.max(alg.tensor_adjoint(&di).distance(&cop(&alg.adjoint(&basis[i]))));
            for j in 0..n {
                let lhs = cop(&alg.mul(&basis[i], &basis[j]));
                let rhs = alg.tensor_multiply(&di, &cop(&basis[j]));
                hom = hom.max(lhs.distance(&rhs));
            }
        }
        report.residual("coproduct multiplicative", hom);
        report.residual("coproduct star-preserving", star);
        report.residual("coassociativity", coassociativity_residual(&d, n));

        let (rank_right, rank_left) = cancellation_ranks(&alg, &sparse);
        report.rank("cancellation span Δ(b)(1⊗a)", rank_right, n * n);
        report.rank("cancellation span Δ(b)(a⊗1)", rank_left, n * n);

        // Counit: derived, and compared with the supplied one if any.
        let derived = solve_counit(&d, n);
        let counit = match (&derived, counit) {
            (Some(e), Some(given)) => {
                report.residual("counit agrees with derived", linalg::dist(e, &given));
                given
            }
            (Some(e), None) => e.clone(),
            (None, Some(given)) => {
                report.fail("counit agrees with derived", "no counit solves the counit law".into());
                given
            }
            (None, None) => {
                report.fail("counit law", "no counit solves the counit law".into());
                return Err(Error::Axioms(Box::new(report)));
            }
        };
        report.residual("counit law", counit_law_residual(&d, &counit, n));
        report.residual("counit character", character_residual(&alg, &counit));

        let haar = match solve_haar(&alg, &d, tol) {
            Ok((h, residual)) => {
                report.residual("haar bi-invariance", residual);
                h
            }
            Err(e) => {
                report.fail("haar bi-invariance", e.to_string());
                return Err(Error::Axioms(Box::new(report)));
            }
        };
        report.residual("haar normalised", (haar.dot(alg.unit_coords()) - ONE).norm());
        let mut herm: f64 = 0.0;
        let mut trace: f64 = 0.0;
        for i in 0..n {
            let si = alg.adjoint(&basis[i]);
            herm = herm.max((si.coords.dot(&haar) - haar[i].conj()).norm());
            for j in 0..n {
                let ab = alg.mul(&basis[i], &basis[j]).coords.dot(&haar);
                let ba = alg.mul(&basis[j], &basis[i]).coords.dot(&haar);
                trace = trace.max((ab - ba).norm());
            }
        }
        report.residual("haar hermitian", herm);
        report.residual("haar trace", trace);
        let gns = match Gns::new(&alg, &haar) {
            Ok(g) => {
                let min = linalg::min_hermitian_eigenvalue(g.gram());
                report.checks.push(AxiomCheck {
                    name: "haar faithful (gram positive-definite)".into(),
                    residual: 0.0,
                    passed: true,
                    detail: Some(format!("min eigenvalue {min:.3e}")),
                });
                g
            }
            Err(e) => {
                report.fail("haar faithful (gram positive-definite)", e.to_string());
                return Err(Error::Axioms(Box::new(report)));
            }
        };

        let haar_element = match solve_haar_element(&alg, &counit, tol) {
            Ok(eta) => {
                let e = AlgebraElement::new(eta.clone());
                let mut r = alg.mul(&e, &e).distance(&e).max(alg.adjoint(&e).distance(&e));
                for (i, b) in basis.iter().enumerate() {
                    let target = e.scale(counit[i]);
                    r = r
                        .max(alg.mul(&e, b).distance(&target))
                        .max(alg.mul(b, &e).distance(&target));
                }
                report.residual("haar element", r);
                let h_eta = eta.dot(&haar);
                let mut rel: f64 = 0.0;
                for (i, b) in basis.iter().enumerate() {
                    let lhs = alg.mul(&e, b).coords.dot(&haar);
                    rel = rel.max((lhs - counit[i] * h_eta).norm());
                }
                report.residual("haar element vs counit", rel);
                eta
            }
            Err(e) => {
                report.fail("haar element", e.to_string());
                CVec::zeros(n)
            }
        };

        let antipode = match solve_antipode(&alg, &sparse, &counit) {
            Ok((s, residual)) => {
                report.residual("antipode law", residual);
                let sm = |a: &AlgebraElement| AlgebraElement::new(&s * &a.coords);
                let mut anti: f64 = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let lhs = sm(&alg.mul(&basis[i], &basis[j]));
                        let rhs = alg.mul(&sm(&basis[j]), &sm(&basis[i]));
                        anti = anti.max(lhs.distance(&rhs));
                    }
                }
                report.residual("antipode anti-multiplicative", anti);
                let h_s = s.transpose() * &haar;
                let e_s = s.transpose() * &counit;
                report.residual("haar antipode-invariant", linalg::dist(&h_s, &haar));
                report.residual("counit antipode-invariant", linalg::dist(&e_s, &counit));
                s
            }
            Err(e) => {
                report.fail("antipode law", e.to_string());
                CMat::identity(n, n)
            }
        };

        let unitary = unitary_matrix(&alg, &sparse);
        let gg = linalg::kron(gns.gram(), gns.gram());
        let gg_inv = gg.clone().try_inverse().unwrap_or_else(|| CMat::zeros(n * n, n * n));
        let isometry = linalg::max_abs_mat(&(unitary.adjoint() * &gg * &unitary - &gg));
        let coisometry = linalg::max_abs_mat(&(&unitary * &gg_inv * unitary.adjoint() - &gg_inv));
        report.residual("multiplicative unitary V*V = 1", isometry);
        report.residual("multiplicative unitary VV* = 1", coisometry);
        report.residual("pentagon", pentagon_residual(&unitary, n));

        if !report.passed() {
            return Err(Error::Axioms(Box::new(report)));
        }
        Ok(Self {
            name,
            algebra: alg,
            coproduct: d,
            coproduct_sparse: sparse,
            counit,
            haar,
            haar_element,
            antipode,
            gns,
            unitary,
            tol,
            report,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn algebra(&self) -> &AlgebraData {
        &self.algebra
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn gns(&self) -> &Gns {
        &self.gns
    }

    pub fn coproduct_matrix(&self) -> &CMat {
        &self.coproduct
    }

    pub(crate) fn coproduct_sparse(&self) -> &[Vec<(usize, usize, C64)>] {
        &self.coproduct_sparse
    }

    pub fn counit_values(&self) -> &CVec {
        &self.counit
    }

    pub fn haar_values(&self) -> &CVec {
        &self.haar
    }

    /// Matrix of the antipode in the basis (column `i` is `S(e_i)`).
    pub fn antipode_matrix(&self) -> &CMat {
        &self.antipode
    }

    /// Matrix of `V` on `A ⊗ A`, basis `e_i ⊗ e_j ↦ i·n + j`.
    pub fn unitary_matrix(&self) -> &CMat {
        &self.unitary
    }

    /// The raw data this group was built from.
    pub fn to_data(&self) -> HopfData {
        HopfData {
            name: self.name.clone(),
            algebra: self.algebra.clone(),
            coproduct: self.coproduct.clone(),
            counit: Some(self.counit.clone()),
        }
    }

    pub fn coproduct_apply(&self, a: &AlgebraElement) -> TensorElement {
        TensorElement::new(&self.coproduct * &a.coords)
    }

    pub fn counit(&self, a: &AlgebraElement) -> C64 {
        a.coords.dot(&self.counit)
    }

    pub fn haar(&self, a: &AlgebraElement) -> C64 {
        a.coords.dot(&self.haar)
    }

    pub fn haar_element(&self) -> AlgebraElement {
        AlgebraElement::new(self.haar_element.clone())
    }

    pub fn antipode(&self, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::new(&self.antipode * &a.coords)
    }

    /// `V(x)` for `x ∈ A ⊗ A`.
    pub fn apply_unitary(&self, t: &TensorElement) -> TensorElement {
        TensorElement::new(&self.unitary * &t.coords)
    }

    pub fn haar_inner(&self, a: &AlgebraElement, b: &AlgebraElement) -> C64 {
        self.gns.inner(a, b)
    }

    pub fn haar_norm(&self, a: &AlgebraElement) -> f64 {
        self.gns.norm(a)
    }

    pub fn regular_representation(&self, a: &AlgebraElement) -> CMat {
        self.algebra.regular_representation(a)
    }

    pub fn is_positive(&self, a: &AlgebraElement) -> bool {
        self.gns.is_positive(&self.algebra, a, self.tol)
    }

    pub fn is_projection(&self, a: &AlgebraElement) -> bool {
        self.algebra.is_projection(a, self.tol)
    }

    pub fn is_central(&self, a: &AlgebraElement) -> bool {
        self.algebra.is_central(a, self.tol)
    }

    pub fn sqrt_positive(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        self.gns.sqrt_positive(&self.algebra, a, self.tol)
    }

    /// Whether `Δ` commutes with the tensor flip.
    pub fn is_cocommutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n * n).all(|r| {
                let flipped = (r % n) * n + r / n;
                (self.coproduct[(r, i)] - self.coproduct[(flipped, i)]).norm() <= self.tol
            })
        })
    }

    pub fn is_commutative(&self) -> bool {
        self.algebra.is_commutative(self.tol)
    }
}

fn coassociativity_residual(d: &CMat, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let n2 = n * n;
    for i in 0..n {
        let mut left = vec![ZERO; n2 * n];
        let mut right = vec![ZERO; n2 * n];
        for j in 0..n {
            for k in 0..n {
                let c = d[(j * n + k, i)];
                if c == ZERO {
                    continue;
                }
                // (id ⊗ Δ): e_j ⊗ Δ(e_k)
                for r in 0..n2 {
                    left[j * n2 + r] += c * d[(r, k)];
                }
                // (Δ ⊗ id): Δ(e_j) ⊗ e_k
                for r in 0..n2 {
                    right[r * n + k] += c * d[(r, j)];
                }
            }
        }
        worst = worst.max(linalg::max_abs_diff(&left, &right));
    }
    worst
}

fn cancellation_ranks(alg: &AlgebraData, sparse: &[Vec<(usize, usize, C64)>]) -> (usize, usize) {
    let n = alg.dim();
    let mut right_span = CMat::zeros(n * n, n * n);
    let mut left_span = CMat::zeros(n * n, n * n);
    for (b, entries) in sparse.iter().enumerate() {
        for a in 0..n {
            let col = b * n + a;
            for &(j, k, c) in entries {
                // Δ(e_b)(1 ⊗ e_a) and Δ(e_b)(e_a ⊗ 1)
                for &(p, q, r, m) in alg.mult_entries() {
                    if p == k && q == a {
                        right_span[(j * n + r, col)] += c * m;
                    }
                    if p == j && q == a {
                        left_span[(r * n + k, col)] += c * m;
                    }
                }
            }
        }
    }
    (linalg::rank(&right_span, 1e-9), linalg::rank(&left_span, 1e-9))
}

fn solve_counit(d: &CMat, n: usize) -> Option<CVec> {
    let mut m = CMat::zeros(2 * n * n, n);
    let mut rhs = CVec::zeros(2 * n * n);
    for i in 0..n {
        for k in 0..n {
            let row = i * n + k;
            for j in 0..n {
                m[(row, j)] += d[(j * n + k, i)];
            }
            if i == k {
                rhs[row] = ONE;
            }
        }
        for j in 0..n {
            let row = n * n + i * n + j;
            for k in 0..n {
                m[(row, k)] += d[(j * n + k, i)];
            }
            if i == j {
                rhs[row] = ONE;
            }
        }
    }
    let e = linalg::lstsq(&m, &rhs);
    (linalg::max_abs((&m * &e - &rhs).as_slice()) < 1e-6).then_some(e)
}

fn counit_law_residual(d: &CMat, e: &CVec, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let left: C64 = (0..n).map(|j| d[(j * n + k, i)] * e[j]).sum();
            let right: C64 = (0..n).map(|j| d[(k * n + j, i)] * e[j]).sum();
            let target = if i == k { ONE } else { ZERO };
            worst = worst.max((left - target).norm()).max((right - target).norm());
        }
    }
    worst
}

fn character_residual(alg: &AlgebraData, e: &CVec) -> f64 {
    let n = alg.dim();
    let mut worst = (alg.unit_coords().dot(e) - ONE).norm();
    for i in 0..n {
        let bi = alg.basis(i);
        worst = worst.max((alg.adjoint(&bi).coords.dot(e) - e[i].conj()).norm());
        for j in 0..n {
            let prod = alg.mul(&bi, &alg.basis(j)).coords.dot(e);
            worst = worst.max((prod - e[i] * e[j]).norm());
        }
    }
    worst
}

/// Solves `(id⊗h)Δ(e_i) = h(e_i)1 = (h⊗id)Δ(e_i)`, `h(1) = 1` by least
/// squares, returning the values `h(e_i)` and the equation residual.
pub(crate) fn solve_haar(alg: &AlgebraData, d: &CMat, tol: f64) -> Result<(CVec, f64)> {
    let n = alg.dim();
    let u = alg.unit_coords();
    let mut m = CMat::zeros(2 * n * n + 1, n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                m[(row, k)] += d[(j * n + k, i)];
            }
            m[(row, i)] -= u[j];
        }
        for k in 0..n {
            let row = n * n + i * n + k;
            for j in 0..n {
                m[(row, j)] += d[(j * n + k, i)];
            }
            m[(row, i)] -= u[k];
        }
    }
    let homogeneous = m.rows(0, 2 * n * n).into_owned();
    let nullity = n - linalg::rank(&homogeneous, 1e-9);
    if nullity != 1 {
        return Err(Error::SolutionSpace {
            what: "haar state",
            found: nullity,
            expected: 1,
        });
    }
    for k in 0..n {
        m[(2 * n * n, k)] = u[k];
    }
    let mut rhs = CVec::zeros(2 * n * n + 1);
    rhs[2 * n * n] = ONE;
    let h = linalg::lstsq(&m, &rhs);
    let residual = linalg::max_abs((&m * &h - &rhs).as_slice());
    if residual > tol {
        return Err(Error::Residual {
            what: "haar state",
            residual,
            tol,
        });
    }
    Ok((h, residual))
}

/// Solves `e_i η = ε(e_i) η = η e_i` and normalises `ε(η) = 1`.
fn solve_haar_element(alg: &AlgebraData, counit: &CVec, tol: f64) -> Result<CVec> {
    let n = alg.dim();
    let mut m = CMat::zeros(2 * n * n, n);
    for i in 0..n {
        let b = alg.basis(i);
        let mut l = alg.regular_representation(&b);
        let mut r = alg.right_representation(&b);
        for k in 0..n {
            l[(k, k)] -= counit[i];
            r[(k, k)] -= counit[i];
        }
        m.view_mut((2 * i * n, 0), (n, n)).copy_from(&l);
        m.view_mut((2 * i * n + n, 0), (n, n)).copy_from(&r);
    }
    let kernel = linalg::null_space(&m, 1e-9);
    if kernel.ncols() != 1 {
        return Err(Error::SolutionSpace {
            what: "haar element",
            found: kernel.ncols(),
            expected: 1,
        });
    }
    let v: CVec = kernel.column(0).into_owned();
    let eps = v.dot(counit);
    if eps.norm() <= tol {
        return Err(Error::Residual {
            what: "haar element counit normalisation",
            residual: eps.norm(),
            tol,
        });
    }
    Ok(v / eps)
}

/// Solves `m∘(S⊗id)∘Δ = ε(·)1 = m∘(id⊗S)∘Δ` for the matrix of `S`.
fn solve_antipode(
    alg: &AlgebraData,
    sparse: &[Vec<(usize, usize, C64)>],
    counit: &CVec,
) -> Result<(CMat, f64)> {
    let n = alg.dim();
    let u = alg.unit_coords();
    // unknown S[p][j] (coefficient of e_p in S(e_j)) at index p * n + j
    let mut m = CMat::zeros(2 * n * n, n * n);
    let mut rhs = CVec::zeros(2 * n * n);
    for (i, entries) in sparse.iter().enumerate() {
        for q in 0..n {
            rhs[i * n + q] = counit[i] * u[q];
            rhs[n * n + i * n + q] = counit[i] * u[q];
        }
        for &(j, k, c) in entries {
            for &(p, k2, q, mv) in alg.mult_entries() {
                // Σ c S[p][j] e_p e_k
                if k2 == k {
                    m[(i * n + q, p * n + j)] += c * mv;
                }
                // Σ c e_j S[p][k]  (e_j e_p)
                if p == j {
                    m[(n * n + i * n + q, k2 * n + k)] += c * mv;
                }
            }
        }
    }
    let r = linalg::rank(&m, 1e-9);
    if r != n * n {
        return Err(Error::SolutionSpace {
            what: "antipode",
            found: n * n - r,
            expected: 0,
        });
    }
    let x = linalg::lstsq(&m, &rhs);
    let residual = linalg::max_abs((&m * &x - &rhs).as_slice());
    let s = CMat::from_fn(n, n, |p, j| x[p * n + j]);
    Ok((s, residual))
}

/// `V(e_a ⊗ e_b) = Δ(e_a)(1 ⊗ e_b)`.
fn unitary_matrix(alg: &AlgebraData, sparse: &[Vec<(usize, usize, C64)>]) -> CMat {
    let n = alg.dim();
    let mut v = CMat::zeros(n * n, n * n);
    for (a, entries) in sparse.iter().enumerate() {
        for &(j, k, c) in entries {
            for &(p, b, l, mv) in alg.mult_entries() {
                if p == k {
                    v[(j * n + l, a * n + b)] += c * mv;
                }
            }
        }
    }
    v
}

/// `‖V₁₂V₁₃V₂₃ − V₂₃V₁₂‖` on `A⊗A⊗A`, evaluated column by column.
pub(crate) fn pentagon_residual(v: &CMat, n: usize) -> f64 {
    let entries: Vec<(usize, usize, usize, usize, C64)> = (0..n * n)
        .flat_map(|row| (0..n * n).map(move |col| (row, col)))
        .filter(|&(row, col)| v[(row, col)] != ZERO)
        .map(|(row, col)| (row / n, row % n, col / n, col % n, v[(row, col)]))
        .collect();
    let n2 = n * n;
    let idx = |a: usize, b: usize, c: usize| a * n2 + b * n + c;
    // leg positions: (first, second) among the three tensor legs
    let apply = |x: &[C64], legs: (usize, usize)| -> Vec<C64> {
        let mut out = vec![ZERO; n2 * n];
        for &(j, l, a, b, val) in &entries {
            for c in 0..n {
                let (src, dst) = match legs {
                    (1, 2) => (idx(a, b, c), idx(j, l, c)),
                    (2, 3) => (idx(c, a, b), idx(c, j, l)),
                    _ => (idx(a, c, b), idx(j, c, l)),
                };
                let xs = x[src];
                if xs != ZERO {
                    out[dst] += val * xs;
                }
            }
        }
        out
    };
    let mut worst: f64 = 0.0;
    for col in 0..n2 * n {
        let mut x = vec![ZERO; n2 * n];
        x[col] = ONE;
        let lhs = apply(&apply(&apply(&x, (2, 3)), (1, 3)), (1, 2));
        let rhs = apply(&apply(&x, (1, 2)), (2, 3));
        worst = worst.max(linalg::max_abs_diff(&lhs, &rhs));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use crate::models::{function_algebra, group_algebra, CayleyTable};

    #[test]
    fn coproduct_on_small_models() {
        let qg = function_algebra(&CayleyTable::cyclic(2)).unwrap();
        let alg = qg.algebra();
        let d0 = alg.basis(0);
        let d1 = alg.basis(1);
        let expected = TensorElement::product(&d0, &d0).coords + TensorElement::product(&d1, &d1).coords;
        assert!(linalg::dist(&qg.coproduct_apply(&d0).coords, &expected) < 1e-15);
        let one = alg.one();
        assert_eq!(qg.coproduct_apply(&one), TensorElement::product(&one, &one));

        let g = group_algebra(&CayleyTable::symmetric3()).unwrap();
        let l = g.algebra().basis(4);
        assert_eq!(g.coproduct_apply(&l), TensorElement::product(&l, &l));
    }

    #[test]
    fn haar_state_values() {
        let qg = function_algebra(&CayleyTable::cyclic(2)).unwrap();
        assert!(linalg::dist(qg.haar_values(), &CVec::from_vec(vec![re(0.5), re(0.5)])) < 1e-12);
        let g = group_algebra(&CayleyTable::symmetric3()).unwrap();
        for i in 0..6 {
            let expected = if i == 0 { ONE } else { ZERO };
            assert!((g.haar_values()[i] - expected).norm() < 1e-12);
        }
        assert!((g.haar(&g.algebra().one()) - ONE).norm() < 1e-12);
    }

    #[test]
    fn haar_elements() {
        let qg = function_algebra(&CayleyTable::cyclic(2)).unwrap();
        assert!(qg.haar_element().distance(&qg.algebra().basis(0)) < 1e-12);
        let g = group_algebra(&CayleyTable::symmetric3()).unwrap();
        let expected = AlgebraElement::new(CVec::from_element(6, re(1.0 / 6.0)));
        assert!(g.haar_element().distance(&expected) < 1e-12);
        assert!((g.counit(&g.haar_element()) - ONE).norm() < 1e-12);
    }

    #[test]
    fn antipode_inverts_group_elements() {
        let t = CayleyTable::symmetric3();
        for qg in [function_algebra(&t).unwrap(), group_algebra(&t).unwrap()] {
            for g in 0..6 {
                let s = qg.antipode(&qg.algebra().basis(g));
                assert!(s.distance(&qg.algebra().basis(t.inverse(g))) < 1e-10, "{}", qg.name());
            }
            let one = qg.algebra().one();
            assert!(qg.antipode(&one).distance(&one) < 1e-10);
        }
    }

    #[test]
    fn unitary_on_function_algebra_of_z2() {
        let qg = function_algebra(&CayleyTable::cyclic(2)).unwrap();
        let alg = qg.algebra();
        for a in 0..2 {
            for b in 0..2 {
                let x = TensorElement::product(&alg.basis(a), &alg.basis(b));
                let expected = TensorElement::product(&alg.basis((a + 2 - b) % 2), &alg.basis(b));
                assert!(qg.apply_unitary(&x).distance(&expected) < 1e-15);
                let y = TensorElement::product(&alg.one(), &alg.basis(b));
                assert!(qg.apply_unitary(&y).distance(&y) < 1e-15);
            }
        }
    }

    #[test]
    fn corrupted_coproduct_breaks_coassociativity() {
        let mut data = function_algebra(&CayleyTable::cyclic(2)).unwrap().to_data();
        data.coproduct[(0, 0)] = re(2.0);
        let report = validate(&data, DEFAULT_TOL);
        assert!(!report.passed());
        assert!(!report.get("coassociativity").unwrap().passed);
    }

    #[test]
    fn pentagon_on_group_algebra() {
        let qg = group_algebra(&CayleyTable::symmetric3()).unwrap();
        assert!(pentagon_residual(qg.unitary_matrix(), 6) <= 1e-9);
        assert!(qg.is_cocommutative());
        assert!(!qg.is_commutative());
        let f = function_algebra(&CayleyTable::symmetric3()).unwrap();
        assert!(!f.is_cocommutative());
        assert!(f.is_commutative());
    }
}
