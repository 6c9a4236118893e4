//! Pre-subgroups, group-like projections, the BBS order, Gauss–Newton
//! refinement of group-like projections, and quantum subgroups built from
//! central pre-subgroups.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{AlgebraData, AlgebraElement, TensorElement};
use crate::error::{Error, Result};
use crate::hopf::{HopfData, QuantumGroup};
use crate::linalg::{self, re, CMat, CVec, ZERO};
use crate::state::{Functional, IdempotentState};

/// A certified pre-subgroup: a unit vector `f` with `ε(f) > 0` and
/// `V(f⊗f) = f⊗f`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreSubgroup {
    f: AlgebraElement,
}

impl PreSubgroup {
    pub fn f(&self) -> &AlgebraElement {
        &self.f
    }

    pub fn into_inner(self) -> AlgebraElement {
        self.f
    }
}

/// A certified group-like projection: `p² = p = p* ≠ 0`, `Δ(p)(1⊗p) = p⊗p`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupLikeProjection {
    p: AlgebraElement,
}

impl GroupLikeProjection {
    pub fn p(&self) -> &AlgebraElement {
        &self.p
    }

    pub fn into_inner(self) -> AlgebraElement {
        self.p
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GaussNewtonOptions {
    pub max_iter: usize,
    /// Step scaling applied each time a step increases the residual.
    pub damping: f64,
    /// Residual at which the iteration stops.
    pub target: f64,
}

impl Default for GaussNewtonOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            damping: 0.5,
            target: 1e-14,
        }
    }
}

impl QuantumGroup {
    /// Coordinates of `Δ(a)(1⊗b)`, which is `V(a⊗b)`.
    pub(crate) fn slice_product(&self, a: &CVec, b: &CVec) -> CVec {
        let n = self.dim();
        let rb = self.algebra().right_representation(&AlgebraElement::new(b.clone()));
        let mut out = CVec::zeros(n * n);
        for (i, entries) in self.coproduct_sparse().iter().enumerate() {
            if a[i] == ZERO {
                continue;
            }
            for &(j, k, c) in entries {
                let coeff = a[i] * c;
                for l in 0..n {
                    out[j * n + l] += coeff * rb[(l, k)];
                }
            }
        }
        out
    }

    /// Largest of the defining residuals of a pre-subgroup, together with
    /// `ε(f)`.
    pub fn presubgroup_residual(&self, f: &AlgebraElement) -> (f64, f64) {
        let alg = self.algebra();
        let unit_norm = (self.haar_inner(f, f) - re(1.0)).norm();
        let ff = linalg::kron_vec(&f.coords, &f.coords);
        let fixed = linalg::dist(&self.slice_product(&f.coords, &f.coords), &ff);
        let eps = self.counit(f);
        let self_adjoint = alg.adjoint(f).distance(f);
        let mut residual = unit_norm.max(fixed).max(self_adjoint).max(eps.im.abs());
        if eps.re > self.tol() {
            let p = f.scale(re(1.0 / eps.re));
            residual = residual.max(alg.mul(&p, &p).distance(&p));
        }
        (residual, eps.re)
    }

    pub fn is_presubgroup(&self, f: &AlgebraElement) -> bool {
        if f.dim() != self.dim() {
            return false;
        }
        let (residual, eps) = self.presubgroup_residual(f);
        eps > self.tol() && residual <= self.tol()
    }

    pub fn certify_presubgroup(&self, f: &AlgebraElement) -> Result<PreSubgroup> {
        self.check_element(f)?;
        let (residual, eps) = self.presubgroup_residual(f);
        if eps <= self.tol() {
            return Err(Error::Certification(format!("pre-subgroup has ε(f) = {eps:e}")));
        }
        if residual > self.tol() {
            return Err(Error::Residual {
                what: "pre-subgroup conditions",
                residual,
                tol: self.tol(),
            });
        }
        Ok(PreSubgroup { f: f.clone() })
    }

    /// `max(‖p² − p‖, ‖p − p*‖, ‖Δ(p)(1⊗p) − p⊗p‖)`.
    pub fn grouplike_residual(&self, p: &AlgebraElement) -> f64 {
        let alg = self.algebra();
        let square = alg.mul(p, p).distance(p);
        let star = alg.adjoint(p).distance(p);
        let pp = linalg::kron_vec(&p.coords, &p.coords);
        let grouplike = linalg::dist(&self.slice_product(&p.coords, &p.coords), &pp);
        square.max(star).max(grouplike)
    }

    pub fn is_grouplike_projection(&self, p: &AlgebraElement) -> bool {
        p.dim() == self.dim() && p.coords.norm() > self.tol() && self.grouplike_residual(p) <= self.tol()
    }

    pub fn certify_grouplike(&self, p: &AlgebraElement) -> Result<GroupLikeProjection> {
        self.check_element(p)?;
        if p.coords.norm() <= self.tol() {
            return Err(Error::Certification("group-like projection is zero".into()));
        }
        let residual = self.grouplike_residual(p);
        if residual > self.tol() {
            return Err(Error::Residual {
                what: "group-like projection conditions",
                residual,
                tol: self.tol(),
            });
        }
        Ok(GroupLikeProjection { p: p.clone() })
    }

    fn check_element(&self, a: &AlgebraElement) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        Ok(())
    }

    /// `f ↦ f/ε(f)`.
    pub fn to_grouplike(&self, f: &PreSubgroup) -> Result<GroupLikeProjection> {
        let eps = self.counit(&f.f);
        self.certify_grouplike(&f.f.scale(eps.inv()))
    }

    /// `p ↦ p/√h(p)`.
    pub fn to_presubgroup(&self, p: &GroupLikeProjection) -> Result<PreSubgroup> {
        let hp = self.haar(&p.p);
        if hp.re <= self.tol() {
            return Err(Error::Certification(format!("h(p) = {hp} is not positive")));
        }
        self.certify_presubgroup(&p.p.scale(re(1.0 / hp.re.sqrt())))
    }

    /// `‖V(f⊗g) − f⊗g‖₂`.
    pub fn bbs_residual(&self, g: &PreSubgroup, f: &PreSubgroup) -> f64 {
        let fg = TensorElement::product(&f.f, &g.f);
        self.apply_unitary(&fg).distance(&fg)
    }

    /// `g ≺ f` iff `V(f⊗g) = f⊗g`.
    pub fn bbs_order(&self, g: &PreSubgroup, f: &PreSubgroup) -> bool {
        self.bbs_residual(g, f) <= self.tol()
    }

    /// `ω_{f,f}`, checked to be an idempotent state whose pre-subgroup is `f`.
    pub fn state_of_presubgroup(&self, f: &PreSubgroup) -> Result<Functional> {
        let omega = self.vector_state(&f.f, &f.f);
        let back = self.presubgroup_of(&omega)?;
        let residual = back.f.distance(&f.f);
        if residual > self.tol() {
            return Err(Error::Residual {
                what: "pre-subgroup roundtrip",
                residual,
                tol: self.tol(),
            });
        }
        Ok(omega)
    }

    /// A pre-subgroup is a subgroup when it is central.
    pub fn is_subgroup(&self, f: &PreSubgroup) -> bool {
        self.is_central(&f.f)
    }

    /// Complex residual `[p² − p; p − p*; Δ(p)(1⊗p) − p⊗p]`.
    fn grouplike_equations(&self, x: &CVec) -> CVec {
        let alg = self.algebra();
        let n = self.dim();
        let mut r = CVec::zeros(2 * n + n * n);
        r.rows_mut(0, n).copy_from(&(alg.mul_coords(x, x) - x));
        r.rows_mut(n, n).copy_from(&(x - alg.star_coords(x)));
        let pp = linalg::kron_vec(x, x);
        r.rows_mut(2 * n, n * n).copy_from(&(self.slice_product(x, x) - pp));
        r
    }

    /// Real Jacobian of the realified equations at `x`. The residual is
    /// `M dx + N conj(dx)` to first order.
    fn grouplike_jacobian(&self, x: &CVec) -> DMatrix<f64> {
        let alg = self.algebra();
        let n = self.dim();
        let rows = 2 * n + n * n;
        let mut m = CMat::zeros(rows, n);
        let mut nn = CMat::zeros(rows, n);
        let xe = AlgebraElement::new(x.clone());
        let lx = alg.regular_representation(&xe);
        let rx = alg.right_representation(&xe);
        let star = alg.star_matrix();
        for j in 0..n {
            let ej = linalg::basis_vec(n, j);
            for i in 0..n {
                m[(i, j)] = lx[(i, j)] + rx[(i, j)];
                nn[(n + i, j)] = -star[(j, i)];
            }
            m[(j, j)] -= re(1.0);
            m[(n + j, j)] += re(1.0);
            let col = self.slice_product(&ej, x) + self.slice_product(x, &ej)
                - linalg::kron_vec(&ej, x)
                - linalg::kron_vec(x, &ej);
            m.view_mut((2 * n, j), (n * n, 1)).copy_from(&col);
        }
        let plus = &m + &nn;
        let minus = &m - &nn;
        let mut jac = DMatrix::zeros(2 * rows, 2 * n);
        for r in 0..rows {
            for c in 0..n {
                jac[(r, c)] = plus[(r, c)].re;
                jac[(r, n + c)] = -minus[(r, c)].im;
                jac[(rows + r, c)] = plus[(r, c)].im;
                jac[(rows + r, n + c)] = minus[(r, c)].re;
            }
        }
        jac
    }

    /// Gauss–Newton on the group-like equations from `start`; returns a
    /// certified group-like projection or `None`.
    pub fn refine_grouplike(&self, start: &AlgebraElement, opts: GaussNewtonOptions) -> Option<AlgebraElement> {
        let n = self.dim();
        let mut x = start.coords.clone();
        let mut r = self.grouplike_equations(&x);
        let mut norm = r.norm();
        for _ in 0..opts.max_iter {
            if norm <= opts.target {
                break;
            }
            let jac = self.grouplike_jacobian(&x);
            let rhs = DVector::from_iterator(2 * r.len(), r.iter().map(|z| -z.re).chain(r.iter().map(|z| -z.im)));
            let step = linalg::lstsq_real(&jac, &rhs);
            let dx = CVec::from_fn(n, |i, _| linalg::c(step[i], step[n + i]));
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial = &x + &dx * re(scale);
                let tr = self.grouplike_equations(&trial);
                if tr.norm() < norm {
                    x = trial;
                    r = tr;
                    norm = r.norm();
                    accepted = true;
                    break;
                }
                scale *= opts.damping;
            }
            if !accepted {
                break;
            }
        }
        let alg = self.algebra();
        let p = AlgebraElement::new(x);
        let p = p.add(&alg.adjoint(&p)).scale(re(0.5));
        let eps = self.counit(&p);
        if (eps - re(1.0)).norm() > 1e-6 || !self.is_grouplike_projection(&p) {
            return None;
        }
        Some(p)
    }

    /// The idempotent state `ω_{f,f}` of the pre-subgroup `f = p/√h(p)`.
    pub(crate) fn idempotent_from_grouplike(&self, p: &AlgebraElement) -> Option<IdempotentState> {
        let g = self.certify_grouplike(p).ok()?;
        let f = self.to_presubgroup(&g).ok()?;
        let phi = self.state_of_presubgroup(&f).ok()?;
        self.presubgroup_of(&phi).ok()
    }
}

/// A quantum subgroup `π: A → B`.
#[derive(Debug, Clone)]
pub struct QuantumSubgroup {
    target: QuantumGroup,
    /// `dim B × dim A` matrix of `π`.
    pi: CMat,
    source_f: Option<AlgebraElement>,
}

impl QuantumSubgroup {
    pub fn target(&self) -> &QuantumGroup {
        &self.target
    }

    pub fn pi_matrix(&self) -> &CMat {
        &self.pi
    }

    pub fn source_f(&self) -> Option<&AlgebraElement> {
        self.source_f.as_ref()
    }

    pub fn project(&self, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::new(&self.pi * &a.coords)
    }

    /// `h_B ∘ π` as a functional on `A`.
    pub fn haar_state(&self) -> Functional {
        Functional::new(self.pi.transpose() * self.target.haar_values())
    }

    /// Checks that `π` is a unital surjective *-homomorphism intertwining
    /// the coproducts.
    pub fn validate(&self, source: &QuantumGroup, tol: f64) -> Result<()> {
        let a = source.algebra();
        let b = self.target.algebra();
        let (d, n) = self.pi.shape();
        if n != source.dim() || d != self.target.dim() {
            return Err(Error::DimensionMismatch {
                expected: source.dim(),
                found: n,
            });
        }
        let fail = |what, residual| Err(Error::Residual { what, residual, tol });
        if linalg::rank(&self.pi, 1e-9) != d {
            return Err(Error::Certification("π is not surjective".into()));
        }
        let unital = linalg::dist(&(&self.pi * a.unit_coords()), b.unit_coords());
        if unital > tol {
            return fail("π unital", unital);
        }
        let mut hom: f64 = 0.0;
        let mut star: f64 = 0.0;
        for i in 0..n {
            let pi_i = self.pi.column(i).into_owned();
            star = star.max(linalg::dist(
                &(&self.pi * a.star_coords(&linalg::basis_vec(n, i))),
                &b.star_coords(&pi_i),
            ));
            for j in 0..n {
                let pi_j = self.pi.column(j).into_owned();
                let lhs = &self.pi * a.mul_coords(&linalg::basis_vec(n, i), &linalg::basis_vec(n, j));
                hom = hom.max(linalg::dist(&lhs, &b.mul_coords(&pi_i, &pi_j)));
            }
        }
        if hom > tol {
            return fail("π multiplicative", hom);
        }
        if star > tol {
            return fail("π *-preserving", star);
        }
        let lhs = self.target.coproduct_matrix() * &self.pi;
        let rhs = linalg::kron(&self.pi, &self.pi) * source.coproduct_matrix();
        let coproduct = linalg::max_abs_mat(&(lhs - rhs));
        if coproduct > tol {
            return fail("Δ_B∘π = (π⊗π)∘Δ", coproduct);
        }
        Ok(())
    }
}

fn snap(z: crate::linalg::C64) -> crate::linalg::C64 {
    crate::linalg::c(
        if z.re.abs() < 1e-14 { 0.0 } else { z.re },
        if z.im.abs() < 1e-14 { 0.0 } else { z.im },
    )
}

impl QuantumGroup {
    /// The quantum subgroup `B = A f̃` with `Δ_f(a) = Δ(a)(f̃⊗f̃)` and
    /// `π(a) = a f̃`, where `f̃ = f/ε(f)` for a central pre-subgroup `f`.
    pub fn quantum_subgroup_from_central(&self, f: &PreSubgroup) -> Result<QuantumSubgroup> {
        if !self.is_subgroup(f) {
            return Err(Error::Precondition("pre-subgroup is not central".into()));
        }
        let alg = self.algebra();
        let ft = f.f.scale(self.counit(&f.f).inv());
        let rf = alg.right_representation(&ft);
        let gns = self.gns();
        let u = linalg::column_space(&(gns.whitening() * &rf), 1e-9);
        let q = gns.whitening_inverse() * &u;
        let d = q.ncols();
        // h-orthonormal, so coordinates are inner products with the columns.
        let coords = q.adjoint() * gns.gram();
        let to_b = |x: &CVec| (&coords * x).map(snap);
        let cols: Vec<CVec> = (0..d).map(|i| q.column(i).into_owned()).collect();

        let mut mult = Vec::new();
        for (i, qi) in cols.iter().enumerate() {
            for (j, qj) in cols.iter().enumerate() {
                let prod = to_b(&alg.mul_coords(qi, qj));
                for (k, &v) in prod.iter().enumerate() {
                    if v != ZERO {
                        mult.push((i, j, k, v));
                    }
                }
            }
        }
        let star = CMat::from_fn(d, d, |i, j| to_b(&alg.star_coords(&cols[i]))[j]);
        let unit = to_b(&ft.coords);
        let labels = (0..d).map(|i| format!("b[{i}]")).collect();
        let algebra = AlgebraData::new(labels, mult, star, unit)?;

        let ftf = linalg::kron_vec(&ft.coords, &ft.coords);
        let coords2 = linalg::kron(&coords, &coords);
        let mut coproduct = CMat::zeros(d * d, d);
        for (i, qi) in cols.iter().enumerate() {
            let delta = self.coproduct_matrix() * qi;
            let restricted = alg.tensor_mul_coords(&delta, &ftf);
            coproduct.set_column(i, &(&coords2 * restricted).map(snap));
        }
        let counit = CVec::from_fn(d, |i, _| snap(self.counit(&AlgebraElement::new(cols[i].clone()))));
        let data = HopfData {
            name: format!("{}/subgroup", self.name()),
            algebra,
            coproduct,
            counit: Some(counit),
        };
        let target = QuantumGroup::with_tolerance(data, self.tol())?;
        let pi = (&coords * &rf).map(snap);
        let sub = QuantumSubgroup {
            target,
            pi,
            source_f: Some(f.f.clone()),
        };
        sub.validate(self, self.tol())?;
        Ok(sub)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{builtin, CayleyTable};

    fn indicator(qg: &QuantumGroup, members: &[usize], weight: f64) -> AlgebraElement {
        AlgebraElement::new(CVec::from_fn(qg.dim(), |i, _| {
            if members.contains(&i) {
                re(weight)
            } else {
                ZERO
            }
        }))
    }

    fn eta_presubgroup(qg: &QuantumGroup) -> AlgebraElement {
        let eta = qg.haar_element();
        eta.scale(re(1.0 / qg.haar(&eta).re.sqrt()))
    }

    #[test]
    fn presubgroup_examples() {
        for name in ["fun:S3", "grp:S3", "kp8"] {
            let qg = builtin(name).unwrap();
            assert!(qg.is_presubgroup(&qg.algebra().one()), "{name}");
            assert!(qg.is_presubgroup(&eta_presubgroup(&qg)), "{name}");
        }
        let qg = builtin("fun:S3").unwrap();
        let v = CVec::from_fn(6, |i, _| linalg::c(0.3 + i as f64, 0.1 * i as f64));
        let v = AlgebraElement::new(&v / re(qg.haar_norm(&AlgebraElement::new(v.clone()))));
        assert!(!qg.is_presubgroup(&v));
    }

    #[test]
    fn grouplike_examples() {
        let qg = builtin("fun:Z2").unwrap();
        assert!(qg.is_grouplike_projection(&qg.algebra().one()));
        assert!(qg.is_grouplike_projection(&qg.algebra().basis(0)));
        assert!(!qg.is_grouplike_projection(&qg.algebra().basis(1)));
        assert!(!qg.is_grouplike_projection(&AlgebraElement::zero(2)));
    }

    #[test]
    fn rescaling() {
        let qg = builtin("grp:S3").unwrap();
        let eta = qg.haar_element();
        let f = qg.certify_presubgroup(&eta_presubgroup(&qg)).unwrap();
        let p = qg.to_grouplike(&f).unwrap();
        assert!(p.p().distance(&eta) < 1e-12);
        assert!(qg.to_presubgroup(&p).unwrap().f().distance(f.f()) < 1e-12);

        let t = CayleyTable::symmetric3().index_of("(12)").unwrap();
        let f = qg.certify_presubgroup(&indicator(&qg, &[0, t], 1.0 / 2f64.sqrt())).unwrap();
        let p = qg.to_grouplike(&f).unwrap();
        assert!(p.p().distance(&indicator(&qg, &[0, t], 0.5)) < 1e-12);
        assert!(!qg.is_subgroup(&f));

        let g = CayleyTable::symmetric3();
        let a3: Vec<usize> = g.generated(&[g.index_of("(123)").unwrap()]).into_iter().collect();
        let f = qg.certify_presubgroup(&indicator(&qg, &a3, 1.0 / 3f64.sqrt())).unwrap();
        assert!(qg.is_subgroup(&f));
    }

    #[test]
    fn bbs_order_on_s3() {
        let qg = builtin("fun:S3").unwrap();
        let g = CayleyTable::symmetric3();
        let pre = |gen: &str| {
            let h: Vec<usize> = g.generated(&[g.index_of(gen).unwrap()]).into_iter().collect();
            qg.certify_presubgroup(&indicator(&qg, &h, (6.0 / h.len() as f64).sqrt())).unwrap()
        };
        let one = qg.certify_presubgroup(&qg.algebra().one()).unwrap();
        let bottom = qg.certify_presubgroup(&eta_presubgroup(&qg)).unwrap();
        let c2 = pre("(12)");
        let c3 = pre("(123)");
        for x in [&c2, &c3, &bottom] {
            assert!(qg.bbs_order(x, &one));
            assert!(qg.bbs_order(&bottom, x));
        }
        assert!(!qg.bbs_order(&c2, &c3));
        assert!(!qg.bbs_order(&c3, &c2));
        assert!(!qg.bbs_order(&one, &c2));
    }

    #[test]
    fn states_of_presubgroups() {
        let qg = builtin("kp8").unwrap();
        let one = qg.certify_presubgroup(&qg.algebra().one()).unwrap();
        let h = qg.state_of_presubgroup(&one).unwrap();
        assert!(h.distance(&qg.haar_functional()) < 1e-12);
        let bottom = qg.certify_presubgroup(&eta_presubgroup(&qg)).unwrap();
        let eps = qg.state_of_presubgroup(&bottom).unwrap();
        assert!(eps.distance(&qg.counit_functional()) < 1e-12);
    }

    #[test]
    fn gauss_newton_recovers_nearby_projection() {
        let qg = builtin("fun:S3").unwrap();
        let g = CayleyTable::symmetric3();
        let h: Vec<usize> = g.generated(&[g.index_of("(13)").unwrap()]).into_iter().collect();
        let exact = indicator(&qg, &h, 1.0);
        let noisy = exact.add(&AlgebraElement::new(CVec::from_fn(6, |i, _| linalg::c(0.01 * i as f64, -0.005))));
        let p = qg.refine_grouplike(&noisy, GaussNewtonOptions::default()).unwrap();
        assert!(p.distance(&exact) < 1e-10);
        let st = qg.idempotent_from_grouplike(&p).unwrap();
        assert!(st.p.distance(&exact) < 1e-10);
    }

    #[test]
    fn subgroup_from_unit_and_eta() {
        let qg = builtin("fun:S3").unwrap();
        let one = qg.certify_presubgroup(&qg.algebra().one()).unwrap();
        let whole = qg.quantum_subgroup_from_central(&one).unwrap();
        assert_eq!(whole.target().dim(), 6);
        assert!(whole.haar_state().distance(&qg.haar_functional()) < 1e-12);

        let bottom = qg.certify_presubgroup(&eta_presubgroup(&qg)).unwrap();
        let trivial = qg.quantum_subgroup_from_central(&bottom).unwrap();
        assert_eq!(trivial.target().dim(), 1);
        assert!(trivial.haar_state().distance(&qg.counit_functional()) < 1e-12);
    }

    #[test]
    fn subgroup_from_cyclic_subgroup_of_s3() {
        let qg = builtin("fun:S3").unwrap();
        let g = CayleyTable::symmetric3();
        let h: Vec<usize> = g.generated(&[g.index_of("(123)").unwrap()]).into_iter().collect();
        let f = qg.certify_presubgroup(&indicator(&qg, &h, 2f64.sqrt())).unwrap();
        let sub = qg.quantum_subgroup_from_central(&f).unwrap();
        assert_eq!(sub.target().dim(), 3);
        assert!(sub.target().is_commutative() && sub.target().is_cocommutative());
        let uniform = Functional::new(indicator(&qg, &h, 1.0 / 3.0).coords);
        assert!(sub.haar_state().distance(&uniform) < 1e-12);
        assert!(sub.project(&qg.algebra().one()).distance(&sub.target().algebra().one()) < 1e-12);
    }

    #[test]
    fn non_central_presubgroup_is_rejected() {
        let qg = builtin("grp:S3").unwrap();
        let t = CayleyTable::symmetric3().index_of("(12)").unwrap();
        let f = qg.certify_presubgroup(&indicator(&qg, &[0, t], 1.0 / 2f64.sqrt())).unwrap();
        assert!(matches!(qg.quantum_subgroup_from_central(&f), Err(Error::Precondition(_))));
    }
}
