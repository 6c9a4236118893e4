//! Right coidalgebras, the conditional expectations `T_φ = (id⊗φ)∘Δ`, the
//! h-preserving expectation onto a subalgebra, quotient-type coidalgebras
//! and the Haar-equivalence report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::hopf::QuantumGroup;
use crate::linalg::{self, c, CMat, CVec};
use crate::presubgroup::QuantumSubgroup;
use crate::state::{Functional, IdempotentState};

/// Tolerance for comparing subspaces through their projections.
pub const SUBSPACE_TOL: f64 = 1e-8;

const RANK_TOL: f64 = 1e-9;
const POSITIVITY_SAMPLES: usize = 20;
const BIMODULE_SAMPLES: usize = 5;

/// Which leg of `Δ` a coideal subalgebra is stable under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    /// `Δ(C) ⊆ A⊗C`.
    Right,
    /// `Δ(C) ⊆ C⊗A`.
    Left,
}

/// Which condition defines the quotient `A//B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuotientSide {
    /// `(id⊗π)Δ(a) = a⊗1_B`, a right coidalgebra.
    #[default]
    Right,
    /// `(π⊗id)Δ(a) = 1_B⊗a`, a left coidalgebra.
    Literal,
}

/// A certified unital *-subalgebra with its h-preserving conditional
/// expectation.
#[derive(Debug, Clone)]
pub struct Coidalgebra {
    /// h-orthonormal basis as columns.
    basis: CMat,
    expectation: CMat,
    /// Orthogonal projection onto the subspace in whitened coordinates.
    projection: CMat,
    leg: Leg,
}

impl Coidalgebra {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn expectation(&self) -> &CMat {
        &self.expectation
    }

    pub fn leg(&self) -> Leg {
        self.leg
    }

    pub fn apply(&self, a: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::new(&self.expectation * &a.coords)
    }

    /// `‖(I − P_self) P_other‖`, zero when `other ⊆ self`.
    pub fn containment_residual(&self, other: &Coidalgebra) -> f64 {
        let n = self.projection.nrows();
        let defect = (CMat::identity(n, n) - &self.projection) * &other.projection;
        linalg::max_abs_mat(&defect)
    }

    pub fn contains(&self, other: &Coidalgebra) -> bool {
        self.containment_residual(other) <= SUBSPACE_TOL
    }

    pub fn distance(&self, other: &Coidalgebra) -> f64 {
        linalg::max_abs_mat(&(&self.projection - &other.projection))
    }

    pub fn same_as(&self, other: &Coidalgebra) -> bool {
        self.distance(other) <= SUBSPACE_TOL
    }
}

pub(crate) fn random_element(rng: &mut impl Rng, n: usize) -> AlgebraElement {
    AlgebraElement::new(CVec::from_fn(n, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }))
}

impl QuantumGroup {
    /// `T_φ = (id⊗φ)∘Δ` as a matrix, without checks.
    pub fn slice_matrix(&self, phi: &Functional) -> CMat {
        let n = self.dim();
        let mut t = CMat::zeros(n, n);
        for (i, entries) in self.coproduct_sparse().iter().enumerate() {
            for &(j, k, v) in entries {
                t[(j, i)] += v * phi.values[k];
            }
        }
        t
    }

    /// The conditional expectation `T_φ`, certified idempotent, unital,
    /// h-preserving, positive on samples and right invariant.
    pub fn expectation_of_state(&self, phi: &IdempotentState) -> Result<CMat> {
        let n = self.dim();
        let tol = self.tol();
        let t = self.slice_matrix(&phi.phi);
        let fail = |what, residual: f64| Err(Error::Residual { what, residual, tol });
        let idem = linalg::max_abs_mat(&(&t * &t - &t));
        if idem > tol {
            return fail("T_φ idempotent", idem);
        }
        let unit = self.algebra().unit_coords();
        let unital = linalg::dist(&(&t * unit), unit);
        if unital > tol {
            return fail("T_φ unital", unital);
        }
        let haar = linalg::dist(&(t.transpose() * self.haar_values()), self.haar_values());
        if haar > tol {
            return fail("h∘T_φ = h", haar);
        }
        let invariance = linalg::max_abs_mat(&(self.coproduct_matrix() * &t - linalg::kron(&CMat::identity(n, n), &t) * self.coproduct_matrix()));
        if invariance > tol {
            return fail("Δ∘T_φ = (id⊗T_φ)∘Δ", invariance);
        }
        let alg = self.algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(0x7e57);
        for _ in 0..POSITIVITY_SAMPLES {
            let b = random_element(&mut rng, n);
            let x = AlgebraElement::new(&t * alg.mul(&alg.adjoint(&b), &b).coords);
            if !self.gns().is_positive(alg, &x, tol * x.coords.norm().max(1.0)) {
                return Err(Error::Certification("T_φ maps a positive element outside the positive cone".into()));
            }
        }
        Ok(t)
    }

    /// Coidalgebra spanned by the columns of `span`, certified on the given leg.
    pub fn span_coidalgebra(&self, span: &CMat, leg: Leg) -> Result<Coidalgebra> {
        let gns = self.gns();
        let u = linalg::column_space(&(gns.whitening() * span), RANK_TOL);
        let basis = gns.whitening_inverse() * &u;
        let projection = &u * u.adjoint();
        let expectation = gns.whitening_inverse() * &projection * gns.whitening();
        let c = Coidalgebra {
            basis,
            expectation,
            projection,
            leg,
        };
        self.certify_coidalgebra(&c)?;
        Ok(c)
    }

    /// Certification of subalgebra, coideal and expectation properties.
    pub fn certify_coidalgebra(&self, co: &Coidalgebra) -> Result<()> {
        let alg = self.algebra();
        let n = self.dim();
        let d = co.dim();
        let scale = (0..d).map(|i| co.basis.column(i).norm()).fold(1.0, f64::max);
        let tol = self.tol() * scale * scale;
        let fail = |what, residual: f64| Err(Error::Residual { what, residual, tol });
        let complement = CMat::identity(n, n) - &co.expectation;
        let outside = |x: &CVec| (&complement * x).norm();

        let unit = outside(alg.unit_coords());
        if unit > tol {
            return fail("1 ∈ C", unit);
        }
        let cols: Vec<CVec> = (0..d).map(|i| co.basis.column(i).into_owned()).collect();
        let mut product: f64 = 0.0;
        let mut star: f64 = 0.0;
        let mut coideal: f64 = 0.0;
        for x in &cols {
            star = star.max(outside(&alg.star_coords(x)));
            for y in &cols {
                product = product.max(outside(&alg.mul_coords(x, y)));
            }
            let delta = self.coproduct_matrix() * x;
            // Δ(x) as an n×n matrix, first leg indexing rows.
            let m = CMat::from_fn(n, n, |j, k| delta[j * n + k]);
            let defect = match co.leg {
                Leg::Right => &m * complement.transpose(),
                Leg::Left => &complement * &m,
            };
            coideal = coideal.max(linalg::max_abs_mat(&defect));
        }
        if product > tol {
            return fail("C closed under multiplication", product);
        }
        if star > tol {
            return fail("C closed under *", star);
        }
        if coideal > tol {
            return fail(
                match co.leg {
                    Leg::Right => "Δ(C) ⊆ A⊗C",
                    Leg::Left => "Δ(C) ⊆ C⊗A",
                },
                coideal,
            );
        }
        let haar = linalg::dist(&(co.expectation.transpose() * self.haar_values()), self.haar_values());
        if haar > self.tol() {
            return fail("h∘E_C = h", haar);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0xb1);
        let mut bimodule: f64 = 0.0;
        for _ in 0..BIMODULE_SAMPLES {
            let a = random_element(&mut rng, n);
            let x = co.apply(&random_element(&mut rng, n));
            let y = co.apply(&random_element(&mut rng, n));
            let lhs = co.apply(&alg.mul(&x, &alg.mul(&a, &y)));
            let rhs = alg.mul(&x, &alg.mul(&co.apply(&a), &y));
            bimodule = bimodule.max(lhs.distance(&rhs));
        }
        if bimodule > tol * 10.0 {
            return fail("E_C bimodule property", bimodule);
        }
        Ok(())
    }

    /// The right coidalgebra `T(A)` for `T = T_φ`.
    pub fn image_coidalgebra(&self, t: &CMat) -> Result<Coidalgebra> {
        self.span_coidalgebra(t, Leg::Right)
    }

    /// `C_φ = T_φ(A)` for an idempotent state.
    pub fn coidalgebra_of_state(&self, phi: &IdempotentState) -> Result<Coidalgebra> {
        let t = self.expectation_of_state(phi)?;
        self.image_coidalgebra(&t)
    }

    /// The h-preserving conditional expectation onto the right coidalgebra
    /// spanned by the columns of `span`.
    pub fn expected_projection(&self, span: &CMat) -> Result<Coidalgebra> {
        self.span_coidalgebra(span, Leg::Right)
    }

    /// `φ = ε∘E_C`, checked to be an idempotent state.
    pub fn state_of_coidalgebra(&self, co: &Coidalgebra) -> Result<Functional> {
        let phi = Functional::new(co.expectation.transpose() * self.counit_values());
        if !self.is_idempotent_state(&phi) {
            return Err(Error::NotIdempotent {
                residual: self.idempotency_residual(&phi),
            });
        }
        Ok(phi)
    }

    /// `C₁ ∩ C₂`.
    pub fn coidalgebra_intersection(&self, a: &Coidalgebra, b: &Coidalgebra) -> Result<Coidalgebra> {
        let n = self.dim();
        let id = CMat::identity(n, n);
        let mut stacked = CMat::zeros(2 * n, n);
        stacked.view_mut((0, 0), (n, n)).copy_from(&(&id - &a.projection));
        stacked.view_mut((n, 0), (n, n)).copy_from(&(&id - &b.projection));
        let whitened = linalg::null_space(&stacked, RANK_TOL);
        self.span_coidalgebra(&(self.gns().whitening_inverse() * whitened), a.leg)
    }

    /// The *-algebra generated by `C₁ ∪ C₂`.
    pub fn coidalgebra_generated(&self, a: &Coidalgebra, b: &Coidalgebra) -> Result<Coidalgebra> {
        let alg = self.algebra();
        let n = self.dim();
        let gns = self.gns();
        let mut span = CMat::zeros(n, a.dim() + b.dim());
        span.columns_mut(0, a.dim()).copy_from(&a.basis);
        span.columns_mut(a.dim(), b.dim()).copy_from(&b.basis);
        loop {
            let u = linalg::column_space(&(gns.whitening() * &span), RANK_TOL);
            let basis = gns.whitening_inverse() * &u;
            let d = basis.ncols();
            let cols: Vec<CVec> = (0..d).map(|i| basis.column(i).into_owned()).collect();
            let mut gens = cols.clone();
            for x in &cols {
                gens.push(alg.star_coords(x));
                for y in &cols {
                    gens.push(alg.mul_coords(x, y));
                }
            }
            let next = CMat::from_columns(&gens);
            if linalg::rank(&(gns.whitening() * &next), RANK_TOL) == d {
                return self.span_coidalgebra(&basis, a.leg);
            }
            span = next;
        }
    }

    /// `A//B`, the elements fixed by the subgroup coaction on the chosen side.
    pub fn quotient_coidalgebra(&self, sub: &QuantumSubgroup, side: QuotientSide) -> Result<Coidalgebra> {
        let n = self.dim();
        let p = sub.pi_matrix();
        let d = p.nrows();
        let unit_b = CMat::from_column_slice(d, 1, sub.target().algebra().unit_coords().as_slice());
        let id = CMat::identity(n, n);
        let (system, leg) = match side {
            QuotientSide::Right => (
                linalg::kron(&id, p) * self.coproduct_matrix() - linalg::kron(&id, &unit_b),
                Leg::Right,
            ),
            QuotientSide::Literal => (
                linalg::kron(p, &id) * self.coproduct_matrix() - linalg::kron(&unit_b, &id),
                Leg::Left,
            ),
        };
        let fixed = linalg::null_space(&system, RANK_TOL);
        let co = self.span_coidalgebra(&fixed, leg)?;
        if side == QuotientSide::Right {
            let haar = sub.haar_state();
            let st = self.presubgroup_of(&haar)?;
            let image = self.coidalgebra_of_state(&st)?;
            if !image.same_as(&co) {
                return Err(Error::Residual {
                    what: "A//B versus T_{h_B∘π}(A)",
                    residual: image.distance(&co),
                    tol: SUBSPACE_TOL,
                });
            }
        }
        Ok(co)
    }

    /// `max ‖E(E(a)E(b)) − E(a)E(b)‖` over `pairs` random pairs.
    pub fn multiplicativity_residual(&self, phi: &Functional, pairs: usize, seed: u64) -> f64 {
        let alg = self.algebra();
        let n = self.dim();
        let t = self.slice_matrix(phi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let ea = AlgebraElement::new(&t * random_element(&mut rng, n).coords);
            let eb = AlgebraElement::new(&t * random_element(&mut rng, n).coords);
            let prod = alg.mul(&ea, &eb);
            let again = AlgebraElement::new(&t * &prod.coords);
            worst = worst.max(again.distance(&prod));
        }
        worst
    }

    /// The three verdicts of the Haar-equivalence proposition, without
    /// insisting that they agree.
    pub fn haar_equivalence_verdicts(&self, st: &IdempotentState, subgroups: &[QuantumSubgroup]) -> Result<HaarEquivalenceReport> {
        let f_central = self.is_central(&st.f);
        let mut witness = None;
        for (i, sub) in subgroups.iter().enumerate() {
            if sub.haar_state().distance(&st.phi) <= SUBSPACE_TOL {
                witness = Some(i);
                break;
            }
        }
        let c_phi = self.coidalgebra_of_state(st)?;
        let mut quotient_type = false;
        for sub in subgroups {
            if self.quotient_coidalgebra(sub, QuotientSide::Right)?.same_as(&c_phi) {
                quotient_type = true;
                break;
            }
        }
        Ok(HaarEquivalenceReport {
            is_haar: witness.is_some(),
            f_central,
            quotient_type,
            witness,
        })
    }

    /// As [`QuantumGroup::haar_equivalence_verdicts`], failing when the
    /// verdicts disagree.
    pub fn haar_equivalence_report(&self, st: &IdempotentState, subgroups: &[QuantumSubgroup]) -> Result<HaarEquivalenceReport> {
        let report = self.haar_equivalence_verdicts(st, subgroups)?;
        if !report.consistent() {
            return Err(Error::Certification(format!(
                "Haar-equivalence verdicts disagree: haar {}, central {}, quotient {}",
                report.is_haar, report.f_central, report.quotient_type
            )));
        }
        Ok(report)
    }

    /// Quantum subgroups of all central pre-subgroups among `states`.
    pub fn central_subgroups(&self, states: &[IdempotentState]) -> Result<Vec<QuantumSubgroup>> {
        let mut out = Vec::new();
        for st in states {
            if self.is_central(&st.f) {
                let f = self.certify_presubgroup(&st.f)?;
                out.push(self.quantum_subgroup_from_central(&f)?);
            }
        }
        Ok(out)
    }
}

/// Verdicts of the three equivalent conditions on an idempotent state;
/// `witness` indexes the subgroup whose Haar state it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HaarEquivalenceReport {
    pub is_haar: bool,
    pub f_central: bool,
    pub quotient_type: bool,
    pub witness: Option<usize>,
}

impl HaarEquivalenceReport {
    pub fn consistent(&self) -> bool {
        self.is_haar == self.f_central && self.f_central == self.quotient_type
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::re;
    use crate::models::{builtin, CayleyTable};

    fn subgroup_state(qg: &QuantumGroup, members: &[usize]) -> IdempotentState {
        let w = 1.0 / members.len() as f64;
        let phi = Functional::new(CVec::from_fn(qg.dim(), |i, _| {
            if members.contains(&i) {
                re(w)
            } else {
                linalg::ZERO
            }
        }));
        qg.presubgroup_of(&phi).unwrap()
    }

    fn members(g: &CayleyTable, gen: &str) -> Vec<usize> {
        g.generated(&[g.index_of(gen).unwrap()]).into_iter().collect()
    }

    #[test]
    fn expectations_of_trivial_states() {
        let qg = builtin("kp8").unwrap();
        let h = qg.presubgroup_of(&qg.haar_functional()).unwrap();
        let t = qg.expectation_of_state(&h).unwrap();
        assert_eq!(linalg::rank(&t, 1e-9), 1);
        let eps = qg.presubgroup_of(&qg.counit_functional()).unwrap();
        let t = qg.expectation_of_state(&eps).unwrap();
        assert!(linalg::max_abs_mat(&(t - CMat::identity(8, 8))) < 1e-12);
    }

    #[test]
    fn image_of_order_two_subgroup() {
        let qg = builtin("fun:S3").unwrap();
        let g = CayleyTable::symmetric3();
        let h = members(&g, "(12)");
        let st = subgroup_state(&qg, &h);
        let t = qg.expectation_of_state(&st).unwrap();
        let co = qg.image_coidalgebra(&t).unwrap();
        assert_eq!(co.dim(), 3);
        // Image functions are constant on left cosets xH.
        for x in 0..6 {
            let coset: Vec<usize> = h.iter().map(|&k| g.mul(x, k)).collect();
            for b in 0..3 {
                let col = co.basis().column(b);
                assert!((col[coset[0]] - col[coset[1]]).norm() < 1e-12);
            }
        }
        assert!(linalg::max_abs_mat(&(co.expectation() - &t)) < 1e-12);
        let back = qg.state_of_coidalgebra(&co).unwrap();
        assert!(back.distance(&st.phi) < 1e-12);
    }

    #[test]
    fn whole_algebra_and_scalars() {
        let qg = builtin("grp:S3").unwrap();
        let all = qg.expected_projection(&CMat::identity(6, 6)).unwrap();
        assert_eq!(all.dim(), 6);
        assert!(qg.state_of_coidalgebra(&all).unwrap().distance(&qg.counit_functional()) < 1e-12);
        let unit = CMat::from_column_slice(6, 1, qg.algebra().unit_coords().as_slice());
        let scalars = qg.expected_projection(&unit).unwrap();
        assert!(qg.state_of_coidalgebra(&scalars).unwrap().distance(&qg.haar_functional()) < 1e-12);
        assert!(all.contains(&scalars) && !scalars.contains(&all));
    }

    #[test]
    fn state_from_coset_algebra() {
        let qg = builtin("fun:S3").unwrap();
        let g = CayleyTable::symmetric3();
        let h = members(&g, "(123)");
        let st = subgroup_state(&qg, &h);
        let co = qg.coidalgebra_of_state(&st).unwrap();
        assert_eq!(co.dim(), 2);
        assert!(qg.state_of_coidalgebra(&co).unwrap().distance(&st.phi) < 1e-12);
    }

    #[test]
    fn intersection_and_generation() {
        let qg = builtin("fun:S3").unwrap();
        let g = CayleyTable::symmetric3();
        let c2 = qg.coidalgebra_of_state(&subgroup_state(&qg, &members(&g, "(12)"))).unwrap();
        let c3 = qg.coidalgebra_of_state(&subgroup_state(&qg, &members(&g, "(123)"))).unwrap();
        let inter = qg.coidalgebra_intersection(&c2, &c3).unwrap();
        assert_eq!(inter.dim(), 1);
        assert!(qg.state_of_coidalgebra(&inter).unwrap().distance(&qg.haar_functional()) < 1e-12);
        let gen = qg.coidalgebra_generated(&c2, &c3).unwrap();
        assert_eq!(gen.dim(), 6);
        assert!(qg.state_of_coidalgebra(&gen).unwrap().distance(&qg.counit_functional()) < 1e-12);
    }

    #[test]
    fn quotients_follow_the_side_convention() {
        let qg = builtin("fun:S3").unwrap();
        let g = CayleyTable::symmetric3();
        let h = members(&g, "(12)");
        let st = subgroup_state(&qg, &h);
        let f = qg.certify_presubgroup(&st.f).unwrap();
        let sub = qg.quantum_subgroup_from_central(&f).unwrap();
        let right = qg.quotient_coidalgebra(&sub, QuotientSide::Right).unwrap();
        assert_eq!(right.dim(), 3);
        assert!(right.same_as(&qg.coidalgebra_of_state(&st).unwrap()));
        let literal = qg.quotient_coidalgebra(&sub, QuotientSide::Literal).unwrap();
        assert_eq!(literal.dim(), 3);
        assert!(!literal.same_as(&right));
        // Literal side: functions constant on right cosets Hx.
        for x in 0..6 {
            let coset: Vec<usize> = h.iter().map(|&k| g.mul(k, x)).collect();
            for b in 0..3 {
                let col = literal.basis().column(b);
                assert!((col[coset[0]] - col[coset[1]]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn trivial_quotients() {
        let qg = builtin("fun:Z4").unwrap();
        let top = qg.presubgroup_of(&qg.haar_functional()).unwrap();
        let bottom = qg.presubgroup_of(&qg.counit_functional()).unwrap();
        let subs = qg.central_subgroups(&[top, bottom]).unwrap();
        let whole = qg.quotient_coidalgebra(&subs[0], QuotientSide::Right).unwrap();
        assert_eq!(whole.dim(), 1);
        let trivial = qg.quotient_coidalgebra(&subs[1], QuotientSide::Right).unwrap();
        assert_eq!(trivial.dim(), 4);
    }

    #[test]
    fn haar_equivalence_on_group_algebra() {
        let qg = builtin("grp:S3").unwrap();
        let g = CayleyTable::symmetric3();
        let indicator = |m: &[usize]| {
            let phi = Functional::new(CVec::from_fn(6, |i, _| if m.contains(&i) { re(1.0) } else { linalg::ZERO }));
            qg.presubgroup_of(&phi).unwrap()
        };
        let states = vec![
            qg.presubgroup_of(&qg.haar_functional()).unwrap(),
            qg.presubgroup_of(&qg.counit_functional()).unwrap(),
            indicator(&members(&g, "(123)")),
            indicator(&members(&g, "(12)")),
        ];
        let subs = qg.central_subgroups(&states).unwrap();
        assert_eq!(subs.len(), 3);
        for (i, st) in states.iter().enumerate() {
            let r = qg.haar_equivalence_report(st, &subs).unwrap();
            assert_eq!(r.is_haar, i < 3);
        }
    }

    #[test]
    fn multiplicativity_on_image() {
        let qg = builtin("kp8").unwrap();
        for phi in [qg.haar_functional(), qg.counit_functional()] {
            assert!(qg.multiplicativity_residual(&phi, 100, 3) < 1e-12);
        }
    }
}
