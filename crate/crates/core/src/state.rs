//! Functionals on a finite quantum group: convolution, states, idempotent
//! states with their density elements, vector states and Cesàro averages.

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::hopf::QuantumGroup;
use crate::linalg::{self, re, C64, CMat, CVec};

/// A linear functional, stored as its values on the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    pub values: CVec,
}

impl Functional {
    pub fn new(values: CVec) -> Self {
        Self { values }
    }

    pub fn eval(&self, a: &AlgebraElement) -> C64 {
        self.values.dot(&a.coords)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        linalg::dist(&self.values, &other.values)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(&self.values * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.values + &other.values)
    }
}

/// An idempotent state together with its density `ρ_φ`, its pre-subgroup
/// `f_φ = ρ_φ / √ε(ρ_φ)` and its group-like projection `p = ρ_φ / ε(ρ_φ)`.
#[derive(Debug, Clone)]
pub struct IdempotentState {
    pub phi: Functional,
    pub rho: AlgebraElement,
    pub f: AlgebraElement,
    pub p: AlgebraElement,
}

#[derive(Debug, Clone, Copy)]
pub struct CesaroOptions {
    pub max_iter: usize,
    /// Averages below this idempotency residual are handed to the
    /// group-like refinement.
    pub polish_threshold: f64,
}

impl Default for CesaroOptions {
    fn default() -> Self {
        Self {
            max_iter: 10_000,
            polish_threshold: 1e-3,
        }
    }
}

impl QuantumGroup {
    pub fn counit_functional(&self) -> Functional {
        Functional::new(self.counit_values().clone())
    }

    pub fn haar_functional(&self) -> Functional {
        Functional::new(self.haar_values().clone())
    }

    fn check_functional(&self, psi: &Functional) -> Result<()> {
        if psi.values.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.values.len(),
            });
        }
        Ok(())
    }

    /// `ψ₁ ⋆ ψ₂ = (ψ₁ ⊗ ψ₂) ∘ Δ`.
    pub fn convolve(&self, a: &Functional, b: &Functional) -> Result<Functional> {
        self.check_functional(a)?;
        self.check_functional(b)?;
        Ok(self.conv(a, b))
    }

    pub(crate) fn conv(&self, a: &Functional, b: &Functional) -> Functional {
        let values = self
            .coproduct_sparse()
            .iter()
            .map(|entries| entries.iter().map(|&(j, k, c)| c * a.values[j] * b.values[k]).sum())
            .collect::<Vec<C64>>();
        Functional::new(CVec::from_vec(values))
    }

    /// Matrix `[ψ(e_i* e_j)]`, positive semidefinite exactly when `ψ` is positive.
    fn positivity_matrix(&self, psi: &Functional) -> CMat {
        let alg = self.algebra();
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            let ei = alg.adjoint(&alg.basis(i));
            for j in 0..n {
                m[(i, j)] = psi.eval(&alg.mul(&ei, &alg.basis(j)));
            }
        }
        m
    }

    pub fn is_state(&self, psi: &Functional) -> bool {
        if psi.values.len() != self.dim() {
            return false;
        }
        let tol = self.tol();
        if (psi.eval(&self.algebra().one()) - re(1.0)).norm() > tol {
            return false;
        }
        let m = self.positivity_matrix(psi);
        linalg::max_abs_mat(&(&m - m.adjoint())) <= tol && linalg::min_hermitian_eigenvalue(&m) >= -tol
    }

    /// `‖ψ⋆ψ − ψ‖₂`.
    pub fn idempotency_residual(&self, psi: &Functional) -> f64 {
        self.conv(psi, psi).distance(psi)
    }

    pub fn is_idempotent_state(&self, psi: &Functional) -> bool {
        self.is_state(psi) && self.idempotency_residual(psi) <= self.tol()
    }

    /// Unique `ρ` with `h(ρ a) = φ(a)` for all `a`, without positivity checks.
    pub(crate) fn density_raw(&self, phi: &Functional) -> AlgebraElement {
        let alg = self.algebra();
        let n = self.dim();
        let h = self.haar_values();
        // K[j][i] = h(e_i e_j)
        let mut k = CMat::zeros(n, n);
        for &(i, j, l, v) in alg.mult_entries() {
            k[(j, i)] += v * h[l];
        }
        let rho = k.lu().solve(&phi.values).unwrap_or_else(|| CVec::zeros(n));
        AlgebraElement::new(rho)
    }

    /// `ρ_φ` with `φ(a) = ⟨ρ_φ, a⟩ = h(ρ_φ a)`; must be positive.
    pub fn density_element(&self, phi: &Functional) -> Result<AlgebraElement> {
        self.check_functional(phi)?;
        let rho = self.density_raw(phi);
        let alg = self.algebra();
        let tol = self.tol() * rho.coords.norm().max(1.0);
        if alg.adjoint(&rho).distance(&rho) > tol || !self.gns().is_positive(alg, &rho, tol) {
            let min = self
                .gns()
                .spectrum(alg, &rho, f64::INFINITY)
                .and_then(|s| s.first().copied())
                .unwrap_or(f64::NAN);
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(rho)
    }

    /// The pre-subgroup and group-like projection of an idempotent state.
    ///
    /// `f_φ` is computed both as `√ρ_φ` and as `ρ_φ/√ε(ρ_φ)`; the two must
    /// agree.
    pub fn presubgroup_of(&self, phi: &Functional) -> Result<IdempotentState> {
        if !self.is_idempotent_state(phi) {
            return Err(Error::NotIdempotent {
                residual: self.idempotency_residual(phi),
            });
        }
        let rho = self.density_element(phi)?;
        let eps = self.counit(&rho);
        if eps.re <= self.tol() || eps.im.abs() > self.tol() {
            return Err(Error::Certification(format!("ε(ρ_φ) = {eps} is not positive")));
        }
        let root = self.sqrt_positive(&rho)?;
        let f = rho.scale(re(1.0 / eps.re.sqrt()));
        let disagreement = root.distance(&f);
        let tol = self.tol() * rho.coords.norm().max(1.0);
        if disagreement > tol {
            return Err(Error::Residual {
                what: "√ρ_φ versus ρ_φ/√ε(ρ_φ)",
                residual: disagreement,
                tol,
            });
        }
        let p = rho.scale(re(1.0 / eps.re));
        Ok(IdempotentState {
            phi: phi.clone(),
            rho,
            f,
            p,
        })
    }

    /// `ω_{u,v}(a) = ⟨u, a v⟩ = h(u* a v)`.
    pub fn vector_state(&self, u: &AlgebraElement, v: &AlgebraElement) -> Functional {
        let alg = self.algebra();
        let us = alg.adjoint(u);
        let values = (0..self.dim())
            .map(|i| self.haar(&alg.mul(&us, &alg.mul(&alg.basis(i), v))))
            .collect::<Vec<_>>();
        Functional::new(CVec::from_vec(values))
    }

    /// `g_b(a) = g(a b)`.
    pub fn shifted(&self, g: &Functional, b: &AlgebraElement) -> Functional {
        let alg = self.algebra();
        let values = (0..self.dim())
            .map(|i| g.eval(&alg.mul(&alg.basis(i), b)))
            .collect::<Vec<_>>();
        Functional::new(CVec::from_vec(values))
    }

    /// `‖f ⋆ g_b − g(b) f‖₂`, defined when `g⋆f = f⋆g = f`.
    pub fn lemma_gb_residual(&self, f: &Functional, g: &Functional, b: &AlgebraElement) -> Result<f64> {
        let pre = self.conv(g, f).distance(f).max(self.conv(f, g).distance(f));
        if pre > self.tol() {
            return Err(Error::Precondition(format!("g⋆f = f⋆g = f fails by {pre:.3e}")));
        }
        let lhs = self.conv(f, &self.shifted(g, b));
        Ok(lhs.distance(&f.scale(g.eval(b))))
    }

    /// Both `‖φ₁⋆φ₂ − φ₂‖` and the swapped `‖φ₂⋆φ₁ − φ₂‖`.
    pub fn order_residuals(&self, a: &Functional, b: &Functional) -> (f64, f64) {
        (self.conv(a, b).distance(b), self.conv(b, a).distance(b))
    }

    /// `φ₁ ≺ φ₂` iff `φ₁⋆φ₂ = φ₂`. The swapped product must give the same
    /// verdict; an asymmetry is reported as an error.
    pub fn order_le(&self, a: &Functional, b: &Functional) -> Result<bool> {
        for phi in [a, b] {
            if !self.is_idempotent_state(phi) {
                return Err(Error::NotIdempotent {
                    residual: self.idempotency_residual(phi),
                });
            }
        }
        let (forward, swapped) = self.order_residuals(a, b);
        let tol = self.tol();
        if (forward <= tol) != (swapped <= tol) {
            return Err(Error::OrderAsymmetry { forward, swapped });
        }
        Ok(forward <= tol)
    }

    /// `‖φ∘S − φ‖₂`.
    pub fn antipode_invariance_residual(&self, phi: &Functional) -> f64 {
        let composed = self.antipode_matrix().transpose() * &phi.values;
        linalg::dist(&composed, &phi.values)
    }

    /// Cesàro averages `(1/N) Σ_{k≤N} ψ^{⋆k}` until one is close enough to an
    /// idempotent to be refined to an exact group-like projection.
    pub fn cesaro_idempotent(&self, psi: &Functional, opts: CesaroOptions) -> Result<IdempotentState> {
        if !self.is_state(psi) {
            return Err(Error::Precondition("Cesàro seed is not a state".into()));
        }
        if self.is_idempotent_state(psi) {
            return self.presubgroup_of(psi);
        }
        let mut power = psi.clone();
        let mut sum = psi.clone();
        let mut next_polish = 1;
        for n in 1..=opts.max_iter {
            let avg = sum.scale(re(1.0 / n as f64));
            let residual = self.idempotency_residual(&avg);
            if residual <= self.tol() && self.is_state(&avg) {
                if let Ok(st) = self.presubgroup_of(&avg) {
                    return Ok(st);
                }
            }
            if residual <= opts.polish_threshold && n >= next_polish {
                if let Some(st) = self.polish_idempotent(&avg) {
                    if st.phi.distance(&avg) <= opts.polish_threshold.sqrt() {
                        return Ok(st);
                    }
                }
                next_polish = 2 * n;
            }
            power = self.conv(&power, psi);
            sum = sum.add(&power);
        }
        Err(Error::NoConvergence {
            iterations: opts.max_iter,
        })
    }

    /// Exact idempotent state near an approximate one, via its density and
    /// Gauss–Newton refinement of the group-like projection.
    pub(crate) fn polish_idempotent(&self, approx: &Functional) -> Option<IdempotentState> {
        let rho = self.density_raw(approx);
        let eps = self.counit(&rho);
        if eps.norm() <= self.tol() {
            return None;
        }
        let p0 = rho.scale(eps.inv());
        let alg = self.algebra();
        let p0 = p0.add(&alg.adjoint(&p0)).scale(re(0.5));
        let p = self.refine_grouplike(&p0, Default::default())?;
        self.idempotent_from_grouplike(&p)
    }
}
