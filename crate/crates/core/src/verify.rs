//! Numerical verification suites over a set of idempotent states.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coidalgebra::random_element;
use crate::error::{Error, Result};
use crate::hopf::QuantumGroup;
use crate::linalg;
use crate::state::IdempotentState;

/// Threshold for every residual reported by a suite.
pub const VERIFY_TOL: f64 = 1e-8;

const RANDOM_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Bijection,
    Rescaling,
    Order,
    Remark,
    LemmaGb,
    HaarEquivalence,
    Multiplicativity,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Bijection,
        Suite::Rescaling,
        Suite::Order,
        Suite::Remark,
        Suite::LemmaGb,
        Suite::HaarEquivalence,
        Suite::Multiplicativity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bijection => "bijection",
            Suite::Rescaling => "rescaling",
            Suite::Order => "order",
            Suite::Remark => "remark",
            Suite::LemmaGb => "lemma-gb",
            Suite::HaarEquivalence => "haar-equivalence",
            Suite::Multiplicativity => "multiplicativity",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub model: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    fn push(&mut self, name: impl Into<String>, residual: f64) {
        self.checks.push(Check {
            name: name.into(),
            residual,
            tol: VERIFY_TOL,
            passed: residual <= VERIFY_TOL,
        });
    }

    /// A check that either holds (residual 0) or fails outright.
    fn push_bool(&mut self, name: impl Into<String>, ok: bool) {
        self.push(name, if ok { 0.0 } else { f64::INFINITY });
    }

    fn push_result(&mut self, name: impl Into<String>, r: Result<f64>) {
        match r {
            Ok(residual) => self.push(name, residual),
            Err(e) => self.push(format!("{} ({e})", name.into()), f64::INFINITY),
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} on {}", self.suite, self.model)?;
        for c in &self.checks {
            let verdict = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "{verdict:4}  {:<48} {:.3e}", c.name, c.residual)?;
        }
        Ok(())
    }
}

pub fn run_suite(qg: &QuantumGroup, suite: Suite, states: &[IdempotentState]) -> SuiteReport {
    let mut report = SuiteReport {
        suite: suite.name(),
        model: qg.name().to_string(),
        checks: Vec::new(),
    };
    match suite {
        Suite::Bijection => bijection(qg, states, &mut report),
        Suite::Rescaling => rescaling(qg, states, &mut report),
        Suite::Order => order(qg, states, &mut report),
        Suite::Remark => remark(qg, states, &mut report),
        Suite::LemmaGb => lemma_gb(qg, states, &mut report),
        Suite::HaarEquivalence => haar_equivalence(qg, states, &mut report),
        Suite::Multiplicativity => multiplicativity(qg, states, &mut report),
    }
    report
}

fn bijection(qg: &QuantumGroup, states: &[IdempotentState], report: &mut SuiteReport) {
    let alg = qg.algebra();
    for (i, st) in states.iter().enumerate() {
        let omega = qg.vector_state(&st.f, &st.f);
        report.push(format!("φ{i}: ω(f_φ, f_φ) = φ"), omega.distance(&st.phi));
        report.push_result(
            format!("φ{i}: f of ω(f, f) = f"),
            qg.presubgroup_of(&omega).map(|back| back.f.distance(&st.f)),
        );
        let eps = qg.counit(&st.rho);
        let square = alg.mul(&st.rho, &st.rho).distance(&st.rho.scale(eps));
        report.push(format!("φ{i}: ρ² = ε(ρ)ρ"), square);
        let ef = qg.counit(&st.f);
        let inner = (0..qg.dim())
            .map(|k| (omega.values[k] - ef * qg.haar_inner(&st.f, &alg.basis(k))).norm())
            .fold(0.0, f64::max);
        report.push(format!("φ{i}: ω(f, f) = ε(f)⟨f, ·⟩"), inner);
        let (residual, eps_f) = qg.presubgroup_residual(&st.f);
        report.push(
            format!("φ{i}: f is a pre-subgroup"),
            if eps_f > 0.0 { residual } else { f64::INFINITY },
        );
        report.push(format!("φ{i}: φ∘S = φ"), qg.antipode_invariance_residual(&st.phi));
    }
}

fn rescaling(qg: &QuantumGroup, states: &[IdempotentState], report: &mut SuiteReport) {
    for (i, st) in states.iter().enumerate() {
        let eps = qg.counit(&st.f);
        report.push(format!("φ{i}: f/ε(f) is group-like"), qg.grouplike_residual(&st.f.scale(eps.inv())));
        let forward = qg
            .certify_presubgroup(&st.f)
            .and_then(|f| qg.to_grouplike(&f))
            .map(|p| p.p().distance(&st.p));
        report.push_result(format!("φ{i}: f ↦ f/ε(f) gives p"), forward);
        let roundtrip = qg.certify_grouplike(&st.p).and_then(|p| {
            let f = qg.to_presubgroup(&p)?;
            let back = qg.to_grouplike(&f)?;
            Ok(f.f().distance(&st.f).max(back.p().distance(&st.p)))
        });
        report.push_result(format!("φ{i}: p ↦ p/√h(p) ↦ p"), roundtrip);
    }
}

fn order(qg: &QuantumGroup, states: &[IdempotentState], report: &mut SuiteReport) {
    let n = states.len();
    let tol = qg.tol();
    let coids: Vec<_> = states.iter().map(|st| qg.coidalgebra_of_state(st)).collect();
    let pres: Vec<_> = states.iter().map(|st| qg.certify_presubgroup(&st.f)).collect();
    let mut asym = 0;
    let mut bbs = 0;
    let mut inclusion = 0;
    let mut broken = false;
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (forward, swapped) = qg.order_residuals(&states[i].phi, &states[j].phi);
            le[i][j] = forward <= tol;
            if (forward <= tol) != (swapped <= tol) {
                asym += 1;
            }
            match (&pres[i], &pres[j], &coids[i], &coids[j]) {
                (Ok(g), Ok(f), Ok(ci), Ok(cj)) => {
                    if qg.bbs_order(g, f) != le[i][j] {
                        bbs += 1;
                    }
                    if ci.contains(cj) != le[i][j] {
                        inclusion += 1;
                    }
                }
                _ => broken = true,
            }
        }
    }
    report.push_bool("pre-subgroups and coidalgebras certified", !broken);
    report.push("φ⋆ψ = ψ and ψ⋆φ = ψ agree (mismatches)", asym as f64);
    report.push("BBS order ⟺ state order (mismatches)", bbs as f64);
    report.push("C_ψ ⊆ C_φ ⟺ φ ≺ ψ (mismatches)", inclusion as f64);
    let bottom = (0..n).find(|&i| (0..n).all(|j| le[i][j]));
    let top = (0..n).find(|&i| (0..n).all(|j| le[j][i]));
    report.push(
        "least element is ε",
        bottom.map_or(f64::INFINITY, |i| states[i].phi.distance(&qg.counit_functional())),
    );
    report.push(
        "greatest element is h",
        top.map_or(f64::INFINITY, |i| states[i].phi.distance(&qg.haar_functional())),
    );
}

fn remark(qg: &QuantumGroup, states: &[IdempotentState], report: &mut SuiteReport) {
    for (i, st) in states.iter().enumerate() {
        let t = qg.expectation_of_state(st);
        report.push_bool(format!("φ{i}: T_φ is a conditional expectation"), t.is_ok());
        let Ok(t) = t else { continue };
        let co = qg.image_coidalgebra(&t);
        report.push_bool(format!("φ{i}: T_φ(A) is a right coidalgebra"), co.is_ok());
        let Ok(co) = co else { continue };
        report.push(format!("φ{i}: E_C = T_φ"), linalg::max_abs_mat(&(co.expectation() - &t)));
        report.push_result(
            format!("φ{i}: ε∘E_C = φ"),
            qg.state_of_coidalgebra(&co).map(|phi| phi.distance(&st.phi)),
        );
    }
}

fn lemma_gb(qg: &QuantumGroup, states: &[IdempotentState], report: &mut SuiteReport) {
    let tol = qg.tol();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9b);
    for (i, f) in states.iter().enumerate() {
        for (j, g) in states.iter().enumerate() {
            let (gf, fg) = (qg.conv(&g.phi, &f.phi), qg.conv(&f.phi, &g.phi));
            if gf.distance(&f.phi) > tol || fg.distance(&f.phi) > tol {
                continue;
            }
            let mut worst: f64 = 0.0;
            for _ in 0..RANDOM_SAMPLES {
                let b = random_element(&mut rng, qg.dim());
                match qg.lemma_gb_residual(&f.phi, &g.phi, &b) {
                    Ok(r) => worst = worst.max(r),
                    Err(_) => worst = f64::INFINITY,
                }
            }
            report.push(format!("f = φ{i}, g = φ{j}: f⋆g_b = g(b)f"), worst);
        }
    }
}

fn haar_equivalence(qg: &QuantumGroup, states: &[IdempotentState], report: &mut SuiteReport) {
    let subgroups = match qg.central_subgroups(states) {
        Ok(s) => s,
        Err(e) => {
            report.push(format!("quantum subgroups of central pre-subgroups ({e})"), f64::INFINITY);
            return;
        }
    };
    for (i, st) in states.iter().enumerate() {
        match qg.haar_equivalence_verdicts(st, &subgroups) {
            Ok(r) => report.push_bool(
                format!(
                    "φ{i}: Haar {} / central {} / quotient {}",
                    r.is_haar, r.f_central, r.quotient_type
                ),
                r.consistent(),
            ),
            Err(e) => report.push(format!("φ{i}: verdicts ({e})"), f64::INFINITY),
        }
    }
}

fn multiplicativity(qg: &QuantumGroup, states: &[IdempotentState], report: &mut SuiteReport) {
    for (i, st) in states.iter().enumerate() {
        let r = qg.multiplicativity_residual(&st.phi, RANDOM_SAMPLES, 0x51 + i as u64);
        report.push(format!("φ{i}: E(E(a)E(b)) = E(a)E(b)"), r);
    }
}

/// Runs every suite.
pub fn run_all(qg: &QuantumGroup, states: &[IdempotentState]) -> Vec<SuiteReport> {
    Suite::ALL.into_iter().map(|s| run_suite(qg, s, states)).collect()
}
