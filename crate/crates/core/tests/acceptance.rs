//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use finqg::io::{self, CoproductEntry, QuantumGroupFile};
use finqg::linalg::{CVec, C64};
use finqg::models::{builtin, builtin_table, CayleyTable, BUILTINS};
use finqg::search::{search_idempotents, SearchOptions};
use finqg::verify::{run_suite, Suite, VERIFY_TOL};
use finqg::{AlgebraElement, Error, Functional, IdempotentState, QuantumGroup, TensorElement};

const AXIOM_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-8;

struct Model {
    name: &'static str,
    qg: Arc<QuantumGroup>,
    states: Vec<IdempotentState>,
    exhaustive: bool,
}

type Outcome = Result<String, String>;

fn models() -> Vec<Model> {
    BUILTINS
        .iter()
        .map(|&name| {
            let qg = builtin(name).unwrap();
            let res = search_idempotents(&qg, &SearchOptions::default());
            Model {
                name,
                qg,
                states: res.states,
                exhaustive: res.exhaustive,
            }
        })
        .collect()
}

/// Subgroups by brute force over all subsets.
fn subgroups(g: &CayleyTable) -> Vec<BTreeSet<usize>> {
    let n = g.order();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let h: BTreeSet<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if h.contains(&g.identity()) && h.iter().all(|&a| h.iter().all(|&b| h.contains(&g.mul(a, b)))) {
            out.push(h);
        }
    }
    out
}

fn is_normal(g: &CayleyTable, h: &BTreeSet<usize>) -> bool {
    let n = g.order();
    let inv = |a: usize| (0..n).find(|&b| g.mul(a, b) == g.identity()).unwrap();
    (0..n).all(|x| h.iter().all(|&k| h.contains(&g.mul(g.mul(x, k), inv(x)))))
}

/// `1/|H|` on `H` for function algebras, the indicator of `H` for group
/// algebras.
fn subgroup_state(name: &str, n: usize, h: &BTreeSet<usize>) -> Functional {
    let value = if name.starts_with("fun:") { 1.0 / h.len() as f64 } else { 1.0 };
    Functional::new(CVec::from_fn(n, |i, _| C64::new(if h.contains(&i) { value } else { 0.0 }, 0.0)))
}

fn expected_haar(name: &str, g: Option<&CayleyTable>, n: usize) -> CVec {
    match g {
        Some(_) if name.starts_with("fun:") => CVec::from_element(n, C64::new(1.0 / n as f64, 0.0)),
        Some(g) => CVec::from_fn(n, |i, _| C64::new(if i == g.identity() { 1.0 } else { 0.0 }, 0.0)),
        None => {
            let v = [0.125, 0.125, 0.125, 0.125, 0.25, 0.0, 0.0, 0.25];
            CVec::from_iterator(n, v.iter().map(|&x| C64::new(x, 0.0)))
        }
    }
}

fn locate(states: &[IdempotentState], phi: &Functional) -> Option<usize> {
    states.iter().position(|st| st.phi.distance(phi) <= ORACLE_TOL)
}

fn suite_over(models: &[Model], suite: Suite) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for m in models {
        let report = run_suite(&m.qg, suite, &m.states);
        if let Some(bad) = report.checks.iter().find(|c| !c.passed) {
            return Err(format!("{}: {} residual {:.3e}", m.name, bad.name, bad.residual));
        }
        if report.checks.is_empty() {
            return Err(format!("{}: no checks ran", m.name));
        }
        checks += report.checks.len();
        worst = worst.max(report.max_residual());
    }
    Ok(format!("{checks} checks, max residual {worst:.3e}"))
}

fn axioms(models: &[Model]) -> Outcome {
    let required = [
        "coassociativity",
        "cancellation span Δ(b)(1⊗a)",
        "cancellation span Δ(b)(a⊗1)",
        "counit law",
        "haar bi-invariance",
        "haar element",
        "multiplicative unitary V*V = 1",
        "multiplicative unitary VV* = 1",
        "pentagon",
    ];
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    for m in models {
        let qg = &m.qg;
        let n = qg.dim();
        let report = qg.report();
        if !report.passed() {
            return Err(format!("{}: {}", m.name, report.failures().next().unwrap().name));
        }
        for name in required {
            let check = report.get(name).ok_or_else(|| format!("{}: missing check {name}", m.name))?;
            if check.residual > AXIOM_TOL {
                return Err(format!("{}: {name} residual {:.3e}", m.name, check.residual));
            }
            worst = worst.max(check.residual);
        }
        let table = builtin_table(m.name);
        let haar = expected_haar(m.name, table.as_ref(), n);
        let haar_err = (qg.haar_values() - &haar).norm();
        if haar_err > AXIOM_TOL {
            return Err(format!("{}: Haar state differs from oracle by {haar_err:.3e}", m.name));
        }
        // V(a ⊗ b) = Δ(a)(1 ⊗ b)
        let alg = qg.algebra();
        for _ in 0..5 {
            let mut rand_elem = || AlgebraElement::new(CVec::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
            let (a, b) = (rand_elem(), rand_elem());
            let lhs = qg.apply_unitary(&TensorElement::product(&a, &b));
            let rhs = alg.tensor_multiply(&qg.coproduct_apply(&a), &TensorElement::product(&alg.one(), &b));
            let err = lhs.distance(&rhs);
            if err > AXIOM_TOL {
                return Err(format!("{}: V(a⊗b) ≠ Δ(a)(1⊗b), residual {err:.3e}", m.name));
            }
        }
    }
    Ok(format!("{} models, max residual {worst:.3e}", models.len()))
}

fn completeness(models: &[Model]) -> Outcome {
    let pinned = [("fun:S3", 6), ("grp:S3", 6), ("fun:Z2xZ2", 5), ("fun:Z4", 3)];
    let mut summary = String::new();
    for m in models {
        let Some(g) = builtin_table(m.name) else { continue };
        let subs = subgroups(&g);
        if m.states.len() != subs.len() {
            return Err(format!("{}: {} states, oracle has {} subgroups", m.name, m.states.len(), subs.len()));
        }
        if !m.exhaustive {
            return Err(format!("{}: search not flagged exhaustive", m.name));
        }
        for h in &subs {
            let phi = subgroup_state(m.name, g.order(), h);
            let Some(i) = locate(&m.states, &phi) else {
                return Err(format!("{}: no state for subgroup {h:?}", m.name));
            };
            let central = m.qg.is_central(&m.states[i].f);
            let normal = is_normal(&g, h);
            let expect_central = m.name.starts_with("fun:") || normal;
            if central != expect_central {
                return Err(format!("{}: subgroup {h:?} central {central}, normal {normal}", m.name));
            }
        }
    }
    for (name, count) in pinned {
        let m = models.iter().find(|m| m.name == name).unwrap();
        if m.states.len() != count {
            return Err(format!("{name}: {} states, expected {count}", m.states.len()));
        }
        let _ = write!(summary, "{name} {count}, ");
    }
    let s3 = models.iter().find(|m| m.name == "grp:S3").unwrap();
    let non_central = s3.states.iter().filter(|st| !s3.qg.is_central(&st.f)).count();
    if non_central != 3 {
        return Err(format!("grp:S3: {non_central} non-central states, expected 3"));
    }
    Ok(format!("{summary}grp:S3 non-Haar 3"))
}

fn remark(models: &[Model]) -> Outcome {
    let summary = suite_over(models, Suite::Remark)?;
    let mut dims = 0;
    for m in models.iter().filter(|m| m.name.starts_with("fun:")) {
        let g = builtin_table(m.name).unwrap();
        for h in subgroups(&g) {
            let phi = subgroup_state(m.name, g.order(), &h);
            let i = locate(&m.states, &phi).ok_or_else(|| format!("{}: missing subgroup {h:?}", m.name))?;
            let co = m.qg.coidalgebra_of_state(&m.states[i]).map_err(|e| format!("{}: {e}", m.name))?;
            if co.dim() != g.order() / h.len() {
                return Err(format!("{}: dim C = {} for |H| = {}", m.name, co.dim(), h.len()));
            }
            dims += 1;
        }
    }
    Ok(format!("{summary}; {dims} coidalgebra dimensions match |G|/|H|"))
}

fn haar_equivalence(models: &[Model]) -> Outcome {
    let summary = suite_over(models, Suite::HaarEquivalence)?;
    let kp = models.iter().find(|m| m.name == "kp8").unwrap();
    if kp.states.len() != 8 {
        return Err(format!("kp8: {} states, expected 8", kp.states.len()));
    }
    let subs = kp.qg.central_subgroups(&kp.states).map_err(|e| e.to_string())?;
    let mut all_false = 0;
    for st in &kp.states {
        let r = kp.qg.haar_equivalence_report(st, &subs).map_err(|e| e.to_string())?;
        if !r.is_haar && !r.f_central && !r.quotient_type {
            all_false += 1;
        }
    }
    if all_false == 0 {
        return Err("kp8: no idempotent with all verdicts false".into());
    }
    Ok(format!("{summary}; kp8 has {all_false} non-Haar idempotents"))
}

fn determinism_and_serialization(models: &[Model]) -> Outcome {
    let bin = env!("CARGO_BIN_EXE_finqg");
    for args in [
        &["idempotents", "--example", "kp8", "--rng-seed", "42", "--format", "json"][..],
        &["lattice", "--example", "fun:D4", "--rng-seed", "42", "--format", "dot"][..],
    ] {
        let run = || Command::new(bin).args(args).output().expect("binary runs");
        let (a, b) = (run(), run());
        if !a.status.success() || a.stdout != b.stdout || a.stdout.is_empty() {
            return Err(format!("{args:?} not reproducible"));
        }
    }
    for m in models {
        let text = QuantumGroupFile::from_quantum_group(&m.qg).to_json();
        let back = io::parse_str(&text, AXIOM_TOL).map_err(|e| format!("{}: {e}", m.name))?;
        if QuantumGroupFile::from_quantum_group(&back).to_json() != text {
            return Err(format!("{}: write∘read changed the file", m.name));
        }
        if back.algebra().mult_entries() != m.qg.algebra().mult_entries() || back.coproduct_matrix() != m.qg.coproduct_matrix() {
            return Err(format!("{}: write∘read changed the structure constants", m.name));
        }
    }
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/kac_paljutkin.json");
    io::parse(&path, AXIOM_TOL).map_err(|e| format!("kp8 data file: {e}"))?;
    let mut file: QuantumGroupFile = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    if let Some(CoproductEntry::Pair(_, _, _, re, _) | CoproductEntry::Flat(_, _, re, _)) = file.coproduct.first_mut() {
        *re *= -1.0;
    }
    match io::parse_str(&serde_json::to_string(&file).unwrap(), AXIOM_TOL) {
        Err(Error::Axioms(_)) => {}
        Err(e) => return Err(format!("corrupted kp8: unexpected error {e}")),
        Ok(_) => return Err("corrupted kp8 data loaded".into()),
    }
    Ok("byte-identical CLI output, JSON roundtrip on all builtins, kp8 gated by validator".into())
}

fn main() {
    let start = Instant::now();
    let models = models();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 axiom suite", axioms(&models)),
        ("2 bijection roundtrips", suite_over(&models, Suite::Bijection)),
        ("3 rescaling roundtrips", suite_over(&models, Suite::Rescaling)),
        ("4 order isomorphism", suite_over(&models, Suite::Order)),
        ("5 completeness vs subgroup oracle", completeness(&models)),
        ("6 lemma f⋆g_b = g(b)f", suite_over(&models, Suite::LemmaGb)),
        ("7 coidalgebra roundtrip", remark(&models)),
        ("8 Haar equivalence", haar_equivalence(&models)),
        ("9 multiplicativity of E_φ", suite_over(&models, Suite::Multiplicativity)),
        ("10 determinism and serialization", determinism_and_serialization(&models)),
    ];
    let mut failed = 0;
    for (name, outcome) in &criteria {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("tolerances: axioms {AXIOM_TOL:e}, suites {VERIFY_TOL:e}, oracle match {ORACLE_TOL:e}");
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
