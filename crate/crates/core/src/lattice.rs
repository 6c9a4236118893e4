//! The partial order on idempotent states, its Hasse diagram, meets and
//! joins through coidalgebras, and DOT/JSON export.

use serde::{Deserialize, Serialize};

use crate::coidalgebra::Coidalgebra;
use crate::error::{Error, Result};
use crate::hopf::QuantumGroup;
use crate::io::{complex_pairs, parse_pairs};
use crate::state::{Functional, IdempotentState};

/// Distance below which a lattice element is identified with `ε` or `h`.
const IDENTIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct IdempotentLattice {
    model: String,
    elements: Vec<IdempotentState>,
    coidalgebras: Vec<Coidalgebra>,
    central: Vec<bool>,
    /// `order[i][j]` iff `φ_i ≺ φ_j`.
    order: Vec<Vec<bool>>,
    hasse: Vec<(usize, usize)>,
    meets: Option<Vec<Vec<usize>>>,
    joins: Option<Vec<Vec<usize>>>,
    bottom: usize,
    top: usize,
    exhaustive: bool,
}

/// Greatest lower bounds (or least upper bounds with `upward`) inside the
/// set, when they exist for every pair.
fn bound_table(order: &[Vec<bool>], upward: bool) -> Option<Vec<Vec<usize>>> {
    let n = order.len();
    let le = |a: usize, b: usize| if upward { order[b][a] } else { order[a][b] };
    let mut table = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let lower: Vec<usize> = (0..n).filter(|&k| le(k, i) && le(k, j)).collect();
            table[i][j] = *lower.iter().find(|&&k| lower.iter().all(|&m| le(m, k)))?;
        }
    }
    Some(table)
}

impl IdempotentLattice {
    /// Builds the order, verifies the poset axioms and reduces to the Hasse
    /// diagram. The least element must be `ε` and the greatest `h`.
    pub fn build(qg: &QuantumGroup, states: Vec<IdempotentState>, exhaustive: bool) -> Result<Self> {
        let n = states.len();
        let mut order = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                order[i][j] = qg.order_le(&states[i].phi, &states[j].phi)?;
            }
        }
        for i in 0..n {
            if !order[i][i] {
                return Err(Error::Certification(format!("state {i} is not below itself")));
            }
            for j in 0..i {
                if order[i][j] && order[j][i] {
                    return Err(Error::Antisymmetry(j, i));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if order[i][j] && order[j][k] && !order[i][k] {
                        return Err(Error::Certification(format!("order is not transitive at ({i}, {j}, {k})")));
                    }
                }
            }
        }
        let find = |target: &Functional, what: &str, pred: &dyn Fn(usize) -> bool| {
            (0..n)
                .find(|&i| pred(i))
                .filter(|&i| states[i].phi.distance(target) <= IDENTIFY_TOL)
                .ok_or_else(|| Error::Certification(format!("{what} of the lattice is missing or wrong")))
        };
        let bottom = find(&qg.counit_functional(), "least element", &|i| (0..n).all(|j| order[i][j]))?;
        let top = find(&qg.haar_functional(), "greatest element", &|i| (0..n).all(|j| order[j][i]))?;
        let mut hasse = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && order[i][j] && !(0..n).any(|k| k != i && k != j && order[i][k] && order[k][j]) {
                    hasse.push((i, j));
                }
            }
        }
        let coidalgebras = states
            .iter()
            .map(|st| qg.coidalgebra_of_state(st))
            .collect::<Result<Vec<_>>>()?;
        let central = states.iter().map(|st| qg.is_central(&st.f)).collect();
        Ok(Self {
            model: qg.name().to_string(),
            meets: bound_table(&order, false),
            joins: bound_table(&order, true),
            elements: states,
            coidalgebras,
            central,
            order,
            hasse,
            bottom,
            top,
            exhaustive,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[IdempotentState] {
        &self.elements
    }

    pub fn coidalgebra(&self, i: usize) -> &Coidalgebra {
        &self.coidalgebras[i]
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.order[i][j]
    }

    pub fn hasse_edges(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn is_central(&self, i: usize) -> bool {
        self.central[i]
    }

    /// Poset meet inside the discovered set, if the set is meet-closed.
    pub fn poset_meet(&self, i: usize, j: usize) -> Option<usize> {
        self.meets.as_ref().map(|t| t[i][j])
    }

    pub fn poset_join(&self, i: usize, j: usize) -> Option<usize> {
        self.joins.as_ref().map(|t| t[i][j])
    }

    /// Meet through the coidalgebra generated by `C_i ∪ C_j`.
    pub fn meet(&self, qg: &QuantumGroup, i: usize, j: usize) -> Result<IdempotentState> {
        let co = qg.coidalgebra_generated(&self.coidalgebras[i], &self.coidalgebras[j])?;
        qg.presubgroup_of(&qg.state_of_coidalgebra(&co)?)
    }

    /// Join through the intersection `C_i ∩ C_j`.
    pub fn join(&self, qg: &QuantumGroup, i: usize, j: usize) -> Result<IdempotentState> {
        let co = qg.coidalgebra_intersection(&self.coidalgebras[i], &self.coidalgebras[j])?;
        qg.presubgroup_of(&qg.state_of_coidalgebra(&co)?)
    }

    /// Index of the element equal to `phi`, if any.
    pub fn position(&self, phi: &Functional) -> Option<usize> {
        self.elements.iter().position(|st| st.phi.distance(phi) <= IDENTIFY_TOL)
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph \"{}\" {{\n  rankdir=BT;\n", self.model);
        for i in 0..self.elements.len() {
            let mut label = format!("{i}");
            if i == self.bottom {
                label.push_str(" ε");
            }
            if i == self.top {
                label.push_str(" h");
            }
            let kind = if self.central[i] { "haar" } else { "non-haar" };
            label.push_str(&format!("\\n{kind}, dim C = {}", self.coidalgebras[i].dim()));
            out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
        }
        for &(i, j) in &self.hasse {
            out.push_str(&format!("  n{i} -> n{j};\n"));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_export(&self) -> LatticeExport {
        LatticeExport {
            model: self.model.clone(),
            exhaustive: self.exhaustive,
            elements: self
                .elements
                .iter()
                .enumerate()
                .map(|(i, st)| ElementExport::new(i, st, self.central[i], self.coidalgebras[i].dim()))
                .collect(),
            edges: self.hasse.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_export()).expect("lattice serialises") + "\n"
    }

    pub fn export(&self, format: &str) -> Result<String> {
        match format {
            "dot" => Ok(self.to_dot()),
            "json" => Ok(self.to_json()),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// One idempotent state in exported form. `haar` is the centrality verdict
/// of its pre-subgroup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementExport {
    pub index: usize,
    pub state: Vec<(f64, f64)>,
    pub rho: Vec<(f64, f64)>,
    pub f: Vec<(f64, f64)>,
    pub p: Vec<(f64, f64)>,
    pub haar: bool,
    pub coidalgebra_dim: usize,
}

impl ElementExport {
    pub fn new(index: usize, st: &IdempotentState, haar: bool, coidalgebra_dim: usize) -> Self {
        Self {
            index,
            state: complex_pairs(&st.phi.values),
            rho: complex_pairs(&st.rho.coords),
            f: complex_pairs(&st.f.coords),
            p: complex_pairs(&st.p.coords),
            haar,
            coidalgebra_dim,
        }
    }

    pub fn functional(&self) -> Functional {
        Functional::new(parse_pairs(&self.state))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeExport {
    pub model: String,
    pub exhaustive: bool,
    pub elements: Vec<ElementExport>,
    /// Hasse edges `(lower, upper)`.
    pub edges: Vec<(usize, usize)>,
}

impl LatticeExport {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Checks that every exported state is an idempotent state of `qg` and
    /// that every edge goes up in the state order.
    pub fn reverify(&self, qg: &QuantumGroup) -> Result<()> {
        let states: Vec<Functional> = self.elements.iter().map(ElementExport::functional).collect();
        for (i, phi) in states.iter().enumerate() {
            // Exported values are rounded to 12 significant digits.
            let residual = qg.idempotency_residual(phi);
            if !qg.is_state(phi) || residual > 1e-9 {
                return Err(Error::Certification(format!("exported state {i} is not idempotent ({residual:e})")));
            }
        }
        for &(i, j) in &self.edges {
            let (a, b) = (states.get(i), states.get(j));
            let (Some(a), Some(b)) = (a, b) else {
                return Err(Error::Schema(format!("edge ({i}, {j}) out of range")));
            };
            if qg.order_residuals(a, b).0 > 1e-9 {
                return Err(Error::Certification(format!("edge ({i}, {j}) is not order-increasing")));
            }
        }
        Ok(())
    }
}
