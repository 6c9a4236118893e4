//! JSON file format for finite quantum groups.
//!
//! Complex numbers are `[re, im]` pairs and the structure tensors are
//! stored sparsely, zeros omitted:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "basis": ["d[0]", "d[1]"],
//!   "mult": [[0, 0, 0, 1.0, 0.0], [1, 1, 1, 1.0, 0.0]],
//!   "star": [[0, 0, 1.0, 0.0], [1, 1, 1.0, 0.0]],
//!   "unit": [[1.0, 0.0], [1.0, 0.0]],
//!   "coproduct": [[0, 0, 0, 1.0, 0.0], [0, 1, 1, 1.0, 0.0], ...],
//!   "counit": [[1.0, 0.0], [0.0, 0.0]],
//!   "metadata": {"name": "fun:Z2", "provenance": "..."}
//! }
//! ```
//!
//! `mult` entries are `[i, j, k, re, im]` for `e_i e_j ∋ (re + i·im) e_k`,
//! `star` entries `[i, j, re, im]` for `e_i* ∋ (re + i·im) e_j`, and
//! `coproduct` entries either `[i, j, k, re, im]` or `[i, j·n + k, re, im]`
//! for the coefficient of `e_j ⊗ e_k` in `Δ(e_i)`. The counit is optional.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraData;
use crate::error::{Error, Result};
use crate::hopf::{HopfData, QuantumGroup};
use crate::linalg::{c, C64, CMat, CVec, ZERO};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoproductEntry {
    Pair(usize, usize, usize, f64, f64),
    Flat(usize, usize, f64, f64),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumGroupFile {
    pub dim: usize,
    pub basis: Vec<String>,
    pub mult: Vec<(usize, usize, usize, f64, f64)>,
    pub star: Vec<(usize, usize, f64, f64)>,
    pub unit: Vec<(f64, f64)>,
    pub coproduct: Vec<CoproductEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counit: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub metadata: Metadata,
}

fn canonical(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn pair(z: C64) -> (f64, f64) {
    (canonical(z.re), canonical(z.im))
}

/// Rounds to 12 significant digits and snaps values below `1e-12` to zero.
pub fn round12(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        return 0.0;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// `[re, im]` pairs rounded with [`round12`].
pub fn complex_pairs(v: &CVec) -> Vec<(f64, f64)> {
    v.iter().map(|z| (round12(z.re), round12(z.im))).collect()
}

pub fn parse_pairs(v: &[(f64, f64)]) -> CVec {
    dense(v)
}

fn dense(v: &[(f64, f64)]) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|&(r, i)| c(r, i)))
}

impl QuantumGroupFile {
    /// Canonical form: entries sorted by index, zeros omitted.
    pub fn from_data(data: &HopfData, provenance: Option<String>) -> Self {
        let alg = &data.algebra;
        let n = alg.dim();
        let mult = alg
            .mult_entries()
            .iter()
            .map(|&(i, j, k, v)| {
                let (r, im) = pair(v);
                (i, j, k, r, im)
            })
            .collect();
        let star_m = alg.star_matrix();
        let mut star = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if star_m[(i, j)] != ZERO {
                    let (r, im) = pair(star_m[(i, j)]);
                    star.push((i, j, r, im));
                }
            }
        }
        let mut coproduct = Vec::new();
        for i in 0..n {
            for row in 0..n * n {
                let v = data.coproduct[(row, i)];
                if v != ZERO {
                    let (r, im) = pair(v);
                    coproduct.push(CoproductEntry::Pair(i, row / n, row % n, r, im));
                }
            }
        }
        Self {
            dim: n,
            basis: alg.labels().to_vec(),
            mult,
            star,
            unit: alg.unit_coords().iter().map(|&z| pair(z)).collect(),
            coproduct,
            counit: data.counit.as_ref().map(|e| e.iter().map(|&z| pair(z)).collect()),
            metadata: Metadata {
                name: data.name.clone(),
                provenance,
            },
        }
    }

    pub fn from_quantum_group(qg: &QuantumGroup) -> Self {
        Self::from_data(&qg.to_data(), None)
    }

    /// Schema checks: lengths and index ranges. Axioms are not checked here.
    pub fn to_hopf_data(&self) -> Result<HopfData> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Schema("dim must be positive".into()));
        }
        if self.basis.len() != n {
            return Err(Error::Schema(format!("basis has {} labels, dim is {n}", self.basis.len())));
        }
        if self.unit.len() != n {
            return Err(Error::Schema(format!("unit has length {}, dim is {n}", self.unit.len())));
        }
        let mut star = CMat::zeros(n, n);
        for &(i, j, r, im) in &self.star {
            if i >= n || j >= n {
                return Err(Error::Schema(format!("star entry ({i}, {j}) out of range")));
            }
            star[(i, j)] += c(r, im);
        }
        let mult = self.mult.iter().map(|&(i, j, k, r, im)| (i, j, k, c(r, im))).collect();
        let algebra = AlgebraData::new(self.basis.clone(), mult, star, dense(&self.unit))?;
        let mut coproduct = CMat::zeros(n * n, n);
        for entry in &self.coproduct {
            let (i, row, v) = match *entry {
                CoproductEntry::Pair(i, j, k, r, im) => {
                    if j >= n || k >= n {
                        return Err(Error::Schema(format!("coproduct entry ({i}, {j}, {k}) out of range")));
                    }
                    (i, j * n + k, c(r, im))
                }
                CoproductEntry::Flat(i, jk, r, im) => (i, jk, c(r, im)),
            };
            if i >= n || row >= n * n {
                return Err(Error::Schema(format!("coproduct entry ({i}, {row}) out of range")));
            }
            coproduct[(row, i)] += v;
        }
        let counit = match &self.counit {
            Some(e) if e.len() != n => {
                return Err(Error::Schema(format!("counit has length {}, dim is {n}", e.len())));
            }
            Some(e) => Some(dense(e)),
            None => None,
        };
        Ok(HopfData {
            name: self.metadata.name.clone(),
            algebra,
            coproduct,
            counit,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("file format serialises") + "\n"
    }
}

/// Reads and validates a quantum group file.
///
/// Malformed JSON or schema violations give [`Error::Json`] /
/// [`Error::Schema`]; a well-formed file that fails an axiom gives
/// [`Error::Axioms`].
pub fn parse(path: impl AsRef<Path>, tol: f64) -> Result<QuantumGroup> {
    let text = fs::read_to_string(path)?;
    parse_str(&text, tol)
}

pub fn parse_str(text: &str, tol: f64) -> Result<QuantumGroup> {
    let file: QuantumGroupFile = serde_json::from_str(text)?;
    QuantumGroup::with_tolerance(file.to_hopf_data()?, tol)
}

pub fn write(qg: &QuantumGroup, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, QuantumGroupFile::from_quantum_group(qg).to_json())?;
    Ok(())
}
