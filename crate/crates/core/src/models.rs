//! Built-in finite quantum groups with known answers.
//!
//! `C(G)` and `C[G]` are generated from Cayley tables that are themselves
//! built programmatically; the Kac–Paljutkin algebra is loaded from a
//! checked-in data file and accepted only if it passes the axiom suite.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::AlgebraData;
use crate::error::{Error, Result};
use crate::hopf::{HopfData, QuantumGroup, DEFAULT_TOL};
use crate::io::QuantumGroupFile;
use crate::linalg::{CMat, CVec, ONE, ZERO};

/// Names accepted by [`builtin`].
pub const BUILTINS: [&str; 10] = [
    "fun:Z2", "fun:Z3", "fun:Z4", "fun:Z2xZ2", "fun:S3", "fun:D4", "grp:S3", "grp:D4", "grp:Q8", "kp8",
];

const KAC_PALJUTKIN_JSON: &str = include_str!("../data/kac_paljutkin.json");

/// Multiplication table of a finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    name: String,
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
}

impl CayleyTable {
    /// Validates the Latin square property, associativity, the identity and
    /// inverses.
    pub fn new(name: impl Into<String>, labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        let bad = |msg: String| Err(Error::Schema(msg));
        if n == 0 || table.len() != n || table.iter().any(|row| row.len() != n) {
            return bad(format!("cayley table must be {n}×{n}"));
        }
        for row in &table {
            let set: BTreeSet<usize> = row.iter().copied().collect();
            if set.len() != n || row.iter().any(|&x| x >= n) {
                return bad("cayley table rows are not permutations".into());
            }
        }
        for c in 0..n {
            let set: BTreeSet<usize> = (0..n).map(|r| table[r][c]).collect();
            if set.len() != n {
                return bad("cayley table columns are not permutations".into());
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!("cayley table is not associative at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g)) else {
            return bad("cayley table has no identity".into());
        };
        let inverse = (0..n)
            .map(|g| (0..n).find(|&k| table[g][k] == identity).expect("latin square"))
            .collect();
        Ok(Self {
            name: name.into(),
            labels,
            table,
            inverse,
            identity,
        })
    }

    /// Closes a list of elements under a binary operation into a table.
    fn from_operation<T: PartialEq>(
        name: &str,
        elements: Vec<T>,
        labels: Vec<String>,
        op: impl Fn(&T, &T) -> T,
    ) -> Self {
        let table = elements
            .iter()
            .map(|a| {
                elements
                    .iter()
                    .map(|b| {
                        let ab = op(a, b);
                        elements.iter().position(|x| *x == ab).expect("closed operation")
                    })
                    .collect()
            })
            .collect();
        Self::new(name, labels, table).expect("generated table is a group")
    }

    pub fn cyclic(n: usize) -> Self {
        Self::from_operation(
            &format!("Z{n}"),
            (0..n).collect(),
            (0..n).map(|k| k.to_string()).collect(),
            |a, b| (a + b) % n,
        )
    }

    pub fn direct_product(&self, other: &Self) -> Self {
        let (n, m) = (self.order(), other.order());
        let elements: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
        let labels = elements
            .iter()
            .map(|&(a, b)| format!("({},{})", self.labels[a], other.labels[b]))
            .collect();
        Self::from_operation(
            &format!("{}x{}", self.name, other.name),
            elements,
            labels,
            |&(a, b), &(c, d)| (self.mul(a, c), other.mul(b, d)),
        )
    }

    pub fn klein() -> Self {
        Self::cyclic(2).direct_product(&Self::cyclic(2))
    }

    /// Permutations of {1, 2, 3}, composed right to left, labelled in cycle
    /// notation.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        let labels = perms.iter().map(cycle_label).collect();
        Self::from_operation("S3", perms, labels, |s, t| [s[t[0]], s[t[1]], s[t[2]]])
    }

    /// Symmetries of a regular `m`-gon, elements `r^k s^f`.
    pub fn dihedral(m: usize) -> Self {
        let elements: Vec<(usize, usize)> = (0..2).flat_map(|f| (0..m).map(move |k| (k, f))).collect();
        let labels = elements
            .iter()
            .map(|&(k, f)| match (k, f) {
                (0, 0) => "e".to_string(),
                (1, 0) => "r".to_string(),
                (k, 0) => format!("r{k}"),
                (0, _) => "s".to_string(),
                (1, _) => "rs".to_string(),
                (k, _) => format!("r{k}s"),
            })
            .collect();
        Self::from_operation(&format!("D{m}"), elements, labels, |&(k1, f1), &(k2, f2)| {
            let k = if f1 == 0 { k1 + k2 } else { k1 + m - k2 };
            (k % m, f1 ^ f2)
        })
    }

    /// The quaternion group {±1, ±i, ±j, ±k}.
    pub fn quaternion() -> Self {
        // (sign, unit) with unit 0 = 1, 1 = i, 2 = j, 3 = k
        let elements: Vec<(i8, usize)> = [1i8, -1]
            .iter()
            .flat_map(|&s| (0..4).map(move |u| (s, u)))
            .collect();
        let names = ["1", "i", "j", "k"];
        let labels = elements
            .iter()
            .map(|&(s, u)| if s > 0 { names[u].to_string() } else { format!("-{}", names[u]) })
            .collect();
        let unit_mul = |a: usize, b: usize| -> (i8, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (1, x),
                (x, y) if x == y => (-1, 0),
                (1, 2) => (1, 3),
                (2, 3) => (1, 1),
                (3, 1) => (1, 2),
                (2, 1) => (-1, 3),
                (3, 2) => (-1, 1),
                (1, 3) => (-1, 2),
                _ => unreachable!(),
            }
        };
        Self::from_operation("Q8", elements, labels, |&(s1, a), &(s2, b)| {
            let (s, u) = unit_mul(a, b);
            (s1 * s2 * s, u)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Smallest subgroup containing `gens`.
    pub fn generated(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::from([self.identity]);
        set.extend(gens.iter().copied());
        loop {
            let mut next = set.clone();
            for &a in &set {
                for &b in &set {
                    next.insert(self.mul(a, b));
                }
            }
            if next.len() == set.len() {
                return set;
            }
            set = next;
        }
    }

    pub fn is_normal(&self, subgroup: &BTreeSet<usize>) -> bool {
        (0..self.order()).all(|g| {
            subgroup
                .iter()
                .all(|&h| subgroup.contains(&self.mul(self.mul(g, h), self.inverse(g))))
        })
    }
}

fn cycle_label(p: &[usize; 3]) -> String {
    let mut seen = [false; 3];
    let mut out = String::new();
    for start in 0..3 {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            out.push_str(&(x + 1).to_string());
            x = p[x];
        }
        out.push(')');
    }
    if out.is_empty() {
        "e".to_string()
    } else {
        out
    }
}

/// Every subgroup of `g`, as sorted element lists, ordered by size and
/// then lexicographically.
///
/// Starts from the trivial subgroup and repeatedly adjoins one element to a
/// known subgroup; every subgroup is reached along a chain of such steps.
pub fn subgroup_oracle(g: &CayleyTable) -> Vec<Vec<usize>> {
    let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut frontier = vec![g.generated(&[])];
    found.insert(frontier[0].clone());
    while let Some(h) = frontier.pop() {
        for x in 0..g.order() {
            if h.contains(&x) {
                continue;
            }
            let mut gens: Vec<usize> = h.iter().copied().collect();
            gens.push(x);
            let k = g.generated(&gens);
            if found.insert(k.clone()) {
                frontier.push(k);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().map(|s| s.into_iter().collect()).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// `C(G)`: basis `δ_g`, pointwise product, `Δ(δ_g) = Σ_{ab=g} δ_a ⊗ δ_b`.
pub fn function_algebra(g: &CayleyTable) -> Result<QuantumGroup> {
    let n = g.order();
    let labels = g.labels().iter().map(|l| format!("d[{l}]")).collect();
    let mult = (0..n).map(|i| (i, i, i, ONE)).collect();
    let alg = AlgebraData::new(labels, mult, CMat::identity(n, n), CVec::from_element(n, ONE))?;
    let mut d = CMat::zeros(n * n, n);
    for a in 0..n {
        for b in 0..n {
            d[(a * n + b, g.mul(a, b))] = ONE;
        }
    }
    let counit = CVec::from_fn(n, |i, _| if i == g.identity() { ONE } else { ZERO });
    QuantumGroup::new(HopfData {
        name: format!("fun:{}", g.name()),
        algebra: alg,
        coproduct: d,
        counit: Some(counit),
    })
}

/// `C[G]`: basis `λ_g`, `λ_g λ_k = λ_{gk}`, `λ_g* = λ_{g⁻¹}`, `Δ(λ_g) = λ_g ⊗ λ_g`.
pub fn group_algebra(g: &CayleyTable) -> Result<QuantumGroup> {
    let n = g.order();
    let labels = g.labels().iter().map(|l| format!("l[{l}]")).collect();
    let mut mult = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            mult.push((a, b, g.mul(a, b), ONE));
        }
    }
    let mut star = CMat::zeros(n, n);
    for a in 0..n {
        star[(a, g.inverse(a))] = ONE;
    }
    let unit = CVec::from_fn(n, |i, _| if i == g.identity() { ONE } else { ZERO });
    let alg = AlgebraData::new(labels, mult, star, unit)?;
    let mut d = CMat::zeros(n * n, n);
    for a in 0..n {
        d[(a * n + a, a)] = ONE;
    }
    QuantumGroup::new(HopfData {
        name: format!("grp:{}", g.name()),
        algebra: alg,
        coproduct: d,
        counit: Some(CVec::from_element(n, ONE)),
    })
}

/// The 8-dimensional Kac–Paljutkin quantum group on `C⊕C⊕C⊕C⊕M₂(C)`.
pub fn kac_paljutkin() -> Result<QuantumGroup> {
    let file: QuantumGroupFile = serde_json::from_str(KAC_PALJUTKIN_JSON)?;
    QuantumGroup::with_tolerance(file.to_hopf_data()?, DEFAULT_TOL)
}

/// Cayley table behind a `fun:`/`grp:` builtin name.
pub fn builtin_table(name: &str) -> Option<CayleyTable> {
    let group = name.strip_prefix("fun:").or_else(|| name.strip_prefix("grp:"))?;
    Some(match group {
        "Z1" => CayleyTable::cyclic(1),
        "Z2" => CayleyTable::cyclic(2),
        "Z3" => CayleyTable::cyclic(3),
        "Z4" => CayleyTable::cyclic(4),
        "Z2xZ2" => CayleyTable::klein(),
        "S3" => CayleyTable::symmetric3(),
        "D4" => CayleyTable::dihedral(4),
        "Q8" => CayleyTable::quaternion(),
        _ => return None,
    })
}

fn build(name: &str) -> Result<QuantumGroup> {
    if name == "kp8" {
        return kac_paljutkin();
    }
    let table = builtin_table(name).ok_or_else(|| Error::UnknownModel(name.to_string()))?;
    if name.starts_with("fun:") {
        function_algebra(&table)
    } else {
        group_algebra(&table)
    }
}

/// Validated builtin model, built once per process.
pub fn builtin(name: &str) -> Result<Arc<QuantumGroup>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<QuantumGroup>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(qg) = cache.lock().expect("builtin cache poisoned").get(name) {
        return Ok(Arc::clone(qg));
    }
    let qg = Arc::new(build(name)?);
    cache
        .lock()
        .expect("builtin cache poisoned")
        .insert(name.to_string(), Arc::clone(&qg));
    Ok(qg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subgroup_counts() {
        assert_eq!(subgroup_oracle(&CayleyTable::cyclic(2)).len(), 2);
        assert_eq!(subgroup_oracle(&CayleyTable::symmetric3()).len(), 6);
        assert_eq!(subgroup_oracle(&CayleyTable::klein()).len(), 5);
        assert_eq!(subgroup_oracle(&CayleyTable::cyclic(4)).len(), 3);
        assert_eq!(subgroup_oracle(&CayleyTable::dihedral(4)).len(), 10);
        assert_eq!(subgroup_oracle(&CayleyTable::quaternion()).len(), 6);
    }

    #[test]
    fn normal_subgroups_of_s3() {
        let g = CayleyTable::symmetric3();
        let normal = subgroup_oracle(&g)
            .into_iter()
            .filter(|h| g.is_normal(&h.iter().copied().collect()))
            .count();
        assert_eq!(normal, 3);
    }

    #[test]
    fn s3_labels_and_products() {
        let g = CayleyTable::symmetric3();
        assert_eq!(g.labels()[g.identity()], "e");
        let t = g.index_of("(12)").unwrap();
        let c = g.index_of("(123)").unwrap();
        assert_eq!(g.mul(t, t), g.identity());
        assert_eq!(g.generated(&[c]).len(), 3);
        assert_eq!(g.inverse(c), g.index_of("(132)").unwrap());
    }

    #[test]
    fn rejects_non_group_tables() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(CayleyTable::new("bad", labels.clone(), vec![vec![0, 0], vec![1, 1]]).is_err());
        assert!(CayleyTable::new("ok", labels, vec![vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn builtin_dimensions() {
        assert_eq!(builtin("fun:S3").unwrap().dim(), 6);
        assert_eq!(builtin("grp:Q8").unwrap().dim(), 8);
        assert_eq!(builtin("kp8").unwrap().dim(), 8);
        assert!(matches!(builtin("fun:A5"), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn trivial_group() {
        let qg = function_algebra(&CayleyTable::cyclic(1)).unwrap();
        assert_eq!(qg.dim(), 1);
        assert!(crate::linalg::dist(qg.counit_values(), qg.haar_values()) < 1e-12);
    }

    #[test]
    fn kac_paljutkin_is_neither_commutative_nor_cocommutative() {
        let kp = builtin("kp8").unwrap();
        assert!(!kp.is_commutative());
        assert!(!kp.is_cocommutative());
        assert!(kp.report().passed());
    }
}
