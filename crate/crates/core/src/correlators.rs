//! Genus-zero correlator data.
//!
//! A [`CorrelatorTable`] holds plain correlators `<e_{i1}, .., e_{in}>_{0,n,beta}`
//! and one-descendent correlators `<e_{i1}, .., e_{in}, tau_d(e_j)>_{0,n+1,beta}`.
//! Keys are multisets, so `S_n`-covariance holds by construction. Degree zero
//! values never have to be stored: for `beta = 0` the moduli space is
//! `M_{0,n} x X` with trivial obstruction bundle, so correlators factor into
//! `chi(X, prod e)` times a descendent Euler characteristic of a point.
//! Missing entries of nonzero degree are unknown, never zero.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::descendents::{descendent_euler, DescendentError, DescendentIndex};
use crate::kring::{KRing, KRingError};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorrelatorError {
    #[error("correlator document: {0}")]
    SchemaError(String),
    #[error("duplicate correlator entry {0}")]
    DuplicateEntry(String),
    #[error("degree {0:?} is not effective")]
    IneffectiveDegree(Vec<i64>),
    #[error("M_(0,{0}) does not exist in degree zero")]
    ModuliNonexistent(usize),
    #[error(transparent)]
    Ring(#[from] KRingError),
    #[error(transparent)]
    Descendent(#[from] DescendentError),
}

/// The target variety, as named on the command line and in table documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Point,
    Projective(u32),
    Custom(KRing),
}

impl Target {
    pub fn ring(&self) -> KRing {
        match self {
            Target::Point => KRing::point(),
            Target::Projective(n) => KRing::projective_space(*n),
            Target::Custom(r) => r.clone(),
        }
    }

    /// Rank of the effective-class lattice used by built-in targets.
    pub fn default_degree_rank(&self) -> usize {
        match self {
            Target::Point => 0,
            Target::Projective(_) => 1,
            Target::Custom(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Target::Point => serde_json::json!({"type": "point"}),
            Target::Projective(n) => serde_json::json!({"type": "projective", "n": n}),
            Target::Custom(r) => serde_json::json!({"type": "custom", "ring": r.to_json()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, CorrelatorError> {
        let schema = |m: &str| CorrelatorError::SchemaError(m.to_string());
        match v.get("type").and_then(Value::as_str) {
            Some("point") => Ok(Target::Point),
            Some("projective") => {
                let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| schema("projective target needs n"))?;
                if n == 0 {
                    return Err(schema("projective target needs n >= 1"));
                }
                Ok(Target::Projective(n as u32))
            }
            Some("custom") => {
                let ring = v.get("ring").ok_or_else(|| schema("custom target needs ring"))?;
                Ok(Target::Custom(KRing::from_json(ring)?))
            }
            _ => Err(schema("target.type must be point, projective or custom")),
        }
    }
}

pub type DegreeVector = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CorrelatorKey {
    pub beta: DegreeVector,
    /// Basis indices, sorted.
    pub insertions: Vec<usize>,
}

impl CorrelatorKey {
    pub fn new(beta: DegreeVector, mut insertions: Vec<usize>) -> Self {
        insertions.sort_unstable();
        CorrelatorKey { beta, insertions }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Marked {
    pub class: usize,
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DescendentKey {
    pub beta: DegreeVector,
    /// Plain insertions, sorted.
    pub insertions: Vec<usize>,
    pub marked: Marked,
}

impl DescendentKey {
    pub fn new(beta: DegreeVector, mut insertions: Vec<usize>, marked: Marked) -> Self {
        insertions.sort_unstable();
        DescendentKey { beta, insertions, marked }
    }
}

impl std::fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<{:?}>_beta={:?}", self.insertions, self.beta)
    }
}

impl std::fmt::Display for DescendentKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "<{:?}, tau_{}(e{})>_beta={:?}",
            self.insertions, self.marked.power, self.marked.class, self.beta
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelatorTable {
    target: Target,
    ring: Arc<KRing>,
    degree_rank: usize,
    entries: BTreeMap<CorrelatorKey, Rational>,
    descendents: BTreeMap<DescendentKey, Rational>,
}

impl CorrelatorTable {
    pub fn new(target: Target, degree_rank: usize) -> Self {
        let ring = Arc::new(target.ring());
        CorrelatorTable { target, ring, degree_rank, entries: BTreeMap::new(), descendents: BTreeMap::new() }
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn ring(&self) -> &Arc<KRing> {
        &self.ring
    }

    pub fn degree_rank(&self) -> usize {
        self.degree_rank
    }

    pub fn entries(&self) -> &BTreeMap<CorrelatorKey, Rational> {
        &self.entries
    }

    pub fn descendent_entries(&self) -> &BTreeMap<DescendentKey, Rational> {
        &self.descendents
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.descendents.is_empty()
    }

    pub fn get(&self, key: &CorrelatorKey) -> Option<&Rational> {
        self.entries.get(key)
    }

    pub fn get_descendent(&self, key: &DescendentKey) -> Option<&Rational> {
        self.descendents.get(key)
    }

    fn validate_key(&self, beta: &[u32], insertions: &[usize], extra: usize) -> Result<(), CorrelatorError> {
        if beta.len() != self.degree_rank {
            return Err(CorrelatorError::SchemaError(format!(
                "degree {beta:?} has length {}, expected {}",
                beta.len(),
                self.degree_rank
            )));
        }
        if let Some(&i) = insertions.iter().find(|&&i| i >= self.ring.rank()) {
            return Err(CorrelatorError::SchemaError(format!("insertion e{i} outside rank {}", self.ring.rank())));
        }
        let n = insertions.len() + extra;
        if beta.iter().all(|&b| b == 0) && n < 3 {
            return Err(CorrelatorError::ModuliNonexistent(n));
        }
        Ok(())
    }

    /// Adds a plain correlator; any repeated key is rejected.
    pub fn insert(&mut self, key: CorrelatorKey, value: Rational) -> Result<(), CorrelatorError> {
        self.validate_key(&key.beta, &key.insertions, 0)?;
        if self.entries.contains_key(&key) {
            return Err(CorrelatorError::DuplicateEntry(key.to_string()));
        }
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn insert_descendent(&mut self, key: DescendentKey, value: Rational) -> Result<(), CorrelatorError> {
        self.validate_key(&key.beta, &key.insertions, 1)?;
        if key.marked.class >= self.ring.rank() {
            return Err(CorrelatorError::SchemaError(format!("marked class e{} outside rank", key.marked.class)));
        }
        if self.descendents.contains_key(&key) {
            return Err(CorrelatorError::DuplicateEntry(key.to_string()));
        }
        self.descendents.insert(key, value);
        Ok(())
    }

    /// Overwrites an existing value; used to build perturbed controls.
    pub fn set(&mut self, key: CorrelatorKey, value: Rational) {
        self.entries.insert(key, value);
    }

    pub fn set_descendent(&mut self, key: DescendentKey, value: Rational) {
        self.descendents.insert(key, value);
    }

    /// Plain correlator value, falling back to the degree-zero formula.
    /// Nonzero degrees must be present in the table.
    pub fn plain_value(&self, key: &CorrelatorKey) -> Result<Option<Rational>, CorrelatorError> {
        if let Some(v) = self.entries.get(key) {
            return Ok(Some(v.clone()));
        }
        if key.beta.iter().all(|&b| b == 0) {
            return beta_zero_correlator(&self.ring, &key.insertions).map(Some);
        }
        Ok(None)
    }

    pub fn descendent_value(&self, key: &DescendentKey) -> Result<Option<Rational>, CorrelatorError> {
        if let Some(v) = self.descendents.get(key) {
            return Ok(Some(v.clone()));
        }
        if key.beta.iter().all(|&b| b == 0) {
            return beta_zero_descendent(&self.ring, &key.insertions, key.marked).map(Some);
        }
        Ok(None)
    }

    pub fn to_json(&self) -> Value {
        let correlators: Vec<Value> = self
            .entries
            .iter()
            .map(|(k, v)| serde_json::json!({"beta": k.beta, "insertions": k.insertions, "value": rational::format(v)}))
            .collect();
        let descendents: Vec<Value> = self
            .descendents
            .iter()
            .map(|(k, v)| {
                serde_json::json!({
                    "beta": k.beta,
                    "insertions": k.insertions,
                    "marked": {"class": k.marked.class, "power": k.marked.power},
                    "value": rational::format(v),
                })
            })
            .collect();
        serde_json::json!({
            "target": self.target.to_json(),
            "degree_rank": self.degree_rank,
            "correlators": correlators,
            "descendent_correlators": descendents,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    target: Value,
    degree_rank: Option<usize>,
    #[serde(default)]
    correlators: Vec<EntryDoc>,
    #[serde(default)]
    descendent_correlators: Vec<DescEntryDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    beta: Vec<i64>,
    insertions: Vec<usize>,
    value: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DescEntryDoc {
    beta: Vec<i64>,
    insertions: Vec<usize>,
    marked: Marked,
    value: String,
}

fn effective(beta: &[i64]) -> Result<DegreeVector, CorrelatorError> {
    if beta.iter().any(|&b| b < 0) {
        return Err(CorrelatorError::IneffectiveDegree(beta.to_vec()));
    }
    Ok(beta.iter().map(|&b| b as u32).collect())
}

/// Parses and validates a correlator document.
pub fn load_correlators(doc: &Value) -> Result<CorrelatorTable, CorrelatorError> {
    let doc: TableDoc =
        serde_json::from_value(doc.clone()).map_err(|e| CorrelatorError::SchemaError(e.to_string()))?;
    let target = Target::from_json(&doc.target)?;
    let degree_rank = doc.degree_rank.unwrap_or_else(|| target.default_degree_rank());
    let mut table = CorrelatorTable::new(target, degree_rank);
    let parse = |s: &str| rational::parse(s).map_err(|e| CorrelatorError::SchemaError(e.to_string()));
    for e in doc.correlators {
        let beta = effective(&e.beta)?;
        table.insert(CorrelatorKey::new(beta, e.insertions), parse(&e.value)?)?;
    }
    for e in doc.descendent_correlators {
        let beta = effective(&e.beta)?;
        table.insert_descendent(DescendentKey::new(beta, e.insertions, e.marked), parse(&e.value)?)?;
    }
    Ok(table)
}

/// `<e_{i1}, .., e_{in}>_{0,n,0} = chi(X, prod e_ik)`.
///
/// The moduli space is `M_{0,n} x X`, the obstruction bundle vanishes in genus
/// zero so its lambda class is 1, and `chi(M_{0,n}, O) = 1`.
pub fn beta_zero_correlator(ring: &KRing, insertions: &[usize]) -> Result<Rational, CorrelatorError> {
    if insertions.len() < 3 {
        return Err(CorrelatorError::ModuliNonexistent(insertions.len()));
    }
    Ok(ring.euler_characteristic(&ring.basis_product(insertions)))
}

/// `<e_{i1}, .., e_{in}, tau_d(e_j)>_{0,n+1,0} = chi(X, prod e) * E(n+1; 0^n, d)`.
pub fn beta_zero_descendent(ring: &KRing, insertions: &[usize], marked: Marked) -> Result<Rational, CorrelatorError> {
    let n = insertions.len() + 1;
    if n < 3 {
        return Err(CorrelatorError::ModuliNonexistent(n));
    }
    let mut all = insertions.to_vec();
    all.push(marked.class);
    let chi = ring.euler_characteristic(&ring.basis_product(&all));
    if chi.is_zero() {
        return Ok(chi);
    }
    let mut exps = vec![0u32; n];
    exps[n - 1] = marked.power;
    let e = descendent_euler(&DescendentIndex::new(exps)?)?;
    Ok(chi * Rational::from_integer(e))
}

/// All multisets of basis indices `0..rank` with exactly `n` elements, sorted.
pub fn multisets(rank: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(rank: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..rank {
            cur.push(i);
            go(rank, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(rank, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Degree-zero table for `target` with every plain correlator of `3..=nmax` points.
pub fn beta_zero_table(target: Target, nmax: usize) -> CorrelatorTable {
    let mut table = CorrelatorTable::new(target.clone(), target.default_degree_rank());
    let rank = table.ring.rank();
    let beta = vec![0; table.degree_rank];
    for n in 3..=nmax {
        for ins in multisets(rank, n) {
            let v = beta_zero_correlator(&table.ring, &ins).expect("n >= 3");
            table.insert(CorrelatorKey::new(beta.clone(), ins), v).expect("fresh key");
        }
    }
    table
}

/// `<e0, .., e0, tau_d(e0)>_{0,n,0} = E(n; 0^(n-1), d)` for `3 <= n <= nmax`, `d <= dmax`.
pub fn point_descendent_table(nmax: usize, dmax: u32) -> Result<CorrelatorTable, CorrelatorError> {
    let mut table = CorrelatorTable::new(Target::Point, 0);
    for n in 3..=nmax {
        for d in 0..=dmax {
            let mut exps = vec![0u32; n];
            exps[n - 1] = d;
            let v = descendent_euler(&DescendentIndex::new(exps)?)?;
            let key = DescendentKey::new(vec![], vec![0; n - 1], Marked { class: 0, power: d });
            table.insert_descendent(key, Rational::from_integer(v))?;
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub with_unit: String,
    pub without_unit: String,
    #[serde(with = "rational::serde_str")]
    pub with_unit_value: Rational,
    #[serde(with = "rational::serde_str")]
    pub without_unit_value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    /// Pairs related by one extra `e0` insertion that were compared.
    pub checked_pairs: usize,
    pub violations: Vec<Violation>,
    pub sn_covariance: &'static str,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Compares every stored pair `<u.., e0>_{n+1}` / `<u..>_n` of plain entries.
pub fn table_consistency_check(table: &CorrelatorTable) -> ConsistencyReport {
    let mut checked_pairs = 0;
    let mut violations = Vec::new();
    for (key, value) in &table.entries {
        let Some(pos) = key.insertions.iter().position(|&i| i == 0) else {
            continue;
        };
        let mut smaller = key.insertions.clone();
        smaller.remove(pos);
        let small_key = CorrelatorKey::new(key.beta.clone(), smaller);
        let Some(small_value) = table.entries.get(&small_key) else {
            continue;
        };
        checked_pairs += 1;
        if small_value != value {
            violations.push(Violation {
                with_unit: key.to_string(),
                without_unit: small_key.to_string(),
                with_unit_value: value.clone(),
                without_unit_value: small_value.clone(),
            });
        }
    }
    ConsistencyReport { checked_pairs, violations, sn_covariance: "structurally enforced (multiset keys)" }
}
