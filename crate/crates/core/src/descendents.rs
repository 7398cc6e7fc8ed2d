//! Genus-zero K-theoretic descendents of a point.
//!
//! `E(n; d1..dn) = chi(M_{0,n}, L1^d1 (x) ... (x) Ln^dn)` is computed by
//! forgetting one marked point at a time. Pushing forward along the map that
//! forgets point `j` replaces `L_i^{d_i}` by the pull-back twisted by
//! `O(d_i D_i)`, whose direct image is filtered by pole order with graded
//! pieces `l_i^{-k}`, `k = 0..d_i`. That gives two rules:
//!
//! * string (`d_j = 0`): `E = E(d') + sum_{i != j} sum_{k=1}^{d_i} E(d' with d_i - k)`
//! * dilaton (`d_j = 1`): the same with the leading term weighted by `n - 2`,
//!   the rank of the direct image of `L_{n+1} = omega(sum D_i)` in genus zero.
//!
//! Here `d'` is `d` with entry `j` removed and `n` counts points before
//! forgetting. `M_{0,3}` is a point, so `E(3; d) = 1`. When every exponent is
//! at least two (and `n >= 4`) neither rule applies and the engine reports
//! [`DescendentError::NotReducible`].

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DescendentError {
    #[error("M_(0,{0}) does not exist; need at least three marked points")]
    TooFewPoints(usize),
    #[error("index {0:?} has no exponent equal to 0 or 1 and cannot be reduced")]
    NotReducible(Vec<u32>),
    #[error("reduction orders disagree at {exponents:?}: {values:?}")]
    Nonconfluent { exponents: Vec<u32>, values: Vec<(usize, BigInt)> },
}

/// A point count with a multiset of cotangent-line exponents, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DescendentIndex {
    exponents: Vec<u32>,
}

impl DescendentIndex {
    pub fn new(exponents: impl Into<Vec<u32>>) -> Result<Self, DescendentError> {
        let mut exponents = exponents.into();
        if exponents.len() < 3 {
            return Err(DescendentError::TooFewPoints(exponents.len()));
        }
        exponents.sort_unstable();
        Ok(DescendentIndex { exponents })
    }

    pub fn n(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }
}

/// Positions at which a string (`0`) or dilaton (`1`) step applies.
pub fn admissible_points(exponents: &[u32]) -> Vec<usize> {
    exponents.iter().enumerate().filter(|(_, &d)| d <= 1).map(|(i, _)| i).collect()
}

/// Smallest position with exponent 0, else smallest with exponent 1.
pub fn canonical_point(exponents: &[u32]) -> Option<usize> {
    exponents
        .iter()
        .position(|&d| d == 0)
        .or_else(|| exponents.iter().position(|&d| d == 1))
}

/// One forgetful step at position `j`, with `eval` supplying the values on
/// `n - 1` points.
pub fn reduce_at<F>(exponents: &[u32], j: usize, mut eval: F) -> Result<BigInt, DescendentError>
where
    F: FnMut(&[u32]) -> Result<BigInt, DescendentError>,
{
    let n = exponents.len();
    let dj = exponents[j];
    assert!(dj <= 1, "position {j} is not admissible");
    let mut rest: Vec<u32> = exponents.to_vec();
    rest.remove(j);

    let weight = if dj == 0 { BigInt::one() } else { BigInt::from(n as i64 - 2) };
    let mut total = weight * eval(&rest)?;
    for i in 0..rest.len() {
        let di = rest[i];
        for k in 1..=di {
            rest[i] = di - k;
            total += eval(&rest)?;
        }
        rest[i] = di;
    }
    Ok(total)
}

/// Memoised evaluator. The memo is the only shared mutable state; lookups
/// and inserts are atomic, and an entry is published only once complete.
#[derive(Debug, Default)]
pub struct DescendentEngine {
    memo: RwLock<HashMap<DescendentIndex, BigInt>>,
}

impl DescendentEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn euler(&self, idx: &DescendentIndex) -> Result<BigInt, DescendentError> {
        if idx.n() == 3 {
            return Ok(BigInt::one());
        }
        if let Some(v) = self.cached(idx) {
            return Ok(v);
        }
        let exps = idx.exponents();
        let j = canonical_point(exps).ok_or_else(|| DescendentError::NotReducible(exps.to_vec()))?;
        let value = reduce_at(exps, j, |child| self.euler(&DescendentIndex::new(child.to_vec())?))?;
        // Concurrent computations of the same key produce the same value.
        self.memo
            .write()
            .expect("descendent memo poisoned")
            .entry(idx.clone())
            .or_insert_with(|| value.clone());
        Ok(value)
    }

    pub fn cached(&self, idx: &DescendentIndex) -> Option<BigInt> {
        self.memo.read().expect("descendent memo poisoned").get(idx).cloned()
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().expect("descendent memo poisoned").len()
    }
}

/// Process-wide engine used by the free functions.
pub fn shared_engine() -> &'static DescendentEngine {
    static ENGINE: OnceLock<DescendentEngine> = OnceLock::new();
    ENGINE.get_or_init(DescendentEngine::new)
}

pub fn descendent_euler(idx: &DescendentIndex) -> Result<BigInt, DescendentError> {
    shared_engine().euler(idx)
}

/// `M_{0,4}` is `P^1` and each `L_i` has degree one, so
/// `E(4; d) = chi(P^1, O(d1+d2+d3+d4))`.
pub fn oracle_n4(d: [u32; 4]) -> BigInt {
    BigInt::from(d.iter().map(|&x| x as u64).sum::<u64>() + 1)
}

/// `[E(n; 0, .., 0, d)]` for `d = 0..=dmax`.
pub fn one_descendent_profile(n: usize, dmax: u32) -> Result<Vec<BigInt>, DescendentError> {
    (0..=dmax)
        .map(|d| {
            let mut exps = vec![0; n];
            if n > 0 {
                exps[n - 1] = d;
            }
            descendent_euler(&DescendentIndex::new(exps)?)
        })
        .collect()
}

/// `binom(n + d - 3, d)`, the closed form of the one-descendent family.
pub fn one_descendent_closed_form(n: usize, d: u32) -> BigInt {
    binomial(BigInt::from(n as u64 + d as u64 - 3), BigInt::from(d))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfluenceStats {
    /// Distinct exponent tuples visited (unsorted, so no symmetry is assumed).
    pub nodes: usize,
    /// Nodes where at least two reduction points were compared.
    pub branch_points: usize,
}

/// Evaluates `exponents` along every admissible reduction point at every
/// node of the reduction tree and fails if any two choices disagree. By
/// induction on `n` this shows every complete reduction order gives the same
/// value. Tuples are kept in the given order; no `S_n` symmetry is used.
pub fn verify_confluence(exponents: &[u32]) -> Result<(BigInt, ConfluenceStats), DescendentError> {
    fn go(
        exps: &[u32],
        memo: &mut HashMap<Vec<u32>, BigInt>,
        stats: &mut ConfluenceStats,
    ) -> Result<BigInt, DescendentError> {
        if exps.len() < 3 {
            return Err(DescendentError::TooFewPoints(exps.len()));
        }
        if exps.len() == 3 {
            return Ok(BigInt::one());
        }
        if let Some(v) = memo.get(exps) {
            return Ok(v.clone());
        }
        let points = admissible_points(exps);
        if points.is_empty() {
            return Err(DescendentError::NotReducible(exps.to_vec()));
        }
        let mut values = Vec::with_capacity(points.len());
        for &j in &points {
            values.push((j, reduce_at(exps, j, |c| go(c, memo, stats))?));
        }
        stats.nodes += 1;
        if values.len() > 1 {
            stats.branch_points += 1;
        }
        if values.iter().any(|(_, v)| v != &values[0].1) {
            return Err(DescendentError::Nonconfluent { exponents: exps.to_vec(), values });
        }
        let v = values.swap_remove(0).1;
        memo.insert(exps.to_vec(), v.clone());
        Ok(v)
    }

    let mut memo = HashMap::new();
    let mut stats = ConfluenceStats::default();
    let v = go(exponents, &mut memo, &mut stats)?;
    Ok((v, stats))
}

impl std::fmt::Display for DescendentIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(u32::to_string).collect();
        write!(f, "({}; {})", self.n(), parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(exps: &[u32]) -> Result<BigInt, DescendentError> {
        descendent_euler(&DescendentIndex::new(exps.to_vec())?)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(e(&[2, 5, 9]).unwrap(), BigInt::from(1));
        assert_eq!(e(&[2, 3, 0, 1]).unwrap(), BigInt::from(7));
        assert_eq!(e(&[0, 0, 0, 0, 2]).unwrap(), BigInt::from(6));
        assert_eq!(oracle_n4([0, 0, 0, 0]), BigInt::from(1));
        assert_eq!(oracle_n4([1, 0, 0, 0]), BigInt::from(2));
        assert_eq!(oracle_n4([3, 3, 0, 1]), BigInt::from(8));
    }

    #[test]
    fn kapranov_model_values() {
        // M_{0,5} with L1 the pull-back of O(1) from P^2: chi = 3 and 6.
        assert_eq!(e(&[1, 0, 0, 0, 0]).unwrap(), BigInt::from(3));
        assert_eq!(e(&[2, 0, 0, 0, 0]).unwrap(), BigInt::from(6));
    }

    #[test]
    fn errors() {
        assert_eq!(DescendentIndex::new(vec![0, 0]), Err(DescendentError::TooFewPoints(2)));
        assert_eq!(e(&[2, 2, 2, 2]), Err(DescendentError::NotReducible(vec![2, 2, 2, 2])));
        // Reducible at the top but a child is not.
        assert!(matches!(e(&[0, 2, 2, 2, 2]), Err(DescendentError::NotReducible(_))));
    }

    #[test]
    fn profiles() {
        assert!(one_descendent_profile(3, 6).unwrap().iter().all(|v| v.is_one()));
        let p4 = one_descendent_profile(4, 6).unwrap();
        assert_eq!(p4, (0..=6).map(|d| BigInt::from(d + 1)).collect::<Vec<_>>());
        assert_eq!(one_descendent_profile(5, 2).unwrap()[2], BigInt::from(6));
    }

    #[test]
    fn fundamental_class_shadow() {
        for n in 3..10 {
            assert!(e(&vec![0; n]).unwrap().is_one());
        }
    }

    #[test]
    fn memo_matches_fresh_engine() {
        let warm = DescendentEngine::new();
        let cold_values: Vec<_> = [[0u32, 1, 3, 4, 2], [1, 1, 1, 1, 1], [0, 0, 4, 4, 4]]
            .iter()
            .map(|x| DescendentEngine::new().euler(&DescendentIndex::new(x.to_vec()).unwrap()))
            .collect();
        for _ in 0..2 {
            for (x, cold) in [[0u32, 1, 3, 4, 2], [1, 1, 1, 1, 1], [0, 0, 4, 4, 4]].iter().zip(&cold_values) {
                assert_eq!(&warm.euler(&DescendentIndex::new(x.to_vec()).unwrap()), cold);
            }
        }
        assert!(warm.memo_len() > 0);
    }

    #[test]
    fn concurrent_queries_agree() {
        let engine = DescendentEngine::new();
        let idx: Vec<DescendentIndex> = (0..6u32)
            .map(|d| DescendentIndex::new(vec![0, 1, d, 3, 0, 2, 1]).unwrap())
            .collect();
        let fresh: Vec<_> = idx.iter().map(|i| DescendentEngine::new().euler(i).unwrap()).collect();
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|_| s.spawn(|| idx.iter().map(|i| engine.euler(i).unwrap()).collect::<Vec<_>>()))
                .collect();
            for h in handles {
                assert_eq!(h.join().unwrap(), fresh);
            }
        });
    }

    #[test]
    fn confluence_catches_disagreement_only_when_present() {
        let (v, stats) = verify_confluence(&[1, 0, 3, 0, 1, 2]).unwrap();
        assert_eq!(v, e(&[1, 0, 3, 0, 1, 2]).unwrap());
        assert!(stats.branch_points > 0);
    }

    proptest! {
        #[test]
        fn symmetric_in_exponents(mut d in prop::collection::vec(0u32..4, 4..7), seed in any::<u64>()) {
            d[0] = seed as u32 % 2;
            let a = e(&d);
            let mut p = d.clone();
            let k = p.len();
            p.rotate_left((seed % k as u64) as usize);
            p.swap(0, k - 1);
            prop_assert_eq!(a, e(&p));
        }
    }
}
