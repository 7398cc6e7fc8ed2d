//! Finite-rank presentations of K(X) with the Euler-characteristic pairing.
//!
//! A presentation is a basis `e0 .. er` with `e0` the class of the structure
//! sheaf, structure constants `e_i e_j = sum_k m[i][j][k] e_k`, and the
//! pairing matrix `g[i][j] = chi(e_i e_j)`. [`KRing::new`] refuses anything
//! that is not a commutative associative unital algebra with a symmetric,
//! nondegenerate, invariant pairing.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KRingError {
    #[error("malformed presentation: {0}")]
    Shape(String),
    #[error("multiplication is not commutative at (e{0}, e{1})")]
    NonCommutative(usize, usize),
    #[error("multiplication is not associative at (e{0}, e{1}, e{2})")]
    NonAssociative(usize, usize, usize),
    #[error("e0 is not a unit (fails at e{0})")]
    NoUnit(usize),
    #[error("pairing is not symmetric at (e{0}, e{1})")]
    AsymmetricPairing(usize, usize),
    #[error("pairing is singular")]
    SingularPairing,
    #[error("pairing is not invariant: g(e{0} e{1}, e{2}) != g(e{0}, e{1} e{2})")]
    NotFrobenius(usize, usize, usize),
    #[error("classes belong to different rings")]
    RingMismatch,
    #[error("ring document: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRing {
    labels: Vec<String>,
    mult: Vec<Vec<Vec<Rational>>>,
    pairing: Vec<Vec<Rational>>,
}

impl KRing {
    pub fn new(
        labels: Vec<String>,
        mult: Vec<Vec<Vec<Rational>>>,
        pairing: Vec<Vec<Rational>>,
    ) -> Result<Self, KRingError> {
        let r = labels.len();
        if r == 0 {
            return Err(KRingError::Shape("rank must be positive".into()));
        }
        let cube_ok = mult.len() == r && mult.iter().all(|p| p.len() == r && p.iter().all(|q| q.len() == r));
        if !cube_ok {
            return Err(KRingError::Shape(format!("multiplication table must be {r}x{r}x{r}")));
        }
        if pairing.len() != r || pairing.iter().any(|row| row.len() != r) {
            return Err(KRingError::Shape(format!("pairing must be {r}x{r}")));
        }
        let ring = KRing { labels, mult, pairing };
        ring.validate()?;
        Ok(ring)
    }

    fn validate(&self) -> Result<(), KRingError> {
        let r = self.rank();
        for j in 0..r {
            for k in 0..r {
                let delta = if j == k { Rational::one() } else { Rational::zero() };
                if self.mult[0][j][k] != delta || self.mult[j][0][k] != delta {
                    return Err(KRingError::NoUnit(j));
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                if self.mult[i][j] != self.mult[j][i] {
                    return Err(KRingError::NonCommutative(i, j));
                }
                if self.pairing[i][j] != self.pairing[j][i] {
                    return Err(KRingError::AsymmetricPairing(i, j));
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let left = self.mul(&self.mult[i][j], &self.basis(k));
                    let right = self.mul(&self.basis(i), &self.mult[j][k]);
                    if left != right {
                        return Err(KRingError::NonAssociative(i, j, k));
                    }
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    if self.pair(&self.mult[i][j], &self.basis(k)) != self.pair(&self.basis(i), &self.mult[j][k]) {
                        return Err(KRingError::NotFrobenius(i, j, k));
                    }
                }
            }
        }
        if rational::invert_matrix(&self.pairing).is_none() {
            return Err(KRingError::SingularPairing);
        }
        Ok(())
    }

    /// K(pt): rank one, `e0 * e0 = e0`, `g = [1]`.
    pub fn point() -> Self {
        KRing::new(vec!["O".into()], vec![vec![vec![Rational::one()]]], vec![vec![Rational::one()]])
            .expect("point presentation is valid")
    }

    /// K(P^n) in the basis `alpha^i`, `alpha = 1 - [O(-1)]`, with `alpha^(n+1) = 0`.
    pub fn projective_space(n: u32) -> Self {
        assert!(n >= 1, "projective space needs n >= 1");
        let r = n as usize + 1;
        let mut mult = vec![vec![vec![Rational::zero(); r]; r]; r];
        for i in 0..r {
            for j in 0..r {
                if i + j < r {
                    mult[i][j][i + j] = Rational::one();
                }
            }
        }
        let pairing = (0..r)
            .map(|i| (0..r).map(|j| chi_alpha_power(n, (i + j) as u32)).collect())
            .collect();
        let labels = (0..r)
            .map(|i| match i {
                0 => "O".to_string(),
                1 => "alpha".to_string(),
                _ => format!("alpha^{i}"),
            })
            .collect();
        KRing::new(labels, mult, pairing).expect("projective presentation is valid")
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `m[i][j][k]`, the coefficient of `e_k` in `e_i e_j`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.mult[i][j][k]
    }

    pub fn pairing_matrix(&self) -> &[Vec<Rational>] {
        &self.pairing
    }

    pub fn basis(&self, i: usize) -> Vec<Rational> {
        (0..self.rank()).map(|k| if k == i { Rational::one() } else { Rational::zero() }).collect()
    }

    /// Product of coordinate vectors.
    pub fn mul(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let r = self.rank();
        let mut out = vec![Rational::zero(); r];
        for (i, ui) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, vj) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let uv = ui * vj;
                for (k, m) in self.mult[i][j].iter().enumerate() {
                    if !m.is_zero() {
                        out[k] += &uv * m;
                    }
                }
            }
        }
        out
    }

    pub fn pair(&self, u: &[Rational], v: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (i, ui) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, vj) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                acc += ui * vj * &self.pairing[i][j];
            }
        }
        acc
    }

    /// `chi(X, u) = (u, e0)`.
    pub fn euler_characteristic(&self, u: &[Rational]) -> Rational {
        self.pair(u, &self.basis(0))
    }

    /// Coordinates of `prod_k e_{indices[k]}`; the empty product is `e0`.
    pub fn basis_product(&self, indices: &[usize]) -> Vec<Rational> {
        indices.iter().fold(self.basis(0), |acc, &i| self.mul(&acc, &self.basis(i)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = RingDoc {
            rank: self.rank(),
            labels: self.labels.clone(),
            mult: self
                .mult
                .iter()
                .map(|p| p.iter().map(|q| q.iter().map(rational::format).collect()).collect())
                .collect(),
            pairing: self.pairing.iter().map(|row| row.iter().map(rational::format).collect()).collect(),
        };
        serde_json::to_value(doc).expect("ring document is always serialisable")
    }

    /// Loads a presentation and runs the full constructor validation.
    pub fn from_json(v: &serde_json::Value) -> Result<Self, KRingError> {
        let doc: RawRingDoc = serde_json::from_value(v.clone()).map_err(|e| KRingError::Schema(e.to_string()))?;
        if doc.labels.len() != doc.rank {
            return Err(KRingError::Schema(format!("{} labels for rank {}", doc.labels.len(), doc.rank)));
        }
        let conv = |x: rational::serde_str::RawRational| x.into_rational().map_err(|e| KRingError::Schema(e.to_string()));
        let mult = doc
            .mult
            .into_iter()
            .map(|p| p.into_iter().map(|q| q.into_iter().map(conv).collect()).collect())
            .collect::<Result<Vec<Vec<Vec<_>>>, _>>()?;
        let pairing = doc
            .pairing
            .into_iter()
            .map(|row| row.into_iter().map(conv).collect())
            .collect::<Result<Vec<Vec<_>>, _>>()?;
        KRing::new(doc.labels, mult, pairing)
    }
}

#[derive(Serialize)]
struct RingDoc {
    rank: usize,
    labels: Vec<String>,
    mult: Vec<Vec<Vec<String>>>,
    pairing: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct RawRingDoc {
    rank: usize,
    labels: Vec<String>,
    mult: Vec<Vec<Vec<rational::serde_str::RawRational>>>,
    pairing: Vec<Vec<rational::serde_str::RawRational>>,
}

/// `chi(P^n, O(k)) = (k+1)(k+2)...(k+n)/n!`, valid for every integer `k`.
pub fn euler_char_line_bundle(n: u32, k: i64) -> Rational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 1..=n as i64 {
        num *= BigInt::from(k + i);
        den *= BigInt::from(i);
    }
    Rational::new(num, den)
}

/// `chi(P^n, alpha^p)` by expanding `(1 - O(-1))^p` into line bundles.
fn chi_alpha_power(n: u32, p: u32) -> Rational {
    (0..=p)
        .map(|i| {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let c = binomial(BigInt::from(p), BigInt::from(i)) * sign;
            Rational::from_integer(c) * euler_char_line_bundle(n, -(i as i64))
        })
        .fold(Rational::zero(), |a, b| a + b)
}

/// A class `sum_i c_i e_i` tied to its ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KClass {
    ring: Arc<KRing>,
    coords: Vec<Rational>,
}

impl KClass {
    pub fn new(ring: Arc<KRing>, coords: Vec<Rational>) -> Result<Self, KRingError> {
        if coords.len() != ring.rank() {
            return Err(KRingError::Shape(format!("class has {} coordinates, ring rank {}", coords.len(), ring.rank())));
        }
        Ok(KClass { ring, coords })
    }

    pub fn basis(ring: &Arc<KRing>, i: usize) -> Self {
        KClass { coords: ring.basis(i), ring: Arc::clone(ring) }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    fn same_ring(&self, other: &KClass) -> Result<(), KRingError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(KRingError::RingMismatch)
        }
    }

    pub fn mul(&self, other: &KClass) -> Result<KClass, KRingError> {
        self.same_ring(other)?;
        Ok(KClass { coords: self.ring.mul(&self.coords, &other.coords), ring: Arc::clone(&self.ring) })
    }

    pub fn pair(&self, other: &KClass) -> Result<Rational, KRingError> {
        self.same_ring(other)?;
        Ok(self.ring.pair(&self.coords, &other.coords))
    }
}
