//! Truncated multivariate power series with exact rational coefficients.
//!
//! A series lives in three groups of formal variables:
//!
//! * `t0 .. t{r}`: coordinates on the K-ring, truncated by total t-degree,
//! * `Q0 .. Q{s-1}`: Novikov variables, truncated by total Q-degree,
//! * `q`: the descendent variable (optional), truncated by its degree.
//!
//! Exponent vectors are laid out in exactly that order. Every stored term fits
//! inside the truncation orders of its series; arithmetic drops anything that
//! falls outside. Orders may be negative after repeated differentiation, in
//! which case the series holds no information at all and is identically zero.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("incompatible series: {0} vs {1}")]
    IncompatibleSeries(Vars, Vars),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("series has zero constant term and cannot be inverted")]
    NotInvertible,
    #[error("constant term of the metric is singular")]
    SingularMetric,
    #[error("matrix dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("series document: {0}")]
    Schema(String),
}

/// The variable-set descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vars {
    pub t: usize,
    #[serde(rename = "Q")]
    pub novikov: usize,
    pub q: bool,
}

impl Vars {
    pub fn new(t: usize, novikov: usize, q: bool) -> Self {
        Vars { t, novikov, q }
    }

    /// Length of an exponent vector.
    pub fn len(&self) -> usize {
        self.t + self.novikov + usize::from(self.q)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_of(&self, var: Var) -> Option<usize> {
        match var {
            Var::T(i) if i < self.t => Some(i),
            Var::Novikov(i) if i < self.novikov => Some(self.t + i),
            Var::Q if self.q => Some(self.t + self.novikov),
            _ => None,
        }
    }

    pub fn var_at(&self, pos: usize) -> Var {
        if pos < self.t {
            Var::T(pos)
        } else if pos < self.t + self.novikov {
            Var::Novikov(pos - self.t)
        } else {
            Var::Q
        }
    }
}

impl fmt::Display for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t:{}, Q:{}, q:{})", self.t, self.novikov, self.q)
    }
}

/// Truncation orders per variable group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Orders {
    pub t: i32,
    #[serde(rename = "Q")]
    pub novikov: i32,
    pub q: i32,
}

impl Orders {
    pub fn new(t: i32, novikov: i32, q: i32) -> Self {
        Orders { t, novikov, q }
    }

    pub fn min(self, other: Orders) -> Orders {
        Orders {
            t: self.t.min(other.t),
            novikov: self.novikov.min(other.novikov),
            q: self.q.min(other.q),
        }
    }
}

impl fmt::Display for Orders {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t<={}, Q<={}, q<={})", self.t, self.novikov, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T(usize),
    Novikov(usize),
    Q,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T(i) => write!(f, "t{i}"),
            Var::Novikov(i) => write!(f, "Q{i}"),
            Var::Q => write!(f, "q"),
        }
    }
}

impl FromStr for Var {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SeriesError::UnknownVariable(s.to_string());
        if s == "q" {
            return Ok(Var::Q);
        }
        let (head, tail) = s.split_at(s.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?);
        let idx: usize = tail.parse().map_err(|_| bad())?;
        match head {
            "t" => Ok(Var::T(idx)),
            "Q" => Ok(Var::Novikov(idx)),
            _ => Err(bad()),
        }
    }
}

pub type Exponent = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    vars: Vars,
    orders: Orders,
    terms: BTreeMap<Exponent, Rational>,
}

impl TruncatedSeries {
    pub fn zero(vars: Vars, orders: Orders) -> Self {
        TruncatedSeries { vars, orders, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vars, orders: Orders, c: Rational) -> Self {
        Self::monomial(vars, orders, vec![0; vars.len()], c)
    }

    pub fn one(vars: Vars, orders: Orders) -> Self {
        Self::constant(vars, orders, Rational::one())
    }

    /// `c * x^exp`, or zero when the monomial lies beyond the truncation.
    pub fn monomial(vars: Vars, orders: Orders, exp: Exponent, c: Rational) -> Self {
        assert_eq!(exp.len(), vars.len(), "exponent length does not match descriptor");
        let mut s = Self::zero(vars, orders);
        s.add_term(exp, c);
        s
    }

    pub fn variable(vars: Vars, orders: Orders, var: Var) -> Result<Self, SeriesError> {
        let pos = vars.index_of(var).ok_or_else(|| SeriesError::UnknownVariable(var.to_string()))?;
        let mut exp = vec![0; vars.len()];
        exp[pos] = 1;
        Ok(Self::monomial(vars, orders, exp, Rational::one()))
    }

    /// Builds a series from `(exponent, value)` pairs, summing repeats and
    /// dropping terms beyond the truncation.
    pub fn from_terms<I>(vars: Vars, orders: Orders, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut s = Self::zero(vars, orders);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent length does not match descriptor");
            s.add_term(e, c);
        }
        s
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn orders(&self) -> Orders {
        self.orders
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: &[u32]) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.vars.len()])
    }

    /// Whether `exp` is inside the truncation window of this series.
    pub fn fits(&self, exp: &[u32]) -> bool {
        fits(self.vars, self.orders, exp)
    }

    /// Largest coefficient in absolute value, with the first monomial (in
    /// lexicographic exponent order) attaining it.
    pub fn max_abs_term(&self) -> Option<(&Exponent, &Rational)> {
        let mut best: Option<(&Exponent, &Rational)> = None;
        for (e, c) in &self.terms {
            if best.is_none_or(|(_, b)| c.abs() > b.abs()) {
                best = Some((e, c));
            }
        }
        best
    }

    fn add_term(&mut self, exp: Exponent, c: Rational) {
        if c.is_zero() || !fits(self.vars, self.orders, &exp) {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<Orders, SeriesError> {
        if self.vars != other.vars {
            return Err(SeriesError::IncompatibleSeries(self.vars, other.vars));
        }
        Ok(self.orders.min(other.orders))
    }

    /// Restricts to lower orders (componentwise minimum with `orders`).
    pub fn truncate(&self, orders: Orders) -> Self {
        let orders = self.orders.min(orders);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| fits(self.vars, orders, e))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        TruncatedSeries { vars: self.vars, orders, terms }
    }

    /// Keeps only the terms satisfying `keep`; orders are unchanged.
    pub fn filter(&self, mut keep: impl FnMut(&[u32]) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| keep(e))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        TruncatedSeries { vars: self.vars, orders: self.orders, terms }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        let orders = self.check(other)?;
        let mut out = self.truncate(orders);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        let orders = self.check(other)?;
        let mut out = self.truncate(orders);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let orders = self.check(other)?;
        let mut out = Self::zero(self.vars, orders);
        let v = self.vars;
        let lhs = graded_terms(self, orders);
        let rhs = graded_terms(other, orders);
        let mut acc: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (ea, ca, da) in &lhs {
            for (eb, cb, db) in &rhs {
                if (da[0] + db[0]) as i64 > orders.t as i64
                    || (da[1] + db[1]) as i64 > orders.novikov as i64
                    || (da[2] + db[2]) as i64 > orders.q as i64 && v.q
                {
                    continue;
                }
                let e: Exponent = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let p = *ca * *cb;
                *acc.entry(e).or_insert_with(Rational::zero) += p;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        out.terms = acc;
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars, self.orders);
        }
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        TruncatedSeries { vars: self.vars, orders: self.orders, terms }
    }

    /// Formal partial derivative. The truncation order of the variable's
    /// group drops by one: the top-degree coefficients of the result would
    /// need data the input does not carry.
    pub fn derivative(&self, var: Var) -> Result<Self, SeriesError> {
        let pos = self
            .vars
            .index_of(var)
            .ok_or_else(|| SeriesError::UnknownVariable(var.to_string()))?;
        let mut orders = self.orders;
        match var {
            Var::T(_) => orders.t -= 1,
            Var::Novikov(_) => orders.novikov -= 1,
            Var::Q => orders.q -= 1,
        }
        let mut out = Self::zero(self.vars, orders);
        for (e, c) in &self.terms {
            if e[pos] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[pos] -= 1;
            out.add_term(d, c * Rational::from_integer(e[pos].into()));
        }
        Ok(out)
    }

    /// Multiplicative inverse up to truncation.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = c0.recip();
        // a = c0 (1 + u) with u having no constant term; 1/a = inv0 * sum (-u)^k.
        let one = Self::one(self.vars, self.orders);
        let u = &self.scale(&inv0) - &one;
        let neg_u = -&u;
        let mut sum = one.clone();
        let mut power = one;
        for _ in 0..self.max_total_degree() {
            power = &power * &neg_u;
            if power.is_zero() {
                break;
            }
            sum = &sum + &power;
        }
        Ok(sum.scale(&inv0))
    }

    /// Upper bound on the total degree of any monomial that fits.
    pub fn max_total_degree(&self) -> u32 {
        let mut d = self.orders.t.max(0) + self.orders.novikov.max(0);
        if self.vars.q {
            d += self.orders.q.max(0);
        }
        d as u32
    }

    /// Adds the descendent variable `q` (if absent) with truncation order `m`.
    /// Existing terms get q-exponent zero.
    pub fn with_q(&self, m: i32) -> Self {
        if self.vars.q {
            return self.truncate(Orders { q: m, ..self.orders });
        }
        let vars = Vars { q: true, ..self.vars };
        let orders = Orders { q: m, ..self.orders };
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e.push(0);
                (e, c.clone())
            })
            .filter(|(e, _)| fits(vars, orders, e))
            .collect();
        TruncatedSeries { vars, orders, terms }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SeriesDoc::from(self)).expect("series document is always serialisable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, SeriesError> {
        let doc: SeriesDoc =
            serde_json::from_value(v.clone()).map_err(|e| SeriesError::Schema(e.to_string()))?;
        doc.try_into()
    }
}

fn graded_terms(s: &TruncatedSeries, orders: Orders) -> Vec<(&Exponent, &Rational, [u32; 3])> {
    s.terms
        .iter()
        .filter(|(e, _)| fits(s.vars, orders, e))
        .map(|(e, c)| (e, c, group_degrees(s.vars, e)))
        .collect()
}

/// Total degree in each group: (t, Q, q).
fn group_degrees(vars: Vars, exp: &[u32]) -> [u32; 3] {
    let t: u32 = exp[..vars.t].iter().sum();
    let nov: u32 = exp[vars.t..vars.t + vars.novikov].iter().sum();
    let q = if vars.q { exp[vars.t + vars.novikov] } else { 0 };
    [t, nov, q]
}

pub(crate) fn fits(vars: Vars, orders: Orders, exp: &[u32]) -> bool {
    let [t, nov, q] = group_degrees(vars, exp);
    (t as i64) <= orders.t as i64
        && (nov as i64) <= orders.novikov as i64
        && (!vars.q || (q as i64) <= orders.q as i64)
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        self.checked_add(rhs).expect("series descriptors must match")
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.checked_sub(rhs).expect("series descriptors must match")
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        self.checked_mul(rhs).expect("series descriptors must match")
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O{}", self.orders);
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (pos, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*{}", self.vars.var_at(pos))?,
                    _ => write!(f, "*{}^{p}", self.vars.var_at(pos))?,
                }
            }
        }
        write!(f, " + O{}", self.orders)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesDoc {
    vars: Vars,
    trunc: Orders,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    exp: Vec<u32>,
    #[serde(with = "rational::serde_str")]
    value: Rational,
}

impl From<&TruncatedSeries> for SeriesDoc {
    fn from(s: &TruncatedSeries) -> Self {
        SeriesDoc {
            vars: s.vars,
            trunc: s.orders,
            terms: s
                .terms
                .iter()
                .map(|(e, c)| TermDoc { exp: e.clone(), value: c.clone() })
                .collect(),
        }
    }
}

impl TryFrom<SeriesDoc> for TruncatedSeries {
    type Error = SeriesError;

    fn try_from(doc: SeriesDoc) -> Result<Self, SeriesError> {
        let mut s = TruncatedSeries::zero(doc.vars, doc.trunc);
        for t in doc.terms {
            if t.exp.len() != doc.vars.len() {
                return Err(SeriesError::Schema(format!(
                    "exponent {:?} has length {}, expected {}",
                    t.exp,
                    t.exp.len(),
                    doc.vars.len()
                )));
            }
            if !fits(doc.vars, doc.trunc, &t.exp) {
                return Err(SeriesError::Schema(format!("exponent {:?} exceeds truncation", t.exp)));
            }
            if s.terms.contains_key(&t.exp) {
                return Err(SeriesError::Schema(format!("duplicate exponent {:?}", t.exp)));
            }
            s.add_term(t.exp, t.value);
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn t1(order: i32) -> (Vars, Orders) {
        (Vars::new(1, 0, false), Orders::new(order, 0, 0))
    }

    fn poly(vars: Vars, orders: Orders, coeffs: &[(Vec<u32>, Rational)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(vars, orders, coeffs.iter().cloned())
    }

    /// Sum_{k<=n} x^k / k! in a single t variable.
    fn exp_series(order: i32, scale: i64) -> TruncatedSeries {
        let (v, o) = t1(order);
        let mut fact = 1i64;
        let mut pow = 1i64;
        let mut terms = Vec::new();
        for k in 0..=order {
            if k > 0 {
                fact *= k as i64;
                pow *= scale;
            }
            terms.push((vec![k as u32], frac(pow, fact)));
        }
        poly(v, o, &terms)
    }

    #[test]
    fn difference_of_squares() {
        let (v, o) = t1(2);
        let a = poly(v, o, &[(vec![0], int(1)), (vec![1], int(1))]);
        let b = poly(v, o, &[(vec![0], int(1)), (vec![1], int(-1))]);
        assert_eq!(&a * &b, poly(v, o, &[(vec![0], int(1)), (vec![2], int(-1))]));

        let lo = Orders::new(1, 0, 0);
        let p = &a.truncate(lo) * &b.truncate(lo);
        assert_eq!(p, TruncatedSeries::one(v, lo));
    }

    #[test]
    fn exponential_squared() {
        // (sum t^k/k!)^2 = sum 2^k t^k / k! at T=4; hand-expanded: 1, 2, 2, 4/3, 2/3.
        let e = exp_series(4, 1);
        let sq = &e * &e;
        let (v, o) = t1(4);
        let expected = poly(
            v,
            o,
            &[
                (vec![0], int(1)),
                (vec![1], int(2)),
                (vec![2], int(2)),
                (vec![3], frac(4, 3)),
                (vec![4], frac(2, 3)),
            ],
        );
        assert_eq!(sq, expected);
        assert_eq!(sq, exp_series(4, 2));
    }

    #[test]
    fn mismatched_descriptors_are_rejected() {
        let a = TruncatedSeries::one(Vars::new(1, 0, false), Orders::new(2, 0, 0));
        let b = TruncatedSeries::one(Vars::new(2, 0, false), Orders::new(2, 0, 0));
        assert!(matches!(a.checked_mul(&b), Err(SeriesError::IncompatibleSeries(..))));
        assert!(matches!(a.checked_add(&b), Err(SeriesError::IncompatibleSeries(..))));
    }

    #[test]
    fn derivatives() {
        let v = Vars::new(2, 0, false);
        let o = Orders::new(3, 0, 0);
        let s = poly(v, o, &[(vec![2, 1], int(1))]);
        let d = s.derivative(Var::T(0)).unwrap();
        assert_eq!(d.orders().t, 2);
        assert_eq!(d, poly(v, Orders::new(2, 0, 0), &[(vec![1, 1], int(2))]));

        let c = TruncatedSeries::constant(v, o, int(7));
        assert!(c.derivative(Var::T(1)).unwrap().is_zero());
        assert!(matches!(c.derivative(Var::Q), Err(SeriesError::UnknownVariable(_))));
        assert!(matches!(c.derivative(Var::T(2)), Err(SeriesError::UnknownVariable(_))));

        assert_eq!(exp_series(5, 1).derivative(Var::T(0)).unwrap(), exp_series(4, 1));
    }

    #[test]
    fn reciprocals() {
        let v = Vars::new(0, 0, true);
        let o = Orders::new(0, 0, 3);
        let one_minus_q = poly(v, o, &[(vec![0], int(1)), (vec![1], int(-1))]);
        let geo = one_minus_q.reciprocal().unwrap();
        assert_eq!(geo, poly(v, o, &(0..=3).map(|k| (vec![k], int(1))).collect::<Vec<_>>()));

        let two = TruncatedSeries::constant(v, o, int(2));
        assert_eq!(two.reciprocal().unwrap(), TruncatedSeries::constant(v, o, frac(1, 2)));

        let a = exp_series(2, 1);
        let b = a.reciprocal().unwrap();
        assert_eq!(b, exp_series(2, -1));
        assert_eq!(&a * &b, TruncatedSeries::one(a.vars(), a.orders()));

        let z = TruncatedSeries::variable(v, o, Var::Q).unwrap();
        assert_eq!(z.reciprocal(), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn variable_names_parse() {
        assert_eq!("t12".parse::<Var>().unwrap(), Var::T(12));
        assert_eq!("Q0".parse::<Var>().unwrap(), Var::Novikov(0));
        assert_eq!("q".parse::<Var>().unwrap(), Var::Q);
        assert!("x1".parse::<Var>().is_err());
        assert!("t".parse::<Var>().is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let v = Vars::new(2, 1, true);
        let o = Orders::new(3, 1, 2);
        let s = poly(v, o, &[(vec![1, 0, 1, 2], frac(-3, 4)), (vec![0, 0, 0, 0], int(5))]);
        let j = s.to_json();
        assert_eq!(j["terms"][0]["value"], "5");
        assert_eq!(j["vars"]["Q"], 1);
        assert_eq!(TruncatedSeries::from_json(&j).unwrap(), s);

        let bad = serde_json::json!({
            "vars": {"t": 1, "Q": 0, "q": false},
            "trunc": {"t": 1, "Q": 0, "q": 0},
            "terms": [{"exp": [2], "value": "1"}]
        });
        assert!(matches!(TruncatedSeries::from_json(&bad), Err(SeriesError::Schema(_))));
        let bad = serde_json::json!({
            "vars": {"t": 1, "Q": 0, "q": false},
            "trunc": {"t": 1, "Q": 0, "q": 0},
            "terms": [{"exp": [1], "value": "1/0"}]
        });
        assert!(TruncatedSeries::from_json(&bad).is_err());
    }

    fn arb_series(vars: Vars, orders: Orders) -> impl Strategy<Value = TruncatedSeries> {
        let n = vars.len();
        prop::collection::vec(
            (prop::collection::vec(0u32..4, n), -5i64..6, 1i64..4),
            0..8,
        )
        .prop_map(move |raw| {
            TruncatedSeries::from_terms(
                vars,
                orders,
                raw.into_iter().map(|(e, p, q)| (e, frac(p, q))),
            )
        })
    }

    fn ring() -> (Vars, Orders) {
        (Vars::new(2, 1, true), Orders::new(3, 2, 2))
    }

    proptest! {
        #[test]
        fn ring_axioms(
            a in arb_series(ring().0, ring().1),
            b in arb_series(ring().0, ring().1),
            c in arb_series(ring().0, ring().1),
        ) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&(&a + &b) - &b) == a);
        }

        #[test]
        fn reciprocal_and_derivative_commute_with_truncation(
            a in arb_series(ring().0, Orders::new(5, 3, 3)),
            c0 in 1i64..5,
        ) {
            let (v, _) = ring();
            let hi = Orders::new(5, 3, 3);
            let lo = Orders::new(3, 2, 1);
            let a = &a.filter(|e| e.iter().any(|&x| x > 0))
                + &TruncatedSeries::constant(v, hi, int(c0));
            let r = a.reciprocal().unwrap();
            prop_assert_eq!(&a * &r, TruncatedSeries::one(v, hi));
            prop_assert_eq!(r.truncate(lo), a.truncate(lo).reciprocal().unwrap());
            for var in [Var::T(0), Var::T(1), Var::Novikov(0), Var::Q] {
                let d_hi = a.derivative(var).unwrap();
                let d_lo = a.truncate(lo).derivative(var).unwrap();
                prop_assert_eq!(d_hi.truncate(d_lo.orders()), d_lo);
            }
        }

        #[test]
        fn json_round_trip(a in arb_series(ring().0, ring().1)) {
            prop_assert_eq!(TruncatedSeries::from_json(&a.to_json()).unwrap(), a);
        }
    }
}
