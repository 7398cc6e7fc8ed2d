//! Square matrices of truncated series.
//!
//! Two independent routes to the inverse are provided. [`SeriesMatrix::inverse_geometric`]
//! splits `G = g + F` into its constant part and a remainder with no constant
//! term and sums the alternating chain series
//!
//! ```text
//! G^-1 = g^-1 + sum_{m>=1} (-1)^m (g^-1 F)^m g^-1
//! ```
//!
//! which terminates because `(g^-1 F)^m` starts in total degree `m`.
//! [`SeriesMatrix::inverse_direct`] runs Gauss-Jordan elimination over the
//! series ring. Both must agree coefficient for coefficient.

use num_traits::{One, Zero};

use crate::rational::{self, Rational};
use crate::series::{Orders, SeriesError, TruncatedSeries, Var, Vars};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    dim: usize,
    entries: Vec<TruncatedSeries>,
}

impl SeriesMatrix {
    /// Row-major construction. All entries must share one descriptor; orders
    /// are lowered to their common minimum.
    pub fn from_rows(rows: Vec<Vec<TruncatedSeries>>) -> Result<Self, SeriesError> {
        let dim = rows.len();
        assert!(dim > 0, "empty series matrix");
        let vars = rows[0][0].vars();
        let mut orders = rows[0][0].orders();
        for row in &rows {
            if row.len() != dim {
                return Err(SeriesError::DimensionMismatch(dim, row.len()));
            }
            for s in row {
                if s.vars() != vars {
                    return Err(SeriesError::IncompatibleSeries(vars, s.vars()));
                }
                orders = orders.min(s.orders());
            }
        }
        let entries = rows.into_iter().flatten().map(|s| s.truncate(orders)).collect();
        Ok(SeriesMatrix { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> TruncatedSeries) -> Result<Self, SeriesError> {
        Self::from_rows((0..dim).map(|i| (0..dim).map(|j| f(i, j)).collect()).collect())
    }

    pub fn constant(m: &[Vec<Rational>], vars: Vars, orders: Orders) -> Self {
        let dim = m.len();
        let entries = m
            .iter()
            .flat_map(|row| row.iter().map(|c| TruncatedSeries::constant(vars, orders, c.clone())))
            .collect();
        SeriesMatrix { dim, entries }
    }

    pub fn identity(dim: usize, vars: Vars, orders: Orders) -> Self {
        let m: Vec<Vec<Rational>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Self::constant(&m, vars, orders)
    }

    pub fn zero(dim: usize, vars: Vars, orders: Orders) -> Self {
        SeriesMatrix { dim, entries: vec![TruncatedSeries::zero(vars, orders); dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vars(&self) -> Vars {
        self.entries[0].vars()
    }

    pub fn orders(&self) -> Orders {
        self.entries[0].orders()
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &TruncatedSeries)> {
        let d = self.dim;
        self.entries.iter().enumerate().map(move |(k, s)| ((k / d, k % d), s))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(TruncatedSeries::is_zero)
    }

    /// The matrix of constant terms.
    pub fn constant_part(&self) -> Vec<Vec<Rational>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).constant_term()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let entries = (0..d * d).map(|k| self.get(k % d, k / d).clone()).collect();
        SeriesMatrix { dim: d, entries }
    }

    pub fn map(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> Self {
        let entries: Vec<_> = self.entries.iter().map(f).collect();
        let orders = entries.iter().fold(entries[0].orders(), |o, s| o.min(s.orders()));
        SeriesMatrix { dim: self.dim, entries: entries.into_iter().map(|s| s.truncate(orders)).collect() }
    }

    pub fn truncate(&self, orders: Orders) -> Self {
        self.map(|s| s.truncate(orders))
    }

    pub fn scale(&self, c: &TruncatedSeries) -> Result<Self, SeriesError> {
        let entries = self.entries.iter().map(|s| s.checked_mul(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(SeriesMatrix { dim: self.dim, entries })
    }

    pub fn derivative(&self, var: Var) -> Result<Self, SeriesError> {
        let entries = self.entries.iter().map(|s| s.derivative(var)).collect::<Result<Vec<_>, _>>()?;
        Ok(SeriesMatrix { dim: self.dim, entries })
    }

    fn check_dim(&self, other: &Self) -> Result<(), SeriesError> {
        if self.dim != other.dim {
            return Err(SeriesError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SeriesMatrix { dim: self.dim, entries })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SeriesMatrix { dim: self.dim, entries })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_dim(other)?;
        let d = self.dim;
        let orders = self.orders().min(other.orders());
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = TruncatedSeries::zero(self.vars(), orders);
                for k in 0..d {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.checked_add(&a.checked_mul(b)?)?;
                }
                entries.push(acc);
            }
        }
        Ok(SeriesMatrix { dim: d, entries })
    }

    /// Inverse by the alternating chain (geometric) series.
    pub fn inverse_geometric(&self) -> Result<Self, SeriesError> {
        let (vars, orders) = (self.vars(), self.orders());
        let g = self.constant_part();
        let g_inv = rational::invert_matrix(&g).ok_or(SeriesError::SingularMetric)?;
        let g_inv = SeriesMatrix::constant(&g_inv, vars, orders);
        let remainder = self.checked_sub(&SeriesMatrix::constant(&g, vars, orders))?;
        let step = g_inv.checked_mul(&remainder)?;

        let mut sum = g_inv.clone();
        let mut chain = g_inv.clone();
        let mut sign = -Rational::one();
        for _ in 0..self.entries[0].max_total_degree() {
            // chain = (g^-1 F)^m g^-1
            chain = step.checked_mul(&chain)?;
            if chain.is_zero() {
                break;
            }
            let signed = chain.map(|s| s.scale(&sign));
            sum = sum.checked_add(&signed)?;
            sign = -sign;
        }
        Ok(sum)
    }

    /// Inverse by Gauss-Jordan elimination over the series ring.
    pub fn inverse_direct(&self) -> Result<Self, SeriesError> {
        let (vars, orders) = (self.vars(), self.orders());
        let d = self.dim;
        let mut a: Vec<Vec<TruncatedSeries>> = (0..d).map(|i| (0..d).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut inv: Vec<Vec<TruncatedSeries>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        if i == j {
                            TruncatedSeries::one(vars, orders)
                        } else {
                            TruncatedSeries::zero(vars, orders)
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..d {
            // A series is a unit iff its constant term is nonzero.
            let pivot = (col..d)
                .find(|&r| !a[r][col].constant_term().is_zero())
                .ok_or(SeriesError::SingularMetric)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].reciprocal()?;
            for x in a[col].iter_mut().chain(inv[col].iter_mut()) {
                *x = x.checked_mul(&p)?;
            }
            for r in 0..d {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in 0..d {
                    let delta = f.checked_mul(&a[col][c])?;
                    a[r][c] = a[r][c].checked_sub(&delta)?;
                    let delta = f.checked_mul(&inv[col][c])?;
                    inv[r][c] = inv[r][c].checked_sub(&delta)?;
                }
            }
        }
        SeriesMatrix::from_rows(inv)
    }
}
