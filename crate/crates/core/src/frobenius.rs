//! The genus-zero potential and the quantum K-theoretic Frobenius structure.
//!
//! From a correlator table we assemble
//!
//! ```text
//! G(t, Q) = 1/2 (t, t) + sum_{n, beta} Q^beta / n! <t, .., t>_{0,n,beta}
//! ```
//!
//! with `t = sum t_i e_i`, then the quantized metric `G_ij = d_i d_j G`, its
//! inverse `G^ij`, and the product `e_i * e_j = sum_k c_ij^k e_k` where
//! `c_ij^k = sum_mu G_ijmu G^muk`.
//!
//! Every check returns a [`Residual`]: the residual series truncated to the
//! window where it is a genuine identity of coefficients. Each derivative
//! lowers the t-order by one, so at potential order `T` the metric is known to
//! `T - 2`, the product to `T - 3`, and derivatives of the product to `T - 4`.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::correlators::{multisets, CorrelatorError, CorrelatorKey, CorrelatorTable};
use crate::kring::KRing;
use crate::matrix::SeriesMatrix;
use crate::rational::{self, Rational};
use crate::series::{Orders, SeriesError, TruncatedSeries, Var, Vars};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrobeniusError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Correlator(#[from] CorrelatorError),
    #[error("correlator table is missing {0}")]
    IncompleteTable(String),
    #[error("t-order {0} is too small; at least 3 is needed")]
    OrderTooSmall(u32),
    #[error("geometric and direct inverses of the metric disagree")]
    InverseMismatch,
    #[error("truncation mismatch: {0}")]
    TruncationMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    ring: Arc<KRing>,
    series: TruncatedSeries,
}

impl Potential {
    /// Wraps a series in the t and Novikov variables of `ring`.
    pub fn from_series(ring: Arc<KRing>, series: TruncatedSeries) -> Result<Self, FrobeniusError> {
        let v = series.vars();
        if v.t != ring.rank() || v.q {
            return Err(FrobeniusError::TruncationMismatch(format!(
                "potential needs {} t-variables and no q, got {v}",
                ring.rank()
            )));
        }
        Ok(Potential { ring, series })
    }

    pub fn ring(&self) -> &Arc<KRing> {
        &self.ring
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn orders(&self) -> Orders {
        self.series.orders()
    }

    /// Adds `extra` to the potential (negative controls).
    pub fn perturbed(&self, extra: &TruncatedSeries) -> Result<Self, FrobeniusError> {
        Ok(Potential { ring: Arc::clone(&self.ring), series: self.series.checked_add(extra)? })
    }
}

/// All degree vectors of length `s` with total degree at most `d`.
pub fn degrees_up_to(s: usize, d: u32) -> Vec<Vec<u32>> {
    fn go(s: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(s, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(s, d, &mut Vec::with_capacity(s), &mut out);
    out
}

fn factorial(n: u32) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * rational::int(k as i64))
}

/// Exponent vector of the monomial `prod t_i` over a multiset of indices.
pub(crate) fn multiset_exponent(rank: usize, indices: &[usize]) -> Vec<u32> {
    let mut e = vec![0u32; rank];
    for &i in indices {
        e[i] += 1;
    }
    e
}

/// `1 / prod_i m_i!`, the multinomial weight of `t^m / n!` in `<t,..,t>`.
pub(crate) fn multiset_weight(exp: &[u32]) -> Rational {
    exp.iter().fold(Rational::one(), |acc, &m| acc / factorial(m))
}

/// Builds `G` up to t-degree `t_order` and Novikov degree `d_order`.
///
/// Degree-zero correlators with at least three points come from the table if
/// present and from the degree-zero formula otherwise. Every correlator of
/// nonzero degree in the window must be in the table.
pub fn assemble_potential(table: &CorrelatorTable, t_order: u32, d_order: u32) -> Result<Potential, FrobeniusError> {
    let ring = Arc::clone(table.ring());
    let r = ring.rank();
    let s = table.degree_rank();
    let d_order = if s == 0 { 0 } else { d_order };
    let vars = Vars::new(r, s, false);
    let orders = Orders::new(t_order as i32, d_order as i32, 0);
    let g = ring.pairing_matrix();

    let mut terms: Vec<(Vec<u32>, Rational)> = Vec::new();
    // 1/2 (t, t)
    for i in 0..r {
        for j in 0..r {
            let mut e = multiset_exponent(r, &[i, j]);
            e.extend(std::iter::repeat_n(0, s));
            terms.push((e, &g[i][j] / rational::int(2)));
        }
    }
    for beta in degrees_up_to(s, d_order) {
        let is_zero_degree = beta.iter().all(|&b| b == 0);
        for n in 0..=t_order as usize {
            if is_zero_degree && n < 3 {
                continue;
            }
            for ins in multisets(r, n) {
                let key = CorrelatorKey::new(beta.clone(), ins);
                let value = table
                    .plain_value(&key)?
                    .ok_or_else(|| FrobeniusError::IncompleteTable(key.to_string()))?;
                if value.is_zero() {
                    continue;
                }
                let mut e = multiset_exponent(r, &key.insertions);
                let w = multiset_weight(&e);
                e.extend(beta.iter().copied());
                terms.push((e, value * w));
            }
        }
    }
    Potential::from_series(ring, TruncatedSeries::from_terms(vars, orders, terms))
}

/// `G_ij = d_i d_j G`.
pub fn quantized_metric(p: &Potential) -> Result<SeriesMatrix, FrobeniusError> {
    let r = p.ring.rank();
    let first: Vec<TruncatedSeries> = (0..r).map(|i| p.series.derivative(Var::T(i))).collect::<Result<_, _>>()?;
    let rows = (0..r)
        .map(|i| (0..r).map(|j| first[i].derivative(Var::T(j))).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SeriesMatrix::from_rows(rows)?)
}

/// A three-index family of series, indexed `[i][j][k]`.
pub type Tensor3 = Vec<Vec<Vec<TruncatedSeries>>>;

/// `c_ij^k = sum_mu G_ijmu G^muk`, indexed `[i][j][k]`, and the operators
/// `A_k` of multiplication by `e_k` with `A_k[l][m] = c_km^l`.
pub fn product_tensor(
    third: &[Vec<Vec<TruncatedSeries>>],
    metric_inv: &SeriesMatrix,
) -> Result<(Tensor3, Vec<SeriesMatrix>), FrobeniusError> {
    let r = metric_inv.dim();
    let mut c = vec![vec![Vec::with_capacity(r); r]; r];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let mut acc = TruncatedSeries::zero(metric_inv.vars(), third[i][j][0].orders().min(metric_inv.orders()));
                for (mu, g3) in third[i][j].iter().enumerate() {
                    acc = acc.checked_add(&g3.checked_mul(metric_inv.get(mu, k))?)?;
                }
                c[i][j].push(acc);
            }
        }
    }
    let ops = (0..r)
        .map(|k| SeriesMatrix::from_fn(r, |l, m| c[k][m][l].clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((c, ops))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusData {
    ring: Arc<KRing>,
    potential_orders: Orders,
    metric: SeriesMatrix,
    metric_inv: SeriesMatrix,
    third: Tensor3,
    product: Tensor3,
    ops: Vec<SeriesMatrix>,
}

impl FrobeniusData {
    /// Metric, inverse (geometric series, cross-checked by elimination),
    /// third derivatives and product.
    pub fn build(p: &Potential) -> Result<Self, FrobeniusError> {
        let r = p.ring.rank();
        let metric = quantized_metric(p)?;
        let metric_inv = metric.inverse_geometric()?;
        if metric_inv != metric.inverse_direct()? {
            return Err(FrobeniusError::InverseMismatch);
        }
        let third = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| (0..r).map(|k| metric.get(i, j).derivative(Var::T(k))).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let (product, ops) = product_tensor(&third, &metric_inv)?;
        Ok(FrobeniusData { ring: Arc::clone(&p.ring), potential_orders: p.orders(), metric, metric_inv, third, product, ops })
    }

    pub fn ring(&self) -> &Arc<KRing> {
        &self.ring
    }

    pub fn potential_orders(&self) -> Orders {
        self.potential_orders
    }

    pub fn metric(&self) -> &SeriesMatrix {
        &self.metric
    }

    pub fn metric_inv(&self) -> &SeriesMatrix {
        &self.metric_inv
    }

    /// `G_ijk`.
    pub fn third(&self, i: usize, j: usize, k: usize) -> &TruncatedSeries {
        &self.third[i][j][k]
    }

    /// `c_ij^k`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &TruncatedSeries {
        &self.product[i][j][k]
    }

    /// Matrix of `e_k *`, acting on coordinate column vectors.
    pub fn op(&self, k: usize) -> &SeriesMatrix {
        &self.ops[k]
    }

    pub fn ops(&self) -> &[SeriesMatrix] {
        &self.ops
    }

    /// Window on which the product (and hence WDVV) is known.
    pub fn product_window(&self) -> Orders {
        self.product[0][0][0].orders()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub monomial: Vec<u32>,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

/// Maximum absolute coefficient of a family of residual series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Residual {
    #[serde(with = "rational::serde_str")]
    pub max_residual: Rational,
    pub witness: Option<Witness>,
    pub window: Orders,
}

impl Residual {
    /// Scans `(indices, series)` in the given order; ties keep the first
    /// index tuple and, within one series, the lexicographically first
    /// monomial. All series are truncated to the common window first.
    pub fn scan<I>(window: Orders, items: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, TruncatedSeries)>,
    {
        let mut best: Option<Witness> = None;
        let mut max = Rational::zero();
        for (indices, s) in items {
            let s = s.truncate(window);
            if let Some((e, c)) = s.max_abs_term() {
                if best.is_none() || rational::abs(c) > max {
                    max = rational::abs(c);
                    best = Some(Witness { indices: indices.clone(), monomial: e.clone(), value: c.clone() });
                }
            }
        }
        Residual { max_residual: max, witness: best, window }
    }

    pub fn is_zero(&self) -> bool {
        self.witness.is_none()
    }
}

fn window_of<'a>(series: impl IntoIterator<Item = &'a TruncatedSeries>) -> Orders {
    let mut it = series.into_iter();
    let first = it.next().expect("nonempty family").orders();
    it.fold(first, |o, s| o.min(s.orders()))
}

/// `sum G_ijmu G^munu G_nukl - sum G_ikmu G^munu G_nujl` over all `(i,j,k,l)`.
pub fn wdvv_residual(fd: &FrobeniusData) -> Result<Residual, FrobeniusError> {
    let r = fd.ring.rank();
    // contracted[i][j][k][l] = sum_nu c_ij^nu G_nukl
    let mut contracted = vec![vec![vec![Vec::with_capacity(r); r]; r]; r];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    let mut acc = TruncatedSeries::zero(fd.metric.vars(), fd.product_window());
                    for nu in 0..r {
                        acc = acc.checked_add(&fd.product[i][j][nu].checked_mul(&fd.third[nu][k][l])?)?;
                    }
                    contracted[i][j][k].push(acc);
                }
            }
        }
    }
    let mut items = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    let d = contracted[i][j][k][l].checked_sub(&contracted[i][k][j][l])?;
                    items.push((vec![i, j, k, l], d));
                }
            }
        }
    }
    let window = window_of(items.iter().map(|(_, s)| s));
    Ok(Residual::scan(window, items))
}

/// Curvature of `d - z sum_i A_i dt_i` is `-z R1 + z^2 R2` with
/// `R1_ij = d_i A_j - d_j A_i` and `R2_ij = [A_i, A_j]`.
pub fn curvature_residuals(ops: &[SeriesMatrix]) -> Result<(Residual, Residual, Residual), FrobeniusError> {
    let r = ops.len();
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    let mut half = Vec::new();
    let quarter = rational::frac(1, 4);
    let minus_half = rational::frac(-1, 2);
    for i in 0..r {
        for j in 0..r {
            let d1 = ops[j].derivative(Var::T(i))?.checked_sub(&ops[i].derivative(Var::T(j))?)?;
            let d2 = ops[i].checked_mul(&ops[j])?.checked_sub(&ops[j].checked_mul(&ops[i])?)?;
            let h = d1.map(|s| s.scale(&minus_half)).checked_add(&d2.map(|s| s.scale(&quarter)))?;
            for ((l, m), s) in d1.entries() {
                r1.push((vec![i, j, l, m], s.clone()));
            }
            for ((l, m), s) in d2.entries() {
                r2.push((vec![i, j, l, m], s.clone()));
            }
            for ((l, m), s) in h.entries() {
                half.push((vec![i, j, l, m], s.clone()));
            }
        }
    }
    let w1 = window_of(r1.iter().map(|(_, s)| s));
    let w2 = window_of(r2.iter().map(|(_, s)| s));
    let wh = window_of(half.iter().map(|(_, s)| s));
    Ok((Residual::scan(w1, r1), Residual::scan(w2, r2), Residual::scan(wh, half)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatnessReport {
    pub r1: Residual,
    pub r2: Residual,
    /// Curvature at `z = 1/2` (`q = -1`), the flatness of the metric itself.
    pub metric_flatness: Residual,
}

impl FlatnessReport {
    pub fn is_flat(&self) -> bool {
        self.r1.is_zero() && self.r2.is_zero()
    }
}

pub fn flatness_residuals(fd: &FrobeniusData) -> Result<FlatnessReport, FrobeniusError> {
    let (r1, r2, metric_flatness) = curvature_residuals(&fd.ops)?;
    Ok(FlatnessReport { r1, r2, metric_flatness })
}

/// `d_k G_ij - 1/2 sum_mu (c_ki^mu G_muj + c_kj^mu G_imu)`.
pub fn levi_civita_residual(fd: &FrobeniusData) -> Result<Residual, FrobeniusError> {
    let r = fd.ring.rank();
    let half = rational::frac(1, 2);
    let mut items = Vec::new();
    for k in 0..r {
        for i in 0..r {
            for j in 0..r {
                let mut sym = TruncatedSeries::zero(fd.metric.vars(), fd.product_window());
                for mu in 0..r {
                    sym = sym.checked_add(&fd.product[k][i][mu].checked_mul(fd.metric.get(mu, j))?)?;
                    sym = sym.checked_add(&fd.product[k][j][mu].checked_mul(fd.metric.get(i, mu))?)?;
                }
                let d = fd.metric.get(i, j).derivative(Var::T(k))?.checked_sub(&sym.scale(&half))?;
                items.push((vec![k, i, j], d));
            }
        }
    }
    let window = window_of(items.iter().map(|(_, s)| s));
    Ok(Residual::scan(window, items))
}

/// `A_0 - Id`: `e0` is the unit of the quantum product.
pub fn unit_residual(fd: &FrobeniusData) -> Result<Residual, FrobeniusError> {
    let a0 = &fd.ops[0];
    let d = a0.checked_sub(&SeriesMatrix::identity(a0.dim(), a0.vars(), a0.orders()))?;
    Ok(Residual::scan(a0.orders(), d.entries().map(|((l, m), s)| (vec![l, m], s.clone()))))
}

/// Q-degree-zero part of `c_ij^k` minus the classical structure constants.
pub fn q0_classical_residual(fd: &FrobeniusData) -> Result<Residual, FrobeniusError> {
    let r = fd.ring.rank();
    let vars = fd.metric.vars();
    let window = fd.product_window();
    let mut items = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let c0 = fd.product[i][j][k].filter(|e| e[vars.t..].iter().all(|&x| x == 0));
                let m = TruncatedSeries::constant(vars, window, fd.ring.structure_constant(i, j, k).clone());
                items.push((vec![i, j, k], c0.checked_sub(&m)?));
            }
        }
    }
    Ok(Residual::scan(window, items))
}

/// `G G^-1 - Id`.
pub fn inverse_residual(fd: &FrobeniusData) -> Result<Residual, FrobeniusError> {
    let p = fd.metric.checked_mul(&fd.metric_inv)?;
    let d = p.checked_sub(&SeriesMatrix::identity(p.dim(), p.vars(), p.orders()))?;
    Ok(Residual::scan(p.orders(), d.entries().map(|((l, m), s)| (vec![l, m], s.clone()))))
}

/// `c_ij^k - c_ji^k`.
pub fn commutativity_residual(fd: &FrobeniusData) -> Result<Residual, FrobeniusError> {
    let r = fd.ring.rank();
    let mut items = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                items.push((vec![i, j, k], fd.product[i][j][k].checked_sub(&fd.product[j][i][k])?));
            }
        }
    }
    Ok(Residual::scan(fd.product_window(), items))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifiedOrders {
    pub potential: Orders,
    pub metric: Orders,
    pub product: Orders,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrobeniusReport {
    pub certified_orders: CertifiedOrders,
    pub wdvv: Residual,
    pub flatness: FlatnessReport,
    pub levicivita: Residual,
    pub unit: Residual,
    pub q0_classical: Residual,
    pub inverse: Residual,
    pub commutativity: Residual,
}

impl FrobeniusReport {
    pub fn all_zero(&self) -> bool {
        self.wdvv.is_zero()
            && self.flatness.is_flat()
            && self.flatness.metric_flatness.is_zero()
            && self.levicivita.is_zero()
            && self.unit.is_zero()
            && self.q0_classical.is_zero()
            && self.inverse.is_zero()
            && self.commutativity.is_zero()
    }
}

pub fn frobenius_report(fd: &FrobeniusData) -> Result<FrobeniusReport, FrobeniusError> {
    Ok(FrobeniusReport {
        certified_orders: CertifiedOrders {
            potential: fd.potential_orders,
            metric: fd.metric.orders(),
            product: fd.product_window(),
        },
        wdvv: wdvv_residual(fd)?,
        flatness: flatness_residuals(fd)?,
        levicivita: levi_civita_residual(fd)?,
        unit: unit_residual(fd)?,
        q0_classical: q0_classical_residual(fd)?,
        inverse: inverse_residual(fd)?,
        commutativity: commutativity_residual(fd)?,
    })
}
