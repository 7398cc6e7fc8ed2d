//! The fundamental solution of the quantum differential equation.
//!
//! ```text
//! S_ij = g_ij + sum_{n, beta} Q^beta / n! <e_i, t, .., t, e_j / (1 - q L)>_{0,n+2,beta}
//! ```
//!
//! with `1 / (1 - q L) = sum_d q^d L^d` read as a formal series. The columns
//! of `S` are flat sections of `d - (1 - q)^-1 sum_k (e_k *) dt_k`, which in
//! the lower-index coordinates of `S` reads
//!
//! ```text
//! d_k S_ij = (1 - q)^-1 sum_b c_ki^b S_bj .
//! ```
//!
//! The operator acting on `S` is therefore the transpose of the matrix
//! [`FrobeniusData::op`], which acts on upper-index coordinates.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::correlators::{multisets, CorrelatorTable, DescendentKey, Marked};
use crate::frobenius::{degrees_up_to, multiset_exponent, multiset_weight, FrobeniusData, FrobeniusError, Residual};
use crate::kring::KRing;
use crate::matrix::SeriesMatrix;
use crate::rational::{self, Rational};
use crate::series::{Orders, TruncatedSeries, Var, Vars};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QdeSolution {
    ring: Arc<KRing>,
    s: SeriesMatrix,
}

impl QdeSolution {
    pub fn matrix(&self) -> &SeriesMatrix {
        &self.s
    }

    pub fn ring(&self) -> &Arc<KRing> {
        &self.ring
    }

    pub fn orders(&self) -> Orders {
        self.s.orders()
    }
}

/// Assembles `S` to t-order `t_order`, Novikov order `d_order` and q-order
/// `q_order`. Degree-zero descendents fall back to the point formula when not
/// stored; nonzero degrees must be in the table.
pub fn assemble_fundamental_solution(
    table: &CorrelatorTable,
    t_order: u32,
    d_order: u32,
    q_order: u32,
) -> Result<QdeSolution, FrobeniusError> {
    let ring = Arc::clone(table.ring());
    let r = ring.rank();
    let s = table.degree_rank();
    let d_order = if s == 0 { 0 } else { d_order };
    let vars = Vars::new(r, s, true);
    let orders = Orders::new(t_order as i32, d_order as i32, q_order as i32);
    let g = ring.pairing_matrix();

    let mut rows = Vec::with_capacity(r);
    for i in 0..r {
        let mut row = Vec::with_capacity(r);
        for j in 0..r {
            let mut terms = vec![(vec![0; vars.len()], g[i][j].clone())];
            for beta in degrees_up_to(s, d_order) {
                let is_zero_degree = beta.iter().all(|&b| b == 0);
                for n in 0..=t_order as usize {
                    if is_zero_degree && n + 2 < 3 {
                        continue;
                    }
                    for m in multisets(r, n) {
                        let mut exp = multiset_exponent(r, &m);
                        let w = multiset_weight(&exp);
                        exp.extend(beta.iter().copied());
                        let mut ins = m.clone();
                        ins.push(i);
                        for d in 0..=q_order {
                            let key = DescendentKey::new(beta.clone(), ins.clone(), Marked { class: j, power: d });
                            let v = table
                                .descendent_value(&key)?
                                .ok_or_else(|| FrobeniusError::IncompleteTable(key.to_string()))?;
                            if v.is_zero() {
                                continue;
                            }
                            let mut e = exp.clone();
                            e.push(d);
                            terms.push((e, v * &w));
                        }
                    }
                }
            }
            row.push(TruncatedSeries::from_terms(vars, orders, terms));
        }
        rows.push(row);
    }
    Ok(QdeSolution { ring, s: SeriesMatrix::from_rows(rows)? })
}

/// `sum_{m <= order} q^m`, the truncated expansion of `1 / (1 - q)`.
pub fn geometric_q(vars: Vars, orders: Orders) -> TruncatedSeries {
    let terms = (0..=orders.q.max(0) as u32).map(|m| {
        let mut e = vec![0; vars.len()];
        e[vars.len() - 1] = m;
        (e, Rational::one())
    });
    TruncatedSeries::from_terms(vars, orders, terms.collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QdeReport {
    pub certified_window: Orders,
    /// One entry per `k`: `d_k S - (1-q)^-1 (e_k *) S`; witness indices are `[k, i, j]`.
    pub qde_residuals: Vec<Residual>,
    /// One entry per pair `j < k`: `(e_j *) d_k S - (e_k *) d_j S`.
    pub gwdvv_residuals: Vec<Residual>,
    pub complete: bool,
}

impl QdeReport {
    pub fn all_zero(&self) -> bool {
        self.qde_residuals.iter().all(Residual::is_zero) && self.gwdvv_residuals.iter().all(Residual::is_zero)
    }
}

fn lift(fd: &FrobeniusData, sol: &QdeSolution) -> Result<Vec<SeriesMatrix>, FrobeniusError> {
    let r = fd.ring().rank();
    let q_order = sol.orders().q;
    // (e_k *) on lower-index coordinates: [i][b] = c_ki^b.
    (0..r)
        .map(|k| SeriesMatrix::from_fn(r, |i, b| fd.c(k, i, b).with_q(q_order)).map_err(FrobeniusError::from))
        .collect()
}

pub fn qde_residual(sol: &QdeSolution, fd: &FrobeniusData) -> Result<QdeReport, FrobeniusError> {
    let (sv, fv) = (sol.s.vars(), fd.metric().vars());
    if sv.t != fv.t || sv.novikov != fv.novikov || sol.ring.as_ref() != fd.ring().as_ref() {
        return Err(FrobeniusError::TruncationMismatch(format!("solution {sv} vs Frobenius data {fv}")));
    }
    let r = sv.t;
    let ops = lift(fd, sol)?;
    let z = geometric_q(sv, sol.orders());
    let derivs = (0..r).map(|k| sol.s.derivative(Var::T(k))).collect::<Result<Vec<_>, _>>()?;

    let product_window = fd.product_window();
    let window = Orders::new(
        product_window.t.min(sol.orders().t - 1),
        product_window.novikov.min(sol.orders().novikov),
        sol.orders().q,
    );

    let mut qde_residuals = Vec::with_capacity(r);
    for k in 0..r {
        let rhs = ops[k].checked_mul(&sol.s)?.scale(&z)?;
        let d = derivs[k].checked_sub(&rhs)?;
        qde_residuals.push(Residual::scan(window, d.entries().map(|((i, j), s)| (vec![k, i, j], s.clone()))));
    }

    let mut gwdvv_residuals = Vec::new();
    for j in 0..r {
        for k in j + 1..r {
            let d = ops[j].checked_mul(&derivs[k])?.checked_sub(&ops[k].checked_mul(&derivs[j])?)?;
            gwdvv_residuals.push(Residual::scan(window, d.entries().map(|((a, b), s)| (vec![j, k, a, b], s.clone()))));
        }
    }

    let s0 = sol.s.constant_part();
    let complete = s0.as_slice() == sol.ring.pairing_matrix() && rational::invert_matrix(&s0).is_some();
    Ok(QdeReport { certified_window: window, qde_residuals, gwdvv_residuals, complete })
}
