use qk_core::correlators::{point_descendent_table, CorrelatorTable, DescendentKey, Marked, Target};
use qk_core::frobenius::{assemble_potential, FrobeniusData};
use qk_core::qde::{assemble_fundamental_solution, geometric_q, qde_residual};
use qk_core::rational::{frac, int, Rational};
use qk_core::series::{Orders, TruncatedSeries, Var};

/// Coefficients of the solution of `dS/dt = (1 - q)^-1 S`, `S(0) = 1`, by
/// integrating term by term: `s[n+1][d] = sum_{m <= d} s[n][d-m] / (n+1)`.
fn integration_oracle(t: usize, m: usize) -> Vec<Vec<Rational>> {
    let mut s = vec![vec![int(0); m + 1]; t + 1];
    s[0][0] = int(1);
    for n in 0..t {
        for d in 0..=m {
            let sum = (0..=d).fold(int(0), |acc, k| acc + &s[n][d - k]);
            s[n + 1][d] = sum / int(n as i64 + 1);
        }
    }
    s
}

fn point_setup(table: &CorrelatorTable) -> (qk_core::qde::QdeSolution, FrobeniusData) {
    let sol = assemble_fundamental_solution(table, 8, 0, 8).unwrap();
    let fd = FrobeniusData::build(&assemble_potential(table, 8, 0).unwrap()).unwrap();
    (sol, fd)
}

#[test]
fn point_solution_matches_integration_oracle() {
    let table = point_descendent_table(10, 8).unwrap();
    let (sol, fd) = point_setup(&table);
    let s = sol.matrix().get(0, 0);
    let oracle = integration_oracle(8, 8);
    for n in 0..=8u32 {
        for d in 0..=8u32 {
            assert_eq!(s.coeff(&[n, d]), oracle[n as usize][d as usize], "t^{n} q^{d}");
        }
    }
    let report = qde_residual(&sol, &fd).unwrap();
    assert_eq!(report.certified_window, Orders::new(5, 0, 8));
    assert!(report.all_zero(), "{report:?}");
    assert!(report.complete);
    assert!(report.gwdvv_residuals.is_empty());
}

#[test]
fn perturbed_descendent_leaves_the_predicted_footprint() {
    let mut table = point_descendent_table(10, 8).unwrap();
    // <1, t^4, tau_3(1)>: five plain insertions, one marked point with L^3.
    let key = DescendentKey::new(vec![], vec![0; 5], Marked { class: 0, power: 3 });
    assert_eq!(table.descendent_value(&key).unwrap(), Some(int(20)));
    table.set_descendent(key, int(21));
    let (sol, fd) = point_setup(&table);
    let report = qde_residual(&sol, &fd).unwrap();
    let w = report.qde_residuals[0].witness.clone().expect("nonzero residual");
    assert_eq!(w.monomial, vec![3, 3]);
    assert_eq!(w.value, frac(1, 6));

    let s = sol.matrix();
    let z = geometric_q(s.vars(), s.orders());
    let op = fd.c(0, 0, 0).with_q(8);
    let lhs = s.get(0, 0).derivative(Var::T(0)).unwrap();
    let rhs = op.checked_mul(s.get(0, 0)).unwrap().checked_mul(&z).unwrap();
    let residual = lhs.checked_sub(&rhs).unwrap().truncate(report.certified_window);
    let mut predicted = vec![(vec![3, 3], frac(1, 6))];
    predicted.extend((3..=8).map(|d| (vec![4, d], frac(-1, 24))));
    assert_eq!(residual, TruncatedSeries::from_terms(residual.vars(), residual.orders(), predicted));
}

#[test]
fn operator_orientation_matters_off_the_point() {
    let table = CorrelatorTable::new(Target::Projective(1), 1);
    let sol = assemble_fundamental_solution(&table, 5, 0, 3).unwrap();
    let fd = FrobeniusData::build(&assemble_potential(&table, 6, 0).unwrap()).unwrap();
    assert!(qde_residual(&sol, &fd).unwrap().all_zero());

    // The matrix acting on upper-index coordinates, applied to S unchanged.
    let s = sol.matrix();
    let z = geometric_q(s.vars(), s.orders());
    let a1 = fd.op(1).map(|x| x.with_q(3));
    let d1 = s.derivative(Var::T(1)).unwrap();
    let wrong = d1.checked_sub(&a1.checked_mul(s).unwrap().scale(&z).unwrap()).unwrap();
    let right = d1.checked_sub(&a1.transpose().checked_mul(s).unwrap().scale(&z).unwrap()).unwrap();
    let window = Orders::new(3, 0, 3);
    assert!(right.truncate(window).is_zero());
    assert!(!wrong.truncate(window).is_zero());
}
