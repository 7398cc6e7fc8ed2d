use qk_core::correlators::{multisets, CorrelatorKey, CorrelatorTable, Target};
use qk_core::frobenius::{assemble_potential, frobenius_report, wdvv_residual, FrobeniusData, Potential};
use qk_core::rational::{int, Rational};
use qk_core::series::{Orders, TruncatedSeries};

fn data(table: &CorrelatorTable, t: u32, d: u32) -> FrobeniusData {
    FrobeniusData::build(&assemble_potential(table, t, d).unwrap()).unwrap()
}

fn classical(target: Target) -> CorrelatorTable {
    let rank = target.default_degree_rank();
    CorrelatorTable::new(target, rank)
}

fn factorial(n: u32) -> Rational {
    (1..=n).fold(int(1), |a, k| a * int(k as i64))
}

#[test]
fn point_at_t_order_ten() {
    let fd = data(&classical(Target::Point), 10, 0);
    let g = fd.metric().get(0, 0);
    assert_eq!(g.orders(), Orders::new(8, 0, 0));
    // Exponential series of t truncated at degree 8.
    let exp = TruncatedSeries::from_terms(g.vars(), g.orders(), (0..=8).map(|k| (vec![k], int(1) / factorial(k))).collect::<Vec<_>>());
    assert_eq!(g, &exp);
    let c = fd.c(0, 0, 0);
    assert_eq!(c.orders(), Orders::new(7, 0, 0));
    assert_eq!(c, &TruncatedSeries::one(c.vars(), c.orders()));
    let report = frobenius_report(&fd).unwrap();
    assert!(report.all_zero(), "{report:?}");
    assert_eq!(report.flatness.r1.window, Orders::new(6, 0, 0));
}

#[test]
fn projective_classical_suites() {
    for n in [1u32, 2] {
        let fd = data(&classical(Target::Projective(n)), 6, 0);
        let ring = fd.ring().clone();
        let r = ring.rank();
        for i in 0..r {
            for j in 0..r {
                let expected = if i + j <= n as usize { int(1) } else { int(0) };
                assert_eq!(ring.pairing_matrix()[i][j], expected, "P{n} g[{i}][{j}]");
            }
        }
        let window = fd.product_window();
        assert_eq!(window.t, 3);
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let c = fd.c(i, j, k).truncate(window);
                    let expected = TruncatedSeries::constant(c.vars(), c.orders(), ring.structure_constant(i, j, k).clone());
                    assert_eq!(c, expected, "P{n} c_{i}{j}^{k}");
                }
            }
        }
        let report = frobenius_report(&fd).unwrap();
        assert!(report.all_zero(), "P{n}: {report:?}");
    }
}

/// Every invariant of positive degree set to 1 on P^1.
fn p1_quantum_fixture(t: u32, d: u32) -> CorrelatorTable {
    let mut table = CorrelatorTable::new(Target::Projective(1), 1);
    for beta in 1..=d {
        for n in 0..=t as usize {
            for m in multisets(2, n) {
                table.insert(CorrelatorKey::new(vec![beta], m), int(1)).unwrap();
            }
        }
    }
    table
}

#[test]
fn p1_quantum_fixture_is_a_frobenius_manifold() {
    let fd = data(&p1_quantum_fixture(6, 3), 6, 3);
    let report = frobenius_report(&fd).unwrap();
    assert!(report.all_zero(), "{report:?}");
    // alpha * alpha = Q at t = 0.
    assert_eq!(fd.c(1, 1, 0).coeff(&[0, 0, 1]), int(1));
    assert_eq!(fd.c(1, 1, 0).coeff(&[0, 0, 0]), int(0));
}

#[test]
fn injected_quartic_breaks_wdvv_at_the_predicted_monomial() {
    let p = assemble_potential(&classical(Target::Projective(1)), 6, 0).unwrap();
    let s = p.series();
    let quartic = TruncatedSeries::monomial(s.vars(), s.orders(), vec![0, 4, 0], int(1));
    let bad = Potential::perturbed(&p, &quartic).unwrap();
    let fd = FrobeniusData::build(&bad).unwrap();
    let r = wdvv_residual(&fd).unwrap();
    let w = r.witness.clone().expect("nonzero residual");
    assert_eq!(w.indices, vec![0, 0, 1, 1]);
    assert_eq!(w.monomial, vec![0, 2, 0]);
    assert_eq!(w.value, int(12));
    assert_eq!(r.max_residual, int(12));
    assert!(!frobenius_report(&fd).unwrap().all_zero());
}

#[test]
fn missing_positive_degree_entries_are_reported() {
    let table = p1_quantum_fixture(4, 1);
    assert!(assemble_potential(&table, 5, 1).is_err());
    assert!(assemble_potential(&table, 4, 2).is_err());
    assert!(!assemble_potential(&table, 4, 1).unwrap().series().is_zero());
}
