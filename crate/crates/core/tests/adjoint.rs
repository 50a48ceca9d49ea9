mod common;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

use quadalg::adjoint::{adjoint_extended_with, kernel_from};
use quadalg::domain::{IntPoly, IntegerRing, PolyRing, ResidueRing, Ring};
use quadalg::*;

fn serial() -> TaskContext {
    TaskContext::serial()
}

#[test]
fn identities_on_random_integers() {
    let mut r = rng(11);
    for case in 0..200 {
        let n = r.gen_range(1..=16);
        let zeros = [0, 20, 60][case % 3];
        let m = to_quad_leaf(&random_ints(&mut r, n, n, 15, zeros), [1, 2, 4, 32][case % 4]);
        let res = adjoint_extended(&serial(), &m, &BigInt::one()).unwrap();
        identities_hold(&m, &res).unwrap_or_else(|e| panic!("case {case} (n = {n}): {e}"));
    }
}

#[test]
fn identities_on_structured_corpus() {
    for (name, d) in structured_corpus() {
        for leaf in [1, 4] {
            let m = to_quad_leaf(&d, leaf);
            let res = adjoint_extended(&serial(), &m, &BigInt::one()).unwrap();
            identities_hold(&m, &res).unwrap_or_else(|e| panic!("{name} leaf {leaf}: {e}"));
            assert_eq!(res.rank(), rank_z(&d), "{name}");
        }
    }
}

#[test]
fn determinant_matches_bareiss() {
    let mut r = rng(12);
    for _ in 0..150 {
        let n = r.gen_range(2..=8);
        let d = random_ints(&mut r, n, n, 15, 10);
        assert_eq!(determinant(&serial(), &to_quad(&d)).unwrap(), bareiss_det(&d));
    }
    for (name, d) in structured_corpus() {
        assert_eq!(determinant(&serial(), &to_quad(&d)).unwrap(), bareiss_det(&d), "{name}");
    }
}

#[test]
fn small_determinants() {
    let ctx = serial();
    let m = to_quad(&vec![vec![2.into(), 0.into()], vec![0.into(), 3.into()]]);
    assert_eq!(determinant(&ctx, &m).unwrap(), BigInt::from(6));
    let swap = to_quad(&permutation(&[1, 0]));
    assert_eq!(determinant(&ctx, &swap).unwrap(), BigInt::from(-1));
    let cyc = to_quad(&permutation(&[1, 2, 0]));
    assert_eq!(determinant(&ctx, &cyc).unwrap(), BigInt::from(1));
}

#[test]
fn adjugate_of_nonsingular_matrix() {
    // For full rank and d0 = 1, S = d I up to the pivot permutation, so
    // A is the adjugate times the permutation sign pattern: A M = d E.
    let mut r = rng(13);
    for _ in 0..20 {
        let n = r.gen_range(2..=6);
        let d = random_ints(&mut r, n, n, 10, 0);
        let det = bareiss_det(&d);
        if det.is_zero() {
            continue;
        }
        let res = adjoint_extended(&serial(), &to_quad(&d), &BigInt::one()).unwrap();
        assert_eq!(res.rank(), n);
        assert_eq!(res.determinant(), det);
        let inv = inverse_q(&to_rational(&d)).unwrap();
        let a: Dense<BigInt> = res.a.to_dense().into_iter().take(n).map(|r| r[..n].to_vec()).collect();
        let e: Vec<Vec<u8>> = res.e.to_dense().into_iter().take(n).map(|r| r[..n].to_vec()).collect();
        // A = d E M^-1
        let de: Dense<BigRational> = e
            .iter()
            .map(|row| row.iter().map(|&x| BigRational::from_integer(&res.d * BigInt::from(x))).collect())
            .collect();
        let expect = naive_mul(&de, &inv);
        assert_eq!(to_rational(&a), expect);
    }
}

#[test]
fn kernel_matches_rational_elimination() {
    let mut r = rng(14);
    let ctx = serial();
    for case in 0..120 {
        let n = r.gen_range(1..=8);
        let rk = r.gen_range(0..=n);
        let d = if case % 2 == 0 { low_rank(&mut r, n, rk, 6) } else { random_ints(&mut r, n, n, 4, 50) };
        let k = kernel_basis(&ctx, &to_quad(&d)).unwrap();
        for v in &k {
            let col: Dense<BigInt> = v.iter().map(|x| vec![x.clone()]).collect();
            assert!(naive_mul(&d, &col).iter().all(|x| x[0].is_zero()));
        }
        let q = to_rational(&d);
        assert_eq!(k.len(), n - rank_q(&q));
        let kq: Vec<Vec<BigRational>> =
            k.iter().map(|v| v.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
        assert!(same_span(&kq, &kernel_q(&q)), "case {case}");
    }
}

#[test]
fn kernel_of_structured_inputs() {
    let ctx = serial();
    for (name, d) in structured_corpus() {
        let k = kernel_basis(&ctx, &to_quad(&d)).unwrap();
        let q = to_rational(&d);
        let kq: Vec<Vec<BigRational>> =
            k.iter().map(|v| v.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
        assert!(same_span(&kq, &kernel_q(&q)), "{name}");
    }
}

#[test]
fn echelon_form_and_rank() {
    let ctx = serial();
    let d = low_rank(&mut rng(15), 8, 3, 5);
    let (s, e, _) = echelon_form(&ctx, &to_quad(&d)).unwrap();
    assert_eq!(e.rank(), 3);
    assert_eq!(rank(&ctx, &to_quad(&d)).unwrap(), 3);
    assert_eq!(rank_q(&to_rational(&s.to_dense())), 3);
    let rows = e.row_selector();
    for (i, row) in s.to_dense().iter().enumerate() {
        if !rows.contains(i) {
            assert!(row.iter().all(|x| x.is_zero()));
        }
    }
}

#[test]
fn zero_d0_rejected() {
    let m = to_quad(&random_ints(&mut rng(16), 5, 5, 8, 0));
    assert!(matches!(adjoint_extended(&serial(), &m, &BigInt::zero()), Err(Error::DivisionByZero)));
}

#[test]
fn rejects_rectangular() {
    let m = QuadMatrix::zero(IntegerRing, 2, 3);
    assert!(matches!(adjoint_extended(&serial(), &m, &BigInt::one()), Err(Error::ShapeMismatch(_))));
}

#[test]
fn polynomial_domain() {
    let dom = PolyRing;
    let p = |c: &[i64]| IntPoly::from_i64s(c);
    // [[x, 1], [1, x]] has determinant x^2 - 1
    let m = QuadMatrix::from_rows(dom, vec![vec![p(&[0, 1]), p(&[1])], vec![p(&[1]), p(&[0, 1])]]).unwrap();
    let res = adjoint_extended(&serial(), &m, &dom.one()).unwrap();
    identities_hold(&m, &res).unwrap();
    assert_eq!(res.determinant(), p(&[-1, 0, 1]));
    let mut r = rng(17);
    for _ in 0..10 {
        let n = r.gen_range(2..=4);
        let rows: Vec<Vec<IntPoly>> = (0..n)
            .map(|_| (0..n).map(|_| p(&[r.gen_range(-3..=3), r.gen_range(-3..=3)])).collect())
            .collect();
        let m = QuadMatrix::from_rows_with_leaf(dom, rows, 1).unwrap();
        let res = adjoint_extended(&serial(), &m, &dom.one()).unwrap();
        identities_hold(&m, &res).unwrap();
    }
}

#[test]
fn residue_domain_agrees_with_integers() {
    let p = 1_000_003u64;
    let dom = ResidueRing::new(p);
    let mut r = rng(18);
    for _ in 0..30 {
        let n = r.gen_range(2..=9);
        let d = random_ints(&mut r, n, n, 12, 20);
        let m = to_quad(&d).map_domain(dom, |v| quadalg::domain::reduce_mod(v, p));
        let res = adjoint_extended_with(&serial(), &m, &1, &MultiplyConfig::default()).unwrap();
        identities_hold(&m, &res).unwrap();
        let det = quadalg::domain::reduce_mod(&bareiss_det(&d), p);
        assert_eq!(res.determinant(), det);
    }
}

#[test]
fn kernel_from_result_uses_logical_order() {
    let d = low_rank(&mut rng(19), 5, 2, 4);
    let res = adjoint_extended(&serial(), &to_quad(&d), &BigInt::one()).unwrap();
    let k = kernel_from(&res);
    assert_eq!(k.len(), 3);
    assert!(k.iter().all(|v| v.len() == 5));
}

fn int_matrix(max_n: usize) -> impl Strategy<Value = Dense<BigInt>> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec((-40i64..40).prop_map(BigInt::from), n), n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identities_property(d in int_matrix(9), leaf in prop::sample::select(vec![1usize, 2, 32])) {
        let m = to_quad_leaf(&d, leaf);
        let res = adjoint_extended(&serial(), &m, &BigInt::one()).unwrap();
        prop_assert_eq!(identities_hold(&m, &res), Ok(()));
        prop_assert_eq!(res.determinant(), bareiss_det(&d));
        prop_assert_eq!(res.rank(), rank_z(&d));
    }

    #[test]
    fn kernel_dimension_property(d in int_matrix(7)) {
        let k = kernel_basis(&serial(), &to_quad(&d)).unwrap();
        prop_assert_eq!(k.len(), d.len() - rank_z(&d));
    }
}
