mod common;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use quadalg::domain::{Float64Field, IntPoly, IntegerRing, RationalField};
use quadalg::generate::{generate_matrix, RandomSpec};
use quadalg::io::*;
use quadalg::*;

#[test]
fn integer_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.mtx");
    let m = generate_matrix(&RandomSpec::new(37, 0.2), 9).unwrap();
    write_matrix_market(&m, &path).unwrap();
    assert_eq!(read_matrix_market(IntegerRing, &path, 32).unwrap(), m);
}

#[test]
fn rational_and_float_round_trip() {
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let m = QuadMatrix::from_rows(RationalField, vec![vec![q(1, 3), q(0, 1)], vec![q(-7, 2), q(5, 1)]]).unwrap();
    let text = format_matrix_market(&m);
    assert_eq!(parse_matrix_market(RationalField, &text, 32).unwrap(), m);
    let f = QuadMatrix::from_rows(Float64Field, vec![vec![0.1, -2.5e-300], vec![1e300, 0.0]]).unwrap();
    let text = format_matrix_market(&f);
    assert_eq!(parse_matrix_market(Float64Field, &text, 32).unwrap(), f);
}

#[test]
fn decimals_read_exactly_as_rationals() {
    let text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 0.25\n2 2 -1.5e1\n";
    let m = parse_matrix_market(RationalField, text, 32).unwrap();
    assert_eq!(m.get(0, 0), BigRational::new(1.into(), 4.into()));
    assert_eq!(m.get(1, 1), BigRational::from_integer((-15).into()));
}

#[test]
fn header_and_syntax_errors() {
    let cases = [
        ("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n", "pattern"),
        ("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n", "complex"),
        ("%%MatrixMarket matrix coordinate integer hermitian\n1 1 1\n1 1 1\n", "hermitian"),
    ];
    for (text, what) in cases {
        assert!(matches!(parse_matrix_market(IntegerRing, text, 32), Err(Error::UnsupportedField(_))), "{what}");
    }
    let bad = "%%MatrixMarket matrix coordinate integer general\n2 2 1\n3 1 4\n";
    assert!(matches!(parse_matrix_market(IntegerRing, bad, 32), Err(Error::Parse { line: 3, .. })));
    let bad = "%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 1 x\n";
    assert!(matches!(parse_matrix_market(IntegerRing, bad, 32), Err(Error::Parse { line: 3, .. })));
    let missing = tempfile::tempdir().unwrap().path().join("none.mtx");
    assert!(matches!(read_matrix_market(IntegerRing, &missing, 32), Err(Error::Io(_))));
}

#[test]
fn symmetric_expansion() {
    let text = "%%MatrixMarket matrix coordinate integer symmetric\n3 3 3\n1 1 4\n2 1 -2\n3 3 9\n";
    let m = parse_matrix_market(IntegerRing, text, 32).unwrap();
    assert!(m.is_symmetric());
    assert_eq!(m.get(0, 1), BigInt::from(-2));
    assert_eq!(m.nnz(), 4);
}

#[test]
fn polynomial_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    let p = |c: &[i64]| IntPoly::from_i64s(c);
    let m = QuadMatrix::from_rows(quadalg::domain::PolyRing, vec![vec![p(&[0, 1]), p(&[])], vec![p(&[-3, 0, 2]), p(&[7])]])
        .unwrap();
    write_poly_matrix(&m, &path).unwrap();
    assert_eq!(read_poly_matrix(&path, 32).unwrap(), m);
}

#[test]
fn kernel_vectors_as_matrix() {
    let v = vec![vec![BigInt::from(1), BigInt::from(2), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(0), BigInt::from(5)]];
    let m = vectors_to_matrix(IntegerRing, 3, &v, 32);
    assert_eq!((m.rows(), m.cols()), (3, 2));
    assert_eq!(m.get(1, 0), BigInt::from(2));
    assert_eq!(m.get(2, 1), BigInt::from(5));
}

#[test]
fn generator_presets() {
    let dense = generate_matrix(&RandomSpec::new(64, 1.0), 1).unwrap();
    assert_eq!(dense.nnz(), 64 * 64);
    let sparse = generate_matrix(&RandomSpec::new(512, 0.01), 1).unwrap();
    let expect = (0.01f64 * 512.0 * 512.0).round() as usize;
    assert_eq!(sparse.nnz(), expect);
    let spd = generate_matrix(&RandomSpec { spd: true, ..RandomSpec::new(12, 0.4) }, 5).unwrap();
    let chol = quadalg::factorize::cholesky(
        &TaskContext::serial(),
        &spd.map_domain(Float64Field, |v| v.to_string().parse::<f64>().unwrap()),
        &MultiplyConfig::default(),
    );
    assert!(chol.is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn market_round_trip(seed in any::<u64>(), rows in 1usize..20, cols in 1usize..20, zeros in 0u32..100) {
        let d = random_ints(&mut rng(seed), rows, cols, 40, zeros);
        let m = QuadMatrix::from_rows(IntegerRing, d).unwrap();
        let back = parse_matrix_market(IntegerRing, &format_matrix_market(&m), 32).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn generator_is_deterministic(seed in any::<u64>(), n in 1usize..40, density in 0.01f64..1.0) {
        let s = RandomSpec::new(n, density);
        let a = generate_matrix(&s, seed).unwrap();
        prop_assert_eq!(&a, &generate_matrix(&s, seed).unwrap());
        let k = ((density * (n * n) as f64).round() as usize).clamp(1, n * n);
        prop_assert_eq!(a.nnz(), k);
    }
}
