//! Python bindings. Integer matrices are lists of lists of `int`, rational
//! ones lists of lists of `fractions.Fraction` (plain `int` entries are
//! accepted too).

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use quadalg::adjoint::{adjoint_extended_with, kernel_from};
use quadalg::crt::{adjoint_via_crt_with, CrtConfig};
use quadalg::domain::{IntegerRing, RationalField, Ring};
use quadalg::factorize::{cholesky as chol, invert_strassen, invert_triangular, Side};
use quadalg::generate::{generate_matrix, RandomSpec};
use quadalg::multiply::multiply_accumulate;
use quadalg::{AdjointResult, Engine, EngineConfig, MultiplyConfig, QuadMatrix, SchedulerMode};

create_exception!(quadalg_py, QuadalgError, PyException, "Raised for every library error; the message starts with the error kind.");

type Rows<T> = Vec<Vec<T>>;

fn err(e: quadalg::Error) -> PyErr {
    QuadalgError::new_err(format!("{}: {e}", e.kind()))
}

fn matrix<D: Ring>(dom: D, rows: Rows<D::Elem>) -> PyResult<QuadMatrix<D>> {
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(err(quadalg::Error::ShapeMismatch("rows have different lengths".into())));
    }
    QuadMatrix::from_rows(dom, rows).map_err(err)
}

fn run<R: Send>(py: Python<'_>, workers: usize, f: impl FnOnce(&quadalg::TaskContext) -> quadalg::Result<R> + Send) -> PyResult<R> {
    if workers == 0 {
        return Err(err(quadalg::Error::InvalidConfig("workers must be positive".into())));
    }
    let engine = Engine::new(EngineConfig::new(workers, SchedulerMode::Multidispatch));
    py.detach(|| engine.run(f)).map_err(err)
}

fn extended(
    py: Python<'_>,
    rows: Rows<BigInt>,
    crt: bool,
    workers: usize,
) -> PyResult<(QuadMatrix<IntegerRing>, AdjointResult<IntegerRing>)> {
    let m = matrix(IntegerRing, rows)?;
    let r = run(py, workers, |ctx| {
        if crt {
            Ok(adjoint_via_crt_with(ctx, &m, &CrtConfig::default())?.0)
        } else {
            adjoint_extended_with(ctx, &m, &BigInt::from(1), &MultiplyConfig::default())
        }
    })?;
    Ok((m, r))
}

fn top_left<D: Ring>(m: &QuadMatrix<D>, n: usize) -> Rows<D::Elem> {
    m.top_left(n, n).to_dense()
}

#[pyfunction]
#[pyo3(signature = (a, b, workers = 1))]
fn multiply(py: Python<'_>, a: Rows<BigInt>, b: Rows<BigInt>, workers: usize) -> PyResult<Rows<BigInt>> {
    let (a, b) = (matrix(IntegerRing, a)?, matrix(IntegerRing, b)?);
    let p = run(py, workers, |ctx| multiply_accumulate(ctx, &a, &b, None, &MultiplyConfig::default()))?;
    Ok(p.to_dense())
}

#[pyfunction]
#[pyo3(signature = (m, crt = false, workers = 1))]
fn determinant(py: Python<'_>, m: Rows<BigInt>, crt: bool, workers: usize) -> PyResult<BigInt> {
    Ok(extended(py, m, crt, workers)?.1.determinant())
}

#[pyfunction]
#[pyo3(signature = (m, crt = false, workers = 1))]
fn rank(py: Python<'_>, m: Rows<BigInt>, crt: bool, workers: usize) -> PyResult<usize> {
    Ok(extended(py, m, crt, workers)?.1.rank())
}

/// Kernel basis vectors with integer entries.
#[pyfunction]
#[pyo3(signature = (m, crt = false, workers = 1))]
fn kernel(py: Python<'_>, m: Rows<BigInt>, crt: bool, workers: usize) -> PyResult<Rows<BigInt>> {
    Ok(kernel_from(&extended(py, m, crt, workers)?.1))
}

/// `(A, S, pivots, d)` with `A M = S`; `pivots` lists the `(row, col)` ones of `E`.
#[pyfunction]
#[pyo3(signature = (m, crt = false, workers = 1))]
#[allow(clippy::type_complexity)]
fn adjoint(
    py: Python<'_>,
    m: Rows<BigInt>,
    crt: bool,
    workers: usize,
) -> PyResult<(Rows<BigInt>, Rows<BigInt>, Vec<(usize, usize)>, BigInt)> {
    let (m, r) = extended(py, m, crt, workers)?;
    let n = m.rows();
    let pivots = r.e.pivots().iter().copied().filter(|&(i, j)| i < n && j < n).collect();
    Ok((top_left(&r.a, n), top_left(&r.s, n), pivots, r.d))
}

#[pyfunction]
#[pyo3(signature = (m, workers = 1))]
fn inverse(py: Python<'_>, m: Rows<BigRational>, workers: usize) -> PyResult<Rows<BigRational>> {
    let m = matrix(RationalField, m)?;
    Ok(run(py, workers, |ctx| invert_strassen(ctx, &m, &MultiplyConfig::default()))?.to_dense())
}

#[pyfunction]
#[pyo3(signature = (m, lower = true, workers = 1))]
fn triangular_inverse(py: Python<'_>, m: Rows<BigRational>, lower: bool, workers: usize) -> PyResult<Rows<BigRational>> {
    let m = matrix(RationalField, m)?;
    let side = if lower { Side::Lower } else { Side::Upper };
    Ok(run(py, workers, |ctx| invert_triangular(ctx, &m, side, &MultiplyConfig::default()))?.to_dense())
}

/// `(H, H^-1)` with `H H^T = m`.
#[pyfunction]
#[pyo3(signature = (m, workers = 1))]
fn cholesky(py: Python<'_>, m: Rows<BigRational>, workers: usize) -> PyResult<(Rows<BigRational>, Rows<BigRational>)> {
    let m = matrix(RationalField, m)?;
    let r = run(py, workers, |ctx| chol(ctx, &m, &MultiplyConfig::default()))?;
    Ok((r.h.to_dense(), r.h_inv.to_dense()))
}

#[pyfunction]
#[pyo3(signature = (order, density = 1.0, seed = 1, bits = 15, symmetric = false, spd = false))]
fn generate(order: usize, density: f64, seed: u64, bits: u32, symmetric: bool, spd: bool) -> PyResult<Rows<BigInt>> {
    let spec = RandomSpec { bit_width: bits, symmetric, spd, ..RandomSpec::new(order, density) };
    Ok(generate_matrix(&spec, seed).map_err(err)?.to_dense())
}

#[pymodule]
fn quadalg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QuadalgError", m.py().get_type::<QuadalgError>())?;
    m.add_function(wrap_pyfunction!(multiply, m)?)?;
    m.add_function(wrap_pyfunction!(determinant, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(adjoint, m)?)?;
    m.add_function(wrap_pyfunction!(inverse, m)?)?;
    m.add_function(wrap_pyfunction!(triangular_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(cholesky, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
