//! Block-recursive factorizations over fields: Strassen inversion,
//! triangular inversion and Cholesky.
//!
//! All three recurse on quadrants down to scalars without pivoting. Dense
//! leaves are split further by the same code path, so failures are reported
//! with the quadrant path at which the offending scalar or block appeared.

use crate::adjoint;
use crate::domain::{Field, OrderedField};
use crate::engine::TaskContext;
use crate::error::{Error, Result};
use crate::multiply::{mul_block, MultiplyConfig};
use crate::quad::block::{self, join, quadrants, Block, Shape};
use crate::quad::{PadMode, QuadMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lower" => Ok(Side::Lower),
            "upper" => Ok(Side::Upper),
            _ => Err(format!("unknown side `{s}`")),
        }
    }
}

/// `H` lower triangular with positive diagonal and `H * H^T = input`;
/// `h_inv = H^-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyResult<F: Field> {
    pub h: QuadMatrix<F>,
    pub h_inv: QuadMatrix<F>,
}

fn scalar<F: Field>(b: &Block<F::Elem>, dom: &F) -> F::Elem {
    match b {
        Block::Dense(d) => d.data[0].clone(),
        _ => dom.zero(),
    }
}

fn unit<F: Field>(dom: &F, v: F::Elem) -> Block<F::Elem> {
    block::dense_block(dom, 1, vec![v])
}

fn child(path: &str, name: &str) -> String {
    if path.is_empty() {
        name.to_string()
    } else {
        format!("{path}/{name}")
    }
}

fn pair<T: Clone + Send + 'static>(
    ctx: &TaskContext,
    order: usize,
    label: &str,
    f: impl FnOnce(&TaskContext) -> T + Send + 'static,
    g: impl FnOnce(&TaskContext) -> T + Send + 'static,
) -> (T, T) {
    if ctx.should_spawn(order) {
        let mut out = ctx
            .join_all(label, vec![Box::new(f), Box::new(g)])
            .unwrap_or_else(|e| panic!("{e}"));
        let b = out.pop().unwrap();
        (out.pop().unwrap(), b)
    } else {
        (f(ctx), g(ctx))
    }
}

fn square_check<F: Field>(m: &QuadMatrix<F>, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("{what} needs a square matrix, got {}x{}", m.rows(), m.cols())))
    }
}

fn strassen_inverse<F: Field>(
    ctx: &TaskContext,
    dom: &F,
    a: &Block<F::Elem>,
    shape: Shape,
    cfg: &MultiplyConfig,
    path: &str,
) -> Result<Block<F::Elem>> {
    if shape.order == 1 {
        let v = scalar(a, dom);
        if dom.is_zero(&v) {
            return Err(Error::SingularLeadingBlock { order: 1, path: path.to_string() });
        }
        return Ok(unit(dom, dom.inv(&v)?));
    }
    if a.is_zero() {
        return Err(Error::SingularLeadingBlock { order: shape.order, path: path.to_string() });
    }
    let h = shape.half();
    let [a0, a1, a2, a3] = quadrants(dom, a, shape);
    let mul = |x: &Block<F::Elem>, y: &Block<F::Elem>| mul_block(ctx, dom, x, y, h, cfg);

    let m0 = block::neg(dom, &strassen_inverse(ctx, dom, &a0, h, cfg, &child(path, "A0"))?, h);
    let (m1, m2) = {
        let (d1, d2, c1, c2) = (dom.clone(), dom.clone(), *cfg, *cfg);
        let (x0, y1, x2, y0) = (m0.clone(), a1.clone(), a2, m0.clone());
        pair(
            ctx,
            shape.order,
            "M1,M2",
            move |cx| mul_block(cx, &d1, &x0, &y1, h, &c1),
            move |cx| mul_block(cx, &d2, &x2, &y0, h, &c2),
        )
    };
    let m3 = mul(&m2, &a1);
    let schur = block::add(dom, &a3, &m3, h);
    let m4 = strassen_inverse(ctx, dom, &schur, h, cfg, &child(path, "S"))?;
    let m5 = mul(&m4, &m2);
    let (m15, m14) = {
        let (d1, d2, c1, c2) = (dom.clone(), dom.clone(), *cfg, *cfg);
        let (x1, y5, x1b, y4) = (m1.clone(), m5.clone(), m1, m4.clone());
        pair(
            ctx,
            shape.order,
            "M1M5,M1M4",
            move |cx| mul_block(cx, &d1, &x1, &y5, h, &c1),
            move |cx| mul_block(cx, &d2, &x1b, &y4, h, &c2),
        )
    };
    let nw = block::sub(dom, &m15, &m0, h);
    Ok(join(dom, [nw, m14, m5, m4], shape))
}

/// Inverse by Strassen's block recursion without pivoting.
///
/// A zero leading block or Schur complement is reported as
/// `SingularLeadingBlock` unless the matrix itself is singular, in which case
/// the error is `SingularMatrix`.
pub fn invert_strassen<F: Field>(
    ctx: &TaskContext,
    m: &QuadMatrix<F>,
    cfg: &MultiplyConfig,
) -> Result<QuadMatrix<F>> {
    square_check(m, "inversion")?;
    let n = m.rows();
    let padded = m.embed_padded(PadMode::IdentityPad);
    match strassen_inverse(ctx, m.domain(), padded.root(), padded.shape(), cfg, "") {
        Ok(root) => {
            let full = QuadMatrix::from_block(m.domain().clone(), padded.rows(), padded.cols(), padded.shape(), root);
            Ok(if full.rows() == n { full } else { full.top_left(n, n) })
        }
        Err(e @ Error::SingularLeadingBlock { .. }) => {
            if m.domain().is_zero(&adjoint::determinant(ctx, m)?) {
                Err(Error::SingularMatrix { index: None })
            } else {
                Err(e)
            }
        }
        Err(e) => Err(e),
    }
}

fn lower_inverse<F: Field>(
    ctx: &TaskContext,
    dom: &F,
    a: &Block<F::Elem>,
    shape: Shape,
    cfg: &MultiplyConfig,
) -> Result<Block<F::Elem>> {
    if shape.order == 1 {
        return Ok(unit(dom, dom.inv(&scalar(a, dom))?));
    }
    let h = shape.half();
    let [a0, _, b, c] = quadrants(dom, a, shape);
    let (ai, ci) = {
        let (d1, d2, c1, c2) = (dom.clone(), dom.clone(), *cfg, *cfg);
        pair(
            ctx,
            shape.order,
            "A^-1,C^-1",
            move |cx| lower_inverse(cx, &d1, &a0, h, &c1),
            move |cx| lower_inverse(cx, &d2, &c, h, &c2),
        )
    };
    let (ai, ci) = (ai?, ci?);
    let cb = mul_block(ctx, dom, &ci, &b, h, cfg);
    let sw = block::neg(dom, &mul_block(ctx, dom, &cb, &ai, h, cfg), h);
    Ok(join(dom, [ai, Block::Zero, sw, ci], shape))
}

/// Inverse of a triangular matrix with nonzero diagonal.
pub fn invert_triangular<F: Field>(
    ctx: &TaskContext,
    m: &QuadMatrix<F>,
    side: Side,
    cfg: &MultiplyConfig,
) -> Result<QuadMatrix<F>> {
    square_check(m, "triangular inversion")?;
    let dom = m.domain();
    let bad = m.triplets().into_iter().any(|(i, j, _)| match side {
        Side::Lower => j > i,
        Side::Upper => i > j,
    });
    if bad {
        return Err(Error::NotTriangular(match side {
            Side::Lower => "lower",
            Side::Upper => "upper",
        }));
    }
    if let Some(i) = (0..m.rows()).find(|&i| dom.is_zero(&m.get(i, i))) {
        return Err(Error::SingularMatrix { index: Some(i) });
    }
    let lower = match side {
        Side::Lower => m.clone(),
        Side::Upper => m.transpose(),
    };
    let padded = lower.embed_padded(PadMode::IdentityPad);
    let root = lower_inverse(ctx, dom, padded.root(), padded.shape(), cfg)?;
    let inv = QuadMatrix::from_block(dom.clone(), padded.rows(), padded.cols(), padded.shape(), root);
    let inv = if inv.rows() == m.rows() { inv } else { inv.top_left(m.rows(), m.rows()) };
    Ok(match side {
        Side::Lower => inv,
        Side::Upper => inv.transpose(),
    })
}

type Pair<E> = (Block<E>, Block<E>);

fn chol<F: OrderedField>(
    ctx: &TaskContext,
    dom: &F,
    a: &Block<F::Elem>,
    shape: Shape,
    cfg: &MultiplyConfig,
    path: &str,
) -> Result<Pair<F::Elem>> {
    if shape.order == 1 {
        let v = scalar(a, dom);
        if !dom.is_positive(&v) {
            return Err(Error::NotPositiveDefinite { path: path.to_string() });
        }
        let r = dom.sqrt(&v).ok_or_else(|| Error::NonSquarePivot { path: path.to_string() })?;
        let ri = dom.inv(&r)?;
        return Ok((unit(dom, r), unit(dom, ri)));
    }
    let h = shape.half();
    let [a1, a2, _, a3] = quadrants(dom, a, shape);
    let (b, b_inv) = chol(ctx, dom, &a1, h, cfg, &child(path, "A1"))?;
    let c = block::transpose(dom, &mul_block(ctx, dom, &b_inv, &a2, h, cfg), h);
    let cct = mul_block(ctx, dom, &c, &block::transpose(dom, &c, h), h, cfg);
    let f = block::sub(dom, &a3, &cct, h);
    let (d, d_inv) = chol(ctx, dom, &f, h, cfg, &child(path, "F"))?;
    let dc = mul_block(ctx, dom, &d_inv, &c, h, cfg);
    let sw = block::neg(dom, &mul_block(ctx, dom, &dc, &b_inv, h, cfg), h);
    Ok((join(dom, [b, Block::Zero, c, d], shape), join(dom, [b_inv, Block::Zero, sw, d_inv], shape)))
}

/// Recursive Cholesky decomposition `(H, H^-1)` of a symmetric positive
/// definite matrix.
///
/// Over the rationals every recursive pivot must be a perfect square,
/// otherwise `NonSquarePivot` is returned.
pub fn cholesky<F: OrderedField>(
    ctx: &TaskContext,
    m: &QuadMatrix<F>,
    cfg: &MultiplyConfig,
) -> Result<CholeskyResult<F>> {
    square_check(m, "cholesky")?;
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.rows();
    let padded = m.embed_padded(PadMode::IdentityPad);
    let dom = m.domain();
    let (h, h_inv) = chol(ctx, dom, padded.root(), padded.shape(), cfg, "")?;
    let wrap = |root| {
        let full = QuadMatrix::from_block(dom.clone(), padded.rows(), padded.cols(), padded.shape(), root);
        if full.rows() == n {
            full
        } else {
            full.top_left(n, n)
        }
    };
    Ok(CholeskyResult { h: wrap(h), h_inv: wrap(h_inv) })
}
