//! The extended adjoint mapping `A_ext(M, d0) = (A, S, E, d)` over a
//! commutative domain, and kernel, rank, determinant and echelon form
//! derived from it.
//!
//! For the top-level call `d0 = 1` the result satisfies `A M = S`,
//! `d E = S J_E` and `S = I_E S`, with `I_E = E E^T` and `J_E = E^T E`.
//! Inner calls carry the previous scale, and then `A M = d0 S`. Every
//! division in the recursion is exact.

use crate::domain::Ring;
use crate::engine::TaskContext;
use crate::error::{Error, Result};
use crate::multiply::{mul_block, MultiplyConfig};
use crate::quad::block::{self, join, quadrants, Block, Shape};
use crate::quad::{PadMode, PivotStructure, QuadMatrix};

/// Output of [`adjoint_extended`].
///
/// Inputs whose order is not a power of two are embedded with identity
/// padding first; `a`, `s` and `e` then describe the padded matrix and
/// `logical_order` records the original order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointResult<D: Ring> {
    pub a: QuadMatrix<D>,
    pub s: QuadMatrix<D>,
    pub e: PivotStructure,
    pub d: D::Elem,
    pub d0: D::Elem,
    pub logical_order: usize,
}

/// `Y = E^T S - d I`. Its columns at non-pivot positions are annihilated by
/// `S`, hence by the input.
#[derive(Debug, Clone, PartialEq)]
pub struct EchelonAux<D: Ring> {
    pub y: QuadMatrix<D>,
}

impl<D: Ring> AdjointResult<D> {
    /// Rank of the logical (unpadded) matrix.
    pub fn rank(&self) -> usize {
        self.e.rank() - (self.e.order() - self.logical_order)
    }

    pub fn aux(&self) -> EchelonAux<D> {
        let dom = self.s.domain();
        let shape = self.s.shape();
        let y = y_block(dom, &self.s.root().clone(), &self.e, &self.d, shape);
        EchelonAux { y: QuadMatrix::from_block(dom.clone(), shape.order, shape.order, shape, y) }
    }

    /// `sign(E) * d` for full rank, zero otherwise.
    pub fn determinant(&self) -> D::Elem {
        let dom = self.s.domain();
        match self.e.permutation_sign() {
            Some(1) => self.d.clone(),
            Some(_) => dom.neg(&self.d),
            None => dom.zero(),
        }
    }
}

pub(crate) struct Ext<E> {
    pub a: Block<E>,
    pub s: Block<E>,
    pub e: PivotStructure,
    pub d: E,
}

impl<E: Clone> Clone for Ext<E> {
    fn clone(&self) -> Self {
        Ext { a: self.a.clone(), s: self.s.clone(), e: self.e.clone(), d: self.d.clone() }
    }
}

fn dv<D: Ring>(dom: &D, x: &Block<D::Elem>, c: &D::Elem, shape: Shape) -> Result<Block<D::Elem>> {
    if *c == dom.one() {
        return Ok(x.clone());
    }
    block::div_exact(dom, x, shape, c)
}

fn bits(sel: crate::quad::DiagSelector) -> Vec<bool> {
    sel.to_bits()
}

/// `I_E X`: keeps the pivot rows of `x`.
fn keep_pivot_rows<D: Ring>(dom: &D, e: &PivotStructure, x: &Block<D::Elem>, shape: Shape) -> Block<D::Elem> {
    block::mask(dom, x, shape, &bits(e.row_selector()), true)
}

/// `(I - I_E) X`: zeroes the pivot rows of `x`.
fn drop_pivot_rows<D: Ring>(dom: &D, e: &PivotStructure, x: &Block<D::Elem>, shape: Shape) -> Block<D::Elem> {
    block::mask(dom, x, shape, &bits(e.row_selector().complement()), true)
}

/// `E^T X`: row `r` of `x` moves to row `c` for each pivot `(r, c)`.
fn et_mul<D: Ring>(dom: &D, e: &PivotStructure, x: &Block<D::Elem>, shape: Shape) -> Block<D::Elem> {
    block::remap_rows(dom, x, shape, &e.col_of_row())
}

/// `X E^T`: column `c` of `x` moves to column `r` for each pivot `(r, c)`.
fn mul_et<D: Ring>(dom: &D, e: &PivotStructure, x: &Block<D::Elem>, shape: Shape) -> Block<D::Elem> {
    block::remap_cols(dom, x, shape, &e.row_of_col())
}

fn y_block<D: Ring>(
    dom: &D,
    s: &Block<D::Elem>,
    e: &PivotStructure,
    d: &D::Elem,
    shape: Shape,
) -> Block<D::Elem> {
    block::sub(dom, &et_mul(dom, e, s, shape), &block::scalar_identity(dom, shape, d), shape)
}

fn scalar_of<D: Ring>(dom: &D, b: &Block<D::Elem>) -> D::Elem {
    match b {
        Block::Dense(x) => x.data[0].clone(),
        _ => dom.zero(),
    }
}

pub(crate) fn aext<D: Ring>(
    ctx: &TaskContext,
    dom: &D,
    m: &Block<D::Elem>,
    shape: Shape,
    d0: &D::Elem,
    cfg: &MultiplyConfig,
) -> Result<Ext<D::Elem>> {
    assert!(!dom.is_zero(d0), "A_ext called with d0 = 0");
    if m.is_zero() {
        return Ok(Ext {
            a: block::scalar_identity(dom, shape, d0),
            s: Block::Zero,
            e: PivotStructure::empty(shape.order),
            d: d0.clone(),
        });
    }
    if shape.order == 1 {
        return Ok(Ext {
            a: block::dense_block(dom, 1, vec![d0.clone()]),
            s: m.clone(),
            e: PivotStructure::new(1, vec![(0, 0)]),
            d: scalar_of(dom, m),
        });
    }
    let h = shape.half();
    let mul = |x: &Block<D::Elem>, y: &Block<D::Elem>| mul_block(ctx, dom, x, y, h, cfg);
    let add = |x: &Block<D::Elem>, y: &Block<D::Elem>| block::add(dom, x, y, h);
    let sub = |x: &Block<D::Elem>, y: &Block<D::Elem>| block::sub(dom, x, y, h);
    let neg = |x: &Block<D::Elem>| block::neg(dom, x, h);
    let sc = |x: &Block<D::Elem>, c: &D::Elem| block::scale(dom, x, h, c);
    let div = |x: &Block<D::Elem>, c: &D::Elem| dv(dom, x, c, h);

    // step 1
    let [m11, m12, m21, m22] = quadrants(dom, m, shape);
    let r11 = aext(ctx, dom, &m11, h, d0, cfg)?;
    let d11 = r11.d.clone();
    let y11 = y_block(dom, &r11.s, &r11.e, &d11, h);
    let m1_12 = div(&mul(&r11.a, &m12), d0)?;
    let m1_21 = neg(&div(&mul(&m21, &y11), d0)?);
    let m21_e11t = mul_et(dom, &r11.e, &m21, h);
    let m1_22 = div(&sub(&sc(&m22, &d11), &mul(&m21_e11t, &m1_12)), d0)?;

    // steps 2 and 3 are independent
    let in12 = drop_pivot_rows(dom, &r11.e, &m1_12, h);
    let (r12, r21) = if ctx.should_spawn(shape.order) {
        let (dom2, dom3, c2, c3) = (dom.clone(), dom.clone(), *cfg, *cfg);
        let (d2, d3, x21) = (d11.clone(), d11.clone(), m1_21.clone());
        let mut out = ctx.join_all(
            "A_ext steps 2,3",
            vec![
                Box::new(move |cx: &TaskContext| aext(cx, &dom2, &in12, h, &d2, &c2)),
                Box::new(move |cx: &TaskContext| aext(cx, &dom3, &x21, h, &d3, &c3)),
            ],
        )?;
        let r21 = out.pop().unwrap()?;
        (out.pop().unwrap()?, r21)
    } else {
        (aext(ctx, dom, &in12, h, &d11, cfg)?, aext(ctx, dom, &m1_21, h, &d11, cfg)?)
    };
    let (d12, d21) = (r12.d.clone(), r21.d.clone());
    let y12 = y_block(dom, &r12.s, &r12.e, &d12, h);
    let y21 = y_block(dom, &r21.s, &r21.e, &d21, h);

    // step 4
    let m2_22 = neg(&div(&mul(&mul(&r21.a, &m1_22), &y12), &dom.mul(&d11, &d11))?);
    let ds = dom.div_exact(&dom.mul(&d21, &d12), &d11)?;
    let in22 = drop_pivot_rows(dom, &r21.e, &m2_22, h);
    let r22 = aext(ctx, dom, &in22, h, &ds, cfg)?;
    let d22 = r22.d.clone();
    let y22 = y_block(dom, &r22.s, &r22.e, &d22, h);

    // echelon form
    let m2_11 = neg(&div(&mul(&r11.s, &y21), &d11)?);
    let s11_e21t_a21 = div(&mul(&mul_et(dom, &r21.e, &r11.s, h), &r21.a), &d11)?;
    let i11_m1_12 = keep_pivot_rows(dom, &r11.e, &m1_12, h);
    let t = div(&sub(&mul(&s11_e21t_a21, &m1_22), &sc(&i11_m1_12, &d21)), &d11)?;
    let m2_12 = div(&add(&mul(&t, &y12), &sc(&r12.s, &d21)), &d11)?;
    let m3_12 = neg(&div(&mul(&m2_12, &y22), &ds)?);
    let i21_m2_22 = keep_pivot_rows(dom, &r21.e, &m2_22, h);
    let m3_22 = sub(&r22.s, &div(&mul(&i21_m2_22, &y22), &ds)?);

    // adjoint
    let a1 = mul(&r12.a, &r11.a);
    let l = sc(&div(&sub(&a1, &div(&mul(&mul_et(dom, &r12.e, &i11_m1_12, h), &a1), &d11)?), &d11)?, &d22);
    let a2 = mul(&r22.a, &r21.a);
    let p = div(&sub(&a2, &div(&mul(&mul_et(dom, &r22.e, &i21_m2_22, h), &a2), &ds)?), &d21)?;
    let f = neg(&div(
        &add(&sc(&s11_e21t_a21, &d22), &div(&mul(&mul_et(dom, &r22.e, &m2_12, h), &a2), &ds)?),
        &d21,
    )?);
    let g = neg(&div(
        &add(
            &sc(&div(&mul(&m21_e11t, &r11.a), d0)?, &d12),
            &div(&mul(&mul_et(dom, &r12.e, &m1_22, h), &a1), &d11)?,
        ),
        &d11,
    )?);
    let a = join(dom, [div(&add(&l, &mul(&f, &g)), &d12)?, f.clone(), div(&mul(&p, &g), &d12)?, p], shape);
    let s = join(
        dom,
        [div(&sc(&m2_11, &d22), &d21)?, m3_12, div(&sc(&r21.s, &d22), &d21)?, m3_22],
        shape,
    );
    let e = PivotStructure::assemble([&r11.e, &r12.e, &r21.e, &r22.e]);
    Ok(Ext { a, s, e, d: d22 })
}

/// `A_ext(m, d0)` with the given multiplication settings.
pub fn adjoint_extended_with<D: Ring>(
    ctx: &TaskContext,
    m: &QuadMatrix<D>,
    d0: &D::Elem,
    cfg: &MultiplyConfig,
) -> Result<AdjointResult<D>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("A_ext needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    let dom = m.domain();
    if dom.is_zero(d0) {
        return Err(Error::DivisionByZero);
    }
    let padded = m.embed_padded(PadMode::IdentityPad);
    let shape = padded.shape();
    let r = aext(ctx, dom, padded.root(), shape, d0, cfg)?;
    let wrap = |root| QuadMatrix::from_block(dom.clone(), shape.order, shape.order, shape, root);
    Ok(AdjointResult { a: wrap(r.a), s: wrap(r.s), e: r.e, d: r.d, d0: d0.clone(), logical_order: m.rows() })
}

/// `A_ext(m, d0)` with the default multiplication settings.
pub fn adjoint_extended<D: Ring>(ctx: &TaskContext, m: &QuadMatrix<D>, d0: &D::Elem) -> Result<AdjointResult<D>> {
    adjoint_extended_with(ctx, m, d0, &MultiplyConfig::default())
}

fn top<D: Ring>(ctx: &TaskContext, m: &QuadMatrix<D>) -> Result<AdjointResult<D>> {
    adjoint_extended(ctx, m, &m.domain().one())
}

pub fn determinant<D: Ring>(ctx: &TaskContext, m: &QuadMatrix<D>) -> Result<D::Elem> {
    Ok(top(ctx, m)?.determinant())
}

pub fn rank<D: Ring>(ctx: &TaskContext, m: &QuadMatrix<D>) -> Result<usize> {
    Ok(top(ctx, m)?.rank())
}

/// `(S, E, d)` of the identity-padded input.
pub fn echelon_form<D: Ring>(ctx: &TaskContext, m: &QuadMatrix<D>) -> Result<(QuadMatrix<D>, PivotStructure, D::Elem)> {
    let r = top(ctx, m)?;
    Ok((r.s, r.e, r.d))
}

/// Kernel vectors taken from an existing result: the columns of `Y` at
/// non-pivot positions, truncated to the logical order.
pub fn kernel_from<D: Ring>(r: &AdjointResult<D>) -> Vec<Vec<D::Elem>> {
    let y = r.aux().y;
    let cols = r.e.col_selector();
    let dense = y.to_dense();
    (0..r.e.order())
        .filter(|&j| !cols.contains(j))
        .map(|j| (0..r.logical_order).map(|i| dense[i][j].clone()).collect())
        .collect()
}

/// Basis of the right kernel of `m`. Every vector is checked against `m`.
pub fn kernel_basis<D: Ring>(ctx: &TaskContext, m: &QuadMatrix<D>) -> Result<Vec<Vec<D::Elem>>> {
    let r = top(ctx, m)?;
    let basis = kernel_from(&r);
    let dom = m.domain();
    for v in &basis {
        for i in 0..m.rows() {
            let row: Vec<D::Elem> = (0..m.cols()).map(|j| m.get(i, j)).collect();
            assert!(dom.is_zero(&dom.dot_acc(dom.zero(), &row, v)), "kernel vector not annihilated");
        }
    }
    Ok(basis)
}
