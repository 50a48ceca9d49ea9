//! Recursive matrix multiplication.
//!
//! The standard recursion computes `D = A B + C` blockwise: each quadrant is
//! `D_ij = A_i1 B_1j + (A_i0 B_0j + C_ij)`, so the accumulator is threaded
//! through the two sub-products instead of being added afterwards. Strassen's
//! seven-product scheme is used above `strassen_min_order` and falls back to
//! the standard recursion below it.

use serde::{Deserialize, Serialize};

use crate::domain::Ring;
use crate::engine::{TaskContext, TaskGraph};
use crate::error::{Error, Result};
use crate::quad::block::{self, dense_block, join, quadrants, Block, Shape};
use crate::quad::QuadMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Standard,
    Strassen,
    Auto,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standard" => Ok(Algorithm::Standard),
            "strassen" => Ok(Algorithm::Strassen),
            "auto" => Ok(Algorithm::Auto),
            _ => Err(format!("unknown algorithm `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplyConfig {
    /// Strassen recursion stops at this order. Power of two, at least twice
    /// the leaf order.
    pub strassen_min_order: usize,
    /// Below this density only the standard algorithm is used.
    pub density_boundary: f64,
    pub algorithm: Algorithm,
}

impl Default for MultiplyConfig {
    fn default() -> Self {
        MultiplyConfig { strassen_min_order: 128, density_boundary: 0.3, algorithm: Algorithm::Auto }
    }
}

impl MultiplyConfig {
    pub fn standard() -> Self {
        MultiplyConfig { algorithm: Algorithm::Standard, ..Default::default() }
    }

    pub fn strassen(min_order: usize) -> Self {
        MultiplyConfig { algorithm: Algorithm::Strassen, strassen_min_order: min_order, ..Default::default() }
    }

    pub fn validate(&self, leaf_order: usize) -> Result<()> {
        if !self.strassen_min_order.is_power_of_two() || self.strassen_min_order < 2 * leaf_order {
            return Err(Error::InvalidConfig(format!(
                "strassen_min_order {} must be a power of two >= 2 * leaf order {leaf_order}",
                self.strassen_min_order
            )));
        }
        if !(self.density_boundary > 0.0 && self.density_boundary <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "density_boundary {} must lie in (0, 1]",
                self.density_boundary
            )));
        }
        Ok(())
    }
}

/// Strassen iff both operands are at least `density_boundary` dense and the
/// order reaches `strassen_min_order`.
pub fn choose_algorithm<D: Ring>(a: &QuadMatrix<D>, b: &QuadMatrix<D>, cfg: &MultiplyConfig) -> Algorithm {
    let order = a.order().max(b.order());
    choose_for(a.density().min(b.density()), order, cfg)
}

/// The decision rule of [`choose_algorithm`] on raw numbers.
pub fn choose_for(min_density: f64, order: usize, cfg: &MultiplyConfig) -> Algorithm {
    if min_density >= cfg.density_boundary && order >= cfg.strassen_min_order {
        Algorithm::Strassen
    } else {
        Algorithm::Standard
    }
}

/// `c + a * b` on dense leaves (either operand may be `Zero`).
fn leaf_mul_acc<D: Ring>(
    dom: &D,
    a: &Block<D::Elem>,
    b: &Block<D::Elem>,
    c: &Block<D::Elem>,
    n: usize,
) -> Block<D::Elem> {
    let (Block::Dense(a), Block::Dense(b)) = (a, b) else {
        return c.clone();
    };
    let mut bt = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            bt.push(b.data[k * n + j].clone());
        }
    }
    let mut out = match c {
        Block::Dense(c) => c.data.clone(),
        _ => vec![dom.zero(); n * n],
    };
    for i in 0..n {
        let row = &a.data[i * n..(i + 1) * n];
        if row.iter().all(|x| dom.is_zero(x)) {
            continue;
        }
        for j in 0..n {
            let acc = std::mem::replace(&mut out[i * n + j], dom.zero());
            out[i * n + j] = dom.dot_acc(acc, row, &bt[j * n..(j + 1) * n]);
        }
    }
    dense_block(dom, n, out)
}

/// Standard recursion `c + a * b`.
pub(crate) fn mul_acc_standard<D: Ring>(
    ctx: &TaskContext,
    dom: &D,
    a: &Block<D::Elem>,
    b: &Block<D::Elem>,
    c: &Block<D::Elem>,
    shape: Shape,
) -> Block<D::Elem> {
    if a.is_zero() || b.is_zero() {
        return c.clone();
    }
    if shape.is_leaf() {
        return leaf_mul_acc(dom, a, b, c, shape.order);
    }
    let h = shape.half();
    let qa = quadrants(dom, a, shape);
    let qb = quadrants(dom, b, shape);
    let qc = quadrants(dom, c, shape);
    let parts = if ctx.should_spawn(shape.order) {
        // eight products; the second product of each quadrant consumes the first
        let mut g: TaskGraph<Block<D::Elem>> = TaskGraph::new();
        let mut firsts = Vec::with_capacity(4);
        for q in 0..4 {
            let (i, j) = (q / 2, q % 2);
            let (x, y, z) = (qa[2 * i].clone(), qb[j].clone(), qc[q].clone());
            let d = dom.clone();
            firsts.push(g.add_task(format!("A{i}0*B0{j}+C{q}"), &[], move |cx, _| {
                mul_acc_standard(cx, &d, &x, &y, &z, h)
            }));
        }
        for q in 0..4 {
            let (i, j) = (q / 2, q % 2);
            let (x, y) = (qa[2 * i + 1].clone(), qb[2 + j].clone());
            let d = dom.clone();
            g.add_task(format!("A{i}1*B1{j}+P{q}"), &[firsts[q]], move |cx, acc| {
                mul_acc_standard(cx, &d, &x, &y, &acc[0], h)
            });
        }
        let out = ctx.execute(g).unwrap_or_else(|e| panic!("{e}"));
        [out[4].clone(), out[5].clone(), out[6].clone(), out[7].clone()]
    } else {
        [0usize, 1, 2, 3].map(|q| {
            let (i, j) = (q / 2, q % 2);
            let p = mul_acc_standard(ctx, dom, &qa[2 * i], &qb[j], &qc[q], h);
            mul_acc_standard(ctx, dom, &qa[2 * i + 1], &qb[2 + j], &p, h)
        })
    };
    join(dom, parts, shape)
}

/// Strassen's seven-product recursion for `a * b`.
pub(crate) fn mul_strassen<D: Ring>(
    ctx: &TaskContext,
    dom: &D,
    a: &Block<D::Elem>,
    b: &Block<D::Elem>,
    shape: Shape,
    min_order: usize,
) -> Block<D::Elem> {
    if a.is_zero() || b.is_zero() {
        return Block::Zero;
    }
    if shape.order < min_order || shape.is_leaf() {
        return mul_acc_standard(ctx, dom, a, b, &Block::Zero, shape);
    }
    let h = shape.half();
    let [a0, a1, a2, a3] = quadrants(dom, a, shape);
    let [b0, b1, b2, b3] = quadrants(dom, b, shape);
    let add = |x: &Block<D::Elem>, y: &Block<D::Elem>| block::add(dom, x, y, h);
    let sub = |x: &Block<D::Elem>, y: &Block<D::Elem>| block::sub(dom, x, y, h);
    let operands = [
        (add(&a0, &a3), add(&b0, &b3)),
        (add(&a2, &a3), b0.clone()),
        (a0.clone(), sub(&b1, &b3)),
        (a3.clone(), sub(&b2, &b0)),
        (add(&a0, &a1), b3.clone()),
        (sub(&a2, &a0), add(&b0, &b1)),
        (sub(&a1, &a3), add(&b2, &b3)),
    ];
    let m: Vec<Block<D::Elem>> = if ctx.should_spawn(shape.order) {
        let mut g: TaskGraph<Block<D::Elem>> = TaskGraph::new();
        for (k, (x, y)) in operands.into_iter().enumerate() {
            let d = dom.clone();
            g.add_task(format!("M{}", k + 1), &[], move |cx, _| mul_strassen(cx, &d, &x, &y, h, min_order));
        }
        ctx.execute(g).unwrap_or_else(|e| panic!("{e}"))
    } else {
        operands.iter().map(|(x, y)| mul_strassen(ctx, dom, x, y, h, min_order)).collect()
    };
    let c0 = add(&sub(&add(&m[0], &m[3]), &m[4]), &m[6]);
    let c1 = add(&m[2], &m[4]);
    let c2 = add(&m[1], &m[3]);
    let c3 = add(&add(&sub(&m[0], &m[1]), &m[2]), &m[5]);
    join(dom, [c0, c1, c2, c3], shape)
}

/// Block product with the algorithm fixed by `cfg` (and `Auto` resolved by
/// density at this order).
pub(crate) fn mul_block<D: Ring>(
    ctx: &TaskContext,
    dom: &D,
    a: &Block<D::Elem>,
    b: &Block<D::Elem>,
    shape: Shape,
    cfg: &MultiplyConfig,
) -> Block<D::Elem> {
    if a.is_zero() || b.is_zero() {
        return Block::Zero;
    }
    let alg = match cfg.algorithm {
        Algorithm::Auto => {
            let area = (shape.order * shape.order) as f64;
            choose_for(a.nnz().min(b.nnz()) as f64 / area, shape.order, cfg)
        }
        alg => alg,
    };
    match alg {
        Algorithm::Strassen => mul_strassen(ctx, dom, a, b, shape, cfg.strassen_min_order),
        _ => mul_acc_standard(ctx, dom, a, b, &Block::Zero, shape),
    }
}

fn common_shape<D: Ring>(ms: &[&QuadMatrix<D>]) -> Result<Shape> {
    let leaf = ms[0].leaf_order();
    if ms.iter().any(|m| m.leaf_order() != leaf) {
        return Err(Error::ShapeMismatch("operands use different leaf orders".into()));
    }
    let order = ms.iter().map(|m| m.order()).max().unwrap();
    Ok(Shape::new(order, leaf))
}

fn restore<D: Ring>(dom: &D, rows: usize, cols: usize, shape: Shape, root: Block<D::Elem>) -> QuadMatrix<D> {
    let m = QuadMatrix::from_block(dom.clone(), rows, cols, shape, root);
    let minimal = rows.max(cols).max(1).next_power_of_two();
    if minimal < shape.order {
        m.top_left(rows, cols)
    } else {
        m
    }
}

/// `a * b + c` (`c = None` means zero).
pub fn multiply_accumulate<D: Ring>(
    ctx: &TaskContext,
    a: &QuadMatrix<D>,
    b: &QuadMatrix<D>,
    c: Option<&QuadMatrix<D>>,
    cfg: &MultiplyConfig,
) -> Result<QuadMatrix<D>> {
    if a.cols() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "multiply: {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if let Some(c) = c {
        if c.rows() != a.rows() || c.cols() != b.cols() {
            return Err(Error::ShapeMismatch(format!(
                "accumulator is {}x{}, product is {}x{}",
                c.rows(),
                c.cols(),
                a.rows(),
                b.cols()
            )));
        }
    }
    let mut all = vec![a, b];
    all.extend(c);
    let shape = common_shape(&all)?;
    let dom = a.domain();
    let (ab, bb) = (a.with_order(shape.order), b.with_order(shape.order));
    let cb = c.map(|c| c.with_order(shape.order).root().clone()).unwrap_or(Block::Zero);
    let alg = match cfg.algorithm {
        Algorithm::Auto => choose_algorithm(a, b, cfg),
        alg => alg,
    };
    let root = match alg {
        Algorithm::Strassen => {
            let p = mul_strassen(ctx, dom, ab.root(), bb.root(), shape, cfg.strassen_min_order);
            block::add(dom, &p, &cb, shape)
        }
        _ => mul_acc_standard(ctx, dom, ab.root(), bb.root(), &cb, shape),
    };
    Ok(restore(dom, a.rows(), b.cols(), shape, root))
}

/// Strassen product of two square matrices of the same padded order.
pub fn multiply_strassen<D: Ring>(
    ctx: &TaskContext,
    a: &QuadMatrix<D>,
    b: &QuadMatrix<D>,
    cfg: &MultiplyConfig,
) -> Result<QuadMatrix<D>> {
    if !a.is_square() || !b.is_square() || a.order() != b.order() || a.cols() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "strassen needs square operands of one order, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let shape = common_shape(&[a, b])?;
    let root = mul_strassen(ctx, a.domain(), a.root(), b.root(), shape, cfg.strassen_min_order);
    Ok(restore(a.domain(), a.rows(), b.cols(), shape, root))
}

/// Convenience: `a * b` with the default configuration, run inline.
pub fn multiply<D: Ring>(a: &QuadMatrix<D>, b: &QuadMatrix<D>) -> Result<QuadMatrix<D>> {
    multiply_accumulate(&TaskContext::serial(), a, b, None, &MultiplyConfig::default())
}
