//! Untyped quadtree nodes and the recursive kernels shared by every algorithm.
//!
//! A block of order `n` is `Zero`, a `Dense` leaf (only when `n <= leaf`), or
//! a `Split` into four children of order `n / 2` (only when `n > leaf`).
//! Blocks never store an all-zero leaf or a split whose children are all
//! `Zero`, so structural equality is matrix equality.

use std::sync::Arc;

use crate::domain::Ring;

#[derive(Debug)]
pub struct Dense<E> {
    pub(crate) order: usize,
    pub(crate) data: Vec<E>,
    pub(crate) nnz: usize,
}

#[derive(Debug)]
pub struct SplitNode<E> {
    pub(crate) children: [Block<E>; 4],
    pub(crate) nnz: usize,
}

#[derive(Debug)]
pub enum Block<E> {
    Zero,
    Dense(Arc<Dense<E>>),
    Split(Arc<SplitNode<E>>),
}

impl<E> Clone for Block<E> {
    fn clone(&self) -> Self {
        match self {
            Block::Zero => Block::Zero,
            Block::Dense(d) => Block::Dense(Arc::clone(d)),
            Block::Split(s) => Block::Split(Arc::clone(s)),
        }
    }
}

impl<E: PartialEq> PartialEq for Block<E> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Block::Zero, Block::Zero) => true,
            (Block::Dense(a), Block::Dense(b)) => {
                Arc::ptr_eq(a, b) || (a.order == b.order && a.data == b.data)
            }
            (Block::Split(a), Block::Split(b)) => Arc::ptr_eq(a, b) || a.children == b.children,
            _ => false,
        }
    }
}

impl<E> Block<E> {
    pub fn is_zero(&self) -> bool {
        matches!(self, Block::Zero)
    }

    pub fn nnz(&self) -> usize {
        match self {
            Block::Zero => 0,
            Block::Dense(d) => d.nnz,
            Block::Split(s) => s.nnz,
        }
    }
}

/// Leaf/split geometry for blocks of one matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub order: usize,
    pub leaf: usize,
}

impl Shape {
    pub fn new(order: usize, leaf: usize) -> Self {
        debug_assert!(order.is_power_of_two() && leaf.is_power_of_two());
        Shape { order, leaf }
    }

    pub fn half(self) -> Shape {
        Shape { order: self.order / 2, leaf: self.leaf }
    }

    pub fn double(self) -> Shape {
        Shape { order: self.order * 2, leaf: self.leaf }
    }

    pub fn is_leaf(self) -> bool {
        self.order <= self.leaf
    }
}

pub fn dense_block<D: Ring>(dom: &D, order: usize, data: Vec<D::Elem>) -> Block<D::Elem> {
    debug_assert_eq!(data.len(), order * order);
    let nnz = data.iter().filter(|x| !dom.is_zero(x)).count();
    if nnz == 0 {
        Block::Zero
    } else {
        Block::Dense(Arc::new(Dense { order, data, nnz }))
    }
}

pub fn split_block<E>(children: [Block<E>; 4]) -> Block<E> {
    let nnz: usize = children.iter().map(Block::nnz).sum();
    if nnz == 0 {
        Block::Zero
    } else {
        Block::Split(Arc::new(SplitNode { children, nnz }))
    }
}

/// Quadrants `[NW, NE, SW, SE]` of a block of the given shape.
pub fn quadrants<D: Ring>(dom: &D, b: &Block<D::Elem>, shape: Shape) -> [Block<D::Elem>; 4] {
    match b {
        Block::Zero => [Block::Zero, Block::Zero, Block::Zero, Block::Zero],
        Block::Split(s) => s.children.clone(),
        Block::Dense(d) => {
            let n = d.order;
            let h = n / 2;
            debug_assert_eq!(n, shape.order);
            let mut out: [Vec<D::Elem>; 4] = Default::default();
            for q in out.iter_mut() {
                q.reserve(h * h);
            }
            for i in 0..n {
                let row = &d.data[i * n..(i + 1) * n];
                let base = if i < h { 0 } else { 2 };
                out[base].extend_from_slice(&row[..h]);
                out[base + 1].extend_from_slice(&row[h..]);
            }
            out.map(|v| dense_block(dom, h, v))
        }
    }
}

/// Inverse of [`quadrants`]: joins four children into a block of `shape`.
pub fn join<D: Ring>(dom: &D, parts: [Block<D::Elem>; 4], shape: Shape) -> Block<D::Elem> {
    if parts.iter().all(Block::is_zero) {
        return Block::Zero;
    }
    if !shape.is_leaf() {
        return split_block(parts);
    }
    let n = shape.order;
    let h = n / 2;
    let mut data = vec![dom.zero(); n * n];
    for (q, part) in parts.iter().enumerate() {
        if let Block::Dense(d) = part {
            let (r0, c0) = ((q / 2) * h, (q % 2) * h);
            for i in 0..h {
                data[(r0 + i) * n + c0..(r0 + i) * n + c0 + h]
                    .clone_from_slice(&d.data[i * h..(i + 1) * h]);
            }
        }
    }
    dense_block(dom, n, data)
}

/// Builds a block from a list of nonzero entries with coordinates local to it.
pub fn from_entries<D: Ring>(
    dom: &D,
    mut entries: Vec<(usize, usize, D::Elem)>,
    shape: Shape,
) -> Block<D::Elem> {
    entries.retain(|e| !dom.is_zero(&e.2));
    build_entries(dom, entries, shape)
}

fn build_entries<D: Ring>(
    dom: &D,
    entries: Vec<(usize, usize, D::Elem)>,
    shape: Shape,
) -> Block<D::Elem> {
    if entries.is_empty() {
        return Block::Zero;
    }
    let n = shape.order;
    if shape.is_leaf() {
        let mut data = vec![dom.zero(); n * n];
        for (i, j, v) in entries {
            data[i * n + j] = v;
        }
        return dense_block(dom, n, data);
    }
    let h = n / 2;
    let mut parts: [Vec<(usize, usize, D::Elem)>; 4] = Default::default();
    for (i, j, v) in entries {
        let q = (i >= h) as usize * 2 + (j >= h) as usize;
        parts[q].push((i % h, j % h, v));
    }
    split_block(parts.map(|p| build_entries(dom, p, shape.half())))
}

/// Visits every stored slot of every non-`Zero` node with its coordinates.
/// Dense leaves report their zero slots too; filter with the domain if needed.
pub fn for_each_stored<E, F: FnMut(usize, usize, &E)>(b: &Block<E>, order: usize, f: &mut F) {
    visit(b, order, 0, 0, f)
}

fn visit<E, F: FnMut(usize, usize, &E)>(b: &Block<E>, order: usize, r0: usize, c0: usize, f: &mut F) {
    match b {
        Block::Zero => {}
        Block::Dense(d) => {
            let n = d.order;
            for (k, v) in d.data.iter().enumerate() {
                f(r0 + k / n, c0 + k % n, v);
            }
        }
        Block::Split(s) => {
            let h = order / 2;
            for (q, c) in s.children.iter().enumerate() {
                visit(c, h, r0 + (q / 2) * h, c0 + (q % 2) * h, f);
            }
        }
    }
}

/// Nonzero entries of a block, filtered through the domain.
pub fn entries<D: Ring>(dom: &D, b: &Block<D::Elem>, order: usize) -> Vec<(usize, usize, D::Elem)> {
    let mut out = Vec::with_capacity(b.nnz());
    for_each_stored(b, order, &mut |i, j, v: &D::Elem| {
        if !dom.is_zero(v) {
            out.push((i, j, v.clone()));
        }
    });
    out
}

pub fn get<D: Ring>(dom: &D, b: &Block<D::Elem>, shape: Shape, i: usize, j: usize) -> D::Elem {
    match b {
        Block::Zero => dom.zero(),
        Block::Dense(d) => d.data[i * d.order + j].clone(),
        Block::Split(s) => {
            let h = shape.order / 2;
            let q = (i >= h) as usize * 2 + (j >= h) as usize;
            get(dom, &s.children[q], shape.half(), i % h, j % h)
        }
    }
}

/// `c * I` of the given shape.
pub fn scalar_identity<D: Ring>(dom: &D, shape: Shape, c: &D::Elem) -> Block<D::Elem> {
    if dom.is_zero(c) {
        return Block::Zero;
    }
    if shape.is_leaf() {
        let n = shape.order;
        let mut data = vec![dom.zero(); n * n];
        for i in 0..n {
            data[i * n + i] = c.clone();
        }
        return dense_block(dom, n, data);
    }
    let h = scalar_identity(dom, shape.half(), c);
    split_block([h.clone(), Block::Zero, Block::Zero, h])
}

/// Elementwise combination; `Zero` operands are short-circuited through
/// `only_left` / `only_right` (which must map zero to zero).
fn zip_with<D: Ring>(
    dom: &D,
    a: &Block<D::Elem>,
    b: &Block<D::Elem>,
    shape: Shape,
    op: &impl Fn(&D::Elem, &D::Elem) -> D::Elem,
    only_left: &impl Fn(&Block<D::Elem>, Shape) -> Block<D::Elem>,
    only_right: &impl Fn(&Block<D::Elem>, Shape) -> Block<D::Elem>,
) -> Block<D::Elem> {
    match (a, b) {
        (Block::Zero, Block::Zero) => Block::Zero,
        (_, Block::Zero) => only_left(a, shape),
        (Block::Zero, _) => only_right(b, shape),
        (Block::Dense(x), Block::Dense(y)) => {
            let data = x.data.iter().zip(&y.data).map(|(p, q)| op(p, q)).collect();
            dense_block(dom, shape.order, data)
        }
        _ => {
            let qa = quadrants(dom, a, shape);
            let qb = quadrants(dom, b, shape);
            let h = shape.half();
            let parts = [0, 1, 2, 3].map(|k| zip_with(dom, &qa[k], &qb[k], h, op, only_left, only_right));
            join(dom, parts, shape)
        }
    }
}

pub fn add<D: Ring>(dom: &D, a: &Block<D::Elem>, b: &Block<D::Elem>, shape: Shape) -> Block<D::Elem> {
    zip_with(dom, a, b, shape, &|x, y| dom.add(x, y), &|x, _| x.clone(), &|y, _| y.clone())
}

pub fn sub<D: Ring>(dom: &D, a: &Block<D::Elem>, b: &Block<D::Elem>, shape: Shape) -> Block<D::Elem> {
    zip_with(
        dom,
        a,
        b,
        shape,
        &|x, y| dom.sub(x, y),
        &|x, _| x.clone(),
        &|y, s| neg(dom, y, s),
    )
}

/// Applies `f` to every stored entry; `f(0)` must be `0`.
pub fn map<D: Ring>(
    dom: &D,
    a: &Block<D::Elem>,
    shape: Shape,
    f: &impl Fn(&D::Elem) -> D::Elem,
) -> Block<D::Elem> {
    match a {
        Block::Zero => Block::Zero,
        Block::Dense(d) => dense_block(dom, d.order, d.data.iter().map(f).collect()),
        Block::Split(s) => {
            let h = shape.half();
            split_block([0, 1, 2, 3].map(|k| map(dom, &s.children[k], h, f)))
        }
    }
}

/// Converts entries into another domain, keeping the tree shape (nodes
/// that become zero are dropped).
pub fn convert<E, D2: Ring>(dst: &D2, a: &Block<E>, f: &impl Fn(&E) -> D2::Elem) -> Block<D2::Elem> {
    match a {
        Block::Zero => Block::Zero,
        Block::Dense(d) => dense_block(dst, d.order, d.data.iter().map(f).collect()),
        Block::Split(s) => split_block([0, 1, 2, 3].map(|k| convert(dst, &s.children[k], f))),
    }
}

/// Exact division of every entry by `c`.
pub fn div_exact<D: Ring>(dom: &D, a: &Block<D::Elem>, shape: Shape, c: &D::Elem) -> crate::error::Result<Block<D::Elem>> {
    Ok(match a {
        Block::Zero => {
            if dom.is_zero(c) {
                return Err(crate::error::Error::DivisionByZero);
            }
            Block::Zero
        }
        Block::Dense(d) => dense_block(dom, d.order, dom.div_exact_many(&d.data, c)?),
        Block::Split(s) => {
            let h = shape.half();
            let mut parts: [Block<D::Elem>; 4] = Default::default();
            for (k, ch) in s.children.iter().enumerate() {
                parts[k] = div_exact(dom, ch, h, c)?;
            }
            split_block(parts)
        }
    })
}

impl<E> Default for Block<E> {
    fn default() -> Self {
        Block::Zero
    }
}

pub fn neg<D: Ring>(dom: &D, a: &Block<D::Elem>, shape: Shape) -> Block<D::Elem> {
    map(dom, a, shape, &|x| dom.neg(x))
}

pub fn scale<D: Ring>(dom: &D, a: &Block<D::Elem>, shape: Shape, c: &D::Elem) -> Block<D::Elem> {
    if dom.is_zero(c) {
        return Block::Zero;
    }
    if *c == dom.one() {
        return a.clone();
    }
    map(dom, a, shape, &|x| dom.mul(x, c))
}

pub fn transpose<D: Ring>(dom: &D, a: &Block<D::Elem>, shape: Shape) -> Block<D::Elem> {
    match a {
        Block::Zero => Block::Zero,
        Block::Dense(d) => {
            let n = d.order;
            let mut data = Vec::with_capacity(n * n);
            for j in 0..n {
                for i in 0..n {
                    data.push(d.data[i * n + j].clone());
                }
            }
            Block::Dense(Arc::new(Dense { order: n, data, nnz: d.nnz }))
        }
        Block::Split(s) => {
            let h = shape.half();
            let [nw, ne, sw, se] = &s.children;
            Block::Split(Arc::new(SplitNode {
                children: [
                    transpose(dom, nw, h),
                    transpose(dom, sw, h),
                    transpose(dom, ne, h),
                    transpose(dom, se, h),
                ],
                nnz: s.nnz,
            }))
        }
    }
}

/// Embeds a block of order `shape.order` as the NW corner of a block of
/// order `to`, filling the new diagonal with `diag` (zero or one).
pub fn embed<D: Ring>(
    dom: &D,
    a: &Block<D::Elem>,
    shape: Shape,
    to: usize,
    diag: &D::Elem,
) -> Block<D::Elem> {
    let mut cur = a.clone();
    let mut s = shape;
    while s.order < to {
        let big = s.double();
        let fill = scalar_identity(dom, s, diag);
        cur = join(dom, [cur, Block::Zero, Block::Zero, fill], big);
        s = big;
    }
    cur
}

/// Keeps rows (or columns) whose selector bit is set, zeroing the others.
pub fn mask<D: Ring>(
    dom: &D,
    a: &Block<D::Elem>,
    shape: Shape,
    keep: &[bool],
    rows: bool,
) -> Block<D::Elem> {
    debug_assert_eq!(keep.len(), shape.order);
    if a.is_zero() || keep.iter().all(|&k| !k) {
        return Block::Zero;
    }
    if keep.iter().all(|&k| k) {
        return a.clone();
    }
    match a {
        Block::Zero => Block::Zero,
        Block::Dense(d) => {
            let n = d.order;
            let data = d
                .data
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let idx = if rows { k / n } else { k % n };
                    if keep[idx] {
                        v.clone()
                    } else {
                        dom.zero()
                    }
                })
                .collect();
            dense_block(dom, n, data)
        }
        Block::Split(s) => {
            let h = shape.half();
            let (lo, hi) = keep.split_at(h.order);
            let parts = [0usize, 1, 2, 3].map(|q| {
                let sel = if rows { q / 2 } else { q % 2 };
                mask(dom, &s.children[q], h, if sel == 0 { lo } else { hi }, rows)
            });
            split_block(parts)
        }
    }
}

/// Moves row `i` of `a` to row `to[i]` (rows mapped to `None` are dropped).
pub fn remap_rows<D: Ring>(
    dom: &D,
    a: &Block<D::Elem>,
    shape: Shape,
    to: &[Option<usize>],
) -> Block<D::Elem> {
    if a.is_zero() {
        return Block::Zero;
    }
    let moved = entries(dom, a, shape.order)
        .into_iter()
        .filter_map(|(i, j, v)| to[i].map(|r| (r, j, v)))
        .collect();
    build_entries(dom, moved, shape)
}

/// Moves column `j` of `a` to column `to[j]`.
pub fn remap_cols<D: Ring>(
    dom: &D,
    a: &Block<D::Elem>,
    shape: Shape,
    to: &[Option<usize>],
) -> Block<D::Elem> {
    if a.is_zero() {
        return Block::Zero;
    }
    let moved = entries(dom, a, shape.order)
        .into_iter()
        .filter_map(|(i, j, v)| to[j].map(|c| (i, c, v)))
        .collect();
    build_entries(dom, moved, shape)
}
