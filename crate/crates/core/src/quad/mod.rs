//! Quadtree block matrices.

pub(crate) mod block;
mod pivot;

use std::collections::HashSet;
use std::fmt;

use crate::domain::Ring;
use crate::error::{Error, Result};

pub use block::{Block, Shape};
pub use pivot::{DiagSelector, PivotStructure};

pub const DEFAULT_LEAF_ORDER: usize = 32;

/// How [`QuadMatrix::embed_padded`] fills the rows and columns it adds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadMode {
    ZeroPad,
    IdentityPad,
}

/// A matrix stored as a quadtree of order `2^k`.
///
/// The logical shape is `rows x cols`; everything outside it is zero. Nodes
/// of order at most `leaf_order` are dense leaves, larger ones split into
/// four quadrants, and any all-zero subtree is the `Zero` node.
#[derive(Clone, PartialEq)]
pub struct QuadMatrix<D: Ring> {
    dom: D,
    rows: usize,
    cols: usize,
    shape: Shape,
    root: Block<D::Elem>,
}

fn padded_order(rows: usize, cols: usize) -> usize {
    rows.max(cols).max(1).next_power_of_two()
}

impl<D: Ring> QuadMatrix<D> {
    pub fn zero(dom: D, rows: usize, cols: usize) -> Self {
        Self::zero_with_leaf(dom, rows, cols, DEFAULT_LEAF_ORDER)
    }

    pub fn zero_with_leaf(dom: D, rows: usize, cols: usize, leaf_order: usize) -> Self {
        assert!(leaf_order.is_power_of_two(), "leaf order must be a power of two");
        QuadMatrix {
            dom,
            rows,
            cols,
            shape: Shape::new(padded_order(rows, cols), leaf_order),
            root: Block::Zero,
        }
    }

    pub fn identity(dom: D, n: usize) -> Self {
        Self::identity_with_leaf(dom, n, DEFAULT_LEAF_ORDER)
    }

    pub fn identity_with_leaf(dom: D, n: usize, leaf_order: usize) -> Self {
        let one = dom.one();
        let entries = (0..n).map(|i| (i, i, one.clone())).collect();
        Self::from_triplets_with_leaf(dom, n, n, entries, leaf_order)
            .expect("diagonal entries are valid")
    }

    pub fn from_triplets(
        dom: D,
        rows: usize,
        cols: usize,
        entries: Vec<(usize, usize, D::Elem)>,
    ) -> Result<Self> {
        Self::from_triplets_with_leaf(dom, rows, cols, entries, DEFAULT_LEAF_ORDER)
    }

    /// Builds the canonical quadtree for a list of `(row, col, value)`.
    /// Zero values are dropped; repeated coordinates are rejected.
    pub fn from_triplets_with_leaf(
        dom: D,
        rows: usize,
        cols: usize,
        entries: Vec<(usize, usize, D::Elem)>,
        leaf_order: usize,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(entries.len());
        for &(row, col, _) in &entries {
            if row >= rows || col >= cols {
                return Err(Error::IndexOutOfRange { row, col, rows, cols });
            }
            if !seen.insert((row, col)) {
                return Err(Error::DuplicateEntry { row, col });
            }
        }
        let mut m = Self::zero_with_leaf(dom, rows, cols, leaf_order);
        m.root = block::from_entries(&m.dom, entries, m.shape);
        Ok(m)
    }

    /// Row-major dense input; every row must have the same length.
    pub fn from_rows(dom: D, data: Vec<Vec<D::Elem>>) -> Result<Self> {
        Self::from_rows_with_leaf(dom, data, DEFAULT_LEAF_ORDER)
    }

    pub fn from_rows_with_leaf(dom: D, data: Vec<Vec<D::Elem>>, leaf_order: usize) -> Result<Self> {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        if data.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let entries = data
            .into_iter()
            .enumerate()
            .flat_map(|(i, r)| r.into_iter().enumerate().map(move |(j, v)| (i, j, v)))
            .collect();
        Self::from_triplets_with_leaf(dom, rows, cols, entries, leaf_order)
    }

    pub fn from_fn(dom: D, rows: usize, cols: usize, f: impl Fn(usize, usize) -> D::Elem) -> Self {
        let entries = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, f(i, j)))
            .collect();
        Self::from_triplets(dom, rows, cols, entries).expect("coordinates are in range")
    }

    pub(crate) fn from_block(dom: D, rows: usize, cols: usize, shape: Shape, root: Block<D::Elem>) -> Self {
        debug_assert!(shape.order >= rows.max(cols));
        QuadMatrix { dom, rows, cols, shape, root }
    }

    pub fn domain(&self) -> &D {
        &self.dom
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Padded order `2^k`.
    pub fn order(&self) -> usize {
        self.shape.order
    }

    pub fn leaf_order(&self) -> usize {
        self.shape.leaf
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn root(&self) -> &Block<D::Elem> {
        &self.root
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.root.is_zero()
    }

    pub fn nnz(&self) -> usize {
        self.root.nnz()
    }

    /// Fraction of nonzero entries over the logical area.
    pub fn density(&self) -> f64 {
        let area = self.rows * self.cols;
        if area == 0 {
            0.0
        } else {
            self.nnz() as f64 / area as f64
        }
    }

    pub fn get(&self, i: usize, j: usize) -> D::Elem {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
        block::get(&self.dom, &self.root, self.shape, i, j)
    }

    /// Nonzero entries sorted by `(row, col)`.
    pub fn triplets(&self) -> Vec<(usize, usize, D::Elem)> {
        let mut t = block::entries(&self.dom, &self.root, self.shape.order);
        t.sort_unstable_by_key(|e| (e.0, e.1));
        t
    }

    pub fn to_dense(&self) -> Vec<Vec<D::Elem>> {
        let mut out = vec![vec![self.dom.zero(); self.cols]; self.rows];
        for (i, j, v) in block::entries(&self.dom, &self.root, self.shape.order) {
            out[i][j] = v;
        }
        out
    }

    fn same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{what}: leaf orders {} vs {}",
                self.shape.leaf, other.shape.leaf
            )));
        }
        Ok(())
    }

    fn with_root(&self, root: Block<D::Elem>) -> Self {
        QuadMatrix { dom: self.dom.clone(), rows: self.rows, cols: self.cols, shape: self.shape, root }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        Ok(self.with_root(block::add(&self.dom, &self.root, &other.root, self.shape)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        Ok(self.with_root(block::sub(&self.dom, &self.root, &other.root, self.shape)))
    }

    pub fn neg(&self) -> Self {
        self.with_root(block::neg(&self.dom, &self.root, self.shape))
    }

    pub fn scale(&self, d: &D::Elem) -> Self {
        self.with_root(block::scale(&self.dom, &self.root, self.shape, d))
    }

    pub fn transpose(&self) -> Self {
        QuadMatrix {
            dom: self.dom.clone(),
            rows: self.cols,
            cols: self.rows,
            shape: self.shape,
            root: block::transpose(&self.dom, &self.root, self.shape),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.transpose().root == self.root
    }

    /// Square matrix of order `2^k` containing `self` in its top-left corner.
    /// `IdentityPad` puts ones on the added diagonal, which keeps determinant
    /// and kernel of the original matrix recoverable.
    pub fn embed_padded(&self, mode: PadMode) -> Self {
        let n = self.shape.order;
        let mut root = self.root.clone();
        if mode == PadMode::IdentityPad && self.rows.max(self.cols) < n {
            let k = self.rows.max(self.cols);
            let one = self.dom.one();
            let fill = (k..n).map(|i| (i, i, one.clone())).collect();
            let pad = block::from_entries(&self.dom, fill, self.shape);
            root = block::add(&self.dom, &root, &pad, self.shape);
        }
        QuadMatrix { dom: self.dom.clone(), rows: n, cols: n, shape: self.shape, root }
    }

    /// Same matrix stored at a larger padded order (zero padding, logical
    /// shape unchanged).
    pub fn with_order(&self, order: usize) -> Self {
        assert!(order.is_power_of_two() && order >= self.shape.order);
        let root = block::embed(&self.dom, &self.root, self.shape, order, &self.dom.zero());
        QuadMatrix {
            dom: self.dom.clone(),
            rows: self.rows,
            cols: self.cols,
            shape: Shape::new(order, self.shape.leaf),
            root,
        }
    }

    /// Top-left `rows x cols` corner, re-stored at its own minimal order.
    pub fn top_left(&self, rows: usize, cols: usize) -> Self {
        assert!(rows <= self.rows && cols <= self.cols);
        let entries = self
            .triplets()
            .into_iter()
            .filter(|&(i, j, _)| i < rows && j < cols)
            .collect();
        Self::from_triplets_with_leaf(self.dom.clone(), rows, cols, entries, self.shape.leaf)
            .expect("entries come from a valid matrix")
    }

    /// Re-stores the matrix with a different leaf order.
    pub fn with_leaf_order(&self, leaf_order: usize) -> Self {
        if leaf_order == self.shape.leaf {
            return self.clone();
        }
        Self::from_triplets_with_leaf(self.dom.clone(), self.rows, self.cols, self.triplets(), leaf_order)
            .expect("entries come from a valid matrix")
    }

    /// Converts every entry into another domain.
    pub fn map_domain<D2: Ring>(&self, target: D2, f: impl Fn(&D::Elem) -> D2::Elem) -> QuadMatrix<D2> {
        let root = block::convert(&target, &self.root, &f);
        QuadMatrix { dom: target, rows: self.rows, cols: self.cols, shape: self.shape, root }
    }
}

impl<D: Ring> fmt::Debug for QuadMatrix<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QuadMatrix<{}>({}x{}, order {}, nnz {})",
            self.dom.name(),
            self.rows,
            self.cols,
            self.shape.order,
            self.nnz()
        )?;
        if self.rows * self.cols <= 64 {
            write!(f, " {:?}", self.to_dense())?;
        }
        Ok(())
    }
}

impl PivotStructure {
    /// The 0/1 matrix `E` over a domain.
    pub fn to_matrix<D: Ring>(&self, dom: D, leaf_order: usize) -> QuadMatrix<D> {
        let one = dom.one();
        let entries = self.pivots().iter().map(|&(r, c)| (r, c, one.clone())).collect();
        QuadMatrix::from_triplets_with_leaf(dom, self.order(), self.order(), entries, leaf_order)
            .expect("pivots are in range")
    }
}

impl DiagSelector {
    pub fn to_matrix<D: Ring>(&self, dom: D, leaf_order: usize) -> QuadMatrix<D> {
        let one = dom.one();
        let entries = self.iter().map(|i| (i, i, one.clone())).collect();
        QuadMatrix::from_triplets_with_leaf(dom, self.len(), self.len(), entries, leaf_order)
            .expect("selector indices are in range")
    }
}
