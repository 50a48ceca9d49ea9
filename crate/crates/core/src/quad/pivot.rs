use serde::{Deserialize, Serialize};

/// A 0/1 diagonal matrix, stored as a bitset over the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagSelector {
    len: usize,
    words: Vec<u64>,
}

impl DiagSelector {
    pub fn empty(len: usize) -> Self {
        DiagSelector { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn full(len: usize) -> Self {
        Self::empty(len).complement()
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Self::empty(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.set(i);
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The involution `I - S`.
    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let tail = self.len % 64;
        if tail != 0 {
            *words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        DiagSelector { len: self.len, words }
    }

    /// Product of two diagonal selectors (bitwise and).
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        DiagSelector { len: self.len, words }
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.contains(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.contains(i))
    }
}

/// A member `E` of `P_n`: a partial permutation matrix, stored as its unit
/// positions `(row, col)` sorted by row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PivotStructure {
    order: usize,
    pivots: Vec<(usize, usize)>,
}

impl PivotStructure {
    pub fn empty(order: usize) -> Self {
        PivotStructure { order, pivots: Vec::new() }
    }

    /// Panics if two pivots share a row or a column.
    pub fn new(order: usize, mut pivots: Vec<(usize, usize)>) -> Self {
        pivots.sort_unstable();
        let mut rows = vec![false; order];
        let mut cols = vec![false; order];
        for &(r, c) in &pivots {
            assert!(r < order && c < order, "pivot ({r}, {c}) outside order {order}");
            assert!(!rows[r] && !cols[c], "pivot ({r}, {c}) repeats a row or column");
            rows[r] = true;
            cols[c] = true;
        }
        PivotStructure { order, pivots }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[(usize, usize)] {
        &self.pivots
    }

    /// `I_E = E E^T`: the pivot rows.
    pub fn row_selector(&self) -> DiagSelector {
        let mut s = DiagSelector::empty(self.order);
        for &(r, _) in &self.pivots {
            s.set(r);
        }
        s
    }

    /// `J_E = E^T E`: the pivot columns.
    pub fn col_selector(&self) -> DiagSelector {
        let mut s = DiagSelector::empty(self.order);
        for &(_, c) in &self.pivots {
            s.set(c);
        }
        s
    }

    /// `col_of_row[r]` is the pivot column of row `r`.
    pub fn col_of_row(&self) -> Vec<Option<usize>> {
        let mut m = vec![None; self.order];
        for &(r, c) in &self.pivots {
            m[r] = Some(c);
        }
        m
    }

    pub fn row_of_col(&self) -> Vec<Option<usize>> {
        let mut m = vec![None; self.order];
        for &(r, c) in &self.pivots {
            m[c] = Some(r);
        }
        m
    }

    /// Assembles `[[nw, ne], [sw, se]]` from four structures of half order.
    pub fn assemble(parts: [&PivotStructure; 4]) -> PivotStructure {
        let h = parts[0].order;
        let mut pivots = Vec::new();
        for (q, p) in parts.iter().enumerate() {
            assert_eq!(p.order, h);
            let (r0, c0) = ((q / 2) * h, (q % 2) * h);
            pivots.extend(p.pivots.iter().map(|&(r, c)| (r + r0, c + c0)));
        }
        PivotStructure::new(2 * h, pivots)
    }

    /// Sign of the permutation when the structure is a full permutation.
    pub fn permutation_sign(&self) -> Option<i32> {
        if self.rank() != self.order {
            return None;
        }
        let perm = self.col_of_row();
        let mut seen = vec![false; self.order];
        let mut sign = 1;
        for start in 0..self.order {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i].unwrap();
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        Some(sign)
    }

    /// Dense 0/1 matrix (row-major).
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.order]; self.order];
        for &(r, c) in &self.pivots {
            m[r][c] = 1;
        }
        m
    }
}
