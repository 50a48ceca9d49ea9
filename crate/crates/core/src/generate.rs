//! Seeded random integer matrices.

use num_bigint::BigInt;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::IntegerRing;
use crate::error::{Error, Result};
use crate::multiply::multiply;
use crate::quad::QuadMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub order: usize,
    pub density: f64,
    /// Entries are nonzero with magnitude below `2^bit_width`.
    pub bit_width: u32,
    pub symmetric: bool,
    /// `G G^T + order I` for a random lower triangular `G` drawn with the
    /// other settings. Entries of the result exceed the bit width.
    pub spd: bool,
}

impl RandomSpec {
    pub fn new(order: usize, density: f64) -> Self {
        RandomSpec { order, density, bit_width: 15, symmetric: false, spd: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidSpec("order must be positive".into()));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidSpec(format!("density {} outside (0, 1]", self.density)));
        }
        if !(1..=62).contains(&self.bit_width) {
            return Err(Error::InvalidSpec(format!("bit width {} outside [1, 62]", self.bit_width)));
        }
        Ok(())
    }
}

fn entry(rng: &mut ChaCha8Rng, bits: u32) -> BigInt {
    let v: i64 = rng.gen_range(1..1i64 << bits);
    BigInt::from(if rng.gen::<bool>() { v } else { -v })
}

/// Cells `(i, j)` in row-major order over `n x n`, or over the lower
/// triangle when `lower` is set.
fn sample_cells(rng: &mut ChaCha8Rng, n: usize, density: f64, lower: bool) -> Vec<(usize, usize)> {
    let total = if lower { n * (n + 1) / 2 } else { n * n };
    let k = ((density * total as f64).round() as usize).clamp(1, total);
    let mut picks = index::sample(rng, total, k).into_vec();
    picks.sort_unstable();
    picks
        .into_iter()
        .map(|c| {
            if lower {
                // row i holds cells i(i+1)/2 .. (i+1)(i+2)/2
                let mut i = (((8 * c + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
                while (i + 1) * (i + 2) / 2 <= c {
                    i += 1;
                }
                while i * (i + 1) / 2 > c {
                    i -= 1;
                }
                (i, c - i * (i + 1) / 2)
            } else {
                (c / n, c % n)
            }
        })
        .collect()
}

/// Deterministic in `(spec, seed)`.
pub fn generate_matrix(spec: &RandomSpec, seed: u64) -> Result<QuadMatrix<IntegerRing>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.order;
    if spec.spd {
        let mut cells = sample_cells(&mut rng, n, spec.density, true);
        cells.retain(|&(i, j)| i != j);
        let mut entries: Vec<_> = cells.into_iter().map(|(i, j)| (i, j, entry(&mut rng, spec.bit_width))).collect();
        entries.extend((0..n).map(|i| (i, i, entry(&mut rng, spec.bit_width))));
        let g = QuadMatrix::from_triplets(IntegerRing, n, n, entries)?;
        let ggt = multiply(&g, &g.transpose())?;
        return ggt.add(&QuadMatrix::identity(IntegerRing, n).scale(&BigInt::from(n)));
    }
    let cells = sample_cells(&mut rng, n, spec.density, spec.symmetric);
    let mut entries = Vec::with_capacity(cells.len() * if spec.symmetric { 2 } else { 1 });
    for (i, j) in cells {
        let v = entry(&mut rng, spec.bit_width);
        if spec.symmetric && i != j {
            entries.push((j, i, v.clone()));
        }
        entries.push((i, j, v));
    }
    QuadMatrix::from_triplets(IntegerRing, n, n, entries)
}
