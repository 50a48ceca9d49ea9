//! Multi-modular evaluation of the extended adjoint mapping for integer
//! matrices: run `A_ext` modulo many word-sized primes and lift `A`, `S` and
//! `d` back by Chinese remaindering.
//!
//! A prime is unlucky when one of the exact divisions hits a zero residue or
//! when its pivot structure disagrees with the majority of the other primes.
//! Unlucky primes are discarded and replaced by fresh ones.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::adjoint::{adjoint_extended_with, AdjointResult};
use crate::domain::{is_prime_u64, reduce_mod, IntegerRing, ResidueRing};
use crate::engine::TaskContext;
use crate::error::{Error, Result};
use crate::multiply::MultiplyConfig;
use crate::quad::block::{self, Block, Shape};
use crate::quad::{PadMode, PivotStructure, QuadMatrix};

pub const DEFAULT_PRIME_BITS: u32 = 31;

/// Pairwise distinct odd primes together with their product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeBasis {
    pub primes: Vec<u64>,
    pub product: BigInt,
}

impl PrimeBasis {
    pub fn new(primes: Vec<u64>) -> Self {
        let product = primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
        PrimeBasis { primes, product }
    }
}

/// `ceil(n^(n/2) * B^n)` for an `n x n` matrix with largest entry `B` in
/// absolute value. Bounds the determinant and every entry of `A` and `S`.
pub fn adjoint_entry_bound(m: &QuadMatrix<IntegerRing>) -> BigInt {
    let b = m.triplets().into_iter().map(|(_, _, v)| v.abs()).max().unwrap_or_default();
    hadamard_bound(m.rows(), &b)
}

pub fn hadamard_bound(n: usize, b: &BigInt) -> BigInt {
    let n32 = u32::try_from(n).expect("order fits in u32");
    let square = BigInt::from(n).pow(n32) * b.pow(2 * n32);
    let root = square.sqrt();
    if &root * &root < square {
        root + 1
    } else {
        root
    }
}

/// Largest prime strictly below `x`.
fn prime_below(x: u64) -> u64 {
    let mut c = x - 1;
    while !is_prime_u64(c) {
        c -= 1;
    }
    c
}

/// Descending primes below `2^bits`.
fn primes_from(bits: u32) -> impl Iterator<Item = u64> {
    let mut next = 1u64 << bits;
    std::iter::from_fn(move || {
        next = prime_below(next);
        Some(next)
    })
}

fn check_bits(bits: u32) -> Result<()> {
    if (16..=62).contains(&bits) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("prime bits {bits} outside [16, 62]")))
    }
}

/// The largest primes below `2^prime_bits`, as few as needed for their
/// product to exceed `2 * bound + 1`.
pub fn choose_primes(bound: &BigInt, prime_bits: u32) -> Result<PrimeBasis> {
    check_bits(prime_bits)?;
    let target = bound * 2 + 1;
    let mut primes = Vec::new();
    let mut product = BigInt::one();
    for p in primes_from(prime_bits) {
        if product > target {
            break;
        }
        primes.push(p);
        product *= p;
    }
    Ok(PrimeBasis { primes, product })
}

/// Garner reconstruction for a fixed list of primes.
pub struct Reconstructor {
    primes: Vec<u64>,
    /// `inv[i][j] = p_j^-1 mod p_i` for `j < i`.
    inv: Vec<Vec<u64>>,
    product: BigInt,
    half: BigInt,
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl Reconstructor {
    pub fn new(primes: &[u64]) -> Result<Self> {
        let mut seen = primes.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != primes.len() || primes.iter().any(|&p| p < 2) {
            return Err(Error::InconsistentResidues);
        }
        let inv = primes
            .iter()
            .enumerate()
            .map(|(i, &pi)| {
                let r = ResidueRing::new(pi);
                primes[..i].iter().map(|&pj| r.pow(pj % pi, pi - 2)).collect()
            })
            .collect();
        let product = primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
        let half = &product >> 1u32;
        Ok(Reconstructor { primes: primes.to_vec(), inv, product, half })
    }

    pub fn product(&self) -> &BigInt {
        &self.product
    }

    /// The representative in `(-P/2, P/2]` of the residues (one per prime,
    /// in the order given to [`Reconstructor::new`]).
    pub fn lift(&self, residues: &[u64]) -> Result<BigInt> {
        if residues.len() != self.primes.len() {
            return Err(Error::InconsistentResidues);
        }
        if residues.iter().all(|&r| r == 0) {
            return Ok(BigInt::zero());
        }
        let k = self.primes.len();
        let mut digits = Vec::with_capacity(k);
        for i in 0..k {
            let p = self.primes[i];
            if residues[i] >= p {
                return Err(Error::InconsistentResidues);
            }
            // x_i = (r_i - (v_0 + v_1 p_0 + ...)) / (p_0 ... p_{i-1}) mod p_i
            let mut x = residues[i];
            for j in 0..i {
                let v = digits[j] % p;
                x = if x >= v { x - v } else { x + p - v };
                x = mul_mod(x, self.inv[i][j], p);
            }
            digits.push(x);
        }
        let mut out = BigInt::from(digits[k - 1]);
        for i in (0..k - 1).rev() {
            out = out * self.primes[i] + digits[i];
        }
        if out > self.half {
            out -= &self.product;
        }
        Ok(out)
    }
}

/// The unique `x` in `(-P/2, P/2]` with `x = value_i mod prime_i`.
pub fn crt_reconstruct(residues: &[(u64, u64)]) -> Result<BigInt> {
    if residues.is_empty() {
        return Err(Error::InconsistentResidues);
    }
    let primes: Vec<u64> = residues.iter().map(|&(_, p)| p).collect();
    let values: Vec<u64> = residues.iter().map(|&(v, _)| v).collect();
    Reconstructor::new(&primes)?.lift(&values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrtConfig {
    pub prime_bits: u32,
    /// Primes tried before the regular sequence; used to exercise unlucky
    /// prime handling.
    pub inject: Vec<u64>,
    pub multiply: MultiplyConfig,
}

impl Default for CrtConfig {
    fn default() -> Self {
        CrtConfig { prime_bits: DEFAULT_PRIME_BITS, inject: Vec::new(), multiply: MultiplyConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtReport {
    pub bound: BigInt,
    /// Number of primes the vote plans for: the basis size, but at least 3.
    pub planned: usize,
    pub used: Vec<u64>,
    pub unlucky: Vec<u64>,
}

type ModRun = (u64, Result<AdjointResult<ResidueRing>>);

fn run_batch(ctx: &TaskContext, m: &QuadMatrix<IntegerRing>, primes: &[u64], cfg: &MultiplyConfig) -> Vec<ModRun> {
    let one_run = |cx: &TaskContext, p: u64, m: &QuadMatrix<IntegerRing>, cfg: &MultiplyConfig| {
        let r = ResidueRing::new(p);
        let mp = m.map_domain(r, |v| reduce_mod(v, p));
        adjoint_extended_with(cx, &mp, &1, cfg)
    };
    if ctx.is_parallel() && primes.len() > 1 {
        let tasks: Vec<Box<dyn FnOnce(&TaskContext) -> Result<AdjointResult<ResidueRing>> + Send>> = primes
            .iter()
            .map(|&p| {
                let (m, cfg) = (m.clone(), *cfg);
                Box::new(move |cx: &TaskContext| one_run(cx, p, &m, &cfg)) as Box<_>
            })
            .collect();
        match ctx.join_all("crt primes", tasks) {
            Ok(out) => primes.iter().copied().zip(out).collect(),
            Err(e) => primes.iter().map(|&p| (p, Err(Error::from(e.clone())))).collect(),
        }
    } else {
        primes.iter().map(|&p| (p, one_run(ctx, p, m, cfg))).collect()
    }
}

/// Pivot structure with the most votes; ties go to the one seen first.
fn majority(runs: &[(u64, AdjointResult<ResidueRing>)]) -> Option<(PivotStructure, usize)> {
    let mut votes: Vec<(PivotStructure, usize)> = Vec::new();
    for (_, r) in runs {
        match votes.iter_mut().find(|(e, _)| *e == r.e) {
            Some(v) => v.1 += 1,
            None => votes.push((r.e.clone(), 1)),
        }
    }
    let best = votes.iter().map(|v| v.1).max()?;
    votes.into_iter().find(|v| v.1 == best)
}

/// Lifts the blocks at one position of every modular result.
fn lift_block(rec: &Reconstructor, blocks: &[&Block<u64>], shape: Shape) -> Result<Block<BigInt>> {
    if blocks.iter().all(|b| b.is_zero()) {
        return Ok(Block::Zero);
    }
    if shape.is_leaf() {
        let n = shape.order;
        let mut residues = vec![0u64; blocks.len()];
        let mut data = Vec::with_capacity(n * n);
        for k in 0..n * n {
            for (r, b) in residues.iter_mut().zip(blocks) {
                *r = match b {
                    Block::Dense(d) => d.data[k],
                    _ => 0,
                };
            }
            data.push(rec.lift(&residues)?);
        }
        return Ok(block::dense_block(&IntegerRing, n, data));
    }
    let h = shape.half();
    let zero = Block::Zero;
    let mut parts: [Block<BigInt>; 4] = Default::default();
    for (q, part) in parts.iter_mut().enumerate() {
        let children: Vec<&Block<u64>> = blocks
            .iter()
            .map(|b| match b {
                Block::Split(s) => &s.children[q],
                _ => &zero,
            })
            .collect();
        *part = lift_block(rec, &children, h)?;
    }
    Ok(block::split_block(parts))
}

fn lift_matrix(rec: &Reconstructor, mats: &[&QuadMatrix<ResidueRing>]) -> Result<QuadMatrix<IntegerRing>> {
    let shape = mats[0].shape();
    let roots: Vec<&Block<u64>> = mats.iter().map(|m| m.root()).collect();
    let root = lift_block(rec, &roots, shape)?;
    Ok(QuadMatrix::from_block(IntegerRing, mats[0].rows(), mats[0].cols(), shape, root))
}

/// `A_ext(m, 1)` computed modulo primes of `prime_bits` bits and lifted.
pub fn adjoint_via_crt(ctx: &TaskContext, m: &QuadMatrix<IntegerRing>, prime_bits: u32) -> Result<AdjointResult<IntegerRing>> {
    let cfg = CrtConfig { prime_bits, ..Default::default() };
    Ok(adjoint_via_crt_with(ctx, m, &cfg)?.0)
}

pub fn adjoint_via_crt_with(
    ctx: &TaskContext,
    m: &QuadMatrix<IntegerRing>,
    cfg: &CrtConfig,
) -> Result<(AdjointResult<IntegerRing>, CrtReport)> {
    check_bits(cfg.prime_bits)?;
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!("A_ext needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    for &p in &cfg.inject {
        if p <= 2 || p >= 1 << 62 || !is_prime_u64(p) {
            return Err(Error::InvalidConfig(format!("injected modulus {p} is not an odd prime below 2^62")));
        }
    }
    let padded = m.embed_padded(PadMode::IdentityPad);
    let bound = adjoint_entry_bound(&padded);
    let basis = choose_primes(&bound, cfg.prime_bits)?;
    let planned = basis.primes.len().max(3);
    let limit = 3 * planned;
    let target = &bound * 2;

    let injected = cfg.inject.clone();
    let mut stream = injected
        .clone()
        .into_iter()
        .chain(primes_from(cfg.prime_bits).filter(move |p| !injected.contains(p)));
    let mut good: Vec<(u64, AdjointResult<ResidueRing>)> = Vec::new();
    let mut unlucky = Vec::new();
    let mut consumed = 0;
    loop {
        if good.len() >= 3 {
            let (e, votes) = majority(&good).expect("nonempty");
            let product = good.iter().filter(|(_, r)| r.e == e).fold(BigInt::one(), |acc, (p, _)| acc * *p);
            if votes * 2 > good.len() && product > target {
                let (keep, drop): (Vec<_>, Vec<_>) = good.into_iter().partition(|(_, r)| r.e == e);
                unlucky.extend(drop.into_iter().map(|(p, _)| p));
                good = keep;
                break;
            }
        }
        let want = planned.saturating_sub(good.len()).max(1);
        if consumed + want > limit {
            return Err(Error::UnluckyPrimeExhaustion { consumed, needed: planned });
        }
        let batch: Vec<u64> = stream.by_ref().take(want).collect();
        consumed += batch.len();
        for (p, r) in run_batch(ctx, &padded, &batch, &cfg.multiply) {
            match r {
                Ok(r) => good.push((p, r)),
                Err(Error::DivisionByZero) | Err(Error::InexactDivision) => unlucky.push(p),
                Err(e) => return Err(e),
            }
        }
    }
    unlucky.sort_unstable();

    let primes: Vec<u64> = good.iter().map(|(p, _)| *p).collect();
    let rec = Reconstructor::new(&primes)?;
    let a = lift_matrix(&rec, &good.iter().map(|(_, r)| &r.a).collect::<Vec<_>>())?;
    let s = lift_matrix(&rec, &good.iter().map(|(_, r)| &r.s).collect::<Vec<_>>())?;
    let d = rec.lift(&good.iter().map(|(_, r)| r.d).collect::<Vec<_>>())?;
    let e = good[0].1.e.clone();
    let result = AdjointResult { a, s, e, d, d0: BigInt::one(), logical_order: m.rows() };
    Ok((result, CrtReport { bound, planned, used: primes, unlucky }))
}
