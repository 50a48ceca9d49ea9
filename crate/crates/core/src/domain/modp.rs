use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{Field, Ring};
use crate::error::{Error, Result};

/// `Z/p` for an odd prime `p < 2^62`. Elements are canonical in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueRing {
    p: u64,
}

impl ResidueRing {
    /// Panics unless `p` is an odd prime below `2^62`.
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 62) && is_prime_u64(p), "{p} is not an odd prime below 2^62");
        ResidueRing { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul_mod(acc, base, self.p);
            }
            base = mul_mod(base, base, self.p);
            exp >>= 1;
        }
        acc
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    if p < 1 << 32 {
        a * b % p
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}

/// Canonical residue of `a` modulo `p`.
pub fn reduce_mod(a: &BigInt, p: u64) -> u64 {
    a.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits in u64")
}

impl Ring for ResidueRing {
    type Elem = u64;

    fn name(&self) -> &'static str {
        "modp"
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn from_bigint(&self, v: &BigInt) -> u64 {
        reduce_mod(v, self.p)
    }

    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }

    fn div_exact(&self, a: &u64, b: &u64) -> Result<u64> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn div_exact_many(&self, xs: &[u64], b: &u64) -> Result<Vec<u64>> {
        let inv = self.inv(b)?;
        Ok(xs.iter().map(|x| mul_mod(*x, inv, self.p)).collect())
    }

    fn dot_acc(&self, acc: u64, a: &[u64], b: &[u64]) -> u64 {
        let p = self.p as u128;
        if self.p < 1 << 32 {
            // products are < 2^64, so any realistic length fits in a u128
            let s: u128 = a.iter().zip(b).map(|(x, y)| (*x * *y) as u128).sum();
            return ((acc as u128 + s) % p) as u64;
        }
        // products are < 2^124, so 16 of them fit in a u128 before reducing
        let mut total = acc as u128;
        for (ca, cb) in a.chunks(16).zip(b.chunks(16)) {
            let mut s: u128 = 0;
            for (x, y) in ca.iter().zip(cb) {
                s += *x as u128 * *y as u128;
            }
            total = (total + s % p) % p;
        }
        total as u64
    }
}

impl Field for ResidueRing {
    fn inv(&self, a: &u64) -> Result<u64> {
        if *a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(*a, self.p - 2))
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}
