use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Ring;
use crate::error::{Error, Result};

/// Dense univariate polynomial with integer coefficients, lowest degree first.
///
/// Canonical form has no trailing zero coefficients; the zero polynomial is
/// the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn add(&self, other: &IntPoly) -> IntPoly {
        let (long, short) = if self.0.len() >= other.0.len() {
            (&self.0, &other.0)
        } else {
            (&other.0, &self.0)
        };
        let mut out = long.clone();
        for (o, s) in out.iter_mut().zip(short) {
            *o += s;
        }
        IntPoly::new(out)
    }

    fn neg(&self) -> IntPoly {
        IntPoly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::default();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Long division over Z; fails unless every step divides exactly and the
    /// remainder vanishes.
    fn div_exact(&self, divisor: &IntPoly) -> Result<IntPoly> {
        let Some(dd) = divisor.degree() else {
            return Err(Error::DivisionByZero);
        };
        if self.is_zero() {
            return Ok(IntPoly::default());
        }
        if dd == 0 {
            let c = &divisor.0[0];
            let mut out = Vec::with_capacity(self.0.len());
            for a in &self.0 {
                let (q, r) = a.div_rem(c);
                if !r.is_zero() {
                    return Err(Error::InexactDivision);
                }
                out.push(q);
            }
            return Ok(IntPoly::new(out));
        }
        let mut rem = self.0.clone();
        let Some(nd) = self.degree().filter(|&n| n >= dd) else {
            return Err(Error::InexactDivision);
        };
        let lead = divisor.0.last().unwrap();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            for (j, c) in divisor.0.iter().enumerate() {
                rem[k + j] -= &q * c;
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::InexactDivision);
        }
        Ok(IntPoly::new(quot))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// `Z[x]`, the univariate polynomial domain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolyRing;

impl Ring for PolyRing {
    type Elem = IntPoly;

    fn name(&self) -> &'static str {
        "poly"
    }

    fn zero(&self) -> IntPoly {
        IntPoly::default()
    }

    fn one(&self) -> IntPoly {
        IntPoly(vec![BigInt::one()])
    }

    fn is_zero(&self, a: &IntPoly) -> bool {
        a.is_zero()
    }

    fn from_bigint(&self, v: &BigInt) -> IntPoly {
        IntPoly::constant(v.clone())
    }

    fn add(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        a.add(b)
    }

    fn sub(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        a.add(&b.neg())
    }

    fn neg(&self, a: &IntPoly) -> IntPoly {
        a.neg()
    }

    fn mul(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        a.mul(b)
    }

    fn div_exact(&self, a: &IntPoly, b: &IntPoly) -> Result<IntPoly> {
        a.div_exact(b)
    }
}
