use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Ring;
use crate::error::{Error, Result};

/// Arbitrary precision integers, the reference domain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegerRing;

impl Ring for IntegerRing {
    type Elem = BigInt;

    fn name(&self) -> &'static str {
        "int"
    }

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }

    fn from_bigint(&self, v: &BigInt) -> BigInt {
        v.clone()
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn div_exact(&self, a: &BigInt, b: &BigInt) -> Result<BigInt> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if b.is_one() {
            return Ok(a.clone());
        }
        let (q, r) = a.div_rem(b);
        if !r.is_zero() {
            return Err(Error::InexactDivision);
        }
        Ok(q)
    }

    fn add_assign(&self, a: &mut BigInt, b: &BigInt) {
        *a += b;
    }

    fn dot_acc(&self, acc: BigInt, a: &[BigInt], b: &[BigInt]) -> BigInt {
        let mut acc = acc;
        for (x, y) in a.iter().zip(b) {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            acc += x * y;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn div_exact_cases() {
        let z = IntegerRing;
        let b = |v: i64| BigInt::from(v);
        assert_eq!(z.div_exact(&b(6), &b(3)).unwrap(), b(2));
        assert_eq!(z.div_exact(&b(-6), &b(3)).unwrap(), b(-2));
        assert_eq!(z.div_exact(&b(7), &b(2)), Err(Error::InexactDivision));
        assert_eq!(z.div_exact(&b(7), &b(0)), Err(Error::DivisionByZero));
    }
}
