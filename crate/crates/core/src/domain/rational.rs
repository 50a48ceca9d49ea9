use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Field, OrderedField, Ring};
use crate::error::{Error, Result};

pub use num_rational::BigRational;

/// Exact rationals. `BigRational` keeps values reduced with a positive
/// denominator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RationalField;

impl Ring for RationalField {
    type Elem = BigRational;

    fn name(&self) -> &'static str {
        "rational"
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn div_exact(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        self.div(a, b)
    }
}

impl Field for RationalField {
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a.recip())
    }

    fn div(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a / b)
    }
}

impl OrderedField for RationalField {
    fn is_positive(&self, a: &BigRational) -> bool {
        a.is_positive()
    }

    fn sqrt(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_negative() {
            return None;
        }
        let n = exact_sqrt(a.numer())?;
        let d = exact_sqrt(a.denom())?;
        Some(BigRational::new(n, d))
    }
}

fn exact_sqrt(v: &BigInt) -> Option<BigInt> {
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn lowest_terms_and_inverse() {
        let f = RationalField;
        let x = q(4, -6);
        assert_eq!(x.numer(), &BigInt::from(-2));
        assert_eq!(x.denom(), &BigInt::from(3));
        assert_eq!(f.inv(&q(2, 3)).unwrap(), q(3, 2));
        assert_eq!(f.inv(&q(1, 1)).unwrap(), q(1, 1));
        assert_eq!(f.inv(&q(0, 1)), Err(Error::DivisionByZero));
    }

    #[test]
    fn square_roots() {
        let f = RationalField;
        assert_eq!(f.sqrt(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(f.sqrt(&q(2, 1)), None);
        assert_eq!(f.sqrt(&q(-4, 1)), None);
    }
}
