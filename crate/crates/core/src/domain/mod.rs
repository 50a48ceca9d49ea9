//! Coefficient domains.
//!
//! A domain is a small value (`IntegerRing`, `ResidueRing { p }`, ...) that
//! carries whatever context the arithmetic needs; elements are plain data.
//! Matrices hold a copy of their domain, so residues modulo different primes
//! never mix.

mod float;
mod integer;
mod modp;
mod poly;
mod rational;

use std::fmt::Debug;

use num_bigint::BigInt;

use crate::error::Result;

pub use float::Float64Field;
pub use integer::IntegerRing;
pub use modp::{is_prime_u64, reduce_mod, ResidueRing};
pub use poly::{IntPoly, PolyRing};
pub use rational::{BigRational, RationalField};

/// A commutative domain: a commutative ring with unit and exact division
/// by known divisors.
pub trait Ring: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Send + Sync + 'static;

    fn name(&self) -> &'static str;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_bigint(&self, v: &BigInt) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Returns `q` with `q * b == a`.
    ///
    /// Fails with `DivisionByZero` for `b == 0` and `InexactDivision` when
    /// `b` does not divide `a`. The remainder is always checked.
    fn div_exact(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;

    /// `div_exact` applied to every element of `xs`.
    fn div_exact_many(&self, xs: &[Self::Elem], b: &Self::Elem) -> Result<Vec<Self::Elem>> {
        xs.iter().map(|x| self.div_exact(x, b)).collect()
    }

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(v))
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }

    /// `acc + sum_k a[k] * b[k]`; the dense leaf kernels funnel through here.
    fn dot_acc(&self, acc: Self::Elem, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        let mut acc = acc;
        for (x, y) in a.iter().zip(b) {
            if self.is_zero(x) || self.is_zero(y) {
                continue;
            }
            let p = self.mul(x, y);
            self.add_assign(&mut acc, &p);
        }
        acc
    }
}

/// A field: every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }
}

/// Fields with an order and (partial) square roots, as needed by Cholesky.
pub trait OrderedField: Field {
    fn is_positive(&self, a: &Self::Elem) -> bool;

    /// Positive square root, or `None` when it does not exist in the field.
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem>;
}
