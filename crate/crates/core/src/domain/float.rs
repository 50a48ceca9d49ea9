use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{Field, OrderedField, Ring};
use crate::error::{Error, Result};

/// IEEE double precision. Only approximately a field; zero tests are exact
/// comparisons against `0.0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Float64Field;

impl Ring for Float64Field {
    type Elem = f64;

    fn name(&self) -> &'static str {
        "float64"
    }

    fn zero(&self) -> f64 {
        0.0
    }

    fn one(&self) -> f64 {
        1.0
    }

    fn is_zero(&self, a: &f64) -> bool {
        *a == 0.0
    }

    fn from_bigint(&self, v: &BigInt) -> f64 {
        v.to_f64().unwrap_or(f64::NAN)
    }

    fn from_i64(&self, v: i64) -> f64 {
        v as f64
    }

    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }

    fn sub(&self, a: &f64, b: &f64) -> f64 {
        a - b
    }

    fn neg(&self, a: &f64) -> f64 {
        -a
    }

    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }

    fn div_exact(&self, a: &f64, b: &f64) -> Result<f64> {
        self.div(a, b)
    }

    fn dot_acc(&self, acc: f64, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(acc, |s, (x, y)| s + x * y)
    }
}

impl Field for Float64Field {
    fn inv(&self, a: &f64) -> Result<f64> {
        if *a == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(1.0 / a)
    }

    fn div(&self, a: &f64, b: &f64) -> Result<f64> {
        if *b == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(a / b)
    }
}

impl OrderedField for Float64Field {
    fn is_positive(&self, a: &f64) -> bool {
        *a > 0.0
    }

    fn sqrt(&self, a: &f64) -> Option<f64> {
        (*a >= 0.0).then(|| a.sqrt())
    }
}
