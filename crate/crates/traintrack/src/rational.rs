//! Exact rational helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Arbitrary precision rational number used for every weight.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Decimal rendering with `digits` digits after the point, rounded half away
/// from zero.
pub fn decimal(x: &Q, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = x.abs() * Q::from_integer(scale.clone());
    let (fl, rem) = scaled.numer().div_rem(scaled.denom());
    let twice = rem * 2;
    let rounded = if twice >= *scaled.denom() { fl + 1 } else { fl };
    let (int, frac) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !(int.is_zero() && frac.is_zero()) { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits as usize)
}

/// Lossy conversion for reporting only.
pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rounds_half_away() {
        assert_eq!(decimal(&qf(1, 3), 6), "0.333333");
        assert_eq!(decimal(&qf(2, 3), 6), "0.666667");
        assert_eq!(decimal(&qf(-5, 2), 0), "-3");
        assert_eq!(decimal(&q(7), 2), "7.00");
        assert_eq!(decimal(&qf(-1, 8), 3), "-0.125");
    }
}
