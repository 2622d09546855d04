//! Arbitrary-precision rationals and their canonical text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::NumericsError;

/// Exact rational number in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^e` for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    pow_int(2, e)
}

/// `3^e` for any integer exponent.
pub fn pow3(e: i64) -> Rational {
    pow_int(3, e)
}

pub fn pow_int(base: u32, e: i64) -> Rational {
    let mag = num_traits::pow(BigInt::from(base), e.unsigned_abs() as usize);
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// Canonical `num/den` form; integers keep the `/1`.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `n`, `n/d` and `-n/d`; the result is normalized.
pub fn parse_rational(s: &str) -> Result<Rational, NumericsError> {
    let s = s.trim();
    let bad = || NumericsError::BadRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(NumericsError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// Display-only decimal rendering with `digits` fractional digits (truncated).
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (a.numer() * &scale).div_floor(a.denom());
    let (ip, fp) = scaled.div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{ip}");
    }
    format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = digits)
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Least `m >= 0` with `base^-m <= v`, for `0 < v`; `None` for `v <= 0`.
/// Values above 1 give `m = 0`.
pub fn least_neg_power_below(base: u32, v: &Rational) -> Option<u32> {
    if !v.is_positive() {
        return None;
    }
    let mut m = 0u32;
    let b = Rational::from_integer(BigInt::from(base));
    let mut p = Rational::one();
    while &p > v {
        p /= &b;
        m += 1;
    }
    Some(m)
}

/// Least `m >= 0` with `base^-m < v` (strict), for `0 < v`.
pub fn least_neg_power_strictly_below(base: u32, v: &Rational) -> Option<u32> {
    if !v.is_positive() {
        return None;
    }
    let mut m = 0u32;
    let b = Rational::from_integer(BigInt::from(base));
    let mut p = Rational::one();
    while &p >= v {
        p /= &b;
        m += 1;
    }
    Some(m)
}

/// Integer floor of `r`.
pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Largest dyadic `j / 2^k` not exceeding `r`.
pub fn dyadic_floor(r: &Rational, k: u32) -> Rational {
    let scale = num_traits::pow(BigInt::from(2), k as usize);
    Rational::new(floor(&(r * Rational::from_integer(scale.clone()))), scale)
}
