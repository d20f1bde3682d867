//! Arbitrary-precision binary fixed-point reals.
//!
//! A [`FixedReal`] is `mantissa * 2^-scale` with a big-integer mantissa.
//! Addition and subtraction are exact. Everything that can lose bits
//! (multiplication, division, rescaling, decimal output) truncates toward
//! zero, so each such operation costs at most one unit in the last place of
//! the result scale. Error bounds throughout the crate are absolute.

pub mod decimal;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
pub use decimal::DigitString;

/// Target accuracy plus guard bits.
///
/// Results computed "at precision `p`" are within `2^-p.bits()` of the true
/// value and carry `p.working()` fractional bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    bits: u64,
    guard: u64,
}

impl Precision {
    pub const DEFAULT_GUARD: u64 = 64;

    /// `bits` target bits with the default 64 guard bits.
    ///
    /// Panics if `bits` is zero.
    pub fn new(bits: u64) -> Self {
        Self::with_guard(bits, Self::DEFAULT_GUARD)
    }

    pub fn with_guard(bits: u64, guard: u64) -> Self {
        assert!(bits >= 1, "precision must be at least one bit");
        Precision { bits, guard }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn guard(&self) -> u64 {
        self.guard
    }

    /// Width every intermediate is carried at: `bits + guard`.
    pub fn working(&self) -> u64 {
        self.bits + self.guard
    }

    /// Same target, `extra` more guard bits.
    pub fn widened(&self, extra: u64) -> Self {
        Precision {
            bits: self.bits,
            guard: self.guard + extra,
        }
    }
}

/// `mantissa * 2^-scale`.
#[derive(Clone, Debug)]
pub struct FixedReal {
    mantissa: BigInt,
    scale: u64,
}

pub(crate) fn shr_toward_zero(m: &BigInt, k: u64) -> BigInt {
    let k = k as usize;
    if m.is_negative() {
        -((-m) >> k)
    } else {
        m >> k
    }
}

impl FixedReal {
    pub fn new(mantissa: impl Into<BigInt>, scale: u64) -> Self {
        FixedReal {
            mantissa: mantissa.into(),
            scale,
        }
    }

    pub fn zero() -> Self {
        FixedReal::new(0, 0)
    }

    pub fn from_int(v: i64) -> Self {
        FixedReal::new(v, 0)
    }

    /// Exactly `2^-k`.
    pub fn pow2_neg(k: u64) -> Self {
        FixedReal::new(1, k)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn into_parts(self) -> (BigInt, u64) {
        (self.mantissa, self.scale)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn abs(&self) -> Self {
        FixedReal::new(self.mantissa.abs(), self.scale)
    }

    /// Moves to a new scale. Widening is exact; narrowing truncates toward
    /// zero, so the value moves by less than `2^-scale`.
    pub fn rescale(&self, scale: u64) -> Self {
        let mantissa = match scale.cmp(&self.scale) {
            Ordering::Equal => return self.clone(),
            Ordering::Greater => &self.mantissa << ((scale - self.scale) as usize),
            Ordering::Less => shr_toward_zero(&self.mantissa, self.scale - scale),
        };
        FixedReal { mantissa, scale }
    }

    /// Keeps `bits` fractional bits, truncating toward zero:
    /// `|result - self| < 2^-bits` and `|result| <= |self|`.
    pub fn truncate(&self, bits: u64) -> Self {
        self.rescale(bits)
    }

    /// Smallest scale that represents the same value.
    pub fn normalize(&self) -> Self {
        if self.mantissa.is_zero() {
            return FixedReal::zero();
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0).min(self.scale);
        FixedReal {
            mantissa: &self.mantissa >> (tz as usize),
            scale: self.scale - tz,
        }
    }

    /// Product truncated to `p.working()` fractional bits.
    pub fn mul(&self, other: &FixedReal, p: Precision) -> FixedReal {
        self.mul_at(other, p.working())
    }

    pub(crate) fn mul_at(&self, other: &FixedReal, scale: u64) -> FixedReal {
        FixedReal {
            mantissa: &self.mantissa * &other.mantissa,
            scale: self.scale + other.scale,
        }
        .rescale(scale)
    }

    pub(crate) fn square_at(&self, scale: u64) -> FixedReal {
        self.mul_at(self, scale)
    }

    /// Quotient truncated to `p.working()` fractional bits.
    pub fn div(&self, other: &FixedReal, p: Precision) -> Result<FixedReal> {
        self.div_at(other, p.working())
    }

    pub(crate) fn div_at(&self, other: &FixedReal, scale: u64) -> Result<FixedReal> {
        if other.mantissa.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // mantissa = self.m * 2^(scale + other.scale - self.scale) / other.m
        let shift = scale as i128 + other.scale as i128 - self.scale as i128;
        let mantissa = if shift >= 0 {
            (&self.mantissa << (shift as usize)) / &other.mantissa
        } else {
            &self.mantissa / (&other.mantissa << ((-shift) as usize))
        };
        Ok(FixedReal { mantissa, scale })
    }

    /// Exact multiplication by an integer.
    pub fn mul_int(&self, k: i64) -> FixedReal {
        FixedReal::new(&self.mantissa * k, self.scale)
    }

    /// Exact division by `2^k` (the scale grows, the mantissa is untouched).
    pub fn div_pow2(&self, k: u64) -> FixedReal {
        FixedReal::new(self.mantissa.clone(), self.scale + k)
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> BigInt {
        self.mantissa
            .div_floor(&(BigInt::one() << (self.scale as usize)))
    }

    /// `⌊|x|·10^digits⌋` as a decimal string with the point inserted, sign
    /// prefixed when the truncated result is nonzero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let ten_pow = num_traits::pow(BigUint::from(10u32), digits);
        let scaled: BigUint = (self.mantissa.magnitude() * ten_pow) >> (self.scale as usize);
        let mut body = decimal::biguint_to_decimal(&scaled);
        if body.len() <= digits {
            let pad = digits + 1 - body.len();
            body.insert_str(0, &"0".repeat(pad));
        }
        if digits > 0 {
            body.insert(body.len() - digits, '.');
        }
        if self.is_negative() && !scaled.is_zero() {
            body.insert(0, '-');
        }
        body
    }

    /// Parses a decimal numeral to `p.working()` fractional bits.
    ///
    /// The magnitude is rounded up, so `to_decimal(from_decimal(s), d)`
    /// returns `s` whenever `s` has `d` fraction digits.
    pub fn from_decimal(s: &str, p: Precision) -> Result<FixedReal> {
        let digits = DigitString::parse(s)?;
        Ok(FixedReal::from_digit_string(&digits, p.working()))
    }

    pub fn from_digit_string(digits: &DigitString, scale: u64) -> FixedReal {
        let n = digits.scaled_magnitude() << (scale as usize);
        let den = num_traits::pow(BigUint::from(10u32), digits.fraction_len());
        let (q, r) = n.div_rem(&den);
        let mag = if r.is_zero() { q } else { q + 1u32 };
        let sign = if digits.is_negative() {
            Sign::Minus
        } else {
            Sign::Plus
        };
        FixedReal::new(BigInt::from_biguint(sign, mag), scale)
    }

    /// Approximate `log2 |x|`; `-inf` for zero. Never underflows.
    pub fn log2_abs(&self) -> f64 {
        if self.mantissa.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mantissa.bits();
        let (top, shift) = if bits > 62 {
            (
                self.mantissa.magnitude() >> ((bits - 62) as usize),
                bits - 62,
            )
        } else {
            (self.mantissa.magnitude().clone(), 0)
        };
        top.to_f64().unwrap().log2() + shift as f64 - self.scale as f64
    }

    /// Nearest-ish `f64`; values below the `f64` range come back as zero.
    pub fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits();
        let (top, exp) = if bits > 62 {
            (
                shr_toward_zero(&self.mantissa, bits - 62),
                bits as i64 - 62 - self.scale as i64,
            )
        } else {
            (self.mantissa.clone(), -(self.scale as i64))
        };
        let half = (exp / 2).clamp(-1100, 1100) as i32;
        let rest = (exp - exp / 2).clamp(-1100, 1100) as i32;
        top.to_f64().unwrap() * 2f64.powi(half) * 2f64.powi(rest)
    }

    fn aligned(&self, other: &FixedReal) -> (BigInt, BigInt, u64) {
        let s = self.scale.max(other.scale);
        (
            &self.mantissa << ((s - self.scale) as usize),
            &other.mantissa << ((s - other.scale) as usize),
            s,
        )
    }
}

impl PartialEq for FixedReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FixedReal {}

impl PartialOrd for FixedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FixedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.scale == other.scale {
            return self.mantissa.cmp(&other.mantissa);
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for &FixedReal {
    type Output = FixedReal;

    fn add(self, rhs: &FixedReal) -> FixedReal {
        let (a, b, s) = self.aligned(rhs);
        FixedReal::new(a + b, s)
    }
}

impl Sub for &FixedReal {
    type Output = FixedReal;

    fn sub(self, rhs: &FixedReal) -> FixedReal {
        let (a, b, s) = self.aligned(rhs);
        FixedReal::new(a - b, s)
    }
}

impl Add for FixedReal {
    type Output = FixedReal;

    fn add(self, rhs: FixedReal) -> FixedReal {
        &self + &rhs
    }
}

impl Sub for FixedReal {
    type Output = FixedReal;

    fn sub(self, rhs: FixedReal) -> FixedReal {
        &self - &rhs
    }
}

impl Neg for &FixedReal {
    type Output = FixedReal;

    fn neg(self) -> FixedReal {
        FixedReal::new(-&self.mantissa, self.scale)
    }
}

impl Neg for FixedReal {
    type Output = FixedReal;

    fn neg(self) -> FixedReal {
        FixedReal::new(-self.mantissa, self.scale)
    }
}

impl From<i64> for FixedReal {
    fn from(v: i64) -> Self {
        FixedReal::from_int(v)
    }
}

/// Prints truncated decimals; `{:.N}` selects N digits (default 20).
impl fmt::Display for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(f.precision().unwrap_or(20)))
    }
}
