//! Decimal text at the I/O boundary: the digit-file grammar and radix
//! conversion for very long integers.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Above this many digits, radix conversion switches from the schoolbook
/// routine in `num-bigint` to divide-and-conquer splitting on powers of ten.
pub const DC_THRESHOLD_DIGITS: usize = 10_000;

/// A parsed decimal numeral: optional sign, integer digits, optional
/// fraction digits. No exponent, no separators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitString {
    negative: bool,
    integer: String,
    fraction: String,
}

impl DigitString {
    /// Parses the digit-file grammar. A single trailing newline (`\n` or
    /// `\r\n`) is accepted.
    pub fn parse(s: &str) -> Result<Self> {
        let body = s
            .strip_suffix("\r\n")
            .or_else(|| s.strip_suffix('\n'))
            .unwrap_or(s);
        let (negative, unsigned) = match body.as_bytes().first() {
            Some(b'-') => (true, &body[1..]),
            Some(b'+') => (false, &body[1..]),
            _ => (false, body),
        };
        let (integer, fraction) = match unsigned.split_once('.') {
            Some((i, f)) => {
                if f.is_empty() {
                    return Err(Error::Parse("no digits after '.'".into()));
                }
                (i, f)
            }
            None => (unsigned, ""),
        };
        if integer.is_empty() {
            return Err(Error::Parse("missing integer part".into()));
        }
        for (part, text) in [("integer", integer), ("fraction", fraction)] {
            if let Some(pos) = text.bytes().position(|b| !b.is_ascii_digit()) {
                return Err(Error::Parse(format!(
                    "unexpected character {:?} in {part} part at offset {pos}",
                    text[pos..].chars().next().unwrap()
                )));
            }
        }
        Ok(DigitString {
            negative,
            integer: integer.to_owned(),
            fraction: fraction.to_owned(),
        })
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn integer_digits(&self) -> &str {
        &self.integer
    }

    pub fn fraction_digits(&self) -> &str {
        &self.fraction
    }

    pub fn fraction_len(&self) -> usize {
        self.fraction.len()
    }

    /// The numeral with its decimal point removed, i.e. `|value| * 10^fraction_len`.
    pub fn scaled_magnitude(&self) -> BigUint {
        let mut all = Vec::with_capacity(self.integer.len() + self.fraction.len());
        all.extend_from_slice(self.integer.as_bytes());
        all.extend_from_slice(self.fraction.as_bytes());
        parse_decimal_digits(&all)
    }

    /// Signed version of [`Self::scaled_magnitude`].
    pub fn scaled_integer(&self) -> BigInt {
        let sign = if self.negative {
            Sign::Minus
        } else {
            Sign::Plus
        };
        BigInt::from_biguint(sign, self.scaled_magnitude())
    }

    /// Keeps the first `decimals` fraction digits (fewer if not available).
    pub fn truncated(&self, decimals: usize) -> DigitString {
        DigitString {
            negative: self.negative,
            integer: self.integer.clone(),
            fraction: self.fraction[..decimals.min(self.fraction.len())].to_owned(),
        }
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        f.write_str(&self.integer)?;
        if !self.fraction.is_empty() {
            write!(f, ".{}", self.fraction)?;
        }
        Ok(())
    }
}

fn pow10(exp: usize, cache: &mut HashMap<usize, BigUint>) -> BigUint {
    cache
        .entry(exp)
        .or_insert_with(|| num_traits::pow(BigUint::from(10u32), exp))
        .clone()
}

/// Decimal digits of `n` with no leading zeros (`"0"` for zero).
pub fn biguint_to_decimal(n: &BigUint) -> String {
    // ~3.3 bits per digit; the cut-over is approximate and that is fine.
    if n.bits() < (DC_THRESHOLD_DIGITS as u64) * 10 / 3 {
        return n.to_str_radix(10);
    }
    let mut powers: Vec<BigUint> = vec![num_traits::pow(BigUint::from(10u32), DC_THRESHOLD_DIGITS)];
    while powers.last().unwrap() <= n {
        let sq = powers.last().unwrap() * powers.last().unwrap();
        powers.push(sq);
    }
    let mut out = String::with_capacity(DC_THRESHOLD_DIGITS << powers.len());
    emit_dc(n, powers.len() - 1, 0, &powers, &mut out);
    out
}

// powers[i] = 10^(T * 2^i); invariant n < powers[level].
fn emit_dc(n: &BigUint, level: usize, width: usize, powers: &[BigUint], out: &mut String) {
    if level == 0 {
        let s = n.to_str_radix(10);
        out.extend(std::iter::repeat_n('0', width.saturating_sub(s.len())));
        out.push_str(&s);
        return;
    }
    let half = DC_THRESHOLD_DIGITS << (level - 1);
    let (q, r) = n.div_rem(&powers[level - 1]);
    if width == 0 && q.is_zero() {
        emit_dc(&r, level - 1, 0, powers, out);
    } else {
        emit_dc(&q, level - 1, width.saturating_sub(half), powers, out);
        emit_dc(&r, level - 1, half, powers, out);
    }
}

/// Parses a run of ASCII decimal digits. Caller guarantees the bytes are digits.
pub fn parse_decimal_digits(digits: &[u8]) -> BigUint {
    let mut cache = HashMap::new();
    parse_dc(digits, &mut cache)
}

fn parse_dc(digits: &[u8], cache: &mut HashMap<usize, BigUint>) -> BigUint {
    if digits.is_empty() {
        return BigUint::zero();
    }
    if digits.len() <= DC_THRESHOLD_DIGITS {
        return BigUint::parse_bytes(digits, 10).expect("caller passes ASCII digits");
    }
    let mut low_len = DC_THRESHOLD_DIGITS;
    while low_len * 2 < digits.len() {
        low_len *= 2;
    }
    let (hi, lo) = digits.split_at(digits.len() - low_len);
    parse_dc(hi, cache) * pow10(low_len, cache) + parse_dc(lo, cache)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_digit_file_forms() {
        let d = DigitString::parse("3.14159\n").unwrap();
        assert_eq!(d.integer_digits(), "3");
        assert_eq!(d.fraction_digits(), "14159");
        assert!(!d.is_negative());
        assert_eq!(DigitString::parse("-0.5").unwrap().to_string(), "-0.5");
        assert_eq!(DigitString::parse("+12").unwrap().to_string(), "12");
        assert_eq!(DigitString::parse("7\r\n").unwrap().fraction_len(), 0);
    }

    #[test]
    fn parse_rejects_malformed() {
        for bad in [
            "", "-", ".5", "3.", "3.14.15", "3,141", "3.1 4", "pi", "1e5", "3.14\n\n",
        ] {
            assert!(
                matches!(DigitString::parse(bad), Err(Error::Parse(_))),
                "accepted {bad:?}"
            );
        }
    }

    #[test]
    fn scaled_integer_drops_point() {
        let d = DigitString::parse("-3.141").unwrap();
        assert_eq!(d.scaled_integer(), BigInt::from(-3141));
        assert_eq!(d.truncated(2).to_string(), "-3.14");
        assert_eq!(d.truncated(10).to_string(), "-3.141");
    }

    #[test]
    fn divide_and_conquer_matches_schoolbook() {
        // 3^k has no trailing structure, so every chunk boundary matters.
        for exp in [1u32, 20_000, 70_000, 130_000] {
            let n = num_traits::pow(BigUint::from(3u32), exp as usize);
            let school = n.to_str_radix(10);
            assert_eq!(biguint_to_decimal(&n), school);
            assert_eq!(parse_decimal_digits(school.as_bytes()), n);
        }
    }

    #[test]
    fn divide_and_conquer_keeps_inner_zeros() {
        // A power of ten forces every low chunk to be all zeros.
        let n = num_traits::pow(BigUint::from(10u32), 45_001);
        let s = biguint_to_decimal(&n);
        assert_eq!(s.len(), 45_002);
        assert!(s.starts_with('1') && s[1..].bytes().all(|b| b == b'0'));
        assert_eq!(biguint_to_decimal(&BigUint::zero()), "0");
    }
}
