//! Checking a claimed decimal expansion of π with one correcting step.
//!
//! Keep the first `m` decimals `α_H` of the claim, compute
//! `α' = α_H + sin α_H`, and compare. The error of `α'` is bounded from the
//! computed sine itself: `|π − α_H| ≤ 1.2·|sin α_H|` for `α_H ∈ [3, 4)`, and
//! then `|π − α'| ≤ (π − α_H)³/6`. So the bound holds whether or not the
//! leading digits were right, and a digit is certified only when both ends
//! of the resulting interval agree on it.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mpfix::{DigitString, FixedReal, Precision};
use crate::series::sin_full;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
    /// The interval around `α'` straddles a digit boundary within the claim.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    /// Fraction digits in the claim.
    pub n_digits: usize,
    /// Decimals kept in `α_H`.
    pub m: usize,
    pub alpha_h: FixedReal,
    /// `α_H + sin α_H`.
    pub recomputed: FixedReal,
    /// Leading fraction digits confirmed.
    pub verified_prefix: usize,
    /// 1-based fraction position of the first wrong digit; 0 means the
    /// integer part is wrong.
    pub first_mismatch: Option<usize>,
    pub verdict: Verdict,
}

impl VerifyReport {
    /// `key=value` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "verdict={}", self.verdict).unwrap();
        writeln!(out, "n_digits={}", self.n_digits).unwrap();
        writeln!(out, "split_m={}", self.m).unwrap();
        writeln!(out, "verified_prefix={}", self.verified_prefix).unwrap();
        match self.first_mismatch {
            Some(pos) => writeln!(out, "first_mismatch={pos}").unwrap(),
            None => writeln!(out, "first_mismatch=none").unwrap(),
        }
        out
    }

    pub const CSV_HEADER: &'static str = "n_digits,m,verified_prefix,first_mismatch,verdict";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n_digits,
            self.m,
            self.verified_prefix,
            self.first_mismatch.map_or(String::new(), |p| p.to_string()),
            self.verdict
        )
    }
}

/// `⌊n/3⌋ + 2`, capped at `n`.
pub fn default_split(n: usize) -> usize {
    (n / 3 + 2).min(n)
}

/// Working bits for a split at `m`: `⌈3.33·(3m + 2)⌉`.
pub fn split_precision(m: usize) -> Precision {
    Precision::new(((3 * m + 2) as f64 * 3.33).ceil() as u64)
}

/// Verifies the digits of a claimed value of π.
///
/// With `m = None` the split starts at [`default_split`] and, if the result
/// is inconclusive, is doubled (up to `n`) before giving up. An explicit `m`
/// must satisfy `n ≤ 3m` and `m ≤ n` and is used as is.
pub fn verify_digits(digit_string: &str, m: Option<usize>) -> Result<VerifyReport> {
    let claim = DigitString::parse(digit_string)?;
    let n = claim.fraction_len();
    if n < 2 {
        return Err(Error::Parse("need at least two fraction digits".into()));
    }
    match m {
        Some(m) => {
            if 3 * m < n || m > n {
                return Err(Error::SplitOutOfRange { n, m });
            }
            Ok(verify_with_split(&claim, m))
        }
        None => {
            let mut m = default_split(n);
            loop {
                let report = verify_with_split(&claim, m);
                if report.verdict != Verdict::Inconclusive || m == n {
                    return Ok(report);
                }
                m = (2 * m).min(n);
            }
        }
    }
}

fn verify_with_split(claim: &DigitString, m: usize) -> VerifyReport {
    let n = claim.fraction_len();
    let p = split_precision(m);
    let scale = p.working();
    let alpha_h = FixedReal::from_digit_string(&claim.truncated(m), scale);

    if claim.is_negative() || claim.integer_digits() != "3" {
        return VerifyReport {
            n_digits: n,
            m,
            recomputed: alpha_h.clone(),
            alpha_h,
            verified_prefix: 0,
            first_mismatch: Some(0),
            verdict: Verdict::Reject,
        };
    }

    let sin = sin_full(&alpha_h, p).expect("3 <= alpha_h < 4");
    let recomputed = &alpha_h + &sin;

    // |δ| ≤ |sin δ| / (1 − δ²/6) ≤ 1.2 |sin δ| for |δ| < 1, δ = π − α_H.
    let ulp = FixedReal::pow2_neg(scale);
    let sin_hi = &sin.abs() + &FixedReal::pow2_neg(scale - 1);
    let delta = &sin_hi
        .mul_int(6)
        .div_at(&FixedReal::from_int(5), scale)
        .unwrap()
        + &ulp;
    let cube = &(&delta.square_at(scale) + &ulp).mul_at(&delta, scale) + &ulp;
    let err = &(&cube.div_at(&FixedReal::from_int(6), scale).unwrap() + &ulp)
        + &FixedReal::pow2_neg(scale - 2);

    let lo = (&recomputed - &err).to_decimal(n);
    let hi = (&recomputed + &err).to_decimal(n);
    let claimed = format!("{}.{}", claim.integer_digits(), claim.fraction_digits());
    let (verified_prefix, first_mismatch) = compare_in_interval(&claimed, &lo, &hi);

    let verdict = if first_mismatch.is_some() {
        Verdict::Reject
    } else if verified_prefix >= n {
        Verdict::Accept
    } else {
        Verdict::Inconclusive
    };
    VerifyReport {
        n_digits: n,
        m,
        alpha_h,
        recomputed,
        verified_prefix,
        first_mismatch,
        verdict,
    }
}

// All three strings are "I.FFFF" with the same number of fraction digits.
// Returns (digits where lo, hi and claim agree, first position whose prefix
// lies outside [lo, hi]).
fn compare_in_interval(claim: &str, lo: &str, hi: &str) -> (usize, Option<usize>) {
    let point = |s: &str| s.find('.').unwrap_or(s.len());
    let (pc, pl, ph) = (point(claim), point(lo), point(hi));
    if pc != pl || pc != ph {
        return (0, Some(0));
    }
    let n = claim.len() - pc - 1;
    // Position 0 is the integer part, j >= 1 includes j fraction digits.
    let cut = |j: usize| if j == 0 { pc } else { pc + 1 + j };
    let mut verified = 0;
    let mut agreeing = true;
    for j in 0..=n {
        let end = cut(j);
        let (c, l, h) = (&claim[..end], &lo[..end], &hi[..end]);
        if c < l || c > h {
            return (verified, Some(j));
        }
        if agreeing && l == h && c == l {
            if j > 0 {
                verified = j;
            }
        } else {
            agreeing = false;
        }
    }
    (verified, None)
}

/// Agreement between two digit files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agreement {
    /// Length of the common prefix, in characters (sign, digits and point).
    pub common_chars: usize,
    pub len_a: usize,
    pub len_b: usize,
    /// 1-based fraction position of the first disagreement; 0 for the
    /// integer part. `None` when one file is a prefix of the other.
    pub first_mismatch: Option<usize>,
    /// A few characters of each file around the disagreement.
    pub context_a: String,
    pub context_b: String,
}

impl Agreement {
    pub fn is_full(&self) -> bool {
        self.first_mismatch.is_none()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "common_chars={}", self.common_chars).unwrap();
        writeln!(out, "len_a={} len_b={}", self.len_a, self.len_b).unwrap();
        match self.first_mismatch {
            Some(p) => {
                writeln!(out, "first_mismatch={p}").unwrap();
                writeln!(out, "a: ...{}", self.context_a).unwrap();
                writeln!(out, "b: ...{}", self.context_b).unwrap();
            }
            None => writeln!(out, "first_mismatch=none").unwrap(),
        }
        out
    }
}

const CONTEXT_BEFORE: usize = 5;
const CONTEXT_AFTER: usize = 10;

/// Compares two digit files character by character.
pub fn cross_agree(file_a: &str, file_b: &str) -> Result<Agreement> {
    let a = DigitString::parse(file_a)?.to_string();
    let b = DigitString::parse(file_b)?.to_string();
    let common = a.bytes().zip(b.bytes()).take_while(|(x, y)| x == y).count();
    let diverged = common < a.len() && common < b.len();
    let (first_mismatch, context_a, context_b) = if diverged {
        let pos = match a.find('.') {
            Some(dot) if common > dot => common - dot,
            _ => 0,
        };
        let start = common.saturating_sub(CONTEXT_BEFORE);
        let window = |s: &str| s[start..(common + CONTEXT_AFTER).min(s.len())].to_owned();
        (Some(pos), window(&a), window(&b))
    } else {
        (None, String::new(), String::new())
    };
    Ok(Agreement {
        common_chars: common,
        len_a: a.len(),
        len_b: b.len(),
        first_mismatch,
        context_a,
        context_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::pi_oracle;

    fn pi_digits(n: usize) -> String {
        pi_oracle(Precision::new((n as f64 * 3.33) as u64 + 16)).to_decimal(n)
    }

    #[test]
    fn worked_example_accepts() {
        let r = verify_digits("3.141592653589793238462643383279", Some(10)).unwrap();
        assert_eq!(r.verdict, Verdict::Accept);
        assert_eq!(r.verified_prefix, 30);
        assert_eq!(r.first_mismatch, None);
        assert_eq!(
            r.recomputed.to_decimal(30),
            "3.141592653589793238462643383279"
        );
    }

    #[test]
    fn split_bounds() {
        let s = pi_digits(30);
        assert_eq!(
            verify_digits(&s, Some(9)).unwrap_err(),
            Error::SplitOutOfRange { n: 30, m: 9 }
        );
        assert!(verify_digits(&s, Some(31)).is_err());
        assert!(verify_digits(&s, Some(30)).is_ok());
        assert!(matches!(verify_digits("3.1", None), Err(Error::Parse(_))));
        assert!(matches!(verify_digits("3.14x", None), Err(Error::Parse(_))));
        assert_eq!(default_split(300), 102);
        assert_eq!(default_split(2), 2);
    }

    #[test]
    fn oracle_prefix_accepts_and_corruption_rejects() {
        let s = pi_digits(300);
        let r = verify_digits(&s, None).unwrap();
        assert_eq!(r.verdict, Verdict::Accept);
        assert_eq!(r.m, 102);

        let mut bytes = s.into_bytes();
        let idx = 1 + 150; // "3." then position 150
        bytes[idx] = b'0' + (bytes[idx] - b'0' + 1) % 10;
        let bad = String::from_utf8(bytes).unwrap();
        let r = verify_digits(&bad, None).unwrap();
        assert_eq!(r.verdict, Verdict::Reject);
        assert_eq!(r.first_mismatch, Some(150));
        assert_eq!(r.verified_prefix, 149);
    }

    #[test]
    fn corruption_inside_split_is_caught() {
        let mut s = pi_digits(60).into_bytes();
        s[2] = b'2'; // 3.2415...
        let r = verify_digits(std::str::from_utf8(&s).unwrap(), None).unwrap();
        assert_eq!(r.verdict, Verdict::Reject);
        assert_eq!(r.first_mismatch, Some(1));
    }

    #[test]
    fn wrong_integer_part() {
        let r = verify_digits("4.14159265358979", None).unwrap();
        assert_eq!(r.first_mismatch, Some(0));
        let r = verify_digits("-3.14159265358979", None).unwrap();
        assert_eq!(r.verdict, Verdict::Reject);
    }

    #[test]
    fn pinned_split_can_be_inconclusive() {
        // 999999 starts at decimal 762; with m = 254 the bound reaches only
        // about 10^-764, which cannot decide decimal 761.
        let s = pi_digits(761);
        let r = verify_digits(&s, Some(254)).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.first_mismatch.is_none());
        assert!(r.verified_prefix < 761);
        let r = verify_digits(&s, None).unwrap();
        assert_eq!(r.verdict, Verdict::Accept);
        assert!(r.m > 255);
    }

    #[test]
    fn cross_agree_cases() {
        let same = cross_agree("3.14159\n", "3.14159").unwrap();
        assert!(same.is_full());
        assert_eq!(same.common_chars, 7);
        let d = cross_agree("3.1415", "3.1416").unwrap();
        assert_eq!(d.common_chars, 5);
        assert_eq!(d.first_mismatch, Some(4));
        assert_eq!(d.context_a, "3.1415");
        let short = cross_agree("3.14", "3.14159").unwrap();
        assert!(short.is_full());
        assert_eq!(short.common_chars, 4);
        assert_eq!(cross_agree("2.0", "3.0").unwrap().first_mismatch, Some(0));
        assert!(cross_agree("3.1", "x").is_err());
    }

    #[test]
    fn report_text_and_csv() {
        let r = verify_digits("3.141592653589793238462643383279", None).unwrap();
        assert!(r.to_text().starts_with("verdict=accept\n"));
        assert_eq!(r.csv_row(), "30,12,30,,accept");
    }
}
