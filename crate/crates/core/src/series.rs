//! Sine and cosine by binary splitting, plus an arctan-based reference π.
//!
//! `sincos_reduced` handles |x| < 1/2. The argument is cut into chunks of
//! doubling bit length (8 bits, then 8, 16, 32, ... further bits), each chunk
//! `u / 2^s` is evaluated with exact integer binary splitting of the Taylor
//! series, and the chunks are recombined with the angle-addition formulas.
//! Short chunks need many terms but have tiny numerators; long chunks have
//! big numerators but are so small that few terms are needed.
//!
//! `sin_full` divides by 8 and rebuilds with `sin 2x = 2 sin x cos x`,
//! `cos 2x = 1 - 2 sin² x`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::mpfix::{shr_toward_zero, FixedReal, Precision};

/// Ranges at least this long evaluate their two halves on the rayon pool.
const PARALLEL_SPLIT_TERMS: u64 = 64;

/// Bits in the leading chunk of the argument.
const FIRST_CHUNK_BITS: u64 = 8;

/// Internal bits on top of the caller's working precision while summing and
/// recombining chunks.
const CHUNK_GUARD: u64 = 16;

/// Numerator product, denominator product and scaled partial sum for a term
/// range of a hypergeometric-style series.
///
/// For a range `[a, b)` with term ratios `p(j)/q(j)`, `T/Q` equals
/// `Σ_{k=a}^{b-1} Π_{j=a}^{k} p(j)/q(j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitTriple {
    pub p: BigInt,
    pub q: BigInt,
    pub t: BigInt,
}

impl SplitTriple {
    /// The empty range; neutral for [`SplitTriple::merge`].
    pub fn identity() -> Self {
        SplitTriple {
            p: BigInt::one(),
            q: BigInt::one(),
            t: BigInt::zero(),
        }
    }

    /// Single term with ratio `p/q`.
    pub fn leaf(p: BigInt, q: BigInt) -> Self {
        debug_assert!(!q.is_zero());
        SplitTriple { t: p.clone(), p, q }
    }

    /// Concatenates `self` (left range) with `right`.
    pub fn merge(&self, right: &SplitTriple) -> SplitTriple {
        SplitTriple {
            p: &self.p * &right.p,
            q: &self.q * &right.q,
            t: &self.t * &right.q + &self.p * &right.t,
        }
    }
}

/// Binary-splitting evaluation over `[a, b)`, splitting at midpoints down to
/// single-term leaves. `term(j)` returns the ratio `(p(j), q(j))`.
pub fn split_range<F>(a: u64, b: u64, term: &F) -> SplitTriple
where
    F: Fn(u64) -> (BigInt, BigInt) + Sync,
{
    match b.saturating_sub(a) {
        0 => SplitTriple::identity(),
        1 => {
            let (p, q) = term(a);
            SplitTriple::leaf(p, q)
        }
        len => {
            let mid = a + len / 2;
            let (left, right) = if len >= PARALLEL_SPLIT_TERMS {
                rayon::join(|| split_range(a, mid, term), || split_range(mid, b, term))
            } else {
                (split_range(a, mid, term), split_range(mid, b, term))
            };
            left.merge(&right)
        }
    }
}

/// `num · 2^-log2_den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalArg {
    pub num: BigInt,
    pub log2_den: u64,
}

impl RationalArg {
    pub fn new(num: impl Into<BigInt>, log2_den: u64) -> Self {
        RationalArg {
            num: num.into(),
            log2_den,
        }
    }

    pub fn from_fixed(x: &FixedReal) -> Self {
        RationalArg::new(x.mantissa().clone(), x.scale())
    }

    pub fn to_fixed(&self) -> FixedReal {
        FixedReal::new(self.num.clone(), self.log2_den)
    }

    /// `|x| < 1/2`.
    pub fn is_below_half(&self) -> bool {
        self.num.is_zero() || (self.log2_den >= 1 && self.num.bits() < self.log2_den)
    }

    fn log2_abs(&self) -> f64 {
        self.to_fixed().log2_abs()
    }
}

// Smallest N >= 1 with |x|^(2N+e)/(2N+e)! < 2^-target, e = 1 for the sine
// series and 0 for cosine. Magnitudes are tracked as f64 logarithms.
fn series_terms(log2_x: f64, target_bits: u64, odd: bool) -> u64 {
    if log2_x == f64::NEG_INFINITY {
        return 1;
    }
    let target = -(target_bits as f64);
    let offset = if odd { 1 } else { 0 };
    let mut n = 1u64;
    let mut log2_fact: f64 = (1..=(2 + offset)).map(|k| (k as f64).log2()).sum();
    loop {
        let k = 2 * n + offset;
        if k as f64 * log2_x - log2_fact < target {
            return n;
        }
        n += 1;
        log2_fact += ((2 * n + offset - 1) as f64).log2() + ((2 * n + offset) as f64).log2();
    }
}

/// Number of sine-series terms `x - x³/3! + ... ` kept for `x` at precision
/// `p`: the smallest `N` with `|x|^(2N+1)/(2N+1)! < 2^-(p.bits + p.guard)`,
/// and at least 1.
pub fn term_count(x: &RationalArg, p: Precision) -> Result<u64> {
    if x.to_fixed().abs() > FixedReal::new(1, 1) {
        return Err(Error::ArgumentOutOfRange(
            "series argument must satisfy |x| <= 1/2".into(),
        ));
    }
    Ok(series_terms(x.log2_abs(), p.working(), true))
}

// sin(u/2^s), cos(u/2^s) for 0 <= u/2^s < 1/2, both at `scale` fractional bits.
fn sincos_chunk(u: &BigInt, s: u64, scale: u64) -> (FixedReal, FixedReal) {
    if u.is_zero() {
        return (FixedReal::zero(), FixedReal::from_int(1).rescale(scale));
    }
    let log2_x = FixedReal::new(u.clone(), s).log2_abs();
    let n_sin = series_terms(log2_x, scale, true);
    let n_cos = series_terms(log2_x, scale, false);
    let neg_u2: BigInt = -(u * u);
    let shift = (2 * s) as usize;

    let sin_terms = |k: u64| {
        let q = BigInt::from(2 * k) * BigInt::from(2 * k + 1);
        (neg_u2.clone(), q << shift)
    };
    let cos_terms = |k: u64| {
        let q = BigInt::from(2 * k - 1) * BigInt::from(2 * k);
        (neg_u2.clone(), q << shift)
    };
    let (st, ct) = rayon::join(
        || split_range(1, n_sin, &sin_terms),
        || split_range(1, n_cos, &cos_terms),
    );

    // sin r = r (1 + T/Q),  cos r = 1 + T/Q
    let sin_num = (u * (&st.q + &st.t)) << (scale as usize);
    let sin = FixedReal::new(sin_num / (&st.q << (s as usize)), scale);
    let cos_num = (&ct.q + &ct.t) << (scale as usize);
    let cos = FixedReal::new(cos_num / &ct.q, scale);
    (sin, cos)
}

/// `(sin x, cos x)` for `|x| < 1/2`, each within `2^-p.bits` and carried at
/// `p.working()` fractional bits. Arguments finer than the working precision
/// are truncated to it first.
pub fn sincos_reduced(x: &RationalArg, p: Precision) -> Result<(FixedReal, FixedReal)> {
    if !x.is_below_half() {
        return Err(Error::ArgumentOutOfRange(
            "sincos_reduced needs |x| < 1/2".into(),
        ));
    }
    let scale = p.working() + CHUNK_GUARD;
    let (mut num, mut len) = (x.num.abs(), x.log2_den);
    if len > scale {
        num = shr_toward_zero(&num, len - scale);
        len = scale;
    }

    let mut sin = FixedReal::zero();
    let mut cos = FixedReal::from_int(1);
    let mut lo = 0u64;
    let mut hi = FIRST_CHUNK_BITS;
    while lo < len {
        let top = hi.min(len);
        let width = (top - lo) as usize;
        let chunk: BigInt = (&num >> ((len - top) as usize)) & ((BigInt::one() << width) - 1);
        if !chunk.is_zero() {
            let (cs, cc) = sincos_chunk(&chunk, top, scale);
            let next_sin = &sin.mul_at(&cc, scale) + &cos.mul_at(&cs, scale);
            let next_cos = &cos.mul_at(&cc, scale) - &sin.mul_at(&cs, scale);
            sin = next_sin;
            cos = next_cos;
        }
        lo = top;
        hi *= 2;
    }

    let sin = sin.rescale(p.working());
    let cos = cos.rescale(p.working());
    if x.num.is_negative() {
        Ok((-sin, cos))
    } else {
        Ok((sin, cos))
    }
}

/// `(sin, cos)` at every rung: `x / 2^halvings`, then each doubling up to
/// `x`. All rungs carry the same (widened) scale.
pub fn doubling_ladder(
    x: &FixedReal,
    p: Precision,
    halvings: u32,
) -> Result<Vec<(FixedReal, FixedReal)>> {
    // Each doubling can roughly quadruple the absolute error.
    let inner = p.widened(2 * halvings as u64 + 8);
    let scale = inner.working();
    let reduced = RationalArg::from_fixed(&x.div_pow2(halvings as u64));
    if !reduced.is_below_half() {
        return Err(Error::ArgumentOutOfRange(format!(
            "|x| must be below 2^{} for {halvings} halvings",
            halvings as i64 - 1
        )));
    }
    let mut rungs = Vec::with_capacity(halvings as usize + 1);
    rungs.push(sincos_reduced(&reduced, inner)?);
    let one = FixedReal::from_int(1);
    for _ in 0..halvings {
        let (s, c) = rungs.last().unwrap();
        let s2 = s.mul_at(c, scale).mul_int(2);
        let c2 = &one - &s.square_at(scale).mul_int(2);
        rungs.push((s2, c2));
    }
    Ok(rungs)
}

/// `sin x` for `|x| < 4` within `2^-p.bits`, at `p.working()` fractional bits.
pub fn sin_full(x: &FixedReal, p: Precision) -> Result<FixedReal> {
    Ok(sin_cos_full(x, p)?.0)
}

/// `(sin x, cos x)` for `|x| < 4` via x/8 and three doublings.
pub fn sin_cos_full(x: &FixedReal, p: Precision) -> Result<(FixedReal, FixedReal)> {
    if x.abs() >= FixedReal::from_int(4) {
        return Err(Error::ArgumentOutOfRange(format!(
            "sin_full needs |x| < 4, got {:.6}",
            x
        )));
    }
    let (s, c) = doubling_ladder(x, p, 3)?.pop().unwrap();
    Ok((s.rescale(p.working()), c.rescale(p.working())))
}

/// `arctan(1/u)` for `u >= 2` by binary splitting of
/// `Σ (-1)^k / ((2k+1) u^(2k+1))`.
pub fn arctan_inv(u: u64, p: Precision) -> Result<FixedReal> {
    if u < 2 {
        return Err(Error::ArgumentOutOfRange(format!(
            "arctan_inv needs u >= 2, got {u}"
        )));
    }
    let scale = p.working() + 8;
    let log2_u = (u as f64).log2();
    // smallest N with 1/((2N+1) u^(2N+1)) < 2^-scale
    let mut n = 1u64;
    while ((2 * n + 1) as f64) * log2_u + ((2 * n + 1) as f64).log2() <= scale as f64 {
        n += 1;
    }
    let u_big = BigInt::from(u);
    let u2 = &u_big * &u_big;
    let terms = |k: u64| {
        (
            BigInt::from(-(2 * k as i64 - 1)),
            BigInt::from(2 * k + 1) * &u2,
        )
    };
    let st = split_range(1, n, &terms);
    let num = (&st.q + &st.t) << (scale as usize);
    Ok(FixedReal::new(num / (&st.q * &u_big), scale).rescale(p.working()))
}

/// π = 16·arctan(1/5) − 4·arctan(1/239), within `2^-p.bits`.
pub fn pi_oracle(p: Precision) -> FixedReal {
    let inner = p.widened(8);
    let a5 = arctan_inv(5, inner).expect("5 >= 2");
    let a239 = arctan_inv(239, inner).expect("239 >= 2");
    (&a5.mul_int(16) - &a239.mul_int(4)).rescale(p.working())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed(s: &str, bits: u64) -> FixedReal {
        FixedReal::from_decimal(s, Precision::new(bits)).unwrap()
    }

    fn close(a: &FixedReal, b: &FixedReal, log2_tol: i64) -> bool {
        (a - b).abs().log2_abs() < log2_tol as f64
    }

    #[test]
    fn merge_matches_direct_sum() {
        // Σ_{k=1}^{4} Π_{j=1}^{k} 1/j = 1 + 1/2 + 1/6 + 1/24 = 41/24
        let terms = |j: u64| (BigInt::one(), BigInt::from(j));
        let st = split_range(1, 5, &terms);
        assert_eq!(st.q, BigInt::from(24));
        assert_eq!(st.t, BigInt::from(41));
        let id = SplitTriple::identity();
        assert_eq!(id.merge(&st), st);
        assert_eq!(st.merge(&id), st);
    }

    #[test]
    fn sincos_of_zero_is_exact() {
        let (s, c) = sincos_reduced(&RationalArg::new(0, 10), Precision::new(64)).unwrap();
        assert!(s.is_zero());
        assert_eq!(c, FixedReal::from_int(1));
    }

    #[test]
    fn sincos_three_eighths() {
        let p = Precision::new(128);
        let (s, c) = sincos_reduced(&RationalArg::new(3, 3), p).unwrap();
        // Reference values from a term-by-term summation at 160 bits.
        let s_ref = fixed(
            "0.36627252908604756137290935171626415717641301439735790",
            200,
        );
        let c_ref = fixed(
            "0.93050762191231429114947679222955550809519100187151001",
            200,
        );
        assert!(close(&s, &s_ref, -128));
        assert!(close(&c, &c_ref, -128));
        assert_eq!(s.to_decimal(17), "0.36627252908604756");
        assert_eq!(c.to_decimal(17), "0.93050762191231429");
    }

    #[test]
    fn sincos_parity() {
        let p = Precision::new(200);
        let x = RationalArg::new(BigInt::from(123_456_789u64), 28);
        let (s, c) = sincos_reduced(&x, p).unwrap();
        let (sn, cn) = sincos_reduced(&RationalArg::new(-x.num.clone(), 28), p).unwrap();
        assert_eq!(sn.mantissa(), &-s.mantissa());
        assert_eq!(cn.mantissa(), c.mantissa());
    }

    #[test]
    fn reduced_argument_range_is_enforced() {
        let p = Precision::new(64);
        assert!(sincos_reduced(&RationalArg::new(1, 1), p).is_err());
        assert!(sincos_reduced(&RationalArg::new(-1, 1), p).is_err());
        assert!(sincos_reduced(&RationalArg::new(5, 0), p).is_err());
        assert!(sincos_reduced(&RationalArg::new(255, 9), p).is_ok());
    }

    #[test]
    fn term_count_cases() {
        // (1/2)^29/29! ~ 2^-131.8 < 2^-128, (1/2)^27/27! ~ 2^-120.1 is not.
        let half = RationalArg::new(1, 1);
        assert_eq!(term_count(&half, Precision::new(64)).unwrap(), 14);
        assert!(term_count(&RationalArg::new(3, 2), Precision::new(64)).is_err());
        let just_below = RationalArg::new((BigInt::one() << 63usize) - 1, 64);
        assert_eq!(term_count(&just_below, Precision::new(64)).unwrap(), 14);
        assert_eq!(
            term_count(&RationalArg::new(0, 0), Precision::new(64)).unwrap(),
            1
        );
        let x = RationalArg::new(3, 3);
        let mut prev = 0;
        for bits in [1, 8, 64, 200, 1000, 5000] {
            let n = term_count(&x, Precision::new(bits)).unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn sin_full_table_rows() {
        let p = Precision::new(160);
        let cases = [
            ("3", "0.141120008059867222100744802808110"),
            ("3.141", "0.000592653555099468066916718249636"),
            ("3.1415926535", "0.000000000089793238462643383279382"),
        ];
        for (x, want) in cases {
            let s = sin_full(&fixed(x, 160), p).unwrap();
            assert_eq!(s.to_decimal(33), want, "sin({x})");
        }
    }

    #[test]
    fn sin_full_bounds() {
        let p = Precision::new(64);
        assert!(sin_full(&FixedReal::from_int(4), p).is_err());
        assert!(sin_full(&FixedReal::from_int(-4), p).is_err());
        assert!(sin_full(&fixed("3.99999", 64), p).is_ok());
    }

    #[test]
    fn arctan_and_machin() {
        let a = arctan_inv(5, Precision::new(64)).unwrap();
        assert_eq!(a.to_decimal(20), "0.19739555984988075837");
        assert!(arctan_inv(1, Precision::new(64)).is_err());
        let pi = pi_oracle(Precision::new(128));
        assert_eq!(pi.to_decimal(32), "3.14159265358979323846264338327950");
    }

    #[test]
    fn pi_oracle_coarse_bracket() {
        let pi = pi_oracle(Precision::with_guard(8, 0));
        assert!(pi >= fixed("3.140625", 16) && pi < fixed("3.1484375", 16));
        assert_eq!(pi.scale(), 8);
    }
}
