//! The self-correcting step `α' = α + sin α` and the precision ladder built
//! on it.
//!
//! If `|π − α| < ε < 1` then `|π − α'| < ε³/6`, and `α < π` implies
//! `α < α' < π`. The ladder starts at `α₀ = 3` and runs step `k` at
//! `min(3^k, n)` bits plus guard, so early steps cost next to nothing.
//!
//! The error bound is tracked rigorously as
//! `ε_k = (ε_{k−1} + t_k)³/6 + 2^−(w_k − 2)` where `t_k` is the truncation
//! applied to the step input and `w_k` the working width, starting from
//! `ε₀ = 0.15 > π − 3`.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Num, One, Signed};

use crate::error::{Error, Result};
use crate::mpfix::{FixedReal, Precision};
use crate::series::{pi_oracle, sin_full};

/// How much of the previous approximation feeds the next step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TruncationPolicy {
    /// Keep every bit (the way a non-self-correcting iteration must).
    Full,
    /// Keep about a third of the next target plus guard bits.
    #[default]
    Third,
}

impl FromStr for TruncationPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(TruncationPolicy::Full),
            "third" => Ok(TruncationPolicy::Third),
            other => Err(Error::Parse(format!("unknown truncation policy {other:?}"))),
        }
    }
}

impl std::fmt::Display for TruncationPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TruncationPolicy::Full => "full",
            TruncationPolicy::Third => "third",
        })
    }
}

/// One rung of the ladder.
#[derive(Clone, Debug)]
pub struct LadderStep {
    pub k: u32,
    pub precision: Precision,
    /// The (possibly truncated) approximation the step started from.
    pub alpha_in: FixedReal,
    pub alpha_out: FixedReal,
    /// Rigorous upper bound on `π − alpha_out`.
    pub eps_bound: FixedReal,
    pub wall_time: Duration,
}

impl LadderStep {
    /// Bits guaranteed by `eps_bound`.
    pub fn proven_bits(&self) -> u64 {
        accuracy_bits(&self.eps_bound)
    }
}

/// Result of a ladder run.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub alpha: FixedReal,
    /// Upper bound on `π − alpha`.
    pub eps_bound: FixedReal,
    pub steps: Vec<LadderStep>,
}

impl Ladder {
    pub fn proven_bits(&self) -> u64 {
        accuracy_bits(&self.eps_bound)
    }

    /// Checkpoint of the final approximation.
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            alpha: self.alpha.clone(),
            proven_bits: self.proven_bits().max(1),
            k: self.steps.last().map_or(0, |s| s.k),
            format_version: Checkpoint::FORMAT_VERSION,
        }
    }

    /// Trace as CSV: `k,bits,eps_bound_log2,wall_ms,alpha_prefix`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("k,bits,eps_bound_log2,wall_ms,alpha_prefix\n");
        for s in &self.steps {
            writeln!(
                out,
                "{},{},{:.3},{:.3},{}",
                s.k,
                s.precision.bits(),
                s.eps_bound.log2_abs(),
                s.wall_time.as_secs_f64() * 1e3,
                s.alpha_out.to_decimal(20)
            )
            .unwrap();
        }
        out
    }
}

/// Largest `b` with `eps < 2^-b` guaranteed, from the bit length alone.
pub fn accuracy_bits(eps: &FixedReal) -> u64 {
    if !eps.is_positive() {
        return u64::MAX;
    }
    eps.scale().saturating_sub(eps.mantissa().bits())
}

/// `ε = 0.15`, rounded up to 16 bits; a safe bound on `π − 3`.
fn initial_eps() -> FixedReal {
    FixedReal::new(9831, 16)
}

/// `x³/6 + 2^-(w-2)`, rounded up, for `x >= 0`.
fn next_eps(x: &FixedReal, working: u64) -> FixedReal {
    // Enough room to resolve x³ at the size it will have.
    let scale = working + 8;
    let ulp = FixedReal::pow2_neg(scale);
    let sq = &x.square_at(scale) + &ulp;
    let cube = &sq.mul_at(x, scale) + &ulp;
    let sixth = &cube.div_at(&FixedReal::from_int(6), scale).unwrap() + &ulp;
    &sixth + &FixedReal::pow2_neg(working - 2)
}

/// `α + sin α` at precision `p`.
///
/// For `|π − α| < 1` the result satisfies
/// `|π − α'| < |π − α|³/6 + 2^-(p.working() − 2)`.
pub fn correct_step(alpha: &FixedReal, p: Precision) -> Result<FixedReal> {
    let s = sin_full(alpha, p)?;
    Ok(alpha + &s)
}

/// Prepares the input for a step aimed at `next_p.bits()` bits.
///
/// `accuracy` is the number of bits the caller can vouch for. The step can
/// only reach its target if that is at least a third of it. Under
/// [`TruncationPolicy::Third`] the input is cut to `⌈bits/3⌉ + guard`
/// fractional bits; under `Full` it is returned unchanged.
pub fn truncate_for_next(
    alpha: &FixedReal,
    accuracy: u64,
    next_p: Precision,
    policy: TruncationPolicy,
) -> Result<FixedReal> {
    let need = next_p.bits().div_ceil(3);
    if accuracy < need {
        return Err(Error::InsufficientAccuracy {
            have: accuracy,
            need,
        });
    }
    Ok(match policy {
        TruncationPolicy::Full => alpha.clone(),
        TruncationPolicy::Third => {
            let keep = need + next_p.guard();
            if alpha.scale() > keep {
                alpha.truncate(keep)
            } else {
                alpha.clone()
            }
        }
    })
}

/// `⌈log₃ n⌉` for `n >= 1`.
pub fn ladder_length(n_bits: u64) -> u32 {
    let mut m = 0;
    let mut pow = 1u64;
    while pow < n_bits {
        pow = pow.saturating_mul(3);
        m += 1;
    }
    m
}

struct LadderState {
    alpha: FixedReal,
    eps: FixedReal,
    k: u32,
    steps: Vec<LadderStep>,
}

impl LadderState {
    fn proven(&self) -> u64 {
        accuracy_bits(&self.eps)
    }

    fn step(&mut self, bits: u64, policy: TruncationPolicy) -> Result<()> {
        let start = Instant::now();
        let p = Precision::new(bits);
        let input = truncate_for_next(&self.alpha, self.proven(), p, policy)?;
        // Truncation toward zero of a positive α moves it away from π.
        let cut = &self.alpha - &input;
        let eps_in = if cut.is_positive() {
            &self.eps + &FixedReal::pow2_neg(input.scale())
        } else {
            self.eps.clone()
        };
        let alpha_out = correct_step(&input, p)?;
        let eps_bound = next_eps(&eps_in, p.working());
        self.k += 1;
        self.steps.push(LadderStep {
            k: self.k,
            precision: p,
            alpha_in: input,
            alpha_out: alpha_out.clone(),
            eps_bound: eps_bound.clone(),
            wall_time: start.elapsed(),
        });
        self.alpha = alpha_out;
        self.eps = eps_bound;
        Ok(())
    }

    fn finish(self) -> Ladder {
        Ladder {
            alpha: self.alpha,
            eps_bound: self.eps,
            steps: self.steps,
        }
    }
}

/// Runs the ladder from `α₀ = 3` until `π − α < 2^-n_bits`.
///
/// Step `k` uses `min(3^k, n_bits)` bits plus the default guard. The loop
/// stops early once the running bound clears the target, so at most
/// `⌈log₃ n_bits⌉` steps are taken.
pub fn run_ladder(n_bits: u64, policy: TruncationPolicy) -> Ladder {
    assert!(n_bits >= 1, "target must be at least one bit");
    let mut state = LadderState {
        alpha: FixedReal::from_int(3),
        eps: initial_eps(),
        k: 0,
        steps: Vec::new(),
    };
    let mut pow = 1u64;
    while state.proven() < n_bits {
        pow = pow.saturating_mul(3);
        let bits = pow.min(n_bits);
        state
            .step(bits, policy)
            .expect("ladder inputs stay within the sine domain and accuracy schedule");
    }
    state.finish()
}

/// Continues from a checkpoint, tripling the certified bits per step.
///
/// The first step doubles as validation: `sin α` must be positive (so
/// `α < π`) and below `2^-proven_bits` up to rounding.
pub fn resume(cp: &Checkpoint, n_bits: u64, policy: TruncationPolicy) -> Result<Ladder> {
    cp.check_shape()?;
    let mut state = LadderState {
        alpha: cp.alpha.clone(),
        eps: FixedReal::pow2_neg(cp.proven_bits),
        k: cp.k,
        steps: Vec::new(),
    };
    if cp.proven_bits >= n_bits {
        return Ok(state.finish());
    }
    let mut first = true;
    while state.proven() < n_bits {
        let bits = state.proven().saturating_mul(3).min(n_bits);
        state.step(bits, policy)?;
        if first {
            first = false;
            let step = state.steps.last().unwrap();
            let sin = &step.alpha_out - &step.alpha_in;
            let slack = FixedReal::pow2_neg(step.precision.working() - 2);
            if !sin.is_positive() {
                return Err(Error::InvalidCheckpoint("alpha is not below pi".into()));
            }
            if sin > &FixedReal::pow2_neg(cp.proven_bits) + &slack {
                return Err(Error::InvalidCheckpoint(format!(
                    "alpha is not within 2^-{} of pi",
                    cp.proven_bits
                )));
            }
        }
    }
    Ok(state.finish())
}

/// Number of bits that makes `digits` decimals safe: `⌈digits·log₂10⌉ + 4`.
pub fn digits_to_bits(digits: usize) -> u64 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 4
}

/// The first `digits` decimals of π from the ladder, certified by the error
/// bound: both ends of `[α, α + ε]` must print the same digits, otherwise
/// the target is raised and the run repeated.
pub fn compute_digits(digits: usize, policy: TruncationPolicy) -> (String, Ladder) {
    let mut bits = digits_to_bits(digits);
    loop {
        let ladder = run_ladder(bits, policy);
        let lo = ladder.alpha.to_decimal(digits);
        let hi = (&ladder.alpha + &ladder.eps_bound).to_decimal(digits);
        if lo == hi {
            return (lo, ladder);
        }
        bits += 32;
    }
}

/// Resumed counterpart of [`compute_digits`].
pub fn resume_digits(
    cp: &Checkpoint,
    digits: usize,
    policy: TruncationPolicy,
) -> Result<(String, Ladder)> {
    let mut bits = digits_to_bits(digits);
    loop {
        let ladder = resume(cp, bits, policy)?;
        let lo = ladder.alpha.to_decimal(digits);
        let hi = (&ladder.alpha + &ladder.eps_bound).to_decimal(digits);
        if lo == hi {
            return Ok((lo, ladder));
        }
        bits += 32;
    }
}

/// A saved approximation with the number of bits it is known to be good to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub alpha: FixedReal,
    /// `π − alpha < 2^-proven_bits`.
    pub proven_bits: u64,
    pub k: u32,
    pub format_version: u32,
}

const CHECKPOINT_MAGIC: &str = "scpi-checkpoint";

impl Checkpoint {
    pub const FORMAT_VERSION: u32 = 1;

    fn check_shape(&self) -> Result<()> {
        if self.format_version != Self::FORMAT_VERSION {
            return Err(Error::InvalidCheckpoint(format!(
                "unsupported format version {}",
                self.format_version
            )));
        }
        if self.proven_bits == 0 {
            return Err(Error::InvalidCheckpoint(
                "proven_bits must be at least 1".into(),
            ));
        }
        if self.alpha < FixedReal::from_int(3) || self.alpha >= FixedReal::from_int(4) {
            return Err(Error::InvalidCheckpoint("alpha outside [3, 4)".into()));
        }
        Ok(())
    }

    /// One header line, one line of lowercase hex mantissa:
    ///
    /// ```text
    /// scpi-checkpoint format_version=1 k=5 proven_bits=243 scale=307
    /// 3243f6a8885a308d3...
    /// ```
    pub fn to_text(&self) -> String {
        let m = self.alpha.mantissa();
        let hex = if m.is_negative() {
            format!("-{}", m.magnitude().to_str_radix(16))
        } else {
            m.to_str_radix(16)
        };
        format!(
            "{CHECKPOINT_MAGIC} format_version={} k={} proven_bits={} scale={}\n{hex}\n",
            self.format_version,
            self.k,
            self.proven_bits,
            self.alpha.scale()
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidCheckpoint(msg.to_owned());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        let hex = lines.next().ok_or_else(|| bad("missing mantissa line"))?;
        if lines.any(|l| !l.is_empty()) {
            return Err(bad("trailing content"));
        }
        let mut fields = header.split(' ');
        if fields.next() != Some(CHECKPOINT_MAGIC) {
            return Err(bad("missing magic"));
        }
        let mut get = |key: &str| -> Result<u64> {
            let field = fields
                .next()
                .ok_or_else(|| bad(&format!("missing {key}")))?;
            let value = field
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| bad(&format!("expected {key}=")))?;
            value
                .parse()
                .map_err(|_| bad(&format!("bad value for {key}")))
        };
        let format_version = get("format_version")? as u32;
        let k = get("k")? as u32;
        let proven_bits = get("proven_bits")?;
        let scale = get("scale")?;
        if fields.next().is_some() {
            return Err(bad("unexpected header field"));
        }
        let valid_hex = |s: &str| {
            !s.is_empty()
                && s.bytes()
                    .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
        };
        let (neg, digits) = match hex.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, hex),
        };
        if !valid_hex(digits) {
            return Err(bad("mantissa must be lowercase hex"));
        }
        let mag = BigInt::from_str_radix(digits, 16).map_err(|_| bad("bad mantissa"))?;
        let mantissa = if neg { -mag } else { mag };
        let cp = Checkpoint {
            alpha: FixedReal::new(mantissa, scale),
            proven_bits,
            k,
            format_version,
        };
        cp.check_shape()?;
        Ok(cp)
    }
}

/// One row of the worked decimal example.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub k: u32,
    /// `α_k`, exactly the printed decimal value.
    pub alpha: FixedReal,
    /// Decimals `α_k` was truncated to (0 for `α₀ = 3`).
    pub alpha_decimals: usize,
    pub sin_alpha: FixedReal,
    /// `(π − α_k)³ / 6`, measured against the reference π.
    pub eps: FixedReal,
    /// `⌊−log₁₀ ε_k⌋`: decimals kept for `α_{k+1}`.
    pub next_decimals: usize,
}

/// The ladder with a decimal schedule: `α_{k+1}` is `α_k + sin α_k` cut to
/// `n_k = ⌊−log₁₀((π − α_k)³/6)⌋` decimals. The schedule is a posteriori
/// (it measures the error against the reference π), which is how a worked
/// example is tabulated, not how π is computed.
pub fn decimal_ladder(rows: usize, p: Precision) -> Result<Vec<TableRow>> {
    let pi = pi_oracle(p.widened(16));
    let mut alpha = FixedReal::from_int(3);
    let mut alpha_decimals = 0;
    let mut out = Vec::with_capacity(rows);
    for k in 0..rows {
        let sin_alpha = sin_full(&alpha, p)?;
        let err = &pi - &alpha;
        let eps = err
            .abs()
            .mul(&err.abs(), p)
            .mul(&err.abs(), p)
            .div(&FixedReal::from_int(6), p)?;
        if eps.is_zero() {
            return Err(Error::InsufficientAccuracy {
                have: p.working(),
                need: p.working() + 1,
            });
        }
        let next_decimals = floor_neg_log10(&eps);
        out.push(TableRow {
            k: k as u32,
            alpha: alpha.clone(),
            alpha_decimals,
            sin_alpha: sin_alpha.clone(),
            eps,
            next_decimals,
        });
        let next = (&alpha + &sin_alpha).to_decimal(next_decimals);
        alpha = FixedReal::from_decimal(&next, p)?;
        alpha_decimals = next_decimals;
    }
    Ok(out)
}

/// `⌊−log₁₀ x⌋` for `0 < x < 1`, computed exactly.
fn floor_neg_log10(x: &FixedReal) -> usize {
    // largest n with x <= 10^-n, i.e. x·10^n <= 1
    let one = BigInt::one() << (x.scale() as usize);
    let estimate = (-x.log2_abs() / std::f64::consts::LOG2_10).floor().max(0.0) as usize;
    let fits = |n: usize| x.mantissa() * num_traits::pow(BigInt::from(10), n) <= one;
    let mut n = estimate.saturating_sub(2);
    while fits(n + 1) {
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed(s: &str, bits: u64) -> FixedReal {
        FixedReal::from_decimal(s, Precision::new(bits)).unwrap()
    }

    #[test]
    fn correct_step_examples() {
        let p = Precision::new(160);
        let a1 = correct_step(&FixedReal::from_int(3), p).unwrap();
        assert_eq!(a1.to_decimal(33), "3.141120008059867222100744802808110");
        let a2 = correct_step(&fixed("3.141", 160), p).unwrap();
        assert_eq!(a2.to_decimal(33), "3.141592653555099468066916718249636");
        assert_eq!(a2.to_decimal(10), "3.1415926535");
    }

    #[test]
    fn pi_is_a_fixed_point() {
        let p = Precision::new(256);
        let pi = pi_oracle(p);
        let next = correct_step(&pi, p).unwrap();
        assert!((&next - &pi).abs() < FixedReal::pow2_neg(254));
    }

    #[test]
    fn ladder_length_values() {
        assert_eq!(ladder_length(1), 0);
        assert_eq!(ladder_length(3), 1);
        assert_eq!(ladder_length(4), 2);
        assert_eq!(ladder_length(3322), 8);
    }

    #[test]
    fn trivial_ladder() {
        let l = run_ladder(1, TruncationPolicy::Third);
        assert!(l.steps.is_empty());
        assert_eq!(l.alpha, FixedReal::from_int(3));
        assert_eq!(l.proven_bits(), 2);
    }

    #[test]
    fn truncate_for_next_rules() {
        let alpha = fixed("3.14159265358979323846", 128);
        let p = Precision::new(90);
        let t = truncate_for_next(&alpha, 40, p, TruncationPolicy::Third).unwrap();
        assert_eq!(t.scale(), 30 + 64);
        let full = truncate_for_next(&alpha, 40, p, TruncationPolicy::Full).unwrap();
        assert_eq!(full.scale(), alpha.scale());
        assert_eq!(
            truncate_for_next(&alpha, 29, p, TruncationPolicy::Third),
            Err(Error::InsufficientAccuracy { have: 29, need: 30 })
        );
        // Already narrower than the cut: untouched.
        let narrow = alpha.truncate(50);
        assert_eq!(
            truncate_for_next(&narrow, 40, p, TruncationPolicy::Third)
                .unwrap()
                .scale(),
            50
        );
    }

    #[test]
    fn checkpoint_text_round_trip() {
        let l = run_ladder(500, TruncationPolicy::Third);
        let cp = l.checkpoint();
        let text = cp.to_text();
        assert!(text.starts_with("scpi-checkpoint format_version=1 "));
        assert!(text.ends_with('\n'));
        let back = Checkpoint::parse(&text).unwrap();
        assert_eq!(back.alpha.mantissa(), cp.alpha.mantissa());
        assert_eq!(back.alpha.scale(), cp.alpha.scale());
        assert_eq!(back, cp);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn checkpoint_parse_rejects_garbage() {
        let good = run_ladder(100, TruncationPolicy::Third)
            .checkpoint()
            .to_text();
        let (header, hex) = good.split_once('\n').unwrap();
        let cases = [
            String::new(),
            header.to_owned(),
            format!(
                "{}\n{}",
                header.replace("format_version=1", "format_version=2"),
                hex
            ),
            format!("{}\n{}", header.replace("proven_bits=", "proven="), hex),
            format!("{}\n{}", header, hex.to_uppercase()),
            format!("{} extra=1\n{}", header, hex),
            format!("{}\n{}\nmore\n", header, hex.trim_end()),
            format!("{}\n{}", header.replace("scpi-checkpoint", "ckpt"), hex),
        ];
        for c in cases {
            assert!(
                matches!(Checkpoint::parse(&c), Err(Error::InvalidCheckpoint(_))),
                "accepted {c:?}"
            );
        }
    }

    #[test]
    fn resume_rejects_overclaimed_checkpoint() {
        let cp = Checkpoint {
            alpha: fixed("3.141", 64),
            proven_bits: 40,
            k: 1,
            format_version: 1,
        };
        assert!(matches!(
            resume(&cp, 200, TruncationPolicy::Third),
            Err(Error::InvalidCheckpoint(_))
        ));
        let above = Checkpoint {
            alpha: fixed("3.1416", 64),
            proven_bits: 10,
            k: 1,
            format_version: 1,
        };
        assert!(matches!(
            resume(&above, 200, TruncationPolicy::Third),
            Err(Error::InvalidCheckpoint(_))
        ));
    }

    #[test]
    fn resume_at_target_returns_immediately() {
        let l = run_ladder(300, TruncationPolicy::Third);
        let cp = l.checkpoint();
        let r = resume(&cp, cp.proven_bits, TruncationPolicy::Third).unwrap();
        assert!(r.steps.is_empty());
        assert_eq!(r.alpha, cp.alpha);
    }

    #[test]
    fn floor_neg_log10_exact() {
        assert_eq!(floor_neg_log10(&fixed("0.000473", 64)), 3);
        assert_eq!(floor_neg_log10(&fixed("0.5", 64)), 0);
        assert_eq!(floor_neg_log10(&FixedReal::new(1, 10)), 3);
        assert_eq!(floor_neg_log10(&FixedReal::new(1, 4)), 1);
    }

    #[test]
    fn policy_parse() {
        assert_eq!(
            "full".parse::<TruncationPolicy>().unwrap(),
            TruncationPolicy::Full
        );
        assert_eq!(
            "third".parse::<TruncationPolicy>().unwrap(),
            TruncationPolicy::Third
        );
        assert!("half".parse::<TruncationPolicy>().is_err());
        assert_eq!(TruncationPolicy::default().to_string(), "third");
    }
}
